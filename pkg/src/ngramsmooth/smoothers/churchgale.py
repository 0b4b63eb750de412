"""Church-Gale smoothing: bucketed Good-Turing over joint-probability keys.

Bigrams are bucketed by p(h)p(w) computed from a Good-Turing-smoothed
unigram distribution; each bucket is treated as its own distribution and
Good-Turing corrected within it (with Gale-Sampson smoothing of the bucket's
count-of-counts), then conditionals are renormalized per history.  Buckets
come from lumping c_mb geometric minibuckets by wall-of-bricks so at least
c_min nonzero n-grams land in each.  Degenerate buckets hand zero counts a
configured total probability: p_n1_0 when the bucket has no one-counts,
p_n1_N when it has nothing else.

The trigram variant buckets by p(bigram) * p(unigram) where the bigram
probability comes from the bigram variant's corrected counts; zero-count
bookkeeping loops over the distinct (bigram bucket, bigram count) x
(unigram count) values rather than over all |V|^3 trigrams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ngramsmooth.buckets import bucket_wall_of_bricks
from ngramsmooth.corpus import BOS_ID, EOS_ID, Vocabulary
from ngramsmooth.counts import CountTable
from ngramsmooth.errors import InvalidParameterError
from ngramsmooth.goodturing import sgt_corrected_counts
from ngramsmooth.smoothers.base import SmoothedModel

Ngram = tuple[int, ...]


@dataclass
class _MiniBuckets:
    """Geometric key bins plus the wall-of-bricks merge into final buckets."""

    kmin: float
    kmax: float
    c_mb: int
    upper: np.ndarray  # inner boundaries over minibucket index space

    def mb_index(self, key):
        key = np.asarray(key, dtype=np.float64)
        if self.kmax <= self.kmin:
            idx = np.zeros(key.shape, dtype=np.int64)
        else:
            span = math.log(self.kmax) - math.log(self.kmin)
            idx = np.floor((np.log(key) - math.log(self.kmin)) / span * self.c_mb).astype(np.int64)
            idx = np.clip(idx, 0, self.c_mb - 1)
        return idx if idx.shape else int(idx)

    def bucket(self, key):
        return np.searchsorted(self.upper, self.mb_index(key), side="left")

    @property
    def n_buckets(self) -> int:
        return len(self.upper) + 1


@dataclass
class _BucketGt:
    """Per-bucket corrected counts and the zero-count share."""

    corrected: list[dict[int, float]]
    zero_each: np.ndarray
    q0: np.ndarray
    totals: np.ndarray  # total n-grams (seen + unseen) per bucket
    n_r: list[dict[int, int]] = field(default_factory=list)


def _fit_buckets(minib: _MiniBuckets, nbr: list[dict[int, int]], totals: np.ndarray, p_n1_0: float, p_n1_N: float) -> _BucketGt:
    corrected = []
    zero_each = np.zeros(minib.n_buckets)
    q0s = np.zeros(minib.n_buckets)
    for b in range(minib.n_buckets):
        seen = sum(nbr[b].values())
        n_zero = max(int(round(totals[b])) - seen, 0)
        corr, zc, q0 = sgt_corrected_counts(nbr[b], n_zero=n_zero, p_n1_0=p_n1_0, p_n1_N=p_n1_N)
        corrected.append(corr)
        zero_each[b] = zc
        q0s[b] = q0
    return _BucketGt(corrected=corrected, zero_each=zero_each, q0=q0s, totals=totals, n_r=nbr)


def _geometric_minibuckets(kmin: float, kmax: float, c_mb: int, population: dict[int, int], c_min: float | None) -> _MiniBuckets:
    bmap = bucket_wall_of_bricks(population, c_min, c_top=max(c_mb - 1, 1), kind="cg-product")
    return _MiniBuckets(kmin=kmin, kmax=kmax, c_mb=c_mb, upper=bmap.upper)


def minibuckets_per_decade(kmin: float, kmax: float, per_decade: int = 3) -> int:
    """The classic preset: a fixed number of buckets in each factor of 10."""
    decades = max(math.log10(kmax) - math.log10(kmin), 1e-9)
    return max(int(math.ceil(per_decade * decades)), 1)


class ChurchGaleBigram(SmoothedModel):
    method = "church-gale"

    def __init__(self, vocab, table, p_hist, p_uni, minib, buckets: _BucketGt, norms, base_norm, counts2, build_params=None):
        super().__init__(vocab, table, 2)
        self.build_params = dict(build_params or {})
        self.p_hist = p_hist
        self.p_uni = p_uni
        self.minib = minib
        self.buckets = buckets
        self.norms = norms            # seen history token -> normalization
        self.base_norm = base_norm    # history token -> all-zero-row normalization
        self.counts2 = counts2

    def _corrected(self, x: int, w: int) -> tuple[float, int]:
        key = self.p_hist[x] * self.p_uni[w]
        b = int(self.minib.bucket(key))
        r = self.counts2.get((x, w), 0)
        if r > 0:
            return self.buckets.corrected[b][r], b
        return float(self.buckets.zero_each[b]), b

    def prob(self, history, word: int) -> float:
        h = self._check_query(history, word)
        x = h[0]
        if x == EOS_ID:
            raise InvalidParameterError("eos cannot occur in a history")
        cstar, _ = self._corrected(x, word)
        return cstar / self.norms.get(x, self.base_norm[x])

    def row(self, history) -> np.ndarray:
        x = int(history[0])
        keys = self.p_hist[x] * self.p_uni
        keys[0] = self.minib.kmin  # bos slot: any valid key; zeroed below
        b = self.minib.bucket(keys)
        out = self.buckets.zero_each[b]
        hrow = self.table.row((x,))
        if hrow is not None:
            vals = [self.buckets.corrected[int(b[w])][int(c)] for w, c in zip(hrow.ids, hrow.counts)]
            out[hrow.ids] = vals
        out[0] = 0.0
        return out / self.norms.get(x, self.base_norm[x])

    def params(self) -> dict:
        return dict(self.build_params)

    # corrected count of a bigram under the *joint* bigram distribution,
    # needed by the trigram variant's bucketing key
    def joint_corrected(self, x: int, w: int) -> float:
        return self._corrected(x, w)[0]


def _unigram_state(table: CountTable, vocab: Vocabulary, p_n1_0: float, p_n1_N: float):
    urow = table.row(())
    if urow is None or urow.total == 0:
        raise InvalidParameterError("cannot build Church-Gale on an empty corpus")
    total1 = urow.total
    c1 = np.zeros(vocab.size, dtype=np.int64)
    c1[urow.ids] = urow.counts
    n_r: dict[int, int] = {}
    for c in urow.counts.tolist():
        n_r[c] = n_r.get(c, 0) + 1
    n_zero = vocab.n_events - urow.distinct
    corr, zc, _ = sgt_corrected_counts(n_r, n_zero=n_zero, p_n1_0=p_n1_0, p_n1_N=p_n1_N)
    u_count = np.zeros(vocab.size, dtype=np.float64)
    for w in range(1, vocab.size):
        c = int(c1[w])
        u_count[w] = corr[c] if c > 0 else zc
    p_uni = u_count / total1
    # bos never occurs as an event; its key probability is its raw history count
    bos_row = table.row((BOS_ID,))
    bos_count = bos_row.total if bos_row is not None else max(table.sentences, 1)
    p_hist = p_uni.copy()
    p_hist[BOS_ID] = bos_count / total1
    return c1, p_uni, p_hist, u_count, total1


def _group_by_value(values: np.ndarray, ids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Distinct key probabilities and their member counts over the given ids."""
    vals = values[ids]
    uniq, counts = np.unique(vals, return_counts=True)
    return uniq, counts


def build_church_gale(
    table: CountTable,
    vocab: Vocabulary,
    c_mb: int = 1000,
    c_min: float | None = 100,
    p_n1_0: float = 0.01,
    p_n1_N: float = 0.5,
) -> ChurchGaleBigram:
    if not 0.0 < p_n1_0 < 1.0 or not 0.0 < p_n1_N < 1.0:
        raise InvalidParameterError("p_n1_0 and p_n1_N must lie in (0, 1)")
    if c_mb < 1:
        raise InvalidParameterError(f"c_mb must be >= 1, got {c_mb}")
    counts2 = table.counts[1]
    if not counts2:
        raise InvalidParameterError("no bigrams to smooth")
    c1, p_uni, p_hist, _, _ = _unigram_state(table, vocab, p_n1_0, p_n1_N)

    hist_ids = np.array([t for t in range(vocab.size) if t != EOS_ID], dtype=np.int64)
    event_ids = vocab.event_ids()
    kmin = float(p_hist[hist_ids].min() * p_uni[event_ids].min())
    kmax = float(p_hist[hist_ids].max() * p_uni[event_ids].max())

    span = _MiniBuckets(kmin=kmin, kmax=kmax, c_mb=c_mb, upper=np.empty(0))
    mb_pop: dict[int, int] = {}
    for (x, w) in counts2:
        mb = int(span.mb_index(p_hist[x] * p_uni[w]))
        mb_pop[mb] = mb_pop.get(mb, 0) + 1
    minib = _geometric_minibuckets(kmin, kmax, c_mb, mb_pop, c_min)

    # bucket totals over the whole pair space, grouped by distinct key values
    hvals, hcounts = _group_by_value(p_hist, hist_ids)
    wvals, wcounts = _group_by_value(p_uni, event_ids)
    totals = np.zeros(minib.n_buckets, dtype=np.float64)
    for hv, hc in zip(hvals, hcounts):
        b = minib.bucket(hv * wvals)
        np.add.at(totals, b, hc * wcounts)

    nbr: list[dict[int, int]] = [dict() for _ in range(minib.n_buckets)]
    for (x, w), c in counts2.items():
        b = int(minib.bucket(p_hist[x] * p_uni[w]))
        nbr[b][c] = nbr[b].get(c, 0) + 1
    buckets = _fit_buckets(minib, nbr, totals, p_n1_0, p_n1_N)

    # per-history normalization: all-zero baseline by distinct key value,
    # then adjust for the observed bigrams
    base_by_val: dict[float, float] = {}
    for hv in hvals:
        b = minib.bucket(hv * wvals)
        base_by_val[float(hv)] = float((buckets.zero_each[b] * wcounts).sum())
    base_norm = {int(x): base_by_val[float(p_hist[x])] for x in hist_ids}
    norms: dict[int, float] = {}
    for (x, w), c in counts2.items():
        b = int(minib.bucket(p_hist[x] * p_uni[w]))
        delta = buckets.corrected[b][c] - buckets.zero_each[b]
        norms[x] = norms.get(x, base_norm[x]) + delta

    build_params = {"c_mb": c_mb, "c_min": c_min if c_min is not None else "inf", "p_n1_0": p_n1_0, "p_n1_N": p_n1_N}
    return ChurchGaleBigram(vocab, table, p_hist, p_uni, minib, buckets, norms, base_norm, counts2, build_params)


class ChurchGaleTrigram(SmoothedModel):
    method = "church-gale"

    def __init__(self, vocab, table, bigram: ChurchGaleBigram, p_uni, minib, buckets, ctx_p2, ctx_group, group_base, norms, counts3, total2):
        super().__init__(vocab, table, 3)
        self.build_params = dict(bigram.build_params)
        self.bigram = bigram
        self.p_uni = p_uni
        self.minib = minib
        self.buckets = buckets
        self.ctx_p2 = ctx_p2        # seen context -> its joint bigram probability
        self.ctx_group = ctx_group  # seen context -> group id
        self.group_base = group_base
        self.norms = norms
        self.counts3 = counts3
        self.total2 = total2

    def _context_p2_group(self, ctx: Ngram) -> tuple[float, tuple[int, int]]:
        p2 = self.ctx_p2.get(ctx)
        if p2 is not None:
            return p2, self.ctx_group[ctx]
        x, y = ctx
        if y == EOS_ID or x == EOS_ID or y == BOS_ID:
            raise InvalidParameterError(f"invalid trigram context {ctx}")
        b2 = int(self.bigram.minib.bucket(self.bigram.p_hist[x] * self.p_uni[y]))
        return float(self.bigram.buckets.zero_each[b2]) / self.total2, (b2, 0)

    def _norm(self, ctx: Ngram, group: tuple[int, int]) -> float:
        norm = self.norms.get(ctx)
        if norm is not None:
            return norm
        # unseen context: every continuation is a zero-count trigram, so the
        # normalization is its group's all-zero baseline
        return self.group_base[group]

    def prob(self, history, word: int) -> float:
        ctx = self._check_query(history, word)
        p2, group = self._context_p2_group(ctx)
        key = p2 * self.p_uni[word]
        b = int(self.minib.bucket(key))
        r = self.counts3.get(ctx + (word,), 0)
        cstar = self.buckets.corrected[b][r] if r > 0 else float(self.buckets.zero_each[b])
        return cstar / self._norm(ctx, group)

    def row(self, history) -> np.ndarray:
        ctx = tuple(int(t) for t in history)
        p2, group = self._context_p2_group(ctx)
        keys = p2 * self.p_uni
        keys[0] = self.minib.kmin
        b = self.minib.bucket(keys)
        out = self.buckets.zero_each[b]
        hrow = self.table.row(ctx)
        if hrow is not None:
            vals = [self.buckets.corrected[int(b[w])][int(c)] for w, c in zip(hrow.ids, hrow.counts)]
            out[hrow.ids] = vals
        out[0] = 0.0
        return out / self._norm(ctx, group)

    def params(self) -> dict:
        return dict(self.build_params)


def build_church_gale_trigram(
    table: CountTable,
    vocab: Vocabulary,
    c_mb: int = 1000,
    c_min: float | None = 100,
    p_n1_0: float = 0.01,
    p_n1_N: float = 0.5,
) -> ChurchGaleTrigram:
    if table.order < 3:
        raise InvalidParameterError("trigram Church-Gale needs order-3 counts")
    bigram = build_church_gale(table, vocab, c_mb=c_mb, c_min=c_min, p_n1_0=p_n1_0, p_n1_N=p_n1_N)
    counts2 = table.counts[1]
    counts3 = table.counts[2]
    total2 = sum(counts2.values())
    p_uni = bigram.p_uni
    event_ids = vocab.event_ids()
    uvals, ucounts = _group_by_value(p_uni, event_ids)

    # context-pair groups: a group is a distinct joint bigram probability,
    # i.e. a (bigram bucket, bigram count) pair, plus the (bos,bos) pseudo
    # group and the per-bucket zero-count groups
    bos_row = table.row((BOS_ID, BOS_ID))
    pseudo_count = bos_row.total if bos_row is not None else 1

    seen_ctx_groups: dict[tuple[int, int], int] = {}
    ctx_p2: dict[Ngram, float] = {}
    ctx_group: dict[Ngram, tuple[int, int]] = {}
    for (x, y), c in counts2.items():
        if y == EOS_ID:
            continue
        b2 = int(bigram.minib.bucket(bigram.p_hist[x] * p_uni[y]))
        g = (b2, c)
        seen_ctx_groups[g] = seen_ctx_groups.get(g, 0) + 1
        ctx_p2[(x, y)] = bigram.buckets.corrected[b2][c] / total2
        ctx_group[(x, y)] = g
    ctx_p2[(BOS_ID, BOS_ID)] = pseudo_count / total2
    ctx_group[(BOS_ID, BOS_ID)] = (-1, pseudo_count)

    # zero-count context pairs per bigram bucket: totals over the context-pair
    # space (history-token x non-boundary token) minus the seen ones
    hvals, hcounts = _group_by_value(bigram.p_hist, np.array([t for t in range(vocab.size) if t != EOS_ID]))
    inner_ids = np.array([t for t in range(vocab.size) if t not in (BOS_ID, EOS_ID)], dtype=np.int64)
    ivals, icounts = _group_by_value(p_uni, inner_ids)
    ctx_totals = np.zeros(bigram.minib.n_buckets, dtype=np.float64)
    for hv, hc in zip(hvals, hcounts):
        b = bigram.minib.bucket(hv * ivals)
        np.add.at(ctx_totals, b, hc * icounts)
    seen_per_bucket = np.zeros(bigram.minib.n_buckets, dtype=np.float64)
    for (b2, _), m in seen_ctx_groups.items():
        seen_per_bucket[b2] += m

    # group list: (group id, population, p2 value)
    groups: list[tuple[tuple[int, int], float, float]] = []
    for (b2, r2), m in sorted(seen_ctx_groups.items()):
        groups.append(((b2, r2), float(m), bigram.buckets.corrected[b2][r2] / total2))
    for b2 in range(bigram.minib.n_buckets):
        zero_m = ctx_totals[b2] - seen_per_bucket[b2]
        if zero_m > 0:
            groups.append(((b2, 0), float(zero_m), float(bigram.buckets.zero_each[b2]) / total2))
    groups.append(((-1, pseudo_count), 1.0, pseudo_count / total2))

    p2_min = min(g[2] for g in groups)
    p2_max = max(g[2] for g in groups)
    kmin = float(p2_min * uvals.min())
    kmax = float(p2_max * uvals.max())

    span = _MiniBuckets(kmin=kmin, kmax=kmax, c_mb=c_mb, upper=np.empty(0))
    mb_pop: dict[int, int] = {}
    for (x, y, w), c in counts3.items():
        mb = int(span.mb_index(ctx_p2[(x, y)] * p_uni[w]))
        mb_pop[mb] = mb_pop.get(mb, 0) + 1
    minib = _geometric_minibuckets(kmin, kmax, c_mb, mb_pop, c_min)

    totals = np.zeros(minib.n_buckets, dtype=np.float64)
    group_base: dict[tuple[int, int], float] = {}
    for gid, m, p2 in groups:
        b = minib.bucket(p2 * uvals)
        np.add.at(totals, b, m * ucounts)
        group_base[gid] = 0.0  # filled after bucket fitting

    nbr: list[dict[int, int]] = [dict() for _ in range(minib.n_buckets)]
    for (x, y, w), c in counts3.items():
        b = int(minib.bucket(ctx_p2[(x, y)] * p_uni[w]))
        nbr[b][c] = nbr[b].get(c, 0) + 1
    buckets = _fit_buckets(minib, nbr, totals, p_n1_0, p_n1_N)

    for gid, _, p2 in groups:
        b = minib.bucket(p2 * uvals)
        group_base[gid] = float((buckets.zero_each[b] * ucounts).sum())

    norms: dict[Ngram, float] = {}
    for (x, y, w), c in counts3.items():
        ctx = (x, y)
        b = int(minib.bucket(ctx_p2[ctx] * p_uni[w]))
        delta = buckets.corrected[b][c] - buckets.zero_each[b]
        norms[ctx] = norms.get(ctx, group_base[ctx_group[ctx]]) + delta

    return ChurchGaleTrigram(
        vocab, table, bigram, p_uni, minib, buckets, ctx_p2, ctx_group, group_base, norms, counts3, total2
    )
