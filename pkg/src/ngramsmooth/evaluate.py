"""Cross-entropy scoring and the count-by-count diagnostic suite.

Per-count analyses index test events by their n-gram's training count r.
Events whose history has a total of zero training counts are excluded from
the per-count rows and reported as a separate zero-history band, since a
corrected count is meaningless where the normalizing total is itself zero.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ngramsmooth.corpus import EncodedSentence
from ngramsmooth.counts import CountTable
from ngramsmooth.errors import InfiniteEntropyError, InvalidParameterError
from ngramsmooth.smoothers.base import SmoothedModel
from ngramsmooth.smoothers.interp import events_from_sentences

TAIL_R = 40  # diagnostic rows cover r < TAIL_R plus one pooled tail row


def sentence_log2prob(model: SmoothedModel, sent: EncodedSentence) -> float:
    total = 0.0
    seq = sent.ids.tolist()
    pad = sent.order - 1
    for i in range(pad, len(seq)):
        ctx = tuple(seq[i - model.order + 1 : i])
        p = model.prob(ctx, seq[i])
        if p <= 0.0:
            raise InfiniteEntropyError(ctx + (seq[i],))
        total += math.log2(p)
    return total


def cross_entropy(
    model: SmoothedModel,
    sentences: list[EncodedSentence],
    count_eos: bool = True,
    threads: int = 1,
) -> float:
    """Bits per word: (1/N_T) * sum of -log2 p(sentence).

    N_T counts content tokens plus one eos prediction per sentence (bos never);
    count_eos=False drops the eos predictions from the denominator only.
    """
    if not sentences:
        raise InvalidParameterError("empty test data")
    n_tokens = sum(s.n_predicted - (0 if count_eos else 1) for s in sentences)
    if n_tokens <= 0:
        raise InvalidParameterError("no test tokens to score")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda s: sentence_log2prob(model, s), sentences))
        total = math.fsum(parts)
    else:
        total = math.fsum(sentence_log2prob(model, s) for s in sentences)
    return -total / n_tokens


def perplexity(h_bits: float) -> float:
    return 2.0**h_bits


@dataclass
class CountRow:
    r: int            # training count; the tail row pools r >= TAIL_R
    pooled: bool
    actual: int       # test occurrences of n-grams with this training count
    ml_expected: float
    inv_total: float  # sum over positions/words of 1/N(h); r0* = actual / inv_total
    model_expected: float | None = None

    @property
    def label(self) -> str:
        return f"{self.r}+" if self.pooled else str(self.r)

    @property
    def ideal_rstar(self) -> float | None:
        if self.inv_total <= 0.0:
            return None
        return self.actual / self.inv_total

    @property
    def model_avg_rstar(self) -> float | None:
        if self.model_expected is None or self.inv_total <= 0.0:
            return None
        return self.model_expected / self.inv_total

    @property
    def expected_over_actual(self) -> float | None:
        if self.model_expected is None or self.actual == 0:
            return None
        return self.model_expected / self.actual


def _iter_positions(table: CountTable, test: list[EncodedSentence], order: int):
    """(history tuple, word, train count of the event, history row) per test event."""
    for ctx, w in events_from_sentences(test, order):
        row = table.row(ctx)
        c = table.count(ctx + (w,)) if row is not None else 0
        yield ctx, w, c, row


def _class_of(r: int, r_max: int) -> int:
    return min(r, r_max)


def ideal_corrected_counts(
    table: CountTable,
    test: list[EncodedSentence],
    order: int,
    n_event_space: int,
    r_max: int = TAIL_R,
) -> DiagnosticTables:
    """Model-free desired average corrected count per training count.

    r0*(r) = r x (actual test occurrences of count-r n-grams) / (occurrences
    the maximum-likelihood model expects); the final row pools r >= r_max.
    Histories with zero total training count are excluded and tallied apart.
    """
    return count_diagnostics(table, test, order, n_event_space, model=None, r_max=r_max)


@dataclass
class DiagnosticTables:
    order: int
    rows: list[CountRow]
    zero_history_events: int
    n_events: int

    def row(self, r: int) -> CountRow:
        return self.rows[min(r, len(self.rows) - 1)]


def count_diagnostics(
    table: CountTable,
    test: list[EncodedSentence],
    order: int,
    n_event_space: int,
    model: SmoothedModel | None = None,
    r_max: int = TAIL_R,
) -> DiagnosticTables:
    """One pass computing actual/expected occurrences per training-count class.

    With a model, also accumulates the model's expected occurrences (its mass
    on each count class per test position), giving expected-over-actual
    ratios and model average corrected counts.
    """
    actual = np.zeros(r_max + 1, dtype=np.int64)
    inv_total = np.zeros(r_max + 1, dtype=np.float64)
    ml_expected = np.zeros(r_max + 1, dtype=np.float64)
    model_expected = np.zeros(r_max + 1, dtype=np.float64) if model is not None else None
    zero_history = 0
    n_ev = 0
    row_cache: dict = {}
    for ctx, w, c, row in _iter_positions(table, test, order):
        n_ev += 1
        if row is None or row.total == 0:
            zero_history += 1
            continue
        actual[_class_of(c, r_max)] += 1
        classes = np.minimum(row.counts, r_max)
        np.add.at(inv_total, classes, 1.0 / row.total)
        np.add.at(ml_expected, classes, row.counts / row.total)
        inv_total[0] += (n_event_space - row.distinct) / row.total
        if model is not None:
            cached = row_cache.get(ctx)
            if cached is None:
                probs = model.row(ctx)
                cls_mass = np.zeros(r_max + 1, dtype=np.float64)
                np.add.at(cls_mass, classes, probs[row.ids])
                cls_mass[0] += probs[1:].sum() - probs[row.ids].sum()
                cached = cls_mass
                row_cache[ctx] = cached
            model_expected += cached
    rows = []
    for r in range(r_max + 1):
        rows.append(
            CountRow(
                r=r,
                pooled=(r == r_max),
                actual=int(actual[r]),
                ml_expected=float(ml_expected[r]),
                inv_total=float(inv_total[r]),
                model_expected=float(model_expected[r]) if model_expected is not None else None,
            )
        )
    return DiagnosticTables(order=order, rows=rows, zero_history_events=zero_history, n_events=n_ev)


def expected_over_actual(
    model: SmoothedModel,
    table: CountTable,
    test: list[EncodedSentence],
    r_max: int = TAIL_R,
) -> DiagnosticTables:
    return count_diagnostics(table, test, model.order, model.vocab.n_events, model=model, r_max=r_max)


def bang_for_the_buck(
    models: list[SmoothedModel],
    table: CountTable,
    test: list[EncodedSentence],
    r: int,
    r_max: int = TAIL_R,
) -> dict[str, float]:
    """Entropy on count-r test events after rescaling every model's mass on
    that class to the ideal average corrected count; lower is better."""
    if not models:
        raise InvalidParameterError("need at least one model")
    order = models[0].order
    n_tokens = sum(s.n_predicted for s in test)
    scores: dict[str, float] = {}
    for m in models:
        diag = count_diagnostics(table, test, order, m.vocab.n_events, model=m, r_max=r_max)
        row = diag.rows[min(r, r_max)]
        if row.actual == 0 or not row.model_expected:
            scores[_model_key(m, scores)] = math.nan
            continue
        scale = row.actual / row.model_expected  # normalizes avg corrected count to the ideal
        bits = 0.0
        for ctx, w, c, hrow in _iter_positions(table, test, order):
            if hrow is None or hrow.total == 0:
                continue
            if _class_of(c, r_max) != min(r, r_max):
                continue
            p = m.prob(ctx, w)
            if p <= 0.0:
                raise InfiniteEntropyError(ctx + (w,))
            bits += -math.log2(p * scale)
        scores[_model_key(m, scores)] = bits / n_tokens
    return scores


def _model_key(model: SmoothedModel, existing: dict) -> str:
    key = model.method
    while key in existing:
        key += "'"
    return key


@dataclass
class EntropyFractions:
    thresholds: list[int]
    cumulative: list[float]     # fraction of total entropy from events with r <= threshold
    zero_history: float         # the band above the top line
    total_bits: float
    n_tokens: int

    def check_sum(self) -> float:
        return self.cumulative[-1] + self.zero_history


def entropy_fraction_by_count(
    model: SmoothedModel,
    table: CountTable,
    test: list[EncodedSentence],
    thresholds: tuple[int, ...] = (0, 1, 2, 3, 5, 10, 20, TAIL_R),
) -> EntropyFractions:
    """Cumulative fraction of test entropy from events with training count <= t."""
    thresholds = sorted(set(thresholds))
    bits_by_class: dict[int, float] = {}
    zero_history_bits = 0.0
    total = 0.0
    n_tokens = 0
    for ctx, w, c, row in _iter_positions(table, test, model.order):
        n_tokens += 1
        p = model.prob(ctx, w)
        if p <= 0.0:
            raise InfiniteEntropyError(ctx + (w,))
        bits = -math.log2(p)
        total += bits
        if row is None or row.total == 0:
            zero_history_bits += bits
        else:
            bits_by_class[c] = bits_by_class.get(c, 0.0) + bits
    cumulative = []
    for t in thresholds:
        cumulative.append(sum(b for r, b in bits_by_class.items() if r <= t) / total)
    cumulative.append(sum(bits_by_class.values()) / total)  # everything with a seen history
    thresholds = list(thresholds) + [max(max(bits_by_class, default=0), thresholds[-1])]
    return EntropyFractions(
        thresholds=thresholds,
        cumulative=cumulative,
        zero_history=zero_history_bits / total,
        total_bits=total,
        n_tokens=n_tokens,
    )


@dataclass
class GtZeroRow:
    n1: int
    n_lo: float
    n_hi: float
    histories: int
    opportunities: int
    zero_hits: int
    desired_mass: float   # corrected counts the data wants on zero counts
    predicted: float      # the Good-Turing horizontal line: n1


def gt_zero_count_study(
    table: CountTable,
    test: list[EncodedSentence],
    order: int,
    n1_values: tuple[int, ...] = (1, 2, 3, 5),
    n_bins: int = 8,
) -> list[GtZeroRow]:
    """Desired total zero-count corrected counts per (n1, N) band, against the
    Good-Turing prediction of n1."""
    groups: dict[tuple[int, int], list[float]] = {}
    stats: dict[tuple[int, int], list] = {}
    totals = [row.total for row in table.rows[order - 1].values()]
    if not totals:
        raise InvalidParameterError("no histories at this order")
    n_max = max(totals)
    edges = np.unique(np.geomspace(1, max(n_max, 2), n_bins + 1).round().astype(int))

    def bin_of(total: int) -> int:
        return int(np.searchsorted(edges, total, side="right") - 1)

    seen_histories: dict[tuple[int, int], set] = {}
    for ctx, w, c, row in _iter_positions(table, test, order):
        if row is None or row.total == 0:
            continue
        if row.ones not in n1_values:
            continue
        key = (row.ones, bin_of(row.total))
        rec = stats.setdefault(key, [0, 0, 0.0])
        rec[0] += 1                    # opportunities
        rec[1] += 1 if c == 0 else 0   # zero-count hits
        rec[2] += 1.0 / row.total
        seen_histories.setdefault(key, set()).add(ctx)
    rows = []
    for (n1, b), (opp, hits, inv_n) in sorted(stats.items()):
        if inv_n <= 0:
            continue
        desired = hits / inv_n
        lo = float(edges[b])
        hi = float(edges[b + 1]) if b + 1 < len(edges) else float(n_max)
        rows.append(
            GtZeroRow(
                n1=n1,
                n_lo=lo,
                n_hi=hi,
                histories=len(seen_histories[(n1, b)]),
                opportunities=opp,
                zero_hits=hits,
                desired_mass=desired,
                predicted=float(n1),
            )
        )
    return rows


@dataclass
class EvalReport:
    method: str
    order: int
    h_bits: float
    n_tokens: int
    count_eos: bool = True
    diagnostics: DiagnosticTables | None = None
    fractions: EntropyFractions | None = None
    gt_zero: list[GtZeroRow] = field(default_factory=list)

    @property
    def perplexity(self) -> float:
        return perplexity(self.h_bits)

    def to_text(self) -> str:
        lines = [
            f"method          {self.method}",
            f"order           {self.order}",
            f"tokens          {self.n_tokens}",
            f"cross-entropy   {self.h_bits:.6f} bits/word",
            f"perplexity      {self.perplexity:.4f}",
        ]
        if self.diagnostics is not None:
            lines.append("")
            lines.append("count  actual  ideal-r*  model-r*  expected/actual")
            for row in self.diagnostics.rows:
                ideal = f"{row.ideal_rstar:.4f}" if row.ideal_rstar is not None else "-"
                mstar = f"{row.model_avg_rstar:.4f}" if row.model_avg_rstar is not None else "-"
                ratio = f"{row.expected_over_actual:.4f}" if row.expected_over_actual is not None else "-"
                lines.append(f"{row.label:>5}  {row.actual:>6}  {ideal:>8}  {mstar:>8}  {ratio}")
            lines.append(f"zero-history events: {self.diagnostics.zero_history_events}")
        if self.fractions is not None:
            lines.append("")
            lines.append("entropy fraction by count class (cumulative)")
            for t, frac in zip(self.fractions.thresholds, self.fractions.cumulative):
                lines.append(f"  r <= {t:>4}: {frac:.4f}")
            lines.append(f"  zero-history band: {self.fractions.zero_history:.4f}")
        if self.gt_zero:
            lines.append("")
            lines.append("zero-count mass study: n1, N range, desired, GT prediction")
            for row in self.gt_zero:
                lines.append(
                    f"  n1={row.n1} N in [{row.n_lo:.0f},{row.n_hi:.0f}] desired={row.desired_mass:.3f} gt={row.predicted:.1f}"
                    f" (events {row.opportunities})"
                )
        return "\n".join(lines) + "\n"

    def to_tsv(self) -> str:
        lines = ["key\tvalue"]
        lines.append(f"method\t{self.method}")
        lines.append(f"order\t{self.order}")
        lines.append(f"tokens\t{self.n_tokens}")
        lines.append(f"h_bits\t{self.h_bits!r}")
        lines.append(f"perplexity\t{self.perplexity!r}")
        if self.diagnostics is not None:
            lines.append("table\tr\tactual\tideal_rstar\tmodel_rstar\texpected_over_actual")
            for row in self.diagnostics.rows:
                lines.append(
                    "count\t{}\t{}\t{}\t{}\t{}".format(
                        row.label,
                        row.actual,
                        "" if row.ideal_rstar is None else repr(row.ideal_rstar),
                        "" if row.model_avg_rstar is None else repr(row.model_avg_rstar),
                        "" if row.expected_over_actual is None else repr(row.expected_over_actual),
                    )
                )
        return "\n".join(lines) + "\n"


def evaluate_model(
    model: SmoothedModel,
    table: CountTable,
    test: list[EncodedSentence],
    count_eos: bool = True,
    diagnostics: bool = False,
    threads: int = 1,
) -> EvalReport:
    h = cross_entropy(model, test, count_eos=count_eos, threads=threads)
    n_tokens = sum(s.n_predicted - (0 if count_eos else 1) for s in test)
    report = EvalReport(method=model.method, order=model.order, h_bits=h, n_tokens=n_tokens, count_eos=count_eos)
    if diagnostics:
        report.diagnostics = count_diagnostics(table, test, model.order, model.vocab.n_events, model=model)
        report.fractions = entropy_fraction_by_count(model, table, test)
        report.gt_zero = gt_zero_count_study(table, test, model.order)
    return report
