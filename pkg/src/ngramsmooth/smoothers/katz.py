"""Katz back-off smoothing.

Counts 1..k are discounted by Good-Turing-derived ratios d_r, counts above k
are trusted as-is, and the freed mass goes to the history's unseen words in
proportion to the next-lower Katz model.  The recursion ends in an
additively smoothed unigram distribution so that every probability is
positive under a fixed vocabulary.  Histories with no counts in 1..k free no
mass; their zero-count words receive a total of beta extra counts and the
normalization grows to N(h) + beta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ngramsmooth.corpus import Vocabulary
from ngramsmooth.counts import CountOfCounts, CountTable, count_of_counts
from ngramsmooth.errors import CannotSmoothError, InvalidParameterError
from ngramsmooth.smoothers.base import SmoothedModel

Ngram = tuple[int, ...]


def katz_discounts(noc: CountOfCounts | dict, k: int) -> tuple[np.ndarray, int]:
    """Discount ratios d_1..d_k, reducing k until every d_r is reasonable.

    Returns (d, k_used) where d[r] is the ratio for count r (d[0] unused).
    """
    n_r = dict(noc.n_r) if isinstance(noc, CountOfCounts) else dict(noc)
    k = int(k)
    if k < 1:
        raise InvalidParameterError(f"k must be >= 1, got {k}")
    while k >= 1:
        schedule = _try_schedule(n_r, k)
        if schedule is not None:
            return schedule, k
        k -= 1
    raise CannotSmoothError("no usable Katz discount schedule: k reduced to 0")


def _try_schedule(n_r: dict[int, int], k: int) -> np.ndarray | None:
    if any(n_r.get(r, 0) <= 0 for r in range(1, k + 2)):
        return None
    n1 = n_r[1]
    big = (k + 1) * n_r[k + 1] / n1
    if big >= 1.0:
        return None
    d = np.ones(k + 1, dtype=np.float64)
    for r in range(1, k + 1):
        rstar = (r + 1) * n_r[r + 1] / n_r[r]
        d[r] = (rstar / r - big) / (1.0 - big)
        if not 0.0 < d[r] <= 1.0:
            return None
    return d


@dataclass
class _KatzRow:
    ids: np.ndarray
    probs: np.ndarray
    alpha_prime: float


class KatzModel(SmoothedModel):
    method = "katz"

    def __init__(self, vocab, table, order, puni, levels, k_used, delta, beta):
        super().__init__(vocab, table, order)
        self.puni = puni
        self.levels = levels  # levels[k] : dict history -> _KatzRow, for k = 2..order
        self.k_used = k_used  # per order 2..order
        self.delta = delta
        self.beta = beta

    def _level_prob(self, k: int, h: Ngram, w: int) -> float:
        if k == 1:
            return float(self.puni[w])
        entry = self.levels[k].get(h)
        if entry is None:
            return self._level_prob(k - 1, h[1:], w)
        i = int(np.searchsorted(entry.ids, w))
        if i < len(entry.ids) and entry.ids[i] == w:
            return float(entry.probs[i])
        return entry.alpha_prime * self._level_prob(k - 1, h[1:], w)

    def prob(self, history, word: int) -> float:
        h = self._check_query(history, word)
        return self._level_prob(self.order, h, word)

    def _level_row(self, k: int, h: Ngram) -> np.ndarray:
        if k == 1:
            return self.puni.copy()
        lower = self._level_row(k - 1, h[1:])
        entry = self.levels[k].get(h)
        if entry is None:
            return lower
        out = entry.alpha_prime * lower
        out[entry.ids] = entry.probs
        out[0] = 0.0
        return out

    def row(self, history) -> np.ndarray:
        return self._level_row(self.order, tuple(int(t) for t in history))

    def params(self) -> dict:
        return {
            "delta": self.delta,
            "beta": self.beta,
            "k": [self.k_used[k] for k in sorted(self.k_used)],
        }


def build_katz(
    table: CountTable,
    vocab: Vocabulary,
    n: int,
    k: int | list[int] = 5,
    delta_unigram: float = 1.0,
    beta: float = 1.0,
) -> KatzModel:
    if delta_unigram <= 0:
        raise InvalidParameterError(f"delta_unigram must be positive, got {delta_unigram}")
    if beta <= 0:
        raise InvalidParameterError(f"beta must be positive, got {beta}")
    ks = list(k) if isinstance(k, (list, tuple)) else [k] * max(n - 1, 0)
    if n >= 2 and len(ks) != n - 1:
        raise InvalidParameterError(f"need {n - 1} k values for order {n}, got {len(ks)}")

    n_events = vocab.n_events
    urow = table.row(())
    puni = np.zeros(vocab.size, dtype=np.float64)
    total1 = urow.total if urow is not None else 0
    denom = total1 + delta_unigram * n_events
    puni[1:] = delta_unigram / denom
    if urow is not None:
        puni[urow.ids] = (urow.counts + delta_unigram) / denom

    levels: dict[int, dict[Ngram, _KatzRow]] = {}
    k_used: dict[int, int] = {}

    def level_prob(k: int, h: Ngram, w: int) -> float:
        while k >= 2:
            entry = levels[k].get(h)
            if entry is not None:
                i = int(np.searchsorted(entry.ids, w))
                if i < len(entry.ids) and entry.ids[i] == w:
                    return float(entry.probs[i])
                return entry.alpha_prime * level_prob(k - 1, h[1:], w)
            k -= 1
            h = h[1:]
        return float(puni[w])

    for order_k in range(2, n + 1):
        noc = count_of_counts(table, order_k)
        d, kv = katz_discounts(noc, ks[order_k - 2])
        k_used[order_k] = kv
        level: dict[Ngram, _KatzRow] = {}
        for h, row in table.rows[order_k - 1].items():
            cs = row.counts
            total = row.total
            in_range = (cs >= 1) & (cs <= kv)
            if in_range.any():
                ckatz = np.where(cs > kv, cs.astype(np.float64), d[np.minimum(cs, kv)] * cs)
                probs = ckatz / total
                unseen_mass = (total - ckatz.sum()) / total
            else:
                probs = cs / (total + beta)
                unseen_mass = beta / (total + beta)
            if row.distinct >= n_events:
                # saturated history: no unseen event to absorb freed mass
                probs = probs / probs.sum()
                alpha_prime = 0.0
            else:
                seen_lower = sum(level_prob(order_k - 1, h[1:], int(w)) for w in row.ids)
                alpha_prime = unseen_mass / (1.0 - seen_lower)
            level[h] = _KatzRow(ids=row.ids, probs=probs, alpha_prime=alpha_prime)
        levels[order_k] = level

    return KatzModel(vocab, table, n, puni, levels, k_used, delta_unigram, beta)
