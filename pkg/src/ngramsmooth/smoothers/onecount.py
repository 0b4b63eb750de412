"""One-count smoothing: additive counts proportional to the lower-order model.

p(w|h) = (c(h.w) + a(h) * p(w|h')) / (N(h) + a(h)) with a(h) = gamma*(n1(h) + beta),
where n1(h) is the number of words following h exactly once.  Each order has
its own beta and gamma; the recursion ends in the uniform distribution.
"""

from __future__ import annotations

import numpy as np

from ngramsmooth.corpus import EncodedSentence, Vocabulary
from ngramsmooth.counts import CountTable
from ngramsmooth.errors import InvalidParameterError
from ngramsmooth.smoothers.base import SmoothedModel
from ngramsmooth.smoothers.interp import events_from_sentences


class OneCountModel(SmoothedModel):
    method = "new-one-count"

    def __init__(self, vocab, table, order, betas, gammas):
        super().__init__(vocab, table, order)
        self.betas = np.asarray(betas, dtype=np.float64)
        self.gammas = np.asarray(gammas, dtype=np.float64)
        self.uniform = 1.0 / vocab.n_events

    def prob(self, history, word: int) -> float:
        h = self._check_query(history, word)
        p = self.uniform
        for k in range(1, self.order + 1):
            hk = h[self.order - k :]
            row = self.table.row(hk)
            if row is None:
                total, ones, c = 0, 0, 0
            else:
                total, ones = row.total, row.ones
                c = self.table.count(hk + (word,))
            alpha = self.gammas[k - 1] * (ones + self.betas[k - 1])
            denom = total + alpha
            if denom > 0:
                p = (c + alpha * p) / denom
        return p

    def row(self, history) -> np.ndarray:
        h = tuple(int(t) for t in history)
        out = np.full(self.vocab.size, self.uniform, dtype=np.float64)
        out[0] = 0.0
        for k in range(1, self.order + 1):
            hk = h[self.order - k :]
            hrow = self.table.row(hk)
            total = hrow.total if hrow is not None else 0
            ones = hrow.ones if hrow is not None else 0
            alpha = self.gammas[k - 1] * (ones + self.betas[k - 1])
            denom = total + alpha
            if denom <= 0:
                continue
            out *= alpha / denom
            if hrow is not None:
                out[hrow.ids] += hrow.counts / denom
        out[0] = 0.0
        return out

    def params(self) -> dict:
        return {
            "betas": [float(b) for b in self.betas],
            "gammas": [float(g) for g in self.gammas],
        }


def build_one_count(table: CountTable, vocab: Vocabulary, n: int, betas, gammas) -> OneCountModel:
    betas = np.broadcast_to(np.asarray(betas, dtype=np.float64), (n,)).copy()
    gammas = np.broadcast_to(np.asarray(gammas, dtype=np.float64), (n,)).copy()
    if np.any(gammas < 0):
        raise InvalidParameterError("gamma must be nonnegative")
    if np.any(gammas * betas < 0):
        raise InvalidParameterError("alpha = gamma*(n1+beta) must be nonnegative")
    return OneCountModel(vocab, table, n, betas, gammas)


def onecount_event_arrays(table: CountTable, order: int, sentences: list[EncodedSentence]):
    """(c, N, n1) arrays of shape (E, order) for fast repeated evaluation."""
    events = events_from_sentences(sentences, order)
    n_ev = len(events)
    c = np.zeros((n_ev, order), dtype=np.float64)
    n = np.zeros((n_ev, order), dtype=np.float64)
    n1 = np.zeros((n_ev, order), dtype=np.float64)
    for e, (ctx, w) in enumerate(events):
        for k in range(1, order + 1):
            hk = ctx[order - k :]
            row = table.row(hk)
            if row is None:
                continue
            c[e, k - 1] = table.count(hk + (w,))
            n[e, k - 1] = row.total
            n1[e, k - 1] = row.ones
    return c, n, n1
