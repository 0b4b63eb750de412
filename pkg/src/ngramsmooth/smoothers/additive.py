"""Additive smoothing: pretend every n-gram occurred delta times more.

p(w|h) = (c(h.w) + delta) / (N(h) + delta*K).  The spread count K follows one
of two conventions: "events" uses the true predicted-event space (|V|-1,
exactly normalized) and "content" uses the content-word count alone, which is
the arithmetic of the worked plus-one examples in the literature (their
products include the eos event but add |V| content words to the denominator,
so the distribution sums slightly above one).
"""

from __future__ import annotations

import numpy as np

from ngramsmooth.counts import CountTable
from ngramsmooth.corpus import Vocabulary
from ngramsmooth.errors import InvalidParameterError
from ngramsmooth.smoothers.base import SmoothedModel

CONVENTIONS = ("events", "content")


class AdditiveModel(SmoothedModel):
    def __init__(self, vocab, table, order, delta: float, convention: str, fixed_delta: bool):
        super().__init__(vocab, table, order)
        self.delta = delta
        self.convention = convention
        self.method = "plus-one" if fixed_delta else "plus-delta"
        self.spread = vocab.n_events if convention == "events" else len(vocab.words)

    def prob(self, history, word: int) -> float:
        h = self._check_query(history, word)
        row = self.table.row(h)
        total = row.total if row is not None else 0
        c = self.table.count(h + (word,)) if row is not None else 0
        return (c + self.delta) / (total + self.delta * self.spread)

    def row(self, history) -> np.ndarray:
        h = tuple(int(t) for t in history)
        hrow = self.table.row(h)
        total = hrow.total if hrow is not None else 0
        denom = total + self.delta * self.spread
        out = np.full(self.vocab.size, self.delta / denom, dtype=np.float64)
        if hrow is not None:
            out[hrow.ids] = (hrow.counts + self.delta) / denom
        out[0] = 0.0
        return out

    def params(self) -> dict:
        return {"delta": self.delta, "convention": self.convention}


def build_additive(
    table: CountTable,
    vocab: Vocabulary,
    n: int,
    delta: float = 1.0,
    convention: str = "events",
    fixed_delta: bool = False,
) -> AdditiveModel:
    if delta <= 0:
        raise InvalidParameterError(f"delta must be positive, got {delta}")
    if convention not in CONVENTIONS:
        raise InvalidParameterError(f"convention must be one of {CONVENTIONS}")
    return AdditiveModel(vocab, table, n, delta, convention, fixed_delta)


def build_plus_one(table, vocab, n, convention: str = "events") -> AdditiveModel:
    return build_additive(table, vocab, n, delta=1.0, convention=convention, fixed_delta=True)
