"""Maximum-likelihood conditional model: exact relative frequencies."""

from __future__ import annotations

import numpy as np

from ngramsmooth.counts import CountTable
from ngramsmooth.corpus import Vocabulary
from ngramsmooth.errors import UndefinedDistributionError
from ngramsmooth.smoothers.base import SmoothedModel


class MLModel(SmoothedModel):
    method = "ml"

    def prob(self, history, word: int) -> float:
        h = self._check_query(history, word)
        row = self.table.row(h)
        if row is None:
            raise UndefinedDistributionError(h)
        c = self.table.count(h + (word,))
        return c / row.total

    def row(self, history) -> np.ndarray:
        h = tuple(int(t) for t in history)
        hrow = self.table.row(h)
        if hrow is None:
            raise UndefinedDistributionError(h)
        out = np.zeros(self.vocab.size, dtype=np.float64)
        out[hrow.ids] = hrow.counts / hrow.total
        return out


def build_ml(table: CountTable, vocab: Vocabulary, n: int) -> MLModel:
    return MLModel(vocab, table, n)
