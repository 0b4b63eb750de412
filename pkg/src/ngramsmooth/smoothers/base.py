"""Common query surface for all smoothed conditional models.

A model answers p(word | history) for histories drawn from the padded
context space (length order-1, ids excluding eos, bos only as left padding)
and words from the predicted-event space (every id except bos).  Queries are
total functions for every method except maximum likelihood.
"""

from __future__ import annotations

import math

import numpy as np

from ngramsmooth.corpus import BOS_ID, Vocabulary
from ngramsmooth.counts import CountTable
from ngramsmooth.errors import InvalidParameterError

Ngram = tuple[int, ...]


class SmoothedModel:
    method: str = "?"

    def __init__(self, vocab: Vocabulary, table: CountTable, order: int):
        self.vocab = vocab
        self.table = table
        self.order = order

    def _check_query(self, history, word: int) -> Ngram:
        h = tuple(int(t) for t in history)
        if len(h) != self.order - 1:
            raise InvalidParameterError(f"history length {len(h)} does not match order {self.order}")
        if word == BOS_ID:
            raise InvalidParameterError("bos is never a predicted event")
        if not 0 < word < self.vocab.size:
            raise InvalidParameterError(f"word id {word} outside vocabulary")
        return h

    def prob(self, history, word: int) -> float:
        raise NotImplementedError

    def logprob2(self, history, word: int) -> float:
        p = self.prob(history, word)
        return math.log2(p) if p > 0.0 else -math.inf

    def row(self, history) -> np.ndarray:
        """Dense p(. | history) over all ids; the bos slot (index 0) is 0."""
        raise NotImplementedError

    def params(self) -> dict:
        """Scalar parameters for the export header."""
        return {}


def cond_prob(model: SmoothedModel, history, word: int) -> float:
    """Uniform query facade over every method."""
    return model.prob(history, word)


def cond_logprob(model: SmoothedModel, history, word: int) -> float:
    return model.logprob2(history, word)
