"""N-gram language modeling with nine smoothing regimes and count-by-count diagnostics."""

from ngramsmooth.corpus import Vocabulary, EncodedSentence, DataSplit, build_vocabulary, encode_sentence, split_corpus
from ngramsmooth.counts import CountTable, CountOfCounts, count_ngrams, history_aggregate, count_of_counts
from ngramsmooth.errors import (
    NgramSmoothError,
    InvalidParameterError,
    UndefinedEstimateError,
    CannotSmoothError,
    UndefinedDistributionError,
    InfiniteEntropyError,
    NonFiniteObjectiveError,
)

__all__ = [
    "Vocabulary",
    "EncodedSentence",
    "DataSplit",
    "build_vocabulary",
    "encode_sentence",
    "split_corpus",
    "CountTable",
    "CountOfCounts",
    "count_ngrams",
    "history_aggregate",
    "count_of_counts",
    "NgramSmoothError",
    "InvalidParameterError",
    "UndefinedEstimateError",
    "CannotSmoothError",
    "UndefinedDistributionError",
    "InfiniteEntropyError",
    "NonFiniteObjectiveError",
]

__version__ = "0.1.0"
