"""Exception hierarchy shared across the toolkit."""


class NgramSmoothError(Exception):
    """Base class for toolkit errors."""


class InvalidParameterError(NgramSmoothError, ValueError):
    """A parameter or input violates a precondition."""


class UndefinedEstimateError(NgramSmoothError):
    """A Good-Turing adjusted count is requested where n_r = 0 and no smoothing applies."""

    def __init__(self, r: int, message: str | None = None):
        self.r = r
        super().__init__(message or f"adjusted count undefined at r={r}: n_{r} or n_{r + 1} is zero")


class CannotSmoothError(NgramSmoothError):
    """Count-of-counts has too little support to fit the smoothing regression."""


class UndefinedDistributionError(NgramSmoothError):
    """A maximum-likelihood distribution is requested for a history with no counts."""

    def __init__(self, history, message: str | None = None):
        self.history = tuple(history)
        super().__init__(message or f"no training counts for history {self.history}: ML distribution undefined")


class InfiniteEntropyError(NgramSmoothError):
    """A model assigned probability zero to a test event."""

    def __init__(self, ngram, message: str | None = None):
        self.ngram = tuple(ngram)
        super().__init__(message or f"zero probability for n-gram {self.ngram}: entropy is infinite")


class NonFiniteObjectiveError(NgramSmoothError):
    """The tuning objective returned a non-finite value."""

    def __init__(self, point, value):
        self.point = tuple(point)
        self.value = value
        super().__init__(f"objective returned {value} at {self.point}")


class VocabularyMismatchError(NgramSmoothError):
    """A model is being evaluated against data encoded with a different vocabulary."""

    def __init__(self, expected_hash: str, got_hash: str):
        self.expected_hash = expected_hash
        self.got_hash = got_hash
        super().__init__(f"vocabulary mismatch: model built with {expected_hash}, data encoded with {got_hash}")
