"""Wall-of-bricks bucketing: tie parameters across histories grouped by a key.

Starting from the lowest key value, consecutive values are pooled until each
bucket has received at least c_min members; an undersized final bucket is
merged backward.  Keys above c_top are clamped to c_top before bucketing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from collections.abc import Mapping

import numpy as np

from ngramsmooth.errors import InvalidParameterError

KEY_KINDS = ("total-count", "average-count", "count-before-deletion", "cg-product")


@dataclass(frozen=True)
class BucketMap:
    """Monotone key -> bucket assignment via ascending inner boundaries.

    Bucket i covers keys in (upper[i-1], upper[i]]; the last bucket is
    unbounded above (keys clamp to c_top anyway).
    """

    kind: str
    upper: np.ndarray  # inner boundaries, length n_buckets - 1
    c_top: float

    @property
    def n_buckets(self) -> int:
        return len(self.upper) + 1

    def index(self, key: float) -> int:
        key = min(key, self.c_top)
        return int(np.searchsorted(self.upper, key, side="left"))

    def index_array(self, keys: np.ndarray) -> np.ndarray:
        clamped = np.minimum(np.asarray(keys, dtype=float), self.c_top)
        return np.searchsorted(self.upper, clamped, side="left").astype(np.int64)


def single_bucket(kind: str, c_top: float = math.inf) -> BucketMap:
    return BucketMap(kind=kind, upper=np.empty(0, dtype=float), c_top=c_top)


def bucket_wall_of_bricks(
    population: Mapping[float, int],
    c_min: float,
    c_top: float,
    kind: str = "total-count",
) -> BucketMap:
    """Build a BucketMap from a {key value: member count} population."""
    if kind not in KEY_KINDS:
        raise InvalidParameterError(f"unknown bucketing key kind {kind!r}")
    if c_min is not None and c_min != math.inf and c_min < 1:
        raise InvalidParameterError(f"c_min must be >= 1, got {c_min}")
    if c_top < 1:
        raise InvalidParameterError(f"c_top must be >= 1, got {c_top}")
    if not population or c_min is None or c_min == math.inf:
        return single_bucket(kind, c_top)

    merged: dict[float, int] = {}
    for key, n in population.items():
        k = min(float(key), float(c_top))
        merged[k] = merged.get(k, 0) + int(n)
    keys = sorted(merged)

    uppers: list[float] = []
    acc = 0
    for k in keys:
        acc += merged[k]
        if acc >= c_min:
            uppers.append(k)
            acc = 0
    # the last bucket is open-ended: dropping the final boundary both absorbs
    # an undersized trailing remainder (merge backward) and covers key values
    # above the observed range
    if uppers:
        uppers.pop()
    return BucketMap(kind=kind, upper=np.array(uppers, dtype=float), c_top=float(c_top))
