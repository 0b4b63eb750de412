"""Good-Turing adjusted counts and the Gale-Sampson count-of-counts smoother.

The adjusted count of an n-gram seen r times is r* = (r+1) n_{r+1} / n_r,
which allocates a total of n_1 counts (probability n_1/N) to unseen events.
Raw n_r break down wherever n_{r+1} = 0, so the simple Good-Turing recipe of
Gale & Sampson (1995) is used to smooth them: average n_r over the gaps
between observed counts, fit log n_r against log r, and switch from the
Turing estimate to the fitted ("LGT") estimate at the first r where the two
are no longer significantly different (1.65 standard deviations).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from collections.abc import Mapping

import numpy as np

from ngramsmooth.counts import CountOfCounts
from ngramsmooth.errors import CannotSmoothError, InvalidParameterError, UndefinedEstimateError

LARGE_NR = 10  # empirical n_r at or above this are trusted as-is by z()


def _as_mapping(counts) -> tuple[dict[int, int], int]:
    if isinstance(counts, CountOfCounts):
        n_r = dict(counts.n_r)
        total = counts.total
    else:
        n_r = {int(r): int(n) for r, n in counts.items()}
        total = sum(r * n for r, n in n_r.items())
    return n_r, total


@dataclass(frozen=True)
class GtEstimate:
    """Raw n_r plus the fitted smoother; z(r) > 0 for every r >= 1."""

    n_r: dict[int, int]
    total: int
    slope: float
    intercept: float

    def fitted(self, r: int) -> float:
        return math.exp(self.intercept + self.slope * math.log(r))

    def z(self, r: int) -> float:
        """Smoothed count-of-counts: empirical where reliable, fitted elsewhere."""
        if r < 1:
            raise InvalidParameterError("z is defined for r >= 1")
        n = self.n_r.get(r, 0)
        if n >= LARGE_NR:
            return float(n)
        return self.fitted(r)

    def adjusted(self, r: int) -> float:
        """r* computed from the smoothed counts."""
        return (r + 1) * self.z(r + 1) / self.z(r)


def smooth_count_of_counts(counts) -> GtEstimate:
    """Fit the Gale-Sampson log-log regression over nonzero n_r (r >= 1)."""
    n_r, total = _as_mapping(counts)
    rs = sorted(r for r, n in n_r.items() if r >= 1 and n > 0)
    if len(rs) < 2:
        raise CannotSmoothError(f"need at least two nonzero n_r to smooth, got {len(rs)}")
    r = np.array(rs, dtype=float)
    nr = np.array([n_r[int(v)] for v in rs], dtype=float)
    # average each n_r over the gap to its neighbours so sparse high counts
    # do not bias the fit
    d = np.concatenate(([1.0], np.diff(r)))
    width = np.concatenate((0.5 * (d[1:] + d[:-1]), [d[-1]]))
    zr = nr / width
    x = np.log(r)
    y = np.log(zr)
    xm = x.mean()
    ym = y.mean()
    denom = float(((x - xm) ** 2).sum())
    slope = float(((x - xm) * (y - ym)).sum() / denom)
    intercept = float(ym - slope * xm)
    return GtEstimate(n_r={r_: n for r_, n in n_r.items() if r_ >= 1}, total=total, slope=slope, intercept=intercept)


def gt_adjusted_count(r: int, counts, smoothed: GtEstimate | None = None) -> float:
    """r* = (r+1) n_{r+1} / n_r, from raw n_r or from a smoothed estimate."""
    if r < 0:
        raise InvalidParameterError("count must be nonnegative")
    if smoothed is not None and r >= 1:
        return smoothed.adjusted(r)
    n_r, _ = _as_mapping(counts)
    nr = n_r.get(r, 0)
    nr1 = n_r.get(r + 1, 0)
    if nr <= 0 or nr1 <= 0:
        raise UndefinedEstimateError(r)
    return (r + 1) * nr1 / nr


def sgt_corrected_counts(
    counts,
    n_zero: int,
    p_n1_0: float = 0.01,
    p_n1_N: float = 0.995,
) -> tuple[dict[int, float], float, float]:
    """Per-distribution simple Good-Turing corrected counts.

    Returns (corrected count per observed r, per-item zero-count corrected
    count, zero-count probability mass q0).  Corrected counts are scaled so
    the distribution's total count is preserved: seen events carry (1-q0)*N
    counts and the n_zero unseen events share q0*N.  Degenerate cases follow
    the configured probabilities: q0 = p_n1_0 when n_1 = 0 and q0 = p_n1_N
    when every count is a one-count.
    """
    n_r, total = _as_mapping(counts)
    rs = sorted(r for r, n in n_r.items() if r >= 1 and n > 0)
    if not rs:
        raise InvalidParameterError("distribution has no nonzero counts")
    if not 0.0 < p_n1_0 < 1.0 or not 0.0 < p_n1_N < 1.0:
        raise InvalidParameterError("degenerate-case probabilities must lie in (0, 1)")
    n1 = n_r.get(1, 0)
    if n_zero <= 0:
        q0 = 0.0
    elif n1 == 0:
        q0 = p_n1_0
    elif n1 == total:
        q0 = p_n1_N
    else:
        q0 = n1 / total

    if len(rs) >= 2:
        rstar = _sgt_combined(rs, n_r)
    else:
        rstar = {rs[0]: float(rs[0])}  # single support point: proportional discount only

    seen_mass = sum(n_r[r] * rstar[r] for r in rs)
    scale = (1.0 - q0) * total / seen_mass
    corrected = {r: rstar[r] * scale for r in rs}
    zero_each = q0 * total / n_zero if n_zero > 0 else 0.0
    return corrected, zero_each, q0


def _sgt_combined(rs: list[int], n_r: Mapping[int, int]) -> dict[int, float]:
    """Gale-Sampson combined estimates: Turing until insignificant, then LGT."""
    est = smooth_count_of_counts(n_r)
    slope = min(est.slope, -1.0)  # slope > -1 would inflate counts; clamp to r* = r
    out: dict[int, float] = {}
    use_turing = True
    for r in rs:
        lgt = r * (1.0 + 1.0 / r) ** (1.0 + slope)
        if not use_turing:
            out[r] = lgt
            continue
        nr = n_r.get(r, 0)
        nr1 = n_r.get(r + 1, 0)
        if nr1 == 0:
            use_turing = False
            out[r] = lgt
            continue
        turing = (r + 1) * nr1 / nr
        sd = (r + 1) / nr * math.sqrt(nr1 * (1.0 + nr1 / nr))
        if abs(turing - lgt) > 1.65 * sd:
            out[r] = turing
        else:
            use_turing = False
            out[r] = lgt
    return out
