"""Numba-jitted kernels; same contracts as numpyimpl."""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _interp_event_probs(lams, uniform, ml, bucket, out):
    n_events, n_levels = ml.shape
    for e in range(n_events):
        p = uniform
        for j in range(n_levels):
            b = bucket[e, j]
            if b >= 0:
                lam = lams[b]
                p = lam * ml[e, j] + (1.0 - lam) * p
        out[e] = p


def interp_event_probs(lams, uniform, ml, bucket):
    out = np.empty(ml.shape[0], dtype=np.float64)
    _interp_event_probs(lams, uniform, ml, bucket, out)
    return out


@njit(cache=True)
def _interp_log2prob(lams, uniform, ml, bucket):
    n_events, n_levels = ml.shape
    total = 0.0
    for e in range(n_events):
        p = uniform
        for j in range(n_levels):
            b = bucket[e, j]
            if b >= 0:
                lam = lams[b]
                p = lam * ml[e, j] + (1.0 - lam) * p
        total += np.log2(p)
    return total


def interp_log2prob(lams, uniform, ml, bucket):
    return float(_interp_log2prob(lams, uniform, ml, bucket))


@njit(cache=True)
def _em_accumulate(lams, uniform, ml, bucket, num, den):
    n_events, n_levels = ml.shape
    total = 0.0
    w = np.empty(n_levels, dtype=np.float64)
    for e in range(n_events):
        p = uniform
        for j in range(n_levels):
            b = bucket[e, j]
            if b >= 0:
                lam = lams[b]
                p = lam * ml[e, j] + (1.0 - lam) * p
        total += np.log2(p)

        carry = 1.0
        for j in range(n_levels - 1, -1, -1):
            b = bucket[e, j]
            if b >= 0:
                lam = lams[b]
                w[j] = carry * lam
                carry *= 1.0 - lam
            else:
                w[j] = 0.0
        reach = carry * uniform / p
        for j in range(n_levels):
            b = bucket[e, j]
            if b >= 0:
                gamma = w[j] * ml[e, j] / p
                reach += gamma
                num[b] += gamma
                den[b] += reach
    return total


def em_accumulate(lams, uniform, ml, bucket, num, den):
    return float(_em_accumulate(lams, uniform, ml, bucket, num, den))


@njit(cache=True)
def _onecount_event_probs(c, n, n1, betas, gammas, uniform, out):
    n_events, n_levels = c.shape
    for e in range(n_events):
        p = uniform
        for j in range(n_levels):
            alpha = gammas[j] * (n1[e, j] + betas[j])
            denom = n[e, j] + alpha
            if denom > 0.0:
                p = (c[e, j] + alpha * p) / denom
        out[e] = p


def onecount_event_probs(c, n, n1, betas, gammas, uniform):
    out = np.empty(c.shape[0], dtype=np.float64)
    _onecount_event_probs(c, n, n1, betas, gammas, uniform, out)
    return out
