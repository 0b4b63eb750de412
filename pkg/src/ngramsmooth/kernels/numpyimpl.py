"""Pure-numpy kernel implementations.

Shared array layout: per-event, per-interpolation-level arrays of shape
(E, L) where level j is the order-(j+1) component.  ``bucket`` holds the
global (cross-order) bucket index of each level, or -1 where the level is
inactive (history unseen in training) and the event passes straight through
to the next-lower level.
"""

from __future__ import annotations

import numpy as np


def interp_event_probs(lams, uniform, ml, bucket):
    """Mixture probability per event for the recursive linear interpolation."""
    n_events, n_levels = ml.shape
    p = np.full(n_events, uniform, dtype=np.float64)
    for j in range(n_levels):
        b = bucket[:, j]
        active = b >= 0
        lam = np.where(active, lams[np.maximum(b, 0)], 0.0)
        p = np.where(active, lam * ml[:, j] + (1.0 - lam) * p, p)
    return p


def interp_log2prob(lams, uniform, ml, bucket):
    return float(np.log2(interp_event_probs(lams, uniform, ml, bucket)).sum())


def em_accumulate(lams, uniform, ml, bucket, num, den):
    """One Baum-Welch E-step sweep.

    Adds each bucket's expected top-branch count to ``num`` and its expected
    reach count to ``den``; returns the total log2 probability of the events.
    """
    n_events, n_levels = ml.shape
    active = bucket >= 0
    lam_e = np.where(active, lams[np.maximum(bucket, 0)], 0.0)

    p = np.full(n_events, uniform, dtype=np.float64)
    for j in range(n_levels):
        p = np.where(active[:, j], lam_e[:, j] * ml[:, j] + (1.0 - lam_e[:, j]) * p, p)

    # flattened component weights, top level downward
    carry = np.ones(n_events, dtype=np.float64)
    w = np.zeros((n_events, n_levels), dtype=np.float64)
    for j in range(n_levels - 1, -1, -1):
        w[:, j] = np.where(active[:, j], carry * lam_e[:, j], 0.0)
        carry = np.where(active[:, j], carry * (1.0 - lam_e[:, j]), carry)

    gamma_u = carry * uniform / p
    reach = gamma_u.copy()
    n_buckets = len(lams)
    for j in range(n_levels):
        gamma = w[:, j] * ml[:, j] / p
        reach = reach + gamma
        sel = active[:, j]
        if sel.any():
            b = bucket[sel, j]
            num += np.bincount(b, weights=gamma[sel], minlength=n_buckets)
            den += np.bincount(b, weights=reach[sel], minlength=n_buckets)
    return float(np.log2(p).sum())


def onecount_event_probs(c, n, n1, betas, gammas, uniform):
    """p = (c + a*p_lower) / (N + a) with a = gamma*(n1 + beta), per level."""
    n_events, n_levels = c.shape
    p = np.full(n_events, uniform, dtype=np.float64)
    for j in range(n_levels):
        alpha = gammas[j] * (n1[:, j] + betas[j])
        denom = n[:, j] + alpha
        mixed = np.divide(c[:, j] + alpha * p, denom, out=p.copy(), where=denom > 0)
        p = mixed
    return p
