"""Jelinek-Mercer linear interpolation: held-out, deleted, average-count, baseline.

The order-n model is a recursive mixture
    p(w|h) = lam_b(h) * p_ML(w|h) + (1 - lam_b(h)) * p(w|h')
ending in the uniform distribution over predicted events.  A level whose
history has no training counts is skipped exactly (pure pass-through), which
keeps every conditional distribution normalized.  The lambdas are tied by
wall-of-bricks buckets over a per-history key and trained to a local optimum
of the lambda-training data's likelihood by Baum-Welch.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from ngramsmooth import kernels
from ngramsmooth.buckets import BucketMap, bucket_wall_of_bricks, single_bucket
from ngramsmooth.corpus import EncodedSentence, Vocabulary
from ngramsmooth.counts import CountTable
from ngramsmooth.errors import InvalidParameterError
from ngramsmooth.smoothers.base import SmoothedModel

METHOD_TAGS = {
    ("held-out", "total-count"): "interp-held-out",
    ("deleted", "count-before-deletion"): "interp-del-int",
    ("held-out", "average-count"): "new-avg-count",
}


def events_from_sentences(sentences: list[EncodedSentence], order: int) -> list[tuple[tuple[int, ...], int]]:
    """(context, word) pairs for every predicted position."""
    events = []
    for sent in sentences:
        seq = sent.ids.tolist()
        pad = sent.order - 1
        if pad < order - 1:
            raise InvalidParameterError(f"sentence padded for order {sent.order}, need {order}")
        for i in range(pad, len(seq)):
            events.append((tuple(seq[i - order + 1 : i]), seq[i]))
    return events


@dataclass
class InterpSkeleton:
    """Per-event, per-level arrays for EM training and likelihood evaluation."""

    order: int
    uniform: float
    key_kind: str
    ml: np.ndarray      # (E, L) ML probability of the event at each level
    keys: np.ndarray    # (E, L) bucketing key of the level's history
    active: np.ndarray  # (E, L) history seen in training (level participates)

    @property
    def n_events(self) -> int:
        return self.ml.shape[0]


def build_interp_skeleton(
    table: CountTable,
    vocab: Vocabulary,
    order: int,
    sentences: list[EncodedSentence],
    mode: str = "held-out",
    key_kind: str = "total-count",
) -> InterpSkeleton:
    if mode not in ("held-out", "deleted"):
        raise InvalidParameterError(f"mode must be held-out or deleted, got {mode}")
    events = events_from_sentences(sentences, order)
    if not events:
        raise InvalidParameterError("no events to train lambdas on")
    n_ev = len(events)
    ml = np.zeros((n_ev, order), dtype=np.float64)
    keys = np.zeros((n_ev, order), dtype=np.float64)
    active = np.zeros((n_ev, order), dtype=bool)
    for e, (ctx, w) in enumerate(events):
        for k in range(1, order + 1):
            h = ctx[order - k :]
            row = table.row(h)
            if row is None:
                continue
            c = table.count(h + (w,))
            total = row.total
            if mode == "deleted":
                # leave-one-out: the event's own occurrence is removed
                if total - 1 <= 0:
                    keys[e, k - 1] = total
                    continue
                p = max(c - 1, 0) / (total - 1)
            else:
                p = c / total
            ml[e, k - 1] = p
            active[e, k - 1] = True
            if key_kind == "average-count":
                keys[e, k - 1] = total / row.distinct
            else:
                keys[e, k - 1] = total
    return InterpSkeleton(order=order, uniform=1.0 / vocab.n_events, key_kind=key_kind, ml=ml, keys=keys, active=active)


def make_bucket_maps(skeleton: InterpSkeleton, c_min: float | None, c_top: float) -> list[BucketMap]:
    """One wall-of-bricks map per order, populated by the training events' keys."""
    maps = []
    for j in range(skeleton.order):
        population = Counter(skeleton.keys[:, j].tolist())
        maps.append(bucket_wall_of_bricks(population, c_min, c_top, kind=skeleton.key_kind))
    return maps


def bucketize(skeleton: InterpSkeleton, maps: list[BucketMap]) -> tuple[np.ndarray, list[int]]:
    """Global bucket index per event/level (-1 where inactive), plus level offsets."""
    n_ev = skeleton.n_events
    bucket = np.full((n_ev, skeleton.order), -1, dtype=np.int64)
    offsets = []
    offset = 0
    for j in range(skeleton.order):
        offsets.append(offset)
        idx = maps[j].index_array(skeleton.keys[:, j]) + offset
        bucket[:, j] = np.where(skeleton.active[:, j], idx, -1)
        offset += maps[j].n_buckets
    return bucket, offsets


@dataclass
class LambdaFit:
    """Baum-Welch output: flat lambdas plus the training trace."""

    lams: np.ndarray
    offsets: list[int]
    per_level: list[np.ndarray]
    entropies: list[float]
    iterations: int
    untrained: list[np.ndarray] = field(default_factory=list)


def fit_lambdas(
    skeleton: InterpSkeleton,
    maps: list[BucketMap],
    lambda0: float = 0.5,
    delta_stop: float = 0.001,
    max_iterations: int = 200,
) -> LambdaFit:
    if not 0.0 < lambda0 < 1.0:
        raise InvalidParameterError(f"lambda0 must lie in (0,1), got {lambda0}")
    if skeleton.n_events == 0:
        raise InvalidParameterError("empty lambda-training data")
    bucket, offsets = bucketize(skeleton, maps)
    n_buckets = offsets[-1] + maps[-1].n_buckets
    lams = np.full(n_buckets, lambda0, dtype=np.float64)
    touched = np.zeros(n_buckets, dtype=bool)
    touched[np.unique(bucket[bucket >= 0])] = True

    entropies: list[float] = []
    iterations = 0
    for _ in range(max_iterations):
        num = np.zeros(n_buckets, dtype=np.float64)
        den = np.zeros(n_buckets, dtype=np.float64)
        loglik = kernels.em_accumulate(lams, skeleton.uniform, skeleton.ml, bucket, num, den)
        entropies.append(-loglik / skeleton.n_events)
        iterations += 1
        with np.errstate(invalid="ignore"):
            lams = np.where(den > 0, num / den, lams)
        if len(entropies) >= 2 and abs(entropies[-2] - entropies[-1]) < delta_stop:
            break

    per_level = []
    untrained = []
    for j in range(skeleton.order):
        lo = offsets[j]
        hi = lo + maps[j].n_buckets
        per_level.append(lams[lo:hi].copy())
        untrained.append(np.flatnonzero(~touched[lo:hi]))
    return LambdaFit(lams=lams, offsets=offsets, per_level=per_level, entropies=entropies, iterations=iterations, untrained=untrained)


def skeleton_entropy(skeleton: InterpSkeleton, maps: list[BucketMap], per_level_lams: list[np.ndarray]) -> float:
    """Bits per event of the mixture on this skeleton's events."""
    bucket, offsets = bucketize(skeleton, maps)
    lams = np.concatenate(per_level_lams)
    loglik = kernels.interp_log2prob(lams, skeleton.uniform, skeleton.ml, bucket)
    return -loglik / skeleton.n_events


class InterpolatedModel(SmoothedModel):
    def __init__(self, vocab, table, order, maps, lambdas, method, fit: LambdaFit | None = None):
        super().__init__(vocab, table, order)
        self.maps = maps
        self.lambdas = lambdas
        self.method = method
        self.fit = fit
        self.uniform = 1.0 / vocab.n_events

    def _level_lambda(self, k: int, row) -> float:
        if self.maps[k - 1].kind == "average-count":
            key = row.total / row.distinct
        else:
            key = row.total
        return float(self.lambdas[k - 1][self.maps[k - 1].index(key)])

    def prob(self, history, word: int) -> float:
        h = self._check_query(history, word)
        p = self.uniform
        for k in range(1, self.order + 1):
            hk = h[self.order - k :]
            row = self.table.row(hk)
            if row is None:
                continue
            lam = self._level_lambda(k, row)
            pml = self.table.count(hk + (word,)) / row.total
            p = lam * pml + (1.0 - lam) * p
        return p

    def row(self, history) -> np.ndarray:
        h = tuple(int(t) for t in history)
        out = np.full(self.vocab.size, self.uniform, dtype=np.float64)
        out[0] = 0.0
        for k in range(1, self.order + 1):
            hk = h[self.order - k :]
            hrow = self.table.row(hk)
            if hrow is None:
                continue
            lam = self._level_lambda(k, hrow)
            out *= 1.0 - lam
            out[hrow.ids] += lam * hrow.counts / hrow.total
        out[0] = 0.0
        return out

    def params(self) -> dict:
        return {"key_kind": self.maps[-1].kind, "c_top": self.maps[-1].c_top}


def build_jm(
    table: CountTable,
    vocab: Vocabulary,
    n: int,
    lambda_data: list[EncodedSentence],
    mode: str = "held-out",
    key_kind: str = "total-count",
    c_min: float | None = 100,
    c_top: float = 100_000,
    lambda0: float = 0.5,
    delta_stop: float = 0.001,
    max_iterations: int = 200,
    maps: list[BucketMap] | None = None,
    method: str | None = None,
) -> InterpolatedModel:
    """Train a bucketed interpolated model; lambda_data must be disjoint from
    the counted training text in held-out mode (and IS the training text in
    deleted mode)."""
    if mode == "held-out" and not lambda_data:
        raise InvalidParameterError("held-out interpolation needs a nonempty development set")
    if mode == "deleted":
        key_kind = "count-before-deletion"
    skeleton = build_interp_skeleton(table, vocab, n, lambda_data, mode=mode, key_kind=key_kind)
    if maps is None:
        maps = make_bucket_maps(skeleton, c_min, c_top)
    fit = fit_lambdas(skeleton, maps, lambda0=lambda0, delta_stop=delta_stop, max_iterations=max_iterations)
    tag = method or METHOD_TAGS.get((mode, key_kind), "interp-held-out")
    return InterpolatedModel(vocab, table, n, maps, fit.per_level, tag, fit)


def build_baseline(
    table: CountTable,
    vocab: Vocabulary,
    n: int,
    lambda_data: list[EncodedSentence],
    lambda0: float = 0.5,
    delta_stop: float = 0.001,
    max_iterations: int = 200,
) -> InterpolatedModel:
    """Held-out interpolation with c_min = infinity: one lambda per order."""
    maps = [single_bucket("total-count") for _ in range(n)]
    return build_jm(
        table,
        vocab,
        n,
        lambda_data,
        mode="held-out",
        key_kind="total-count",
        maps=maps,
        lambda0=lambda0,
        delta_stop=delta_stop,
        max_iterations=max_iterations,
        method="interp-baseline",
    )


def build_avg_count(
    table: CountTable,
    vocab: Vocabulary,
    n: int,
    lambda_data: list[EncodedSentence],
    c_min: float | None = 100,
    c_top: float = 100_000,
    **kwargs,
) -> InterpolatedModel:
    """interp-held-out with the per-history key N(h)/distinct(h)."""
    return build_jm(
        table,
        vocab,
        n,
        lambda_data,
        mode="held-out",
        key_kind="average-count",
        c_min=c_min,
        c_top=c_top,
        **kwargs,
    )
