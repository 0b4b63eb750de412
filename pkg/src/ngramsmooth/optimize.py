"""Parameter fitting: Baum-Welch for interpolation weights, Powell's
direction-set search for everything else, and the two-dev-set protocol
(lambdas refit on dev2 inside every dev1 objective evaluation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ngramsmooth.corpus import EncodedSentence, Vocabulary
from ngramsmooth.counts import CountTable
from ngramsmooth.errors import InvalidParameterError, NonFiniteObjectiveError
from ngramsmooth.kernels import onecount_event_probs
from ngramsmooth.smoothers.interp import (
    InterpSkeleton,
    LambdaFit,
    build_interp_skeleton,
    fit_lambdas,
    make_bucket_maps,
    skeleton_entropy,
)
from ngramsmooth.smoothers.onecount import onecount_event_arrays

LAMBDA0 = 0.5
DELTA_STOP = 0.001
C_TOP = 100_000
KATZ_BETA = 1.0
CG_P_N1_0 = 0.01
MAX_EM_ITERATIONS = 200


def baum_welch_lambdas(
    skeleton: InterpSkeleton,
    maps,
    lambda0: float = LAMBDA0,
    delta_stop: float = DELTA_STOP,
    max_iterations: int = MAX_EM_ITERATIONS,
) -> LambdaFit:
    """Train bucketed interpolation weights to a local optimum of the
    skeleton's data likelihood.  Dev entropy is non-increasing per iteration
    and iteration stops when it changes by less than delta_stop bits."""
    return fit_lambdas(skeleton, maps, lambda0=lambda0, delta_stop=delta_stop, max_iterations=max_iterations)


@dataclass
class PowellResult:
    x: np.ndarray
    fx: float
    nfev: int
    improved: bool


def _checked(f):
    state = {"nfev": 0}

    def g(x):
        state["nfev"] += 1
        v = float(f(np.asarray(x, dtype=float)))
        if not math.isfinite(v):
            raise NonFiniteObjectiveError(x, v)
        return v

    return g, state


_GOLD = (math.sqrt(5.0) - 1.0) / 2.0


def _bracket(f, x, d, f0, step=1.0, grow=2.0, max_expand=50):
    """Expand along d (or -d) until the minimum is bracketed.

    Returns (lo, hi) step offsets containing a minimizer, plus the best
    probed (f, t) pair so far.
    """
    f_plus = f(x + step * d)
    if f_plus < f0:
        a, fa, b, fb = 0.0, f0, step, f_plus
    else:
        f_minus = f(x - step * d)
        if f_minus < f0:
            a, fa, b, fb = 0.0, f0, -step, f_minus
        else:
            # uphill both ways: the minimum sits inside (-step, step)
            best = min((f0, 0.0), (f_plus, step), (f_minus, -step))
            return -step, step, best
    c = b * grow
    fc = f(x + c * d)
    expansions = 0
    while fc < fb and expansions < max_expand:
        a, fa = b, fb
        b, fb = c, fc
        c *= grow
        fc = f(x + c * d)
        expansions += 1
    best = min((fa, a), (fb, b), (fc, c))
    return min(a, c), max(a, c), best


def _line_minimize(f, x, d, f0, xtol=1e-5, step=1.0):
    """Golden-section line minimization of f(x + t*d) over t."""
    a, b, best = _bracket(f, x, d, f0, step=step)
    t1 = b - _GOLD * (b - a)
    t2 = a + _GOLD * (b - a)
    f1 = f(x + t1 * d)
    f2 = f(x + t2 * d)
    best = min(best, (f1, t1), (f2, t2))
    while b - a > xtol * (1.0 + abs(a) + abs(b)):
        if f1 <= f2:
            b, t2, f2 = t2, t1, f1
            t1 = b - _GOLD * (b - a)
            f1 = f(x + t1 * d)
            best = min(best, (f1, t1))
        else:
            a, t1, f1 = t1, t2, f2
            t2 = a + _GOLD * (b - a)
            f2 = f(x + t2 * d)
            best = min(best, (f2, t2))
    fbest, tbest = best
    if f0 <= fbest:
        return x, f0
    return x + tbest * d, fbest


def powell_minimize(objective, x0, ftol: float = 1e-4, max_iterations: int = 60, step: float = 1.0) -> PowellResult:
    """Powell's direction-set minimization; no gradients required.

    Runs successive line minimizations along an updated direction set and
    stops when a full sweep's fractional decrease falls below ftol.  Never
    returns a point worse than x0; a non-finite objective aborts with the
    offending point.
    """
    f, state = _checked(objective)
    x = np.asarray(x0, dtype=float).copy()
    n = len(x)
    fx = f(x)
    f_first = fx
    if n == 0:
        return PowellResult(x=x, fx=fx, nfev=state["nfev"], improved=False)
    dirs = [np.eye(n)[i] for i in range(n)]
    for _ in range(max_iterations):
        f_start = fx
        x_start = x.copy()
        biggest_drop = 0.0
        biggest_i = 0
        for i in range(n):
            f_prev = fx
            x, fx = _line_minimize(f, x, dirs[i], fx, step=step)
            if f_prev - fx > biggest_drop:
                biggest_drop = f_prev - fx
                biggest_i = i
        if 2.0 * (f_start - fx) <= ftol * (abs(f_start) + abs(fx)) + 1e-25:
            break
        ext = 2.0 * x - x_start
        f_ext = f(ext)
        if f_ext < f_start:
            t = (
                2.0 * (f_start - 2.0 * fx + f_ext) * (f_start - fx - biggest_drop) ** 2
                - biggest_drop * (f_start - f_ext) ** 2
            )
            if t < 0.0:
                new_dir = x - x_start
                x, fx = _line_minimize(f, x, new_dir, fx, step=step)
                dirs[biggest_i] = dirs[-1]
                dirs[-1] = new_dir
    return PowellResult(x=x, fx=fx, nfev=state["nfev"], improved=fx < f_first)


@dataclass
class TuneResult:
    method: str
    params: dict
    dev1_entropy: float
    audit: list[dict] = field(default_factory=list)


class _Audit:
    def __init__(self):
        self.rows: list[dict] = []

    def record(self, params: dict, entropy: float) -> float:
        self.rows.append({"params": dict(params), "dev1_entropy": entropy})
        return entropy


def _log_grid(lo: float, hi: float, per_decade: int = 3) -> list[int]:
    vals = []
    v = lo
    while v <= hi:
        for m in np.logspace(0, 1, per_decade, endpoint=False):
            g = int(round(v * m))
            if lo <= g <= hi and (not vals or g > vals[-1]):
                vals.append(g)
        v *= 10
    return vals


def tune_parameters(
    method: str,
    table: CountTable,
    vocab: Vocabulary,
    n: int,
    dev1: list[EncodedSentence],
    dev2: list[EncodedSentence],
    train_sentences: list[EncodedSentence] | None = None,
    cg_preset: bool = False,
    ftol: float = 1e-4,
) -> TuneResult:
    """Search the parameters the comparison found significant, holding the
    rest at their fixed defaults; returns fitted values and the audit trail."""
    if not dev1 or not dev2:
        raise InvalidParameterError("tuning needs both development sets")
    audit = _Audit()

    if method in ("interp-held-out", "interp-del-int", "new-avg-count"):
        return _tune_interp(method, table, vocab, n, dev1, dev2, train_sentences, audit)
    if method == "interp-baseline":
        return TuneResult(method=method, params={}, dev1_entropy=_baseline_entropy(table, vocab, n, dev1, dev2), audit=[])
    if method == "plus-delta":
        return _tune_plus_delta(table, vocab, n, dev1, audit, ftol)
    if method == "katz":
        return _tune_katz(table, vocab, n, dev1, audit, ftol)
    if method == "new-one-count":
        return _tune_one_count(table, vocab, n, dev1, audit, ftol)
    if method == "church-gale":
        return _tune_church_gale(table, vocab, n, dev1, audit, cg_preset)
    if method in ("ml", "plus-one"):
        return TuneResult(method=method, params={}, dev1_entropy=math.nan, audit=[])
    raise InvalidParameterError(f"unknown method {method!r}")


def _dev_entropy_by_query(model, sentences: list[EncodedSentence]) -> float:
    from ngramsmooth.evaluate import cross_entropy

    return cross_entropy(model, sentences)


def _baseline_entropy(table, vocab, n, dev1, dev2) -> float:
    from ngramsmooth.buckets import single_bucket

    sk2 = build_interp_skeleton(table, vocab, n, dev2, mode="held-out", key_kind="total-count")
    maps = [single_bucket("total-count") for _ in range(n)]
    fit = fit_lambdas(sk2, maps)
    sk1 = build_interp_skeleton(table, vocab, n, dev1, mode="held-out", key_kind="total-count")
    return skeleton_entropy(sk1, maps, fit.per_level)


def _tune_interp(method, table, vocab, n, dev1, dev2, train_sentences, audit) -> TuneResult:
    if method == "interp-del-int":
        if not train_sentences:
            raise InvalidParameterError("deleted interpolation tunes on the training sentences")
        mode, key_kind, lam_data = "deleted", "count-before-deletion", train_sentences
    elif method == "new-avg-count":
        mode, key_kind, lam_data = "held-out", "average-count", dev2
    else:
        mode, key_kind, lam_data = "held-out", "total-count", dev2
    sk_fit = build_interp_skeleton(table, vocab, n, lam_data, mode=mode, key_kind=key_kind)
    sk_dev1 = build_interp_skeleton(table, vocab, n, dev1, mode="held-out", key_kind=key_kind)

    def entropy_for(c_min: int) -> float:
        maps = make_bucket_maps(sk_fit, c_min, C_TOP)
        fit = fit_lambdas(sk_fit, maps)
        h = skeleton_entropy(sk_dev1, maps, fit.per_level)
        return audit.record({"c_min": c_min}, h)

    # integer parameter: coarse log grid, then a local refinement
    grid = _log_grid(1, max(sk_fit.n_events, 10))
    best_c, best_h = min(((c, entropy_for(c)) for c in grid), key=lambda p: p[1])
    for mult in (0.6, 0.75, 0.9, 1.1, 1.33, 1.66):
        c = max(int(round(best_c * mult)), 1)
        if all(row["params"]["c_min"] != c for row in audit.rows):
            h = entropy_for(c)
            if h < best_h:
                best_c, best_h = c, h
    return TuneResult(method=method, params={"c_min": best_c, "c_top": C_TOP}, dev1_entropy=best_h, audit=audit.rows)


def _tune_plus_delta(table, vocab, n, dev1, audit, ftol) -> TuneResult:
    from ngramsmooth.smoothers.additive import build_additive

    def objective(x) -> float:
        delta = float(np.exp(x[0]))
        model = build_additive(table, vocab, n, delta=delta)
        return audit.record({"delta": delta}, _dev_entropy_by_query(model, dev1))

    res = powell_minimize(objective, [math.log(0.5)], ftol=ftol)
    delta = float(np.exp(res.x[0]))
    return TuneResult(method="plus-delta", params={"delta": delta}, dev1_entropy=res.fx, audit=audit.rows)


def _tune_katz(table, vocab, n, dev1, audit, ftol) -> TuneResult:
    from ngramsmooth.smoothers.katz import build_katz

    k_request = 20  # auto-reduced per order to the largest usable value

    def objective(x) -> float:
        delta = float(np.exp(x[0]))
        model = build_katz(table, vocab, n, k=k_request, delta_unigram=delta, beta=KATZ_BETA)
        return audit.record({"delta": delta}, _dev_entropy_by_query(model, dev1))

    res = powell_minimize(objective, [math.log(0.5)], ftol=ftol)
    delta = float(np.exp(res.x[0]))
    model = build_katz(table, vocab, n, k=k_request, delta_unigram=delta, beta=KATZ_BETA)
    params = {"delta": delta, "beta": KATZ_BETA, "k": [model.k_used[k] for k in range(2, n + 1)]}
    return TuneResult(method="katz", params=params, dev1_entropy=res.fx, audit=audit.rows)


def katz_delta_preset(n_sentences: int) -> float:
    """Large-corpus extrapolation for the Katz unigram delta."""
    return 0.0011 * n_sentences**0.7


CG_LARGE_PRESET = {"c_min": 500, "c_mb": 100_000, "p_n1_N": 0.995}


def _tune_one_count(table, vocab, n, dev1, audit, ftol) -> TuneResult:
    c, nn, n1 = onecount_event_arrays(table, n, dev1)
    uniform = 1.0 / vocab.n_events
    n_events = c.shape[0]

    def objective(x) -> float:
        betas = np.exp(x[:n])
        gammas = np.exp(x[n:])
        p = onecount_event_probs(c, nn, n1, betas, gammas, uniform)
        h = -float(np.log2(p).sum()) / n_events
        params = {f"beta{k + 1}": float(betas[k]) for k in range(n)}
        params.update({f"gamma{k + 1}": float(gammas[k]) for k in range(n)})
        return audit.record(params, h)

    res = powell_minimize(objective, np.zeros(2 * n), ftol=ftol)
    betas = np.exp(res.x[:n])
    gammas = np.exp(res.x[n:])
    params = {"betas": [float(b) for b in betas], "gammas": [float(g) for g in gammas]}
    return TuneResult(method="new-one-count", params=params, dev1_entropy=res.fx, audit=audit.rows)


def _tune_church_gale(table, vocab, n, dev1, audit, preset: bool) -> TuneResult:
    from ngramsmooth.smoothers.churchgale import build_church_gale, build_church_gale_trigram

    if preset:
        params = dict(CG_LARGE_PRESET)
        params["c_min"] = max(table.sentences // 200, 1) if table.sentences > 0 else params["c_min"]
        return TuneResult(method="church-gale", params=params, dev1_entropy=math.nan, audit=[])

    build = build_church_gale_trigram if n >= 3 else build_church_gale

    def entropy_for(c_min: int, c_mb: int, p_n1_N: float) -> float:
        model = build(table, vocab, c_mb=c_mb, c_min=c_min, p_n1_0=CG_P_N1_0, p_n1_N=p_n1_N)
        h = _dev_entropy_by_query(model, dev1)
        return audit.record({"c_min": c_min, "c_mb": c_mb, "p_n1_N": p_n1_N}, h)

    n_nonzero = len(table.counts[n - 1])
    cmin_grid = [c for c in _log_grid(10, max(n_nonzero, 20), per_decade=1)]
    cmb_grid = [100, 1000, 10_000]
    best = None
    for c_min in cmin_grid:
        for c_mb in cmb_grid:
            h = entropy_for(c_min, c_mb, 0.5)
            if best is None or h < best[0]:
                best = (h, c_min, c_mb)
    _, c_min, c_mb = best

    def objective(x) -> float:
        p = 1.0 / (1.0 + math.exp(-x[0]))
        return entropy_for(c_min, c_mb, p)

    res = powell_minimize(objective, [0.0], ftol=1e-3, max_iterations=8)
    p_n1_N = 1.0 / (1.0 + math.exp(-res.x[0]))
    params = {"c_min": c_min, "c_mb": c_mb, "p_n1_0": CG_P_N1_0, "p_n1_N": p_n1_N}
    return TuneResult(method="church-gale", params=params, dev1_entropy=res.fx, audit=audit.rows)
