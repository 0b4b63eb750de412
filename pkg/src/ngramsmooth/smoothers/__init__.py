"""The nine conditional-model constructors behind one query interface."""

from __future__ import annotations

from ngramsmooth.corpus import EncodedSentence, Vocabulary
from ngramsmooth.counts import CountTable
from ngramsmooth.errors import InvalidParameterError
from ngramsmooth.smoothers.additive import build_additive, build_plus_one
from ngramsmooth.smoothers.base import SmoothedModel, cond_logprob, cond_prob
from ngramsmooth.smoothers.churchgale import build_church_gale, build_church_gale_trigram
from ngramsmooth.smoothers.interp import build_avg_count, build_baseline, build_jm
from ngramsmooth.smoothers.katz import build_katz, katz_discounts
from ngramsmooth.smoothers.ml import build_ml
from ngramsmooth.smoothers.onecount import build_one_count

METHODS = (
    "ml",
    "plus-one",
    "plus-delta",
    "katz",
    "church-gale",
    "interp-held-out",
    "interp-del-int",
    "new-avg-count",
    "new-one-count",
    "interp-baseline",
)


def build_model(
    method: str,
    table: CountTable,
    vocab: Vocabulary,
    n: int,
    params: dict | None = None,
    dev_sentences: list[EncodedSentence] | None = None,
    train_sentences: list[EncodedSentence] | None = None,
) -> SmoothedModel:
    """Construct any method from a count table plus its parameters.

    Interpolated methods train their lambdas on dev_sentences (held-out) or
    on train_sentences (deleted interpolation).
    """
    p = dict(params or {})
    if method == "ml":
        return build_ml(table, vocab, n)
    if method == "plus-one":
        return build_plus_one(table, vocab, n, convention=p.get("convention", "events"))
    if method == "plus-delta":
        return build_additive(
            table, vocab, n, delta=p.get("delta", 0.5), convention=p.get("convention", "events")
        )
    if method == "katz":
        return build_katz(
            table, vocab, n,
            k=p.get("k", 5),
            delta_unigram=p.get("delta", 1.0),
            beta=p.get("beta", 1.0),
        )
    if method == "church-gale":
        build = build_church_gale_trigram if n >= 3 else build_church_gale
        if n not in (2, 3):
            raise InvalidParameterError("church-gale is implemented for bigram and trigram models")
        c_min = p.get("c_min", 100)
        if c_min in ("inf", float("inf")):
            c_min = None
        return build(
            table, vocab,
            c_mb=p.get("c_mb", 1000),
            c_min=c_min,
            p_n1_0=p.get("p_n1_0", 0.01),
            p_n1_N=p.get("p_n1_N", 0.5),
        )
    if method == "new-one-count":
        return build_one_count(table, vocab, n, betas=p.get("betas", 1.0), gammas=p.get("gammas", 1.0))
    if method == "interp-baseline":
        if dev_sentences is None:
            raise InvalidParameterError("interp-baseline needs dev_sentences for lambda training")
        return build_baseline(table, vocab, n, dev_sentences)
    if method in ("interp-held-out", "new-avg-count", "interp-del-int"):
        c_min = p.get("c_min", 100)
        c_top = p.get("c_top", 100_000)
        if method == "interp-del-int":
            if train_sentences is None:
                raise InvalidParameterError("deleted interpolation needs the training sentences")
            return build_jm(table, vocab, n, train_sentences, mode="deleted", c_min=c_min, c_top=c_top)
        if dev_sentences is None:
            raise InvalidParameterError(f"{method} needs dev_sentences for lambda training")
        key_kind = "average-count" if method == "new-avg-count" else "total-count"
        return build_jm(table, vocab, n, dev_sentences, mode="held-out", key_kind=key_kind, c_min=c_min, c_top=c_top)
    raise InvalidParameterError(f"unknown method {method!r}")


__all__ = [
    "METHODS",
    "SmoothedModel",
    "build_model",
    "cond_prob",
    "cond_logprob",
    "build_ml",
    "build_plus_one",
    "build_additive",
    "build_katz",
    "katz_discounts",
    "build_church_gale",
    "build_church_gale_trigram",
    "build_jm",
    "build_baseline",
    "build_avg_count",
    "build_one_count",
]
