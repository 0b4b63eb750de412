"""Model file format: text export/import that round-trips queries exactly.

Layout:
    #method <tag> #order <n> #params k=v ...
    #sentences <count>
    #vocab <word count> <fingerprint>
    <one word per line>
    #state <name> <line count>          (trained parameters, method-specific)
    ...
    #ngrams <order> <count>
    <log10prob or -> TAB tok1 .. tokk TAB c=<count>

Counts are exact integers and floats are serialized with repr, so importing
rebuilds the identical model: deterministic constructions (Katz discounts,
Church-Gale bucket fits) are recomputed from the counts, while trained
lambdas and bucket boundaries are restored verbatim from state blocks.
The top-order rows carry the model's conditional log10 probability for
interoperability; lower-order rows carry counts only.
"""

from __future__ import annotations

import json
import math

import numpy as np

from ngramsmooth.buckets import BucketMap
from ngramsmooth.corpus import Vocabulary, build_vocabulary
from ngramsmooth.counts import CountTable, _build_rows
from ngramsmooth.errors import InvalidParameterError
from ngramsmooth.smoothers import build_model
from ngramsmooth.smoothers.base import SmoothedModel
from ngramsmooth.smoothers.interp import InterpolatedModel


def _encode_value(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return json.dumps(list(v), separators=(",", ":"))
    return str(v)


def _decode_value(s: str):
    try:
        return json.loads(s)
    except json.JSONDecodeError:
        return s


def write_model(model: SmoothedModel, path) -> None:
    vocab = model.vocab
    table = model.table
    params = model.params()
    with open(path, "w", encoding="utf-8") as fh:
        kv = " ".join(f"{k}={_encode_value(v)}" for k, v in sorted(params.items()))
        fh.write(f"#method {model.method} #order {model.order} #params {kv}\n")
        fh.write(f"#sentences {table.sentences}\n")
        fh.write(f"#vocab {len(vocab.words)} {vocab.fingerprint()}\n")
        for w in vocab.words:
            fh.write(w + "\n")
        for name, lines in _state_blocks(model):
            fh.write(f"#state {name} {len(lines)}\n")
            for line in lines:
                fh.write(line + "\n")
        for k in range(1, table.order + 1):
            entries = []
            for g, c in table.counts[k - 1].items():
                toks = tuple(vocab.surface(t) for t in g)
                entries.append((toks, g, c))
            entries.sort()
            fh.write(f"#ngrams {k} {len(entries)}\n")
            for toks, g, c in entries:
                if k == model.order:
                    p = model.prob(g[:-1], g[-1])
                    lp = repr(math.log10(p)) if p > 0 else "-inf"
                else:
                    lp = "-"
                fh.write(lp + "\t" + "\t".join(toks) + "\t" + f"c={c}\n")


def _state_blocks(model: SmoothedModel):
    if isinstance(model, InterpolatedModel):
        for k in range(1, model.order + 1):
            bmap = model.maps[k - 1]
            lines = [f"kind {bmap.kind}", f"c_top {repr(float(bmap.c_top))}"]
            lines += [repr(float(u)) for u in bmap.upper]
            yield f"bucketmap{k}", lines
            yield f"lambda{k}", [repr(float(v)) for v in model.lambdas[k - 1]]


def read_model(path) -> SmoothedModel:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("#method "):
        raise InvalidParameterError(f"{path} is not a model file")
    head = lines[0]
    method = head.split()[1]
    order = int(head.split("#order")[1].split()[0])
    params_str = head.split("#params", 1)[1].strip()
    params = {}
    if params_str:
        for pair in params_str.split(" "):
            k, v = pair.split("=", 1)
            params[k] = _decode_value(v)
    i = 1
    sentences = 0
    if lines[i].startswith("#sentences"):
        sentences = int(lines[i].split()[1])
        i += 1
    if not lines[i].startswith("#vocab"):
        raise InvalidParameterError("missing #vocab block")
    n_words = int(lines[i].split()[1])
    i += 1
    words = lines[i : i + n_words]
    i += n_words
    vocab = build_vocabulary([], explicit_list=words)

    states: dict[str, list[str]] = {}
    while i < len(lines) and lines[i].startswith("#state "):
        _, name, count = lines[i].split()
        states[name] = lines[i + 1 : i + 1 + int(count)]
        i += 1 + int(count)

    counts: list[dict[tuple[int, ...], int]] = []
    while i < len(lines):
        if not lines[i].startswith("#ngrams"):
            raise InvalidParameterError(f"unexpected line in model file: {lines[i]!r}")
        _, k, count = lines[i].split()
        k, count = int(k), int(count)
        while len(counts) < k:
            counts.append({})
        for line in lines[i + 1 : i + 1 + count]:
            parts = line.split("\t")
            toks = parts[1:-1]
            c = int(parts[-1].removeprefix("c="))
            g = tuple(vocab.id_of[t] for t in toks)
            counts[k - 1][g] = c
        i += 1 + count
    table = CountTable(order=len(counts), counts=counts, rows=[{} for _ in counts], sentences=sentences)
    _build_rows(table)

    if states:
        maps, lambdas = [], []
        for k in range(1, order + 1):
            block = states[f"bucketmap{k}"]
            kind = block[0].split(" ", 1)[1]
            c_top = float(block[1].split(" ", 1)[1])
            upper = np.array([float(x) for x in block[2:]], dtype=float)
            maps.append(BucketMap(kind=kind, upper=upper, c_top=c_top))
            lambdas.append(np.array([float(x) for x in states[f"lambda{k}"]], dtype=float))
        return InterpolatedModel(vocab, table, order, maps, lambdas, method)
    if method in ("interp-held-out", "interp-del-int", "new-avg-count", "interp-baseline"):
        raise InvalidParameterError(f"model file for {method} lacks its lambda state blocks")
    if method == "new-one-count":
        params = {"betas": params.get("betas", _collect(params, "beta", order)),
                  "gammas": params.get("gammas", _collect(params, "gamma", order))}
    return build_model(method, table, vocab, order, params=params)


def _collect(params: dict, stem: str, order: int):
    return [float(params[f"{stem}{k}"]) for k in range(1, order + 1)]
