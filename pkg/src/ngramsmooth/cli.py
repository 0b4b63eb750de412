"""Command-line driver: count, train, tune, eval, analyze, compare, sample.

A JSON experiment config plus a corpus fully determines every output byte.
Exit codes: 0 ok, 2 invalid input, 3 numeric failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from ngramsmooth import corpus as corpuslib
from ngramsmooth import counts as countslib
from ngramsmooth.errors import (
    CannotSmoothError,
    InfiniteEntropyError,
    InvalidParameterError,
    NgramSmoothError,
    NonFiniteObjectiveError,
    UndefinedDistributionError,
    UndefinedEstimateError,
    VocabularyMismatchError,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

_NUMERIC_ERRORS = (
    InfiniteEntropyError,
    UndefinedEstimateError,
    UndefinedDistributionError,
    CannotSmoothError,
    NonFiniteObjectiveError,
)


@dataclass
class ExperimentConfig:
    corpus: str
    method: str = "interp-baseline"
    order: int = 3
    params: dict = field(default_factory=dict)
    split: dict = field(default_factory=lambda: {"test": 0, "dev1": 0, "dev2": 0, "train": None})
    vocab: dict = field(default_factory=lambda: {"min_count": 1, "file": None, "lowercase": False, "scope": "full"})
    seed: int = 0
    count_eos: bool = True
    out_dir: str = "."

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        known = {f for f in cls.__dataclass_fields__}
        extra = set(data) - known
        if extra:
            raise InvalidParameterError(f"unknown config fields {sorted(extra)}")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def _load_split(cfg: ExperimentConfig):
    sentences = corpuslib.read_sentences(cfg.corpus, lowercase=cfg.vocab.get("lowercase", False))
    sizes = dict(cfg.split)
    if sizes.get("train") is None:
        fixed = sum(sizes[k] or 0 for k in ("test", "dev1", "dev2"))
        sizes["train"] = len(sentences) - fixed
    split = corpuslib.split_corpus(sentences, sizes)
    segs = {name: sentences[a:b] for name, (a, b) in split.ranges().items()}
    if cfg.vocab.get("file"):
        vocab = corpuslib.read_vocabulary(cfg.vocab["file"])
    else:
        scope = segs["train"] if cfg.vocab.get("scope", "full") == "train" else sentences
        vocab = corpuslib.build_vocabulary(scope, min_count=cfg.vocab.get("min_count", 1))
    return sentences, split, segs, vocab


def _encode(segs, vocab, order):
    return {name: corpuslib.encode_corpus(s, vocab, order) for name, s in segs.items()}


def _build_from_config(cfg: ExperimentConfig):
    from ngramsmooth.counts import count_ngrams
    from ngramsmooth.smoothers import build_model

    _, _, segs, vocab = _load_split(cfg)
    enc = _encode(segs, vocab, cfg.order)
    table = count_ngrams(enc["train"], cfg.order)
    model = build_model(
        cfg.method,
        table,
        vocab,
        cfg.order,
        params=cfg.params,
        dev_sentences=enc["dev2"],
        train_sentences=enc["train"],
    )
    return model, enc, vocab, table


def cmd_count(args) -> int:
    sentences = corpuslib.read_sentences(args.corpus, lowercase=args.lowercase)
    if args.vocab_file:
        vocab = corpuslib.read_vocabulary(args.vocab_file)
    else:
        vocab = corpuslib.build_vocabulary(sentences, min_count=args.min_count)
    if args.dry_run:
        print(f"dry-run: would count {len(sentences)} sentences at order {args.order} into {args.out}")
        return EXIT_OK
    enc = corpuslib.encode_corpus(sentences, vocab, args.order)
    table = countslib.count_ngrams(enc, args.order)
    countslib.write_count_file(table, vocab, args.out)
    if args.vocab_out:
        corpuslib.write_vocabulary(vocab, args.vocab_out)
    print(f"wrote {args.out} (orders 1..{args.order}, {table.total_tokens(1)} tokens)")
    return EXIT_OK


def cmd_train(args) -> int:
    from ngramsmooth.modelio import write_model

    cfg = ExperimentConfig.from_file(args.config)
    out = args.out or str(Path(cfg.out_dir) / "model.txt")
    if args.dry_run:
        _load_split(cfg)
        print(f"dry-run: would train {cfg.method} order {cfg.order} on {cfg.corpus} into {out}")
        return EXIT_OK
    model, _, _, _ = _build_from_config(cfg)
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    write_model(model, out)
    print(f"wrote {out}")
    return EXIT_OK


def cmd_tune(args) -> int:
    from ngramsmooth.counts import count_ngrams
    from ngramsmooth.optimize import tune_parameters

    cfg = ExperimentConfig.from_file(args.config)
    if args.dry_run:
        _load_split(cfg)
        print(f"dry-run: would tune {cfg.method} order {cfg.order} on {cfg.corpus}")
        return EXIT_OK
    _, _, segs, vocab = _load_split(cfg)
    enc = _encode(segs, vocab, cfg.order)
    table = count_ngrams(enc["train"], cfg.order)
    result = tune_parameters(
        cfg.method, table, vocab, cfg.order, enc["dev1"], enc["dev2"],
        train_sentences=enc["train"], cg_preset=args.cg_preset,
    )
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    params_path = args.out or str(out_dir / "tuned_params.json")
    with open(params_path, "w", encoding="utf-8") as fh:
        json.dump({"method": result.method, "params": result.params, "dev1_entropy": result.dev1_entropy}, fh, indent=2)
    audit_path = args.audit or str(out_dir / "tune_audit.txt")
    with open(audit_path, "w", encoding="utf-8") as fh:
        for row in result.audit:
            kv = " ".join(f"{k}={v!r}" for k, v in sorted(row["params"].items()))
            fh.write(f"{kv} dev1_entropy={row['dev1_entropy']!r}\n")
    print(f"wrote {params_path} and {audit_path}")
    return EXIT_OK


def cmd_eval(args) -> int:
    from ngramsmooth.evaluate import evaluate_model
    from ngramsmooth.modelio import read_model

    model = read_model(args.model)
    if args.vocab:
        expected = corpuslib.read_vocabulary(args.vocab).fingerprint()
        got = model.vocab.fingerprint()
        if expected != got:
            raise VocabularyMismatchError(expected, got)
    test_sents = corpuslib.read_sentences(args.test)
    if args.dry_run:
        print(f"dry-run: would evaluate {args.model} on {len(test_sents)} sentences")
        return EXIT_OK
    enc = corpuslib.encode_corpus(test_sents, model.vocab, model.order)
    report = evaluate_model(
        model, model.table, enc,
        count_eos=not args.no_count_eos, diagnostics=args.diagnostics, threads=args.threads,
    )
    prefix = args.out_prefix
    if prefix:
        Path(prefix).parent.mkdir(parents=True, exist_ok=True)
        with open(prefix + ".txt", "w", encoding="utf-8") as fh:
            fh.write(report.to_text())
        with open(prefix + ".tsv", "w", encoding="utf-8") as fh:
            fh.write(report.to_tsv())
    sys.stdout.write(report.to_text())
    return EXIT_OK


def cmd_analyze(args) -> int:
    from ngramsmooth.evaluate import bang_for_the_buck, evaluate_model
    from ngramsmooth.modelio import read_model

    models = [read_model(p) for p in args.model]
    first = models[0]
    for m in models[1:]:
        if m.vocab.fingerprint() != first.vocab.fingerprint():
            raise VocabularyMismatchError(first.vocab.fingerprint(), m.vocab.fingerprint())
    test_sents = corpuslib.read_sentences(args.test)
    if args.dry_run:
        print(f"dry-run: would analyze {len(models)} model(s) on {len(test_sents)} sentences")
        return EXIT_OK
    enc = corpuslib.encode_corpus(test_sents, first.vocab, first.order)
    out_lines = []
    for m in models:
        report = evaluate_model(m, m.table, enc, diagnostics=True)
        out_lines.append(report.to_text())
    if len(models) > 1 or args.bang_r:
        rs = args.bang_r or [0, 1, 2]
        out_lines.append("bang-for-the-buck (entropy per word on count-r events, rescaled; lower is better)")
        for r in rs:
            scores = bang_for_the_buck(models, first.table, enc, r)
            row = "  r={:<3} ".format(r) + "  ".join(f"{k}={v:.6f}" for k, v in scores.items())
            out_lines.append(row)
    text = "\n".join(out_lines) + "\n"
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_compare(args) -> int:
    from ngramsmooth.counts import count_ngrams
    from ngramsmooth.evaluate import cross_entropy
    from ngramsmooth.optimize import tune_parameters
    from ngramsmooth.smoothers import build_model

    configs = [ExperimentConfig.from_file(p) for p in args.config]
    shared = configs[0]
    if args.dry_run:
        _load_split(shared)
        print(f"dry-run: would compare {len(configs)} methods on {shared.corpus}")
        return EXIT_OK
    _, _, segs, vocab = _load_split(shared)
    results = []
    for cfg in configs:
        enc = _encode(segs, vocab, cfg.order)
        table = count_ngrams(enc["train"], cfg.order)
        params = dict(cfg.params)
        if args.tuned and cfg.method not in ("ml", "plus-one", "interp-baseline"):
            tuned = tune_parameters(cfg.method, table, vocab, cfg.order, enc["dev1"], enc["dev2"], train_sentences=enc["train"])
            params.update(tuned.params)
        model = build_model(cfg.method, table, vocab, cfg.order, params=params,
                            dev_sentences=enc["dev2"], train_sentences=enc["train"])
        h = cross_entropy(model, enc["test"], count_eos=shared.count_eos)
        results.append((cfg.method, cfg.order, h, params))
    base = next((h for m, _, h, _ in results if m == "interp-baseline"), results[0][2])
    lines = ["method            order  entropy(bits)  vs-baseline"]
    for m, order, h, _ in results:
        lines.append(f"{m:16s}  {order:>5}  {h:>12.6f}  {h - base:>+11.6f}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_sample(args) -> int:
    from ngramsmooth.sample import SampleSource, write_corpus

    if args.dry_run:
        print(f"dry-run: would write {args.words} words to {args.out}")
        return EXIT_OK
    src = SampleSource(vocab_size=args.vocab, seed=args.seed)
    write_corpus(src.generate(args.words), args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def _add_common(p):
    p.add_argument("--dry-run", action="store_true", help="validate inputs, write nothing")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ngramsmooth", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="count n-grams and write the sorted count file")
    p.add_argument("--corpus", required=True)
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--min-count", type=int, default=1)
    p.add_argument("--vocab-file")
    p.add_argument("--vocab-out")
    p.add_argument("--lowercase", action="store_true")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("train", help="train a model from an experiment config")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    _add_common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("tune", help="search method parameters on the dev sets")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--audit")
    p.add_argument("--cg-preset", action="store_true", help="use the large-corpus Church-Gale presets")
    _add_common(p)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("eval", help="evaluate a model file on test text")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--vocab", help="assert the model was built with this vocabulary")
    p.add_argument("--out-prefix")
    p.add_argument("--diagnostics", action="store_true")
    p.add_argument("--no-count-eos", action="store_true", help="exclude eos predictions from N_T")
    p.add_argument("--threads", type=int, default=1)
    _add_common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("analyze", help="count-by-count diagnostic report")
    p.add_argument("--model", action="append", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--bang-r", type=int, action="append")
    p.add_argument("--out")
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compare", help="entropy table across methods on a shared split")
    p.add_argument("--config", nargs="+", required=True)
    p.add_argument("--tuned", action="store_true", help="tune each method's parameters first")
    p.add_argument("--out")
    _add_common(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sample", help="write the deterministic synthetic sample corpus")
    p.add_argument("--words", type=int, default=100_000)
    p.add_argument("--vocab", type=int, default=1800)
    p.add_argument("--seed", type=int, default=20240101)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_sample)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _NUMERIC_ERRORS as exc:
        print(f"error[numeric]: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InvalidParameterError, VocabularyMismatchError, json.JSONDecodeError) as exc:
        print(f"error[invalid-input]: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except FileNotFoundError as exc:
        print(f"error[invalid-input]: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NgramSmoothError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
