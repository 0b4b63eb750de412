"""Deterministic synthetic text for desk-scale experiments.

No free text corpus ships with the package, so this generator produces a
language-like sample instead: Zipfian unigrams, sparse per-context successor
preferences (hashed, so the "grammar" is stable without storing V^2 tables),
and a recency cache that makes words bursty the way real text is.  The same
seed always yields byte-identical output.

Regenerate the bundled corpus with:  python -m ngramsmooth.sample
"""

from __future__ import annotations

import importlib.resources
import math
from pathlib import Path

import numpy as np

DEFAULT_SEED = 20240101
DEFAULT_WORDS = 100_000
DEFAULT_VOCAB = 1800

_ONSETS = "b bl br c ch cl cr d dr f fl fr g gl gr h j k l m n p pl pr qu r s sc sh sl sm sp st str t th tr v w".split()
_NUCLEI = "a e i o u ai ea ee io ou".split()
_CODAS = ["", "b", "ck", "d", "g", "l", "ll", "m", "n", "nd", "ng", "nt", "r", "rd", "s", "st", "t", "th"]


def _word_surface(i: int, rng: np.random.Generator) -> str:
    n_syll = 1 + (i % 3 == 1) + (i % 7 == 3)
    parts = []
    for _ in range(n_syll):
        parts.append(_ONSETS[rng.integers(len(_ONSETS))])
        parts.append(_NUCLEI[rng.integers(len(_NUCLEI))])
    parts.append(_CODAS[rng.integers(len(_CODAS))])
    return "".join(parts)


class SampleSource:
    """A fixed synthetic source over a Zipfian vocabulary."""

    def __init__(self, vocab_size: int = DEFAULT_VOCAB, seed: int = DEFAULT_SEED):
        self.seed = seed
        self.vocab_size = vocab_size
        rng = np.random.default_rng(seed)
        surfaces = []
        used = set()
        for i in range(vocab_size):
            w = _word_surface(i, rng)
            while w in used:
                w += _NUCLEI[rng.integers(len(_NUCLEI))]
            used.add(w)
            surfaces.append(w)
        self.words = surfaces
        ranks = np.arange(vocab_size, dtype=float)
        base = 1.0 / (ranks + 2.7) ** 1.05
        self.base = base / base.sum()
        self._pref1: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        self._pref2: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}

    def _preferences(self, key, n_succ: int) -> tuple[np.ndarray, np.ndarray]:
        sub = np.random.default_rng((self.seed, 7919) + (key if isinstance(key, tuple) else (key,)))
        cands = sub.choice(self.vocab_size, size=n_succ, replace=False, p=self.base)
        weights = 1.0 / (np.arange(n_succ) + 1.0) ** 0.8
        return cands, weights / weights.sum()

    def pref1(self, x: int):
        out = self._pref1.get(x)
        if out is None:
            out = self._preferences(x, 14)
            self._pref1[x] = out
        return out

    def pref2(self, x: int, y: int):
        out = self._pref2.get((x, y))
        if out is None:
            out = self._preferences((x, y), 6)
            self._pref2[(x, y)] = out
        return out

    def generate(self, n_words: int = DEFAULT_WORDS) -> list[list[str]]:
        rng = np.random.default_rng((self.seed, 1))
        sentences: list[list[str]] = []
        cache: list[int] = []
        produced = 0
        while produced < n_words:
            length = int(min(5 + rng.geometric(1.0 / 11.0), 42))
            ids = []
            x = y = -1
            for _ in range(length):
                u = rng.random()
                if u < 0.32 and x >= 0:
                    cands, w = self.pref2(x, y) if y >= 0 else self.pref1(x)
                    z = int(cands[rng.choice(len(cands), p=w)])
                elif u < 0.62 and x >= 0:
                    cands, w = self.pref1(x)
                    z = int(cands[rng.choice(len(cands), p=w)])
                elif u < 0.74 and cache:
                    z = cache[int(rng.integers(len(cache)))]
                else:
                    z = int(rng.choice(self.vocab_size, p=self.base))
                ids.append(z)
                cache.append(z)
                if len(cache) > 30:
                    cache.pop(0)
                y, x = x, z
            sentences.append([self.words[i] for i in ids])
            produced += length
        return sentences


def write_corpus(sentences: list[list[str]], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in sentences:
            fh.write(" ".join(s) + "\n")


def bundled_sample_path() -> Path:
    return Path(importlib.resources.files("ngramsmooth")) / "data" / "sample_100k.txt"


def chen_corpus_path() -> Path:
    return Path(importlib.resources.files("ngramsmooth")) / "data" / "three_sentences.txt"


def ensure_sample(path: Path | None = None, n_words: int = DEFAULT_WORDS, seed: int = DEFAULT_SEED) -> Path:
    """Regenerate the bundled sample if it is missing; returns its path."""
    path = Path(path) if path is not None else bundled_sample_path()
    if not path.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
        write_corpus(SampleSource(seed=seed).generate(n_words), path)
    return path


def main() -> None:
    import argparse

    ap = argparse.ArgumentParser(description="Generate the synthetic sample corpus")
    ap.add_argument("--words", type=int, default=DEFAULT_WORDS)
    ap.add_argument("--vocab", type=int, default=DEFAULT_VOCAB)
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--out", default=str(bundled_sample_path()))
    args = ap.parse_args()
    src = SampleSource(vocab_size=args.vocab, seed=args.seed)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    write_corpus(src.generate(args.words), args.out)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
