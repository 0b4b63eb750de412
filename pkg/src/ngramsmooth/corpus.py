"""Corpus ingestion: vocabularies, sentence encoding, data splits.

Sentences are whitespace-tokenized lines of UTF-8 text.  A vocabulary maps
surface forms to dense integer ids with three reserved specials: id 0 is the
begin-of-sentence marker (history-only), id 1 end-of-sentence, id 2 the
unknown word.  Content words follow in lexicographic order, so id assignment
is deterministic for a given word set.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass, field
from collections.abc import Iterable, Sequence

import numpy as np

from ngramsmooth.errors import InvalidParameterError

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"

BOS_ID = 0
EOS_ID = 1
UNK_ID = 2
NUM_SPECIALS = 3


@dataclass(frozen=True)
class Vocabulary:
    """Closed word set with reserved boundary/unknown tokens.

    ``words`` holds content words only, in id order (id = index + 3).
    """

    words: tuple[str, ...]
    id_of: dict[str, int] = field(repr=False)

    @property
    def size(self) -> int:
        """Total id count, specials included."""
        return len(self.words) + NUM_SPECIALS

    @property
    def n_events(self) -> int:
        """Size of the predicted-event space: everything except bos."""
        return self.size - 1

    def lookup(self, word: str) -> int:
        return self.id_of.get(word, UNK_ID)

    def surface(self, token_id: int) -> str:
        if token_id == BOS_ID:
            return BOS
        if token_id == EOS_ID:
            return EOS
        if token_id == UNK_ID:
            return UNK
        return self.words[token_id - NUM_SPECIALS]

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        for w in self.words:
            h.update(w.encode("utf-8"))
            h.update(b"\n")
        return h.hexdigest()[:16]

    def event_ids(self) -> np.ndarray:
        """All ids that may appear as a predicted event (bos excluded)."""
        return np.arange(1, self.size, dtype=np.int64)


@dataclass(frozen=True)
class EncodedSentence:
    """Token ids padded for a given model order: n-1 bos ids, then one eos id."""

    ids: np.ndarray
    order: int

    def __post_init__(self):
        object.__setattr__(self, "ids", np.asarray(self.ids, dtype=np.int64))

    @property
    def n_predicted(self) -> int:
        """Events the sentence contributes: content tokens plus the eos prediction."""
        return len(self.ids) - (self.order - 1)


@dataclass(frozen=True)
class DataSplit:
    """Adjacent disjoint sentence ranges in the fixed order test, dev1, dev2, train."""

    test: tuple[int, int]
    dev1: tuple[int, int]
    dev2: tuple[int, int]
    train: tuple[int, int]

    def ranges(self) -> dict[str, tuple[int, int]]:
        return {"test": self.test, "dev1": self.dev1, "dev2": self.dev2, "train": self.train}


def tokenize(line: str, lowercase: bool = False) -> list[str]:
    if lowercase:
        line = line.lower()
    return line.split()


def read_sentences(path, lowercase: bool = False) -> list[list[str]]:
    """Read a one-sentence-per-line corpus; blank lines are skipped."""
    sentences = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            toks = tokenize(line, lowercase)
            if toks:
                sentences.append(toks)
    return sentences


def build_vocabulary(
    sentences: Iterable[Sequence[str]],
    min_count: int = 1,
    explicit_list: Iterable[str] | None = None,
) -> Vocabulary:
    """Collect words with corpus frequency >= min_count (or an explicit list).

    The three specials are always present.  An empty corpus yields a
    specials-only vocabulary.
    """
    if explicit_list is not None:
        words = sorted(set(explicit_list) - {BOS, EOS, UNK})
    else:
        if min_count < 1:
            raise InvalidParameterError(f"min_count must be >= 1, got {min_count}")
        freq = Counter()
        for sent in sentences:
            freq.update(sent)
        words = sorted(w for w, c in freq.items() if c >= min_count and w not in (BOS, EOS, UNK))
    id_of = {w: i + NUM_SPECIALS for i, w in enumerate(words)}
    id_of[BOS] = BOS_ID
    id_of[EOS] = EOS_ID
    id_of[UNK] = UNK_ID
    return Vocabulary(words=tuple(words), id_of=id_of)


def write_vocabulary(vocab: Vocabulary, path) -> None:
    """One word per line; id = line index after the three specials."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# ngramsmooth vocabulary: ids {BOS}={BOS_ID} {EOS}={EOS_ID} {UNK}={UNK_ID}, then line order\n")
        fh.write(f"# words {len(vocab.words)} fingerprint {vocab.fingerprint()}\n")
        for w in vocab.words:
            fh.write(w + "\n")


def read_vocabulary(path) -> Vocabulary:
    words = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#"):
                continue
            w = line.strip()
            if w:
                words.append(w)
    return build_vocabulary([], explicit_list=words)


def encode_sentence(words: Sequence[str], vocab: Vocabulary, order: int) -> EncodedSentence:
    """Pad with order-1 bos ids, append eos, map OOV words to unk."""
    if order < 1:
        raise InvalidParameterError(f"order must be >= 1, got {order}")
    ids = [BOS_ID] * (order - 1)
    ids.extend(vocab.lookup(w) for w in words)
    ids.append(EOS_ID)
    return EncodedSentence(ids=np.array(ids, dtype=np.int64), order=order)


def encode_corpus(sentences: Iterable[Sequence[str]], vocab: Vocabulary, order: int) -> list[EncodedSentence]:
    return [encode_sentence(s, vocab, order) for s in sentences]


def split_corpus(sentences: Sequence, sizes: dict[str, int]) -> DataSplit:
    """Carve adjacent disjoint segments in the order test, dev1, dev2, train."""
    required = ("test", "dev1", "dev2", "train")
    missing = [k for k in required if k not in sizes]
    if missing:
        raise InvalidParameterError(f"split sizes missing {missing}")
    total = sum(sizes[k] for k in required)
    if any(sizes[k] < 0 for k in required):
        raise InvalidParameterError("split sizes must be nonnegative")
    if total > len(sentences):
        raise InvalidParameterError(
            f"split needs {total} sentences but corpus has {len(sentences)} (short by {total - len(sentences)})"
        )
    bounds = {}
    start = 0
    for k in required:
        bounds[k] = (start, start + sizes[k])
        start += sizes[k]
    return DataSplit(**bounds)
