import numpy as np
import pytest

from ngramsmooth.corpus import build_vocabulary, encode_corpus
from ngramsmooth.counts import count_ngrams

CHEN_SENTENCES = [
    "John read Moby Dick".split(),
    "Mary read a different book".split(),
    "she read a book by Cher".split(),
]


@pytest.fixture(scope="session")
def chen():
    """The worked three-sentence corpus: vocab, bigram-encoded sentences, counts."""
    vocab = build_vocabulary(CHEN_SENTENCES, min_count=1)
    enc = encode_corpus(CHEN_SENTENCES, vocab, 2)
    table = count_ngrams(enc, 2)
    return vocab, enc, table


def synthetic_sentences(rng, n_sent, vocab_size=30, min_len=3, max_len=9):
    words = [f"w{i}" for i in range(vocab_size)]
    zipf = 1.0 / (np.arange(vocab_size) + 2.0)
    zipf /= zipf.sum()
    return [
        [words[rng.choice(vocab_size, p=zipf)] for _ in range(rng.integers(min_len, max_len))]
        for _ in range(n_sent)
    ]


@pytest.fixture(scope="session")
def small_world():
    """A reusable synthetic train/dev/test bundle at order 3."""
    rng = np.random.default_rng(7)
    train = synthetic_sentences(rng, 150)
    dev = synthetic_sentences(rng, 50)
    test = synthetic_sentences(rng, 50)
    vocab = build_vocabulary(train + dev + test, min_count=1)
    enc = {
        "train": encode_corpus(train, vocab, 3),
        "dev": encode_corpus(dev, vocab, 3),
        "test": encode_corpus(test, vocab, 3),
    }
    table = count_ngrams(enc["train"], 3)
    return vocab, enc, table
