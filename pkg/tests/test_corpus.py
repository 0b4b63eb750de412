import numpy as np
import pytest

from ngramsmooth.corpus import (
    BOS_ID,
    EOS_ID,
    UNK_ID,
    build_vocabulary,
    encode_corpus,
    encode_sentence,
    read_vocabulary,
    split_corpus,
    write_vocabulary,
)
from ngramsmooth.errors import InvalidParameterError

from conftest import CHEN_SENTENCES


def test_chen_vocabulary_has_eleven_content_words():
    vocab = build_vocabulary(CHEN_SENTENCES, min_count=1)
    assert len(vocab.words) == 11
    assert vocab.size == 14
    assert vocab.n_events == 13


def test_min_count_threshold_boundary():
    sents = [["a"]] * 100 + [["b"]] * 69
    vocab = build_vocabulary(sents, min_count=70)
    assert vocab.words == ("a",)


def test_empty_corpus_gives_specials_only():
    vocab = build_vocabulary([], min_count=1)
    assert vocab.words == ()
    assert vocab.size == 3


def test_min_count_below_one_rejected():
    with pytest.raises(InvalidParameterError):
        build_vocabulary([["a"]], min_count=0)


def test_explicit_list_overrides_min_count():
    vocab = build_vocabulary([["a"], ["b"]], min_count=99, explicit_list=["x", "y"])
    assert vocab.words == ("x", "y")


def test_encode_bigram_padding():
    vocab = build_vocabulary(CHEN_SENTENCES, min_count=1)
    enc = encode_sentence("John read a book".split(), vocab, 2)
    assert enc.ids[0] == BOS_ID
    assert enc.ids[-1] == EOS_ID
    assert len(enc.ids) == 6
    assert enc.n_predicted == 5


def test_encode_trigram_padding():
    vocab = build_vocabulary(CHEN_SENTENCES, min_count=1)
    enc = encode_sentence("John read a book".split(), vocab, 3)
    assert list(enc.ids[:2]) == [BOS_ID, BOS_ID]
    assert (enc.ids[2:-1] != BOS_ID).all()


def test_oov_maps_to_unk():
    vocab = build_vocabulary(CHEN_SENTENCES, min_count=1)
    enc = encode_sentence(["xyzzy"], vocab, 2)
    assert list(enc.ids) == [BOS_ID, UNK_ID, EOS_ID]


def test_boundary_token_counts_per_order():
    vocab = build_vocabulary(CHEN_SENTENCES, min_count=1)
    for n in (1, 2, 3, 4):
        for enc in encode_corpus(CHEN_SENTENCES, vocab, n):
            ids = list(enc.ids)
            assert ids.count(BOS_ID) == n - 1
            assert ids.count(EOS_ID) == 1
            assert ids[-1] == EOS_ID


def test_encoding_is_deterministic():
    vocab = build_vocabulary(CHEN_SENTENCES, min_count=1)
    a = encode_corpus(CHEN_SENTENCES, vocab, 3)
    b = encode_corpus(CHEN_SENTENCES, vocab, 3)
    assert all((x.ids == y.ids).all() for x, y in zip(a, b))


def test_vocabulary_build_idempotent():
    vocab = build_vocabulary(CHEN_SENTENCES, min_count=1)
    decoded = [[vocab.surface(vocab.lookup(w)) for w in s] for s in CHEN_SENTENCES]
    again = build_vocabulary(decoded, min_count=1)
    assert again.words == vocab.words
    assert again.fingerprint() == vocab.fingerprint()


def test_split_ranges():
    split = split_corpus(list(range(100)), {"test": 10, "dev1": 10, "dev2": 10, "train": 70})
    assert split.test == (0, 10)
    assert split.dev1 == (10, 20)
    assert split.dev2 == (20, 30)
    assert split.train == (30, 100)


def test_split_exact_fit():
    split = split_corpus(list(range(40)), {"test": 10, "dev1": 10, "dev2": 10, "train": 10})
    assert split.train == (30, 40)


def test_split_shortfall_reported():
    with pytest.raises(InvalidParameterError, match="short by 5"):
        split_corpus(list(range(35)), {"test": 10, "dev1": 10, "dev2": 10, "train": 10})


def test_vocab_file_roundtrip(tmp_path):
    vocab = build_vocabulary(CHEN_SENTENCES, min_count=1)
    path = tmp_path / "vocab.txt"
    write_vocabulary(vocab, path)
    again = read_vocabulary(path)
    assert again.words == vocab.words
    assert again.fingerprint() == vocab.fingerprint()
