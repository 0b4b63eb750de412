"""N-gram count accumulation for all orders up to n.

Counts are keyed by id tuples.  An order-k count is the number of times the
k-gram ends at a predicted position, i.e. its last token is a content, unk,
or eos token — never bos.  That convention makes every stored conditional
row sum to its history total, keeps bos out of the unigram distribution, and
still counts bos-initial histories (N(bos) = number of sentences for a
bigram model).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from collections.abc import Iterable, Mapping

import numpy as np

from ngramsmooth.corpus import BOS_ID, EncodedSentence, Vocabulary
from ngramsmooth.errors import InvalidParameterError

Ngram = tuple[int, ...]


@dataclass
class HistoryRow:
    """Continuations of one history: parallel id/count arrays plus aggregates."""

    ids: np.ndarray
    counts: np.ndarray
    total: int
    distinct: int
    ones: int


@dataclass
class CountTable:
    """Counts for every order 1..order, with per-history aggregates."""

    order: int
    counts: list[dict[Ngram, int]]          # counts[k-1] holds order-k counts
    rows: list[dict[Ngram, HistoryRow]]     # rows[k-1]: history (len k-1) -> continuations
    sentences: int

    def count(self, ngram: Ngram) -> int:
        k = len(ngram)
        if not 1 <= k <= self.order:
            raise InvalidParameterError(f"no order-{k} counts in a table of order {self.order}")
        return self.counts[k - 1].get(tuple(ngram), 0)

    def row(self, history: Ngram) -> HistoryRow | None:
        k = len(history) + 1
        if k > self.order:
            raise InvalidParameterError(f"history of length {len(history)} too long for order {self.order}")
        return self.rows[k - 1].get(tuple(history))

    def total_tokens(self, order: int) -> int:
        return sum(self.counts[order - 1].values())


@dataclass(frozen=True)
class CountOfCounts:
    """Sparse map r -> number of order-k n-grams with exactly r counts."""

    order: int
    n_r: dict[int, int]
    total: int

    def __post_init__(self):
        assert sum(r * n for r, n in self.n_r.items()) == self.total


def count_ngrams(sentences: Iterable[EncodedSentence], max_order: int) -> CountTable:
    """Accumulate counts of all n-grams up to max_order over encoded sentences."""
    if max_order < 1:
        raise InvalidParameterError(f"max_order must be >= 1, got {max_order}")
    counts: list[dict[Ngram, int]] = [{} for _ in range(max_order)]
    n_sentences = 0
    for sent in sentences:
        ids = sent.ids
        pad = sent.order - 1
        if pad < max_order - 1:
            raise InvalidParameterError(
                f"sentence padded for order {sent.order} cannot supply order-{max_order} counts"
            )
        n_sentences += 1
        seq = ids.tolist()
        for i in range(pad, len(seq)):
            for k in range(1, max_order + 1):
                g = tuple(seq[i - k + 1 : i + 1])
                d = counts[k - 1]
                d[g] = d.get(g, 0) + 1
    table = CountTable(order=max_order, counts=counts, rows=[{} for _ in range(max_order)], sentences=n_sentences)
    _build_rows(table)
    return table


def merge_tables(parts: list[CountTable]) -> CountTable:
    """Deterministic merge of shard counts; equals single-pass counting exactly."""
    if not parts:
        raise InvalidParameterError("nothing to merge")
    order = parts[0].order
    if any(p.order != order for p in parts):
        raise InvalidParameterError("shards counted at different orders")
    counts: list[dict[Ngram, int]] = [{} for _ in range(order)]
    for part in parts:
        for k in range(order):
            d = counts[k]
            for g, c in part.counts[k].items():
                d[g] = d.get(g, 0) + c
    table = CountTable(
        order=order, counts=counts, rows=[{} for _ in range(order)], sentences=sum(p.sentences for p in parts)
    )
    _build_rows(table)
    return table


def _build_rows(table: CountTable) -> None:
    for k in range(1, table.order + 1):
        grouped: dict[Ngram, list[tuple[int, int]]] = {}
        for g, c in table.counts[k - 1].items():
            grouped.setdefault(g[:-1], []).append((g[-1], c))
        rows = table.rows[k - 1]
        for h, items in grouped.items():
            items.sort()
            ids = np.array([w for w, _ in items], dtype=np.int64)
            cs = np.array([c for _, c in items], dtype=np.int64)
            rows[h] = HistoryRow(
                ids=ids,
                counts=cs,
                total=int(cs.sum()),
                distinct=len(cs),
                ones=int(np.count_nonzero(cs == 1)),
            )


def history_aggregate(table: CountTable, history: Ngram) -> tuple[int, int, int]:
    """(N, distinct, ones) for a history; (0, 0, 0) if unseen."""
    row = table.row(tuple(history))
    if row is None:
        return (0, 0, 0)
    return (row.total, row.distinct, row.ones)


def count_of_counts(table: CountTable, order: int) -> CountOfCounts:
    if not 1 <= order <= table.order:
        raise InvalidParameterError(f"order {order} out of range for table of order {table.order}")
    n_r: dict[int, int] = {}
    total = 0
    for c in table.counts[order - 1].values():
        n_r[c] = n_r.get(c, 0) + 1
        total += c
    return CountOfCounts(order=order, n_r=n_r, total=total)


def count_of_counts_from_values(values: Iterable[int]) -> CountOfCounts:
    n_r: dict[int, int] = {}
    total = 0
    for c in values:
        n_r[c] = n_r.get(c, 0) + 1
        total += c
    return CountOfCounts(order=0, n_r=n_r, total=total)


def write_count_file(table: CountTable, vocab: Vocabulary, path) -> None:
    """Sorted text dump: per-order header, then tab-separated tokens and count."""
    with open(path, "w", encoding="utf-8") as fh:
        for k in range(1, table.order + 1):
            fh.write(f"#order {k} #tokens {table.total_tokens(k)}\n")
            lines = []
            for g, c in table.counts[k - 1].items():
                toks = tuple(vocab.surface(t) for t in g)
                lines.append((toks, c))
            lines.sort()
            for toks, c in lines:
                fh.write("\t".join(toks) + "\t" + str(c) + "\n")


def read_count_file(path, vocab: Vocabulary) -> CountTable:
    counts: list[dict[Ngram, int]] = []
    order = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#order"):
                order = int(line.split()[1])
                while len(counts) < order:
                    counts.append({})
                continue
            parts = line.split("\t")
            g = tuple(vocab.id_of[t] for t in parts[:-1])
            counts[len(g) - 1][g] = int(parts[-1])
    if not counts:
        raise InvalidParameterError(f"no counts found in {path}")
    # sentence count recoverable from bos-led histories only approximately; keep 0
    table = CountTable(order=len(counts), counts=counts, rows=[{} for _ in counts], sentences=0)
    _build_rows(table)
    return table


def global_count_histogram(counts: Mapping[Ngram, int]) -> dict[int, int]:
    """r -> number of n-grams with count r, over a raw count mapping."""
    hist: dict[int, int] = {}
    for c in counts.values():
        hist[c] = hist.get(c, 0) + 1
    return hist
