"""BM25 inverted index over passages.

The indexed text of a passage is its title concatenated with its body text
("title text"), so title terms participate in ranking. Scoring uses the
non-negative IDF variant

    idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5))
    score(q, p) = sum over query term occurrences of
        idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * dl / avgdl))

so hand-computed oracles match exactly. Searches return only passages with
a positive score (at least one query term present), sorted by score
descending with ties broken by ascending passage_id.
"""

from __future__ import annotations

import json
import math
import struct
from bisect import bisect_left
from dataclasses import dataclass
from pathlib import Path

from .analysis import analyze
from .errors import InputError, SchemaError
from .results import SearchResult
from .varint import decode_uvarint, encode_uvarint

FORMAT_VERSION = 1


@dataclass(frozen=True)
class BM25Params:
    k1: float = 0.9
    b: float = 0.4

    def __post_init__(self):
        if self.k1 < 0:
            raise ValueError(f"k1 must be >= 0, got {self.k1}")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError(f"b must be in [0, 1], got {self.b}")


@dataclass
class PostingList:
    term: str
    postings: list  # [(ordinal, tf)], ascending by ordinal

    @property
    def document_frequency(self) -> int:
        return len(self.postings)


class SparseIndex:
    """Immutable after build; unlimited concurrent searches."""

    def __init__(self, params: BM25Params = BM25Params()):
        self.params = params
        self.postings: dict[str, PostingList] = {}
        self.doc_lengths: list[int] = []
        self.passage_ids: list[str] = []
        self._pid_to_ordinal: dict[str, int] = {}
        self.avgdl = 0.0

    @property
    def passage_count(self) -> int:
        return len(self.passage_ids)

    def __len__(self) -> int:
        return len(self.passage_ids)

    def ordinal_of(self, passage_id: str) -> int:
        return self._pid_to_ordinal[passage_id]

    def _add(self, passage_id: str, terms: list[str]):
        if passage_id in self._pid_to_ordinal:
            raise InputError(f"duplicate passage_id {passage_id!r}")
        if any(c in passage_id for c in "\t\n"):
            raise InputError(f"passage_id {passage_id!r} contains tab or newline")
        ordinal = len(self.passage_ids)
        self.passage_ids.append(passage_id)
        self._pid_to_ordinal[passage_id] = ordinal
        self.doc_lengths.append(len(terms))
        counts = {}
        for term in terms:
            counts[term] = counts.get(term, 0) + 1
        for term, tf in counts.items():
            plist = self.postings.get(term)
            if plist is None:
                plist = PostingList(term, [])
                self.postings[term] = plist
            plist.postings.append((ordinal, tf))

    def _finalize(self):
        n = len(self.doc_lengths)
        self.avgdl = sum(self.doc_lengths) / n if n else 0.0
        return self

    def idf(self, term: str) -> float:
        df = len(self.postings[term].postings) if term in self.postings else 0
        n = self.passage_count
        return math.log(1.0 + (n - df + 0.5) / (df + 0.5))

    def term_frequency(self, term: str, ordinal: int) -> int:
        plist = self.postings.get(term)
        if plist is None:
            return 0
        pos = bisect_left(plist.postings, (ordinal,))
        if pos < len(plist.postings) and plist.postings[pos][0] == ordinal:
            return plist.postings[pos][1]
        return 0

    def score(self, query_terms: list[str], ordinal: int) -> float:
        """BM25 score of one passage for a term list.

        Each occurrence of a term in the query contributes independently, so
        a duplicated query term counts twice.
        """
        if not 0 <= ordinal < self.passage_count:
            raise InputError(f"ordinal {ordinal} out of range")
        k1, b = self.params.k1, self.params.b
        dl = self.doc_lengths[ordinal]
        norm = k1 * (1.0 - b + b * dl / self.avgdl) if self.avgdl else k1
        total = 0.0
        for term in query_terms:
            tf = self.term_frequency(term, ordinal)
            if tf == 0:
                continue
            total += self.idf(term) * tf * (k1 + 1.0) / (tf + norm)
        return total

    def search(self, query: str, k: int) -> list[SearchResult]:
        """Top-k passages for a free-text query.

        Equivalent to scoring every passage with ``score`` and keeping the k
        best positive ones; passages containing no query term score exactly
        zero and are never returned. An empty query yields an empty list.
        """
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        query_terms = analyze(query)
        if not query_terms or not self.passage_count:
            return []
        k1, b = self.params.k1, self.params.b
        accum: dict[int, float] = {}
        for term in query_terms:
            plist = self.postings.get(term)
            if plist is None:
                continue
            idf = self.idf(term)
            for ordinal, tf in plist.postings:
                dl = self.doc_lengths[ordinal]
                norm = k1 * (1.0 - b + b * dl / self.avgdl) if self.avgdl else k1
                accum[ordinal] = accum.get(ordinal, 0.0) + idf * tf * (k1 + 1.0) / (tf + norm)
        ranked = sorted(
            accum.items(), key=lambda item: (-item[1], self.passage_ids[item[0]])
        )[:k]
        return [
            SearchResult(self.passage_ids[ordinal], s, rank)
            for rank, (ordinal, s) in enumerate(ranked, start=1)
        ]


def indexed_text(passage) -> str:
    return passage.title + " " + passage.text


def build_sparse_index(passages, params: BM25Params = BM25Params()) -> SparseIndex:
    """Build an index over a passage stream; title terms are indexed too."""
    index = SparseIndex(params)
    for passage in passages:
        index._add(passage.passage_id, analyze(indexed_text(passage)))
    return index._finalize()


def bm25_score(index: SparseIndex, query_terms: list[str], ordinal: int) -> float:
    return index.score(query_terms, ordinal)


def search_sparse(index: SparseIndex, query: str, k: int) -> list[SearchResult]:
    return index.search(query, k)


# --- persistence ---------------------------------------------------------
#
# Directory layout:
#   meta.json       {format_version, N, avgdl, k1, b, term_count}
#   passages.tsv    one line per ordinal: passage_id <TAB> dl
#   terms.tsv       one line per term, sorted: term <TAB> byte offset into postings.bin
#   postings.bin    per term: uvarint(df), then df x (uvarint delta-ordinal, uvarint tf);
#                   ordinals delta-encoded ascending, first stored absolute.


def save_sparse_index(index: SparseIndex, path):
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)

    postings = bytearray()
    term_lines = []
    for term in sorted(index.postings):
        plist = index.postings[term]
        term_lines.append(f"{term}\t{len(postings)}\n")
        encode_uvarint(len(plist.postings), postings)
        prev = 0
        for i, (ordinal, tf) in enumerate(plist.postings):
            encode_uvarint(ordinal if i == 0 else ordinal - prev, postings)
            encode_uvarint(tf, postings)
            prev = ordinal
    (path / "postings.bin").write_bytes(bytes(postings))
    (path / "terms.tsv").write_text("".join(term_lines), encoding="utf-8")
    (path / "passages.tsv").write_text(
        "".join(
            f"{pid}\t{dl}\n" for pid, dl in zip(index.passage_ids, index.doc_lengths)
        ),
        encoding="utf-8",
    )
    meta = {
        "format_version": FORMAT_VERSION,
        "kind": "sparse",
        "passage_count": index.passage_count,
        "avgdl": index.avgdl,
        "k1": index.params.k1,
        "b": index.params.b,
        "term_count": len(index.postings),
    }
    (path / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True))


def load_sparse_index(path) -> SparseIndex:
    path = Path(path)
    meta = json.loads((path / "meta.json").read_text())
    if meta.get("format_version") != FORMAT_VERSION:
        raise SchemaError(
            f"unsupported sparse index format version {meta.get('format_version')!r}, "
            f"expected {FORMAT_VERSION}"
        )
    index = SparseIndex(BM25Params(k1=meta["k1"], b=meta["b"]))
    for line_no, line in enumerate((path / "passages.tsv").read_text(encoding="utf-8").splitlines(), 1):
        try:
            pid, dl = line.split("\t")
        except ValueError as exc:
            raise SchemaError("expected 'passage_id<TAB>dl'", line=line_no) from exc
        index.passage_ids.append(pid)
        index._pid_to_ordinal[pid] = len(index.passage_ids) - 1
        index.doc_lengths.append(int(dl))

    buf = (path / "postings.bin").read_bytes()
    for line_no, line in enumerate((path / "terms.tsv").read_text(encoding="utf-8").splitlines(), 1):
        try:
            term, offset = line.split("\t")
        except ValueError as exc:
            raise SchemaError("expected 'term<TAB>offset'", line=line_no) from exc
        pos = int(offset)
        df, pos = decode_uvarint(buf, pos)
        postings = []
        prev = 0
        for i in range(df):
            delta, pos = decode_uvarint(buf, pos)
            prev = delta if i == 0 else prev + delta
            tf, pos = decode_uvarint(buf, pos)
            postings.append((prev, tf))
        index.postings[term] = PostingList(term, postings)

    index._finalize()
    if index.passage_count != meta["passage_count"]:
        raise SchemaError(
            f"passage count mismatch: meta says {meta['passage_count']}, "
            f"passages.tsv has {index.passage_count}"
        )
    return index
