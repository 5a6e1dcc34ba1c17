"""Corpus ingestion and passage chunking.

Documents arrive as newline-delimited JSON records (CCNet-style: ``id``,
``url``, ``title``, ``raw_content`` or ``body``, optional ``tier``). They are
filtered by URL substring and quality tier, then split into fixed-size
windows of whitespace tokens. The chunker is lossless at the token level:
concatenating a document's passage token sequences in chunk order reproduces
the document's token sequence exactly.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

from .errors import RecordParseError, SchemaError

TIERS = ("head", "middle", "tail", "unknown")

SKIP_URL_EXCLUDED = "url_excluded"
SKIP_TIER_REJECTED = "tier_rejected"
SKIP_EMPTY_BODY = "empty_body"


@dataclass(frozen=True)
class Document:
    doc_id: str
    url: str
    title: str
    body: str
    tier: str = "unknown"

    def __post_init__(self):
        if not self.url:
            raise ValueError("document url must be non-empty")
        if not self.body.strip():
            raise ValueError("document body must be non-empty after trimming")
        if self.tier not in TIERS:
            raise ValueError(f"unknown tier {self.tier!r}")


@dataclass(frozen=True)
class Passage:
    """A fixed-window chunk of a document; the unit of indexing and retrieval."""

    passage_id: str
    doc_id: str
    title: str
    text: str
    chunk_index: int
    token_count: int


@dataclass(frozen=True)
class IngestFilter:
    """URL and tier gate applied before chunking.

    ``accepted_tiers=None`` accepts every tier; the default keeps only the
    highest-quality slice and drops anything served from wikipedia.org.
    """

    excluded_url_substrings: tuple[str, ...] = ("wikipedia.org",)
    accepted_tiers: tuple[str, ...] | None = ("head",)


@dataclass(frozen=True)
class Skip:
    """A document rejected by ingest, with a machine-readable reason."""

    reason: str
    doc_id: str = ""
    url: str = ""


def tokenize(text: str) -> list[str]:
    """Split on Unicode whitespace. No case folding, punctuation stays attached."""
    return text.split()


def ingest_document(record, filt: IngestFilter, line=None):
    """Turn one raw record into a Document, or a Skip explaining why not.

    Raises RecordParseError if ``url`` or a body field is absent. An empty
    (whitespace-only) body is not an error: such a record can never satisfy
    the Document invariants, so it is skipped with reason ``empty_body``.
    """
    url = record.get("url")
    if url is None or url == "":
        raise RecordParseError("url", line=line)
    body = record.get("raw_content")
    if body is None:
        body = record.get("body")
    if body is None:
        raise RecordParseError("body", line=line)

    doc_id = str(record.get("id") or url)
    if not body.strip():
        return Skip(SKIP_EMPTY_BODY, doc_id=doc_id, url=url)

    lowered = url.casefold()
    for substring in filt.excluded_url_substrings:
        if substring.casefold() in lowered:
            return Skip(SKIP_URL_EXCLUDED, doc_id=doc_id, url=url)

    tier = record.get("tier") or "unknown"
    if tier not in TIERS:
        tier = "unknown"
    if filt.accepted_tiers is not None and tier not in filt.accepted_tiers:
        return Skip(SKIP_TIER_REJECTED, doc_id=doc_id, url=url)

    return Document(
        doc_id=doc_id,
        url=url,
        title=str(record.get("title") or ""),
        body=body,
        tier=tier,
    )


def chunk_tokens(tokens: list[str], window: int) -> list[list[str]]:
    """Consecutive non-overlapping windows; the last one may be short."""
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    return [tokens[i : i + window] for i in range(0, len(tokens), window)]


def chunk_document(doc: Document, window: int = 100) -> list[Passage]:
    """Chunk a document body into passages of at most ``window`` tokens.

    Every passage except possibly the last has exactly ``window`` tokens,
    the title is copied onto each passage, and chunk indices run 0..n-1.
    """
    tokens = tokenize(doc.body)
    passages = []
    for idx, chunk in enumerate(chunk_tokens(tokens, window)):
        passages.append(
            Passage(
                passage_id=f"{doc.doc_id}::{idx}",
                doc_id=doc.doc_id,
                title=doc.title,
                text=" ".join(chunk),
                chunk_index=idx,
                token_count=len(chunk),
            )
        )
    return passages


@dataclass
class StatsReport:
    """Corpus-level counts, plus overlap statistics when a reference is given."""

    passage_count: int = 0
    document_count: int = 0
    token_histogram: dict = field(default_factory=dict)
    flagged_count: int | None = None
    flagged_fraction: float | None = None
    reference_passage_count: int | None = None
    reference_covered_count: int | None = None
    reference_coverage: float | None = None

    def to_dict(self):
        out = {
            "passage_count": self.passage_count,
            "document_count": self.document_count,
            "token_histogram": {str(k): v for k, v in sorted(self.token_histogram.items())},
        }
        if self.flagged_count is not None:
            out["flagged_count"] = self.flagged_count
            out["flagged_fraction"] = self.flagged_fraction
            out["reference_passage_count"] = self.reference_passage_count
            out["reference_covered_count"] = self.reference_covered_count
            out["reference_coverage"] = self.reference_coverage
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def corpus_stats(passages, reference=None) -> StatsReport:
    """Count passages, documents and token lengths in one pass.

    With a reference n-gram set, additionally reports the fraction of corpus
    passages sharing at least one n-gram with the reference, and the reverse:
    the fraction of reference passages with at least one overlapping corpus
    passage. The reverse statistic requires the reference to have been built
    with source tracking enabled.
    """
    report = StatsReport()
    histogram = Counter()
    doc_ids = set()
    flagged = 0
    covered_sources = set()

    for passage in passages:
        report.passage_count += 1
        doc_ids.add(passage.doc_id)
        histogram[passage.token_count] += 1
        if reference is not None:
            hits = reference.matching_keys(passage.text)
            if hits:
                flagged += 1
                if reference.tracks_sources:
                    for key in hits:
                        covered_sources.update(reference.sources_for(key))

    report.document_count = len(doc_ids)
    report.token_histogram = dict(histogram)
    if reference is not None:
        report.flagged_count = flagged
        report.flagged_fraction = flagged / report.passage_count if report.passage_count else 0.0
        report.reference_passage_count = reference.passage_count
        if reference.tracks_sources:
            report.reference_covered_count = len(covered_sources)
            report.reference_coverage = (
                len(covered_sources) / reference.passage_count
                if reference.passage_count
                else 0.0
            )
    return report


def read_document_records(lines):
    """Parse newline-delimited JSON document records, yielding (line_no, record)."""
    for line_no, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc.msg}", line=line_no) from exc
        if not isinstance(record, dict):
            raise SchemaError("record is not a JSON object", line=line_no)
        yield line_no, record


def passage_to_record(passage: Passage) -> dict:
    return {
        "passage_id": passage.passage_id,
        "doc_id": passage.doc_id,
        "title": passage.title,
        "text": passage.text,
        "chunk_index": passage.chunk_index,
    }


def passage_from_record(record, line=None) -> Passage:
    try:
        text = record["text"]
        return Passage(
            passage_id=record["passage_id"],
            doc_id=record["doc_id"],
            title=record.get("title", ""),
            text=text,
            chunk_index=int(record["chunk_index"]),
            token_count=len(tokenize(text)),
        )
    except KeyError as exc:
        raise SchemaError(f"passage record missing field {exc.args[0]!r}", line=line) from exc


def read_passages(lines):
    """Parse newline-delimited JSON passage records."""
    for line_no, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc.msg}", line=line_no) from exc
        yield passage_from_record(record, line=line_no)
