"""The unit of retrieval output, shared by local indices and the cluster client."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SearchResult:
    """One ranked hit. shard_id is -1 for searches against a local, unsharded index."""

    passage_id: str
    score: float
    rank: int
    shard_id: int = -1


def rerank(results, key):
    """Reassign ranks 1..len after sorting by ``key``."""
    ordered = sorted(results, key=key)
    return [
        SearchResult(r.passage_id, r.score, i + 1, r.shard_id)
        for i, r in enumerate(ordered)
    ]
