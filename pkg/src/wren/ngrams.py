"""Token n-gram sets for cross-corpus overlap detection.

A passage is considered overlap-based when at least one of its n-grams of
consecutive word tokens (n=8 by default, case-folded) also occurs in a
reference corpus. Keys are 128-bit blake2b hashes of the joined token
window, so membership has no false negatives and a collision probability
below 2**-90 even for trillions of distinct n-grams; an exact mode that
stores the token windows themselves is available for tests.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .corpus import tokenize
from .errors import ConfigError


@dataclass(frozen=True)
class NgramParams:
    n: int = 8
    case_folding: bool = True

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")


def _hash_window(window) -> int:
    digest = hashlib.blake2b(" ".join(window).encode("utf-8"), digest_size=16)
    return int.from_bytes(digest.digest(), "little")


def ngram_keys(text: str, params: NgramParams, exact: bool = False):
    """Yield the keys of every n-gram window in ``text``, in order.

    Texts shorter than n tokens yield nothing. Punctuation stays attached
    to tokens; only case folding is applied.
    """
    tokens = tokenize(text)
    if params.case_folding:
        tokens = [t.casefold() for t in tokens]
    n = params.n
    for i in range(len(tokens) - n + 1):
        window = tokens[i : i + n]
        yield tuple(window) if exact else _hash_window(window)


class NgramSet:
    """Deduplicated n-gram keys over a stream of passages.

    Single-writer build phase (``add``), then ``freeze()`` for concurrent
    reads. With ``track_sources=True`` each key remembers which inserted
    passages contained it, enabling reverse-coverage statistics.
    """

    def __init__(self, params: NgramParams = NgramParams(), exact=False, track_sources=False):
        self.params = params
        self.exact = exact
        self.tracks_sources = track_sources
        self.passage_count = 0
        self._keys = set()
        self._sources = {} if track_sources else None
        self._frozen = False

    @property
    def count(self) -> int:
        """Number of distinct n-grams inserted."""
        return len(self._keys)

    def add(self, text: str):
        """Insert one passage's n-grams. Returns the passage's ordinal."""
        if self._frozen:
            raise ConfigError("NgramSet is frozen; no further inserts allowed")
        ordinal = self.passage_count
        self.passage_count += 1
        for key in ngram_keys(text, self.params, exact=self.exact):
            self._keys.add(key)
            if self._sources is not None:
                self._sources.setdefault(key, set()).add(ordinal)
        return ordinal

    def add_passages(self, passages):
        for passage in passages:
            self.add(passage.text)
        return self

    def freeze(self):
        self._frozen = True
        return self

    def __contains__(self, key) -> bool:
        return key in self._keys

    def __len__(self) -> int:
        return len(self._keys)

    def matching_keys(self, text: str) -> set:
        """Keys of ``text`` n-grams that are members of this set."""
        return {k for k in ngram_keys(text, self.params, exact=self.exact) if k in self._keys}

    def sources_for(self, key):
        if self._sources is None:
            raise ConfigError("NgramSet was built without source tracking")
        return self._sources.get(key, frozenset())


def build_ngram_set(passages, params: NgramParams = NgramParams(), exact=False,
                    track_sources=False) -> NgramSet:
    """Build and freeze an NgramSet over a stream of passages."""
    ngram_set = NgramSet(params, exact=exact, track_sources=track_sources)
    ngram_set.add_passages(passages)
    return ngram_set.freeze()


def is_overlap_based(passage, reference: NgramSet, params: NgramParams | None = None) -> bool:
    """True iff the passage shares at least one n-gram with the reference set.

    ``params``, when given, must match the reference's build parameters;
    a different n would silently compare incompatible keys.
    """
    if params is not None and params != reference.params:
        raise ConfigError(
            f"n-gram params mismatch: reference built with {reference.params}, got {params}"
        )
    for key in ngram_keys(passage.text, reference.params, exact=reference.exact):
        if key in reference:
            return True
    return False
