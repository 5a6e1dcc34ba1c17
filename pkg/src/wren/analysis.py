"""Query/passage analyzer for the sparse index."""

from __future__ import annotations

import re

# Maximal alphanumeric runs (Unicode letters and digits; underscore excluded).
_TOKEN_RE = re.compile(r"[^\W_]+")


def analyze(text: str) -> list[str]:
    """Case-folded alphanumeric runs, in order. No stemming, no stopwords."""
    return _TOKEN_RE.findall(text.casefold())
