"""Text analysis: the single analyzer shared by indexing, search and highlighting.

Lowercase, split on non-alphanumeric, drop stopwords, no stemming. The
highlighter relies on the analyzer being stemming-free so that surface
forms can be matched back to query terms.
"""

import re

# Classic short English stopword list (33 terms), frozen; version 1.
STOPWORDS_VERSION = 1
STOPWORDS = frozenset(
    """a an and are as at be but by for if in into is it no not of on or
    such that the their then there these they this to was will with""".split()
)

_TOKEN_RE = re.compile(r"[0-9A-Za-z]+")


def tokenize(text: str) -> list[str]:
    """Analyze text into index terms.

    Lowercases, splits on any non-alphanumeric character, drops empty
    pieces and stopwords. No stemming.
    """
    return [t for t in _TOKEN_RE.findall(text.lower()) if t not in STOPWORDS]


def token_spans(text: str) -> list[tuple[int, int, str]]:
    """Like tokenize but keeps (start, end) character offsets of each
    surviving token's surface form."""
    out = []
    for m in _TOKEN_RE.finditer(text):
        term = m.group().lower()
        if term not in STOPWORDS:
            out.append((m.start(), m.end(), term))
    return out
