"""Shared tokenizer for the lexical and dense indexes.

Lowercased Unicode word tokens. The lexical side additionally keeps legal
citation references ("Section 302") as joined bigram tokens ("section_302")
so exact statute cues stay intact; the head-word list is a config extension
point for further citation formats.
"""

from __future__ import annotations

import re
from typing import FrozenSet

_WORD_RE = re.compile(r"\w+", re.UNICODE)
_CITE_NUM_RE = re.compile(r"^\d+[a-z]*$")

CITATION_HEADS: FrozenSet[str] = frozenset(
    {"section", "sec", "article", "art", "rule", "order", "clause"}
)


def tokenize(text: str, *, citation_bigrams: bool = True,
             citation_heads: FrozenSet[str] = CITATION_HEADS) -> list[str]:
    """Split text into lowercase word tokens, optionally with citation bigrams.

    Bigram tokens are appended after the unigrams; postings do not depend on
    token positions.
    """
    words = _WORD_RE.findall(text.lower())
    if not citation_bigrams:
        return words
    out = list(words)
    for head, num in zip(words, words[1:]):
        if head in citation_heads and _CITE_NUM_RE.match(num):
            out.append(f"{head}_{num}")
    return out


def dense_tokenize(text: str) -> list[str]:
    """Tokenizer for the dense index: same word rules, no bigram tokens."""
    return tokenize(text, citation_bigrams=False)
