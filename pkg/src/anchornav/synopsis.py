"""Precomputed extractive synopsis; every line cites the anchor it quotes.

Paragraphs are ranked by a degree-style centrality over the BM25 term
space: the summed index-wide score mass of the paragraph's own most
salient terms. Each selected paragraph contributes its first two sentences
verbatim, so groundedness (exact alignment back to the anchor) holds by
construction. Abstractive rewriting is deliberately out: extractive keeps
the groundedness invariant provable.
"""

from __future__ import annotations

import importlib.resources
import json
import re
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Mapping, Sequence

from .errors import EmptyDocument
from .ingest import Anchor, DocumentRecord
from .lexical import LexicalIndex
from .tokenize import tokenize

TOP_TERMS_PER_PARAGRAPH = 10

# Trailing abbreviations that must not end a sentence.
_ABBREVIATIONS = ("no.", "sec.", "vs.", "rs.", "mr.", "mrs.", "dr.", "art.")


def default_scope_keywords() -> dict[str, list[str]]:
    """Scope keyword lists shipped with the package (editable via config)."""
    raw = importlib.resources.files("anchornav.data").joinpath("scope_keywords.json")
    return json.loads(raw.read_text(encoding="utf-8"))


@dataclass(frozen=True)
class SynopsisLine:
    text: str
    anchor_ids: tuple[str, ...]


@dataclass(frozen=True)
class Synopsis:
    scope: str
    lines: tuple[SynopsisLine, ...]
    built_at: str = field(default="", compare=False)

    def cited_anchor_ids(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for line in self.lines:
            for aid in line.anchor_ids:
                seen.setdefault(aid)
        return tuple(seen)

    def to_dict(self) -> dict:
        return {"scope": self.scope, "built_at": self.built_at,
                "lines": [{"text": l.text, "anchor_ids": list(l.anchor_ids)}
                          for l in self.lines]}


_ORDINAL_MARK = re.compile(r"\d{1,4}[.)]")


def split_sentences(text: str) -> list[str]:
    """Split on ./?/! + space + capital or digit, honoring the abbreviation list.

    A bare printed ordinal ("23.") is a paragraph marker, not a sentence; it
    stays attached to the sentence it numbers.
    """
    out: list[str] = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in ".!?" and i + 1 < n and text[i + 1] == " ":
            nxt = i + 2
            while nxt < n and text[nxt] == " ":
                nxt += 1
            head = text[start : i + 1]
            is_abbrev = ch == "." and any(head.lower().endswith(a)
                                          for a in _ABBREVIATIONS)
            is_marker = _ORDINAL_MARK.fullmatch(head.strip()) is not None
            if nxt < n and (text[nxt].isupper() or text[nxt].isdigit()) \
                    and not is_abbrev and not is_marker:
                out.append(text[start : i + 1])
                start = nxt
                i = nxt
                continue
        i += 1
    if start < n:
        out.append(text[start:])
    return out


def first_sentences(text: str, limit: int = 2) -> str:
    """Verbatim prefix of the text covering at most `limit` sentences."""
    sentences = split_sentences(text)
    if len(sentences) <= limit:
        return text
    pos = 0
    for sentence in sentences[:limit]:
        pos = text.index(sentence, pos) + len(sentence)
    return text[:pos]


def _matches_scope(anchor: Anchor, text: str, keywords: Sequence[str]) -> bool:
    if not keywords:
        return True
    haystack = " ".join(anchor.section_path).lower() + " " + text.lower()
    return any(kw in haystack for kw in keywords)


def _centrality(index: LexicalIndex, text: str) -> float:
    counts = Counter(tokenize(text))
    salience = sorted(
        ((tf * index.idf(term), term) for term, tf in counts.items()),
        key=lambda item: (-item[0], item[1]),
    )
    return sum(index.term_mass(term) for _, term in salience[:TOP_TERMS_PER_PARAGRAPH])


def build_synopsis(record: DocumentRecord, index: LexicalIndex, scope: str = "document",
                   k: int = 5, scope_keywords: Mapping[str, Sequence[str]] | None = None,
                   ) -> Synopsis:
    """Top-k paragraphs by centrality, filtered to the scope when one applies.

    When scope filtering (or a paragraph-poor document) leaves fewer than
    two candidates but the document has more anchors, the pool widens so a
    synopsis always cites at least two distinct anchors where possible.
    """
    if not record.anchors:
        raise EmptyDocument(f"document {record.doc_id} has no anchors")
    keywords = (scope_keywords or default_scope_keywords()).get(scope, [])

    paragraphs = [a for a in record.anchors if a.type == "para"]
    pool = [a for a in paragraphs if _matches_scope(a, record.text_of(a), keywords)]
    if len(pool) < 2:
        extra = [a for a in paragraphs if a not in pool]
        pool = pool + extra
    if len(pool) < 2:
        others = [a for a in record.anchors if a.type != "para"]
        pool = pool + others
    if not pool:
        raise EmptyDocument(f"document {record.doc_id} has no summarizable anchors")

    ranked = sorted(
        pool,
        key=lambda a: (-_centrality(index, record.text_of(a)), record.order_of[a.anchor_id]),
    )
    lines = tuple(
        SynopsisLine(text=first_sentences(record.text_of(a)), anchor_ids=(a.anchor_id,))
        for a in ranked[: max(1, k)]
    )
    return Synopsis(scope=scope, lines=lines,
                    built_at=datetime.now(timezone.utc).isoformat())
