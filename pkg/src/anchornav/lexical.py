"""BM25 inverted index over anchors with anchor-type boosting.

Scoring uses the non-negative idf variant
    idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5))
and the classic saturation term
    tf * (k1 + 1) / (tf + k1 * (1 - b + b * len / avglen)),
with the whole anchor score multiplied by its type boost. Non-negative
scores are required by the min-max normalization downstream.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .errors import EmptyDocument
from .ingest import DocumentRecord
from .tokenize import tokenize

FORMAT_VERSION = "lexical-index/1"

DEFAULT_BOOSTS: dict[str, float] = {"heading": 2.0, "table_cell": 1.5, "para": 1.0}


@dataclass
class LexicalIndex:
    doc_id: str
    k1: float
    b: float
    boosts: dict[str, float]
    anchor_ids: list[str]
    anchor_types: list[str]
    lengths: list[int]
    # term -> [(anchor position, term frequency)], sorted by anchor position
    postings: dict[str, list[tuple[int, int]]]

    @property
    def size(self) -> int:
        return len(self.anchor_ids)

    @property
    def avg_length(self) -> float:
        return sum(self.lengths) / len(self.lengths)

    def idf(self, term: str) -> float:
        df = len(self.postings.get(term, ()))
        n = self.size
        return math.log(1.0 + (n - df + 0.5) / (df + 0.5))

    def term_mass(self, term: str) -> float:
        """Total boosted BM25 mass of a term over every anchor.

        Equals the sum over anchors of this term's score contribution;
        used by the synopsis centrality computation.
        """
        if self._term_mass is None:
            self._term_mass = {}
            avglen = self.avg_length
            for t, plist in self.postings.items():
                idf = self.idf(t)
                total = 0.0
                for pos, tf in plist:
                    denom = tf + self.k1 * (1.0 - self.b + self.b * self.lengths[pos] / avglen)
                    boost = self.boosts.get(self.anchor_types[pos], 1.0)
                    total += boost * idf * tf * (self.k1 + 1.0) / denom
                self._term_mass[t] = total
        return self._term_mass.get(term, 0.0)

    _term_mass: dict[str, float] | None = field(default=None, repr=False)

    # -- serialization (versioned JSON sidecar) ---------------------------

    def to_dict(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "doc_id": self.doc_id,
            "k1": self.k1,
            "b": self.b,
            "boosts": self.boosts,
            "anchor_ids": self.anchor_ids,
            "anchor_types": self.anchor_types,
            "lengths": self.lengths,
            "postings": {t: [[pos, tf] for pos, tf in plist]
                         for t, plist in self.postings.items()},
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "LexicalIndex":
        if data.get("version") != FORMAT_VERSION:
            raise ValueError(f"unsupported index version: {data.get('version')!r}")
        return cls(
            doc_id=data["doc_id"],
            k1=data["k1"],
            b=data["b"],
            boosts=dict(data["boosts"]),
            anchor_ids=list(data["anchor_ids"]),
            anchor_types=list(data["anchor_types"]),
            lengths=list(data["lengths"]),
            postings={t: [(int(p), int(tf)) for p, tf in plist]
                      for t, plist in data["postings"].items()},
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "LexicalIndex":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def build_lexical(record: DocumentRecord, k1: float = 1.2, b: float = 0.75,
                  boosts: Mapping[str, float] | None = None) -> LexicalIndex:
    """Index every anchor of the record."""
    if not record.anchors:
        raise EmptyDocument(f"document {record.doc_id} has no anchors to index")
    boosts = dict(DEFAULT_BOOSTS if boosts is None else boosts)

    anchor_ids: list[str] = []
    anchor_types: list[str] = []
    lengths: list[int] = []
    postings: dict[str, list[tuple[int, int]]] = {}
    for pos, anchor in enumerate(record.anchors):
        tokens = tokenize(record.text_of(anchor))
        anchor_ids.append(anchor.anchor_id)
        anchor_types.append(anchor.type)
        lengths.append(len(tokens))
        for term, tf in sorted(Counter(tokens).items()):
            postings.setdefault(term, []).append((pos, tf))

    return LexicalIndex(
        doc_id=record.doc_id,
        k1=k1,
        b=b,
        boosts=boosts,
        anchor_ids=anchor_ids,
        anchor_types=anchor_types,
        lengths=lengths,
        postings=postings,
    )


def score_lexical(index: LexicalIndex, query: str, top_k: int) -> list[tuple[str, float]]:
    """Rank anchors by BM25 against the query.

    Query tokens are scored as they occur (duplicates count twice). Anchors
    with zero score are dropped; ties break toward earlier document order.
    """
    if top_k < 1:
        raise ValueError(f"top_k must be >= 1, got {top_k}")
    terms = tokenize(query)
    if not terms:
        return []
    avglen = index.avg_length
    scores: dict[int, float] = {}
    for term in terms:
        plist = index.postings.get(term)
        if not plist:
            continue
        idf = index.idf(term)
        for pos, tf in plist:
            denom = tf + index.k1 * (1.0 - index.b + index.b * index.lengths[pos] / avglen)
            scores[pos] = scores.get(pos, 0.0) + idf * tf * (index.k1 + 1.0) / denom
    ranked = sorted(
        ((pos, s * index.boosts.get(index.anchor_types[pos], 1.0))
         for pos, s in scores.items() if s > 0.0),
        key=lambda item: (-item[1], item[0]),
    )
    return [(index.anchor_ids[pos], s) for pos, s in ranked[:top_k]]
