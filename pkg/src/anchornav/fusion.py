"""Score normalization, weighted hybrid fusion, and the answer decision.

Final score per anchor is the convex combination
    fused = alpha * lexical_norm + (1 - alpha) * dense_norm
over min-max normalized leg scores (alpha = 0.7 by default). Window scores
propagate to each covered anchor by max. The decision layer answers only
when the top candidate clears the abstain threshold with a clear margin;
otherwise it disambiguates or abstains, so no ungrounded answer is ever
emitted.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence

from .ingest import CharRange, DocumentRecord


@dataclass(frozen=True)
class FusionConfig:
    alpha: float = 0.7
    top_k: int = 20
    abstain_threshold: float = 0.35   # minimum fused score to answer
    disambiguation_margin: float = 0.05  # top-two gap below which we disambiguate

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if not 0.0 <= self.abstain_threshold <= 1.0:
            raise ValueError(f"abstain_threshold must be in [0, 1], got {self.abstain_threshold}")
        if self.disambiguation_margin < 0.0:
            raise ValueError(f"disambiguation_margin must be >= 0, got {self.disambiguation_margin}")
        if self.top_k < 1:
            raise ValueError(f"top_k must be >= 1, got {self.top_k}")


@dataclass(frozen=True)
class Candidate:
    anchor_id: str
    lexical_norm: float
    dense_norm: float
    fused: float
    source_window_id: str | None = None
    snippet: CharRange | None = None


@dataclass(frozen=True)
class Answer:
    top: Candidate
    highlights: tuple[Candidate, ...]  # every candidate at/above the threshold

    @property
    def highlight_ids(self) -> tuple[str, ...]:
        return tuple(c.anchor_id for c in self.highlights)


@dataclass(frozen=True)
class Disambiguate:
    candidates: tuple[Candidate, ...]  # ordered, at most 5


@dataclass(frozen=True)
class Abstain:
    reason: str


RetrievalDecision = Answer | Disambiguate | Abstain

RerankHook = Callable[[list[Candidate]], list[Candidate]]


def identity_rerank(candidates: list[Candidate]) -> list[Candidate]:
    """Default re-rank hook: keep the fused order."""
    return candidates


def normalize_scores(raw: Sequence[tuple[str, float]]) -> list[tuple[str, float]]:
    """Min-max normalize a retrieved list into [0, 1].

    A single-element or constant list maps to all 1.0: the sole candidate is
    maximally relevant within its leg, and 0/0 is avoided.
    """
    if not raw:
        return []
    scores = [s for _, s in raw]
    lo, hi = min(scores), max(scores)
    if hi == lo:
        return [(key, 1.0) for key, _ in raw]
    return [(key, (s - lo) / (hi - lo)) for key, s in raw]


def fuse(record: DocumentRecord,
         lexical: Sequence[tuple[str, float]],
         dense: Sequence[tuple[str, float, Sequence[str]]],
         cfg: FusionConfig) -> list[Candidate]:
    """Merge normalized lexical (per anchor) and dense (per window) legs.

    Dense window scores propagate to each covered anchor, taking the max
    over its windows; a missing leg contributes 0 so exact-citation hits
    survive a dense miss and vice versa. Output holds each anchor once,
    sorted by fused score, ties toward earlier document order.
    """
    lex_by_anchor = dict(lexical)
    dense_by_anchor: dict[str, tuple[float, str]] = {}
    for window_id, norm, anchor_ids in dense:
        for anchor_id in anchor_ids:
            cur = dense_by_anchor.get(anchor_id)
            if cur is None or norm > cur[0]:
                dense_by_anchor[anchor_id] = (norm, window_id)

    candidates: list[Candidate] = []
    for anchor_id in lex_by_anchor.keys() | dense_by_anchor.keys():
        lex = lex_by_anchor.get(anchor_id, 0.0)
        dense_norm, window_id = dense_by_anchor.get(anchor_id, (0.0, None))
        anchor = record.anchors_by_id[anchor_id]
        candidates.append(Candidate(
            anchor_id=anchor_id,
            lexical_norm=lex,
            dense_norm=dense_norm,
            fused=cfg.alpha * lex + (1.0 - cfg.alpha) * dense_norm,
            source_window_id=window_id,
            snippet=anchor.char_range,
        ))
    candidates.sort(key=lambda c: (-c.fused, record.order_of[c.anchor_id]))
    return candidates


def decide(candidates: Sequence[Candidate], cfg: FusionConfig) -> RetrievalDecision:
    """Answer, disambiguate, or abstain over fused candidates (pre-sorted)."""
    if not candidates:
        return Abstain("no evidence")
    top = candidates[0]
    if top.fused < cfg.abstain_threshold:
        return Abstain(f"top score {top.fused:.3f} below threshold")
    if len(candidates) > 1 and top.fused - candidates[1].fused <= cfg.disambiguation_margin:
        return Disambiguate(tuple(candidates[:5]))
    highlights = tuple(c for c in candidates if c.fused >= cfg.abstain_threshold)
    return Answer(top=top, highlights=highlights)


def threshold_set(candidates: Sequence[Candidate], cfg: FusionConfig) -> tuple[str, ...]:
    """Anchor ids at/above the abstain threshold (the highlight set)."""
    return tuple(c.anchor_id for c in candidates if c.fused >= cfg.abstain_threshold)
