"""Document store plus intent execution, independent of any transport.

NavEngine owns ingested documents (record, both indexes, precomputed
synopses) and executes typed intents against them. The HTTP service wraps
it with sessions, confirmation, and audit; the eval harness drives it
directly so retrieval-mode ablations can rebuild indexes with different
window geometry.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field, replace
from typing import Any, Mapping, Sequence

from . import router
from .dense import BuiltinEmbedder, EmbeddingProvider, WindowDenseIndex
from .errors import (DuplicateDocument, EmptyQuery, MissingDocument,
                     ProviderUnavailable)
from .fusion import (Abstain, Answer, Candidate, Disambiguate, FusionConfig,
                     RerankHook, RetrievalDecision, decide, fuse,
                     identity_rerank, normalize_scores, threshold_set)
from .ingest import DocumentRecord, parse_layout
from .lexical import DEFAULT_BOOSTS, LexicalIndex, build_lexical, score_lexical
from .synopsis import Synopsis, build_synopsis


@dataclass(frozen=True)
class EngineConfig:
    window_width: int = 3
    window_stride: int = 1
    fusion: FusionConfig = field(default_factory=FusionConfig)
    k1: float = 1.2
    b: float = 0.75
    boosts: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_BOOSTS))
    use_dense: bool = True
    synopsis_k: int = 5
    scopes: tuple[str, ...] = ("document", "charges", "petition")
    scope_keywords: Mapping[str, Sequence[str]] | None = None


@dataclass
class DocumentBundle:
    record: DocumentRecord
    lexical: LexicalIndex
    dense: WindowDenseIndex | None
    synopses: dict[str, Synopsis]

    @property
    def doc_id(self) -> str:
        return self.record.doc_id

    def __post_init__(self) -> None:
        self.ordinal_global: dict[int, str] = {}
        self.ordinal_by_section: dict[tuple[tuple[str, ...], int], str] = {}
        self.first_on_page: dict[int, str] = {}
        self.cells: dict[tuple[str, int, int], str] = {}
        for a in self.record.anchors:
            if a.ordinal is not None:
                self.ordinal_global.setdefault(a.ordinal, a.anchor_id)
                self.ordinal_by_section.setdefault((a.section_path, a.ordinal), a.anchor_id)
            self.first_on_page.setdefault(a.page, a.anchor_id)
            if a.table is not None:
                self.cells[(a.table.table_id, a.table.row, a.table.col)] = a.anchor_id


@dataclass(frozen=True)
class NavContext:
    """Session-derived state the engine needs for relative moves."""

    current_anchor: str | None = None
    evidence: tuple[Candidate, ...] = ()
    hit_cursor: int = -1


@dataclass(frozen=True)
class EngineResult:
    kind: str  # scroll | disambiguate | synopsis | abstain
    anchor_id: str | None = None
    highlight_ids: tuple[str, ...] = ()
    candidates: tuple[Candidate, ...] = ()
    synopsis: Synopsis | None = None
    reason: str | None = None
    degraded: bool = False
    hit_cursor: int | None = None  # updated cursor for next/prev hit

    def predicted_anchor_ids(self) -> frozenset[str]:
        """Anchors this result commits to (the strict-hit prediction set)."""
        if self.kind == "scroll":
            return frozenset(self.highlight_ids or
                             ((self.anchor_id,) if self.anchor_id else ()))
        if self.kind == "disambiguate":
            return frozenset(self.highlight_ids)
        if self.kind == "synopsis" and self.synopsis is not None:
            return frozenset(self.synopsis.cited_anchor_ids())
        return frozenset()


class EvidenceEmpty(Exception):
    """'open N' or hit navigation with no active evidence list (HTTP 422)."""


class NavEngine:
    def __init__(self, config: EngineConfig | None = None,
                 provider: EmbeddingProvider | None = None,
                 rerank: RerankHook = identity_rerank):
        self.config = config or EngineConfig()
        self.provider = provider or BuiltinEmbedder()
        self.rerank = rerank
        self._documents: dict[str, DocumentBundle] = {}
        self._lock = threading.Lock()

    # -- document lifecycle ------------------------------------------------

    def ingest(self, payload: Mapping[str, Any]) -> DocumentBundle:
        record = parse_layout(payload, window_width=self.config.window_width,
                              window_stride=self.config.window_stride)
        with self._lock:
            if record.doc_id in self._documents:
                raise DuplicateDocument(f"document {record.doc_id} already ingested")
        lexical = build_lexical(record, k1=self.config.k1, b=self.config.b,
                                boosts=self.config.boosts)
        dense = WindowDenseIndex(record, self.provider) if self.config.use_dense else None
        synopses = {
            scope: build_synopsis(record, lexical, scope=scope, k=self.config.synopsis_k,
                                  scope_keywords=self.config.scope_keywords)
            for scope in self.config.scopes
        }
        bundle = DocumentBundle(record=record, lexical=lexical, dense=dense,
                                synopses=synopses)
        with self._lock:
            if record.doc_id in self._documents:
                raise DuplicateDocument(f"document {record.doc_id} already ingested")
            self._documents[record.doc_id] = bundle
        return bundle

    def get(self, doc_id: str) -> DocumentBundle:
        bundle = self._documents.get(doc_id)
        if bundle is None:
            raise MissingDocument(f"unknown document {doc_id}")
        return bundle

    @property
    def doc_ids(self) -> list[str]:
        return list(self._documents)

    # -- retrieval ---------------------------------------------------------

    def retrieve(self, doc_id: str, query_text: str,
                 fusion: FusionConfig | None = None,
                 ) -> tuple[RetrievalDecision, list[Candidate], bool]:
        """Hybrid retrieval -> (decision, fused candidates, dense-degraded flag)."""
        bundle = self.get(doc_id)
        cfg = fusion or self.config.fusion
        lexical_raw = score_lexical(bundle.lexical, query_text, cfg.top_k)
        lexical_norm = normalize_scores(lexical_raw)
        dense_norm: list[tuple[str, float, Sequence[str]]] = []
        degraded = False
        if bundle.dense is not None and cfg.alpha < 1.0:
            try:
                hits = bundle.dense.search(query_text, cfg.top_k)
                normalized = normalize_scores([(h.window_id, h.score) for h in hits])
                dense_norm = [(wid, norm, hit.anchor_ids)
                              for (wid, norm), hit in zip(normalized, hits)]
            except ProviderUnavailable:
                degraded = True
            except EmptyQuery:
                pass
        candidates = self.rerank(fuse(bundle.record, lexical_norm, dense_norm, cfg))
        return decide(candidates, cfg), candidates, degraded

    # -- intent execution ---------------------------------------------------

    def execute(self, doc_id: str, intent: router.Intent,
                context: NavContext = NavContext(),
                fusion: FusionConfig | None = None) -> EngineResult:
        """Run one routed intent against a document.

        Raises EvidenceEmpty for evidence-relative moves without evidence;
        viewer-control intents are the transport layer's business.
        """
        bundle = self.get(doc_id)
        cfg = fusion or self.config.fusion
        if intent.kind == router.TEMPORAL:
            return self._execute_temporal(bundle, intent, context, cfg)
        if intent.kind == router.SUMMARIZATION:
            return self._execute_summarization(bundle, intent)
        if intent.kind == router.CONTEXTUAL:
            return self._execute_contextual(bundle, intent, cfg)
        raise ValueError(f"engine cannot execute intent kind {intent.kind!r}")

    def _scroll(self, anchor_id: str, highlights: tuple[str, ...] = (),
                candidates: tuple[Candidate, ...] = (), degraded: bool = False,
                hit_cursor: int | None = None) -> EngineResult:
        if anchor_id not in highlights:
            highlights = (anchor_id,) + highlights
        return EngineResult(kind="scroll", anchor_id=anchor_id,
                            highlight_ids=highlights, candidates=candidates,
                            degraded=degraded, hit_cursor=hit_cursor)

    def _execute_temporal(self, bundle: DocumentBundle, intent: router.Intent,
                          context: NavContext, cfg: FusionConfig) -> EngineResult:
        slots = intent.slots
        if "paragraph" in slots:
            n = int(slots["paragraph"])
            anchor_id = None
            if context.current_anchor is not None:
                section = bundle.record.anchors_by_id[context.current_anchor].section_path
                anchor_id = bundle.ordinal_by_section.get((section, n))
            if anchor_id is None:
                anchor_id = bundle.ordinal_global.get(n)
            if anchor_id is None:
                return EngineResult(kind="abstain", reason=f"no paragraph numbered {n}")
            return self._scroll(anchor_id)
        if "page" in slots:
            anchor_id = bundle.first_on_page.get(int(slots["page"]))
            if anchor_id is None:
                return EngineResult(kind="abstain", reason=f"no page {slots['page']}")
            return self._scroll(anchor_id)
        if "section" in slots:
            wanted = str(slots["section"]).lower()
            for a in bundle.record.anchors:
                if a.type == "heading" and wanted in bundle.record.text_of(a).lower():
                    return self._scroll(a.anchor_id)
            return EngineResult(kind="abstain", reason=f"no section matching {slots['section']!r}")
        relative = slots.get("relative")
        if relative == "open_n":
            if not context.evidence:
                raise EvidenceEmpty("no evidence list to open from")
            index = int(slots.get("index", 1))
            if not 1 <= index <= len(context.evidence):
                raise EvidenceEmpty(
                    f"evidence item {index} out of range 1..{len(context.evidence)}")
            target = context.evidence[index - 1]
            return self._scroll(target.anchor_id, candidates=context.evidence,
                                hit_cursor=index - 1)
        if relative in ("next_hit", "prev_hit"):
            if not context.evidence:
                return EngineResult(kind="abstain", reason="no active hits")
            step = 1 if relative == "next_hit" else -1
            cursor = min(max(context.hit_cursor + step, 0), len(context.evidence) - 1)
            target = context.evidence[cursor]
            return self._scroll(target.anchor_id, candidates=context.evidence,
                                hit_cursor=cursor)
        if relative == "prev_section":
            if context.current_anchor is None:
                return EngineResult(kind="abstain", reason="no current position")
            pos = bundle.record.order_of[context.current_anchor]
            for a in reversed(bundle.record.anchors[:pos]):
                if a.type == "heading":
                    return self._scroll(a.anchor_id)
            return EngineResult(kind="abstain", reason="no earlier section")
        return EngineResult(kind="abstain", reason="temporal command had no usable slot")

    def _execute_summarization(self, bundle: DocumentBundle,
                               intent: router.Intent) -> EngineResult:
        scope = str(intent.slots.get("scope", "document"))
        synopsis = bundle.synopses.get(scope)
        if synopsis is None:
            synopsis = build_synopsis(bundle.record, bundle.lexical, scope=scope,
                                      k=self.config.synopsis_k,
                                      scope_keywords=self.config.scope_keywords)
            bundle.synopses[scope] = synopsis
        return EngineResult(kind="synopsis", synopsis=synopsis)

    def _execute_contextual(self, bundle: DocumentBundle, intent: router.Intent,
                            cfg: FusionConfig) -> EngineResult:
        filters = intent.slots.get("filters") or {}
        region = filters.get("table_region")
        if region:
            key = (str(region["table_id"]), int(region["row"]), int(region["col"]))
            anchor_id = bundle.cells.get(key)
            if anchor_id is None:
                return EngineResult(kind="abstain",
                                    reason=f"no table cell {key[0]}[{key[1]},{key[2]}]")
            return self._scroll(anchor_id)

        query = str(intent.slots.get("query_text", "")).strip()
        extra = [str(v) for k, v in sorted(filters.items())
                 if k in ("party", "statute", "exhibit") and v]
        if extra:
            query = " ".join([query] + extra).strip()
        if not query:
            return EngineResult(kind="abstain", reason="empty contextual query")

        decision, candidates, degraded = self.retrieve(bundle.doc_id, query, cfg)
        if isinstance(decision, Answer):
            return self._scroll(decision.top.anchor_id,
                                highlights=decision.highlight_ids,
                                candidates=decision.highlights,
                                degraded=degraded)
        if isinstance(decision, Disambiguate):
            return EngineResult(kind="disambiguate",
                                highlight_ids=threshold_set(decision.candidates, cfg),
                                candidates=decision.candidates,
                                degraded=degraded)
        return EngineResult(kind="abstain", reason=decision.reason, degraded=degraded)
