"""Grammar-first command routing with a pluggable back-off classifier.

A compact anchored grammar turns positional commands into typed intents
with confidence 1.0. When it fails to parse, a back-off client (stub by
default, HTTP optionally) produces a structured action with confidence; a
low-confidence or failed back-off falls through to a plain contextual
query, so routing is total: every transcript yields exactly one intent.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Protocol, runtime_checkable

import httpx

from .numwords import normalize_numbers

TEMPORAL = "temporal"
CONTEXTUAL = "contextual"
SUMMARIZATION = "summarization"
VIEWER_CONTROL = "viewer_control"
INTENT_KINDS = (TEMPORAL, CONTEXTUAL, SUMMARIZATION, VIEWER_CONTROL)

BACKOFF_ACCEPT_THRESHOLD = 0.5
BACKOFF_WIRE_VERSION = "route/1"
_POLITENESS = ("please", "kindly")


@dataclass(frozen=True)
class Intent:
    kind: str
    slots: dict
    confidence: float = 1.0
    source: str = "grammar"
    rewrites: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {"kind": self.kind, "slots": dict(self.slots),
                "confidence": self.confidence, "source": self.source,
                "rewrites": list(self.rewrites)}


@dataclass(frozen=True)
class BackoffResponse:
    kind: str
    slots: dict
    confidence: float
    rewrites: tuple[str, ...] = ()


@runtime_checkable
class BackoffClient(Protocol):
    def route(self, transcript: str) -> BackoffResponse: ...


def _clean(transcript: str) -> str:
    t = transcript.lower().strip()
    t = re.sub(r"\s+", " ", t)
    return t.rstrip(".!?").strip()


# (pattern, builder, numeric): numeric rules match against the
# number-word-normalized transcript; free-text captures must not, or quoted
# content like "seventeen glass shards" would be rewritten.
_RULES: list[tuple[re.Pattern, object, bool]] = []


def _rule(pattern: str, numeric: bool = True):
    def register(fn):
        _RULES.append((re.compile(pattern), fn, numeric))
        return fn
    return register


@_rule(r"^go to (page|paragraph|para) (\d+)$")
def _go_to(m: re.Match) -> Intent:
    slot = "page" if m.group(1) == "page" else "paragraph"
    return Intent(TEMPORAL, {slot: int(m.group(2))})


@_rule(r"^(page|para|paragraph) (\d+)$")
def _bare_position(m: re.Match) -> Intent:
    slot = "page" if m.group(1) == "page" else "paragraph"
    return Intent(TEMPORAL, {slot: int(m.group(2))})


@_rule(r"^open (\d+)$")
def _open_evidence(m: re.Match) -> Intent:
    return Intent(TEMPORAL, {"relative": "open_n", "index": int(m.group(1))})


@_rule(r"^next hit$")
def _next_hit(m: re.Match) -> Intent:
    return Intent(TEMPORAL, {"relative": "next_hit"})


@_rule(r"^previous (hit|section)$")
def _previous(m: re.Match) -> Intent:
    relative = "prev_hit" if m.group(1) == "hit" else "prev_section"
    return Intent(TEMPORAL, {"relative": relative})


@_rule(r"^toggle highlights$")
def _toggle(m: re.Match) -> Intent:
    return Intent(VIEWER_CONTROL, {"action": "toggle_highlights"})


@_rule(r"^back$")
def _back(m: re.Match) -> Intent:
    return Intent(VIEWER_CONTROL, {"action": "back"})


@_rule(r"^highlight (.+)$", numeric=False)
def _highlight(m: re.Match) -> Intent:
    return Intent(CONTEXTUAL, {"query_text": m.group(1), "filters": {}})


@_rule(r"^(?:summarize|summarise) the (charges|petition|document)$")
def _summarize(m: re.Match) -> Intent:
    return Intent(SUMMARIZATION, {"scope": m.group(1)})


# Provisional form for table-region commands; no canonical utterance exists
# for this slot yet.
@_rule(r"^table (\S+) row (\d+) column (\d+)$")
def _table_region(m: re.Match) -> Intent:
    return Intent(CONTEXTUAL, {
        "query_text": m.group(0),
        "filters": {"table_region": {"table_id": m.group(1),
                                     "row": int(m.group(2)),
                                     "col": int(m.group(3))}},
    })


def parse_grammar(transcript: str) -> Intent | None:
    """Parse via the command grammar; None means no parse (triggers back-off)."""
    raw = _clean(transcript)
    numbered = _clean(normalize_numbers(transcript))
    for pattern, build, numeric in _RULES:
        m = pattern.match(numbered if numeric else raw)
        if m:
            return build(m)
    return None


class StubBackoff:
    """Deterministic keyword stand-in for a hosted classifier."""

    def route(self, transcript: str) -> BackoffResponse:
        t = transcript.lower()
        if "summar" in t:
            if "charge" in t:
                scope = "charges"
            elif "petition" in t:
                scope = "petition"
            else:
                scope = "document"
            return BackoffResponse(SUMMARIZATION, {"scope": scope}, 0.8)
        normalized = _clean(normalize_numbers(transcript))
        digits = re.search(r"\d+", normalized)
        if digits and ("para" in normalized or "page" in normalized):
            slot = "paragraph" if "para" in normalized else "page"
            return BackoffResponse(TEMPORAL, {slot: int(digits.group(0))}, 0.8)
        words = transcript.strip().split()
        while words and words[0].lower().strip(",") in _POLITENESS:
            words.pop(0)
        return BackoffResponse(CONTEXTUAL, {"query_text": " ".join(words), "filters": {}}, 0.8)


class HttpBackoffClient:
    """Back-off over the wire: POST /route {transcript} -> intent envelope."""

    def __init__(self, url: str, timeout: float = 2.0,
                 transport: httpx.BaseTransport | None = None):
        self.url = url.rstrip("/")
        self._client = httpx.Client(timeout=timeout, transport=transport)

    def route(self, transcript: str) -> BackoffResponse:
        resp = self._client.post(
            f"{self.url}/route",
            json={"transcript": transcript, "version": BACKOFF_WIRE_VERSION})
        resp.raise_for_status()
        data = resp.json()
        return BackoffResponse(
            kind=data["kind"],
            slots=dict(data.get("slots", {})),
            confidence=float(data["confidence"]),
            rewrites=tuple(data.get("rewrites", ())[:3]),
        )


def _contextual_fallback(transcript: str) -> Intent:
    return Intent(CONTEXTUAL, {"query_text": transcript, "filters": {}},
                  confidence=0.5, source="backoff")


def route(transcript: str, backoff: BackoffClient,
          accept_threshold: float = BACKOFF_ACCEPT_THRESHOLD) -> Intent:
    """Grammar first; back-off on NoParse; contextual fallback on failure.

    Never raises: a back-off exception or confidence below the acceptance
    threshold yields Contextual{query_text=transcript} at confidence 0.5,
    which retrieval plus disambiguation can always handle.
    """
    intent = parse_grammar(transcript)
    if intent is not None:
        return intent
    try:
        resp = backoff.route(transcript)
    except Exception:
        return _contextual_fallback(transcript)
    if resp.kind not in INTENT_KINDS or resp.confidence < accept_threshold:
        return _contextual_fallback(transcript)
    if resp.kind == TEMPORAL and not resp.slots:
        return _contextual_fallback(transcript)
    slots = dict(resp.slots)
    if resp.kind == CONTEXTUAL:
        slots.setdefault("query_text", transcript)
        slots.setdefault("filters", {})
    confidence = min(max(resp.confidence, 0.0), 1.0)
    return Intent(resp.kind, slots, confidence=confidence, source="backoff",
                  rewrites=resp.rewrites[:3])
