"""Map retrieved or quoted text spans back onto anchors, tolerating OCR drift.

Exact substring search runs first. Failing that, the quoted string is
compared against sliding segments of each anchor at lengths 0.8x, 1.0x and
1.2x of the quote, minimizing Levenshtein distance normalized by the longer
side. The candidate-length set bounds DP cost; full-text alignment is a
non-goal. Ties prefer the earlier anchor, then the shorter segment, then
the earlier position.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import NoAnchor, OutOfBounds
from .ingest import Anchor, CharRange, DocumentRecord

DEFAULT_TOLERANCE = 0.2
_LENGTH_FACTORS = (0.8, 1.0, 1.2)


@dataclass(frozen=True)
class AlignmentResult:
    anchor_id: str
    matched: CharRange
    distance: float  # normalized edit distance in [0, 1]
    method: str      # "exact" | "tolerant"


def align_offset(record: DocumentRecord, offset: CharRange) -> str:
    """Anchor owning an offset range: containment, else majority of the span.

    Ties go to the earlier anchor. A range that covers no anchor at all
    (separator-only) resolves to the nearest preceding anchor.
    """
    if offset.end > len(record.canonical_text):
        raise OutOfBounds(
            f"offset [{offset.start}, {offset.end}) beyond text length "
            f"{len(record.canonical_text)}")
    best: Anchor | None = None
    best_overlap = 0
    preceding: Anchor | None = None
    for anchor in record.anchors:
        r = anchor.char_range
        overlap = min(offset.end, r.end) - max(offset.start, r.start)
        if overlap > best_overlap:
            best, best_overlap = anchor, overlap
        if r.end <= offset.start:
            preceding = anchor
    if best is not None:
        return best.anchor_id
    fallback = preceding if preceding is not None else record.anchors[0]
    return fallback.anchor_id


def levenshtein(a: str, b: str) -> int:
    """Plain dynamic-programming edit distance (unit costs)."""
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        for j, cb in enumerate(b, start=1):
            cur[j] = min(prev[j - 1] + (ca != cb), prev[j] + 1, cur[j - 1] + 1)
        prev = cur
    return prev[-1]


def _segment_distances(pattern: np.ndarray, segments: np.ndarray) -> np.ndarray:
    """Levenshtein distance of a pattern against P equal-length segments.

    segments is (P, L) int32 char codes. Rows of the DP table are vectorized
    across segments; the in-row insertion chain is resolved with the
    prefix-min identity dp[j] - j = min(k<=j) (base[k] - k).
    """
    P, L = segments.shape
    jrange = np.arange(L + 1, dtype=np.int32)
    prev = np.broadcast_to(jrange, (P, L + 1)).copy()
    for i in range(1, len(pattern) + 1):
        sub = prev[:, :-1] + (segments != pattern[i - 1])
        dele = prev[:, 1:] + 1
        cand = np.minimum(sub, dele).astype(np.int32)
        t = np.empty((P, L + 1), dtype=np.int32)
        t[:, 0] = i
        t[:, 1:] = cand - jrange[1:]
        np.minimum.accumulate(t, axis=1, out=t)
        prev = t + jrange
    return prev[:, -1]


def _codes(text: str) -> np.ndarray:
    return np.array([ord(c) for c in text], dtype=np.int32)


def align_fuzzy(record: DocumentRecord, quoted: str,
                tolerance: float = DEFAULT_TOLERANCE) -> AlignmentResult:
    """Locate quoted text in the record, exactly or within edit tolerance."""
    if not quoted:
        raise ValueError("quoted text must be non-empty")
    pos = record.canonical_text.find(quoted)
    if pos >= 0:
        matched = CharRange(pos, pos + len(quoted))
        return AlignmentResult(
            anchor_id=align_offset(record, matched),
            matched=matched,
            distance=0.0,
            method="exact",
        )

    q = len(quoted)
    pattern = _codes(quoted)
    lengths = sorted({max(1, round(f * q)) for f in _LENGTH_FACTORS})
    best: tuple[float, str, int, int] | None = None  # (dist, anchor, start, L)
    for anchor in record.anchors:
        text = record.text_of(anchor)
        codes = _codes(text)
        for length in sorted({min(len(text), L) for L in lengths}):
            segments = sliding_window_view(codes, length)
            dists = _segment_distances(pattern, segments)
            j = int(np.argmin(dists))
            norm = float(dists[j]) / max(q, length)
            if best is None or norm < best[0]:
                base = anchor.char_range.start
                best = (norm, anchor.anchor_id, base + j, length)
    if best is None or best[0] > tolerance:
        raise NoAnchor(
            f"no anchor within tolerance {tolerance} "
            f"(best {best[0]:.4f})" if best else "document has no anchors",
            best_distance=best[0] if best else None)
    norm, anchor_id, start, length = best
    return AlignmentResult(
        anchor_id=anchor_id,
        matched=CharRange(start, start + length),
        distance=norm,
        method="tolerant",
    )
