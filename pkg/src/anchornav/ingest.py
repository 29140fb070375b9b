"""Layout interchange parsing: anchors, canonical text, tables, and windows.

The layout interchange file is UTF-8 JSON produced upstream by a
layout-extraction step (out of scope here). Spans arrive in reading order;
this module normalizes their text, assigns stable anchor IDs, materializes
table cells as first-class anchors, and builds sliding windows for the
dense index.

Canonical text is the normalized span texts joined by a single newline.
Anchor char_ranges index into it and never overlap; the separator bytes
belong to no anchor.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Mapping

from .errors import EmptyDocument, OverlapError, SchemaViolation

ANCHOR_SEPARATOR = "\n"
ANCHOR_TYPES = ("para", "heading", "table_cell")

# Printed paragraph numbers: "23. The accused..." or "7) On the date..."
_ORDINAL_RE = re.compile(r"^(\d{1,4})[.)]\s")


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box in page-fraction coordinates (resolution independent)."""

    page: int
    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self) -> None:
        if self.page < 1:
            raise ValueError(f"page must be >= 1, got {self.page}")
        if not (self.x0 <= self.x1 and self.y0 <= self.y1):
            raise ValueError(f"degenerate bbox: ({self.x0},{self.y0},{self.x1},{self.y1})")


@dataclass(frozen=True)
class CharRange:
    """Half-open [start, end) byte range into canonical text."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0 or self.end <= self.start:
            raise ValueError(f"invalid char range [{self.start}, {self.end})")

    def __len__(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class TableRef:
    """Grid coordinates of a table cell; unique per (table_id, row, col)."""

    table_id: str
    row: int
    col: int
    rowspan: int = 1
    colspan: int = 1

    def __post_init__(self) -> None:
        if self.row < 0 or self.col < 0:
            raise ValueError("row/col must be >= 0")
        if self.rowspan < 1 or self.colspan < 1:
            raise ValueError("rowspan/colspan must be >= 1")


@dataclass(frozen=True)
class Anchor:
    """Minimal displayable unit: paragraph, heading, or table cell."""

    anchor_id: str
    doc_id: str
    type: str
    bboxes: tuple[BBox, ...]
    char_range: CharRange
    span_id: str
    ordinal: int | None = None
    section_path: tuple[str, ...] = ()
    table: TableRef | None = None

    @property
    def page(self) -> int:
        return self.bboxes[0].page

    @property
    def bbox(self) -> BBox:
        return self.bboxes[0]


@dataclass(frozen=True)
class Window:
    """Contiguous group of anchors embedded as one dense-index unit."""

    window_id: str
    anchor_ids: tuple[str, ...]
    char_range: CharRange
    text: str


@dataclass
class DocumentRecord:
    """Immutable-after-ingest view of one document."""

    doc_id: str
    canonical_text: str
    anchors: list[Anchor]
    tables: dict[str, tuple[int, int]]
    windows: list[Window]
    page_count: int

    @cached_property
    def anchors_by_id(self) -> dict[str, Anchor]:
        return {a.anchor_id: a for a in self.anchors}

    @cached_property
    def order_of(self) -> dict[str, int]:
        return {a.anchor_id: i for i, a in enumerate(self.anchors)}

    def text_of(self, anchor: Anchor | str) -> str:
        if isinstance(anchor, str):
            anchor = self.anchors_by_id[anchor]
        return self.canonical_text[anchor.char_range.start : anchor.char_range.end]


def normalize_text(raw: str) -> tuple[str, dict[int, int]]:
    """Normalize hyphenation and whitespace, tracking retained offsets.

    Line-break hyphenation is rejoined ("con-\\ntinued" -> "continued") only
    when the continuation starts with a lowercase letter, which keeps
    numbered lists and citations intact. Whitespace runs collapse to a
    single space; leading/trailing whitespace is dropped.

    Returns the normalized string and a monotone map from each retained raw
    offset to its normalized offset.
    """
    out: list[str] = []
    offset_map: dict[int, int] = {}
    i, n = 0, len(raw)
    while i < n:
        ch = raw[i]
        if ch == "-":
            j = i + 1
            if j < n and raw[j] == "\r":
                j += 1
            if j < n and raw[j] == "\n" and j + 1 < n and raw[j + 1].islower():
                i = j + 1
                continue
        if ch.isspace():
            j = i
            while j < n and raw[j].isspace():
                j += 1
            if out and j < n:
                offset_map[i] = len(out)
                out.append(" ")
            i = j
            continue
        offset_map[i] = len(out)
        out.append(ch)
        i += 1
    return "".join(out), offset_map


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise SchemaViolation(message)


def _parse_bbox(span_id: str, page: int, coords: Any) -> BBox:
    _require(isinstance(coords, Mapping), f"span {span_id}: bbox_coords must be an object")
    vals = {}
    for key in ("x0", "y0", "x1", "y1"):
        v = coords.get(key)
        _require(isinstance(v, (int, float)) and not isinstance(v, bool),
                 f"span {span_id}: bbox_coords.{key} must be a number")
        _require(0.0 <= v <= 1.0, f"span {span_id}: bbox_coords.{key} must be in [0, 1]")
        vals[key] = float(v)
    _require(vals["x0"] <= vals["x1"] and vals["y0"] <= vals["y1"],
             f"span {span_id}: bbox_coords degenerate")
    return BBox(page=page, **vals)


def _parse_table(span_id: str, raw: Any) -> TableRef:
    _require(isinstance(raw, Mapping), f"span {span_id}: table must be an object")
    _require(isinstance(raw.get("table_id"), str) and raw["table_id"],
             f"span {span_id}: table.table_id must be a non-empty string")
    for key in ("row", "col"):
        _require(isinstance(raw.get(key), int) and not isinstance(raw.get(key), bool)
                 and raw[key] >= 0,
                 f"span {span_id}: table.{key} must be an integer >= 0")
    spans = {}
    for key in ("rowspan", "colspan"):
        v = raw.get(key, 1)
        _require(isinstance(v, int) and not isinstance(v, bool) and v >= 1,
                 f"span {span_id}: table.{key} must be an integer >= 1")
        spans[key] = v
    return TableRef(table_id=raw["table_id"], row=raw["row"], col=raw["col"], **spans)


def parse_layout(payload: Mapping[str, Any], *, window_width: int = 3,
                 window_stride: int = 1) -> DocumentRecord:
    """Parse a layout interchange payload into a DocumentRecord.

    Spans are stable-sorted by (page, y0, x0); input already in reading
    order is left untouched. Table cells become anchors of their own even
    when the table crosses pages.
    """
    _require(isinstance(payload, Mapping), "payload must be a JSON object")
    doc_id = payload.get("doc_id")
    _require(isinstance(doc_id, str) and bool(doc_id), "doc_id must be a non-empty string")
    page_count = payload.get("page_count")
    _require(isinstance(page_count, int) and not isinstance(page_count, bool)
             and page_count >= 1, "page_count must be an integer >= 1")
    spans = payload.get("spans")
    _require(isinstance(spans, list), "spans must be a list")
    if not spans:
        raise EmptyDocument(f"document {doc_id} has zero spans")

    seen_span_ids: set[str] = set()
    seen_cells: set[tuple[str, int, int]] = set()
    parsed: list[dict[str, Any]] = []
    for idx, span in enumerate(spans):
        _require(isinstance(span, Mapping), f"spans[{idx}] must be an object")
        span_id = span.get("span_id")
        _require(isinstance(span_id, str) and bool(span_id),
                 f"spans[{idx}]: span_id must be a non-empty string")
        if span_id in seen_span_ids:
            raise OverlapError(f"span {span_id} appears twice")
        seen_span_ids.add(span_id)
        section_type = span.get("section_type")
        _require(section_type in ANCHOR_TYPES,
                 f"span {span_id}: section_type must be one of {ANCHOR_TYPES}")
        page = span.get("page_number")
        _require(isinstance(page, int) and not isinstance(page, bool) and 1 <= page,
                 f"span {span_id}: page_number must be an integer >= 1")
        _require(page <= page_count,
                 f"span {span_id}: page_number {page} exceeds page_count {page_count}")
        bbox = _parse_bbox(span_id, page, span.get("bbox_coords"))
        content = span.get("content")
        _require(isinstance(content, str), f"span {span_id}: content must be a string")
        text, _ = normalize_text(content)
        _require(bool(text), f"span {span_id}: content is empty after normalization")

        table = None
        if section_type == "table_cell":
            _require("table" in span and span["table"] is not None,
                     f"span {span_id}: table_cell spans require a table object")
            table = _parse_table(span_id, span["table"])
            key = (table.table_id, table.row, table.col)
            if key in seen_cells:
                raise OverlapError(
                    f"table cell {key} claimed by more than one span")
            seen_cells.add(key)
        else:
            _require(span.get("table") is None,
                     f"span {span_id}: only table_cell spans may carry a table object")

        parsed.append({"span_id": span_id, "type": section_type, "bbox": bbox,
                       "text": text, "table": table})

    # Reading order: trust input, restoring geometric order only where the
    # input disagrees with it (stable sort keeps ties in input order).
    parsed.sort(key=lambda s: (s["bbox"].page, s["bbox"].y0, s["bbox"].x0))

    anchors: list[Anchor] = []
    pieces: list[str] = []
    cursor = 0
    section_path: tuple[str, ...] = ()
    tables: dict[str, tuple[int, int]] = {}
    for i, s in enumerate(parsed):
        text = s["text"]
        if s["type"] == "heading":
            section_path = (text,)
        ordinal = None
        if s["type"] == "para":
            m = _ORDINAL_RE.match(text)
            if m:
                ordinal = int(m.group(1))
        table: TableRef | None = s["table"]
        if table is not None:
            rows, cols = tables.get(table.table_id, (0, 0))
            tables[table.table_id] = (max(rows, table.row + table.rowspan),
                                      max(cols, table.col + table.colspan))
        anchors.append(Anchor(
            anchor_id=f"{doc_id}:{i:06d}",
            doc_id=doc_id,
            type=s["type"],
            bboxes=(s["bbox"],),
            char_range=CharRange(cursor, cursor + len(text)),
            span_id=s["span_id"],
            ordinal=ordinal,
            section_path=section_path,
            table=table,
        ))
        pieces.append(text)
        cursor += len(text) + len(ANCHOR_SEPARATOR)

    record = DocumentRecord(
        doc_id=doc_id,
        canonical_text=ANCHOR_SEPARATOR.join(pieces),
        anchors=anchors,
        tables=tables,
        windows=[],
        page_count=page_count,
    )
    record.windows = build_windows(record, width=window_width, stride=window_stride)
    return record


def build_windows(record: DocumentRecord, width: int = 3, stride: int = 1) -> list[Window]:
    """Sliding windows over para/heading anchors plus one window per table cell.

    Window count for A >= 1 non-cell anchors is max(1, ceil((A - width) / stride) + 1);
    consecutive windows share width - stride anchors when enough anchors exist.
    """
    if width < 1:
        raise ValueError(f"width must be >= 1, got {width}")
    if not (1 <= stride <= width):
        raise ValueError(f"stride must be in [1, width], got {stride}")

    flow = [a for a in record.anchors if a.type != "table_cell"]
    cells = [a for a in record.anchors if a.type == "table_cell"]
    if not flow and not cells:
        raise EmptyDocument(f"document {record.doc_id} has no anchors to window")

    windows: list[Window] = []

    def add(members: list[Anchor]) -> None:
        char_range = CharRange(members[0].char_range.start, members[-1].char_range.end)
        windows.append(Window(
            window_id=f"{record.doc_id}:w{len(windows):06d}",
            anchor_ids=tuple(a.anchor_id for a in members),
            char_range=char_range,
            text=record.canonical_text[char_range.start : char_range.end],
        ))

    A = len(flow)
    if A:
        count = max(1, -(-(A - width) // stride) + 1)
        for k in range(count):
            start = k * stride
            add(flow[start : start + width])
    for cell in cells:
        add([cell])
    return windows
