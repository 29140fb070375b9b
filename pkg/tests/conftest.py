import json
from pathlib import Path

import pytest

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load_payload(name: str) -> dict:
    return json.loads((FIXTURES / f"{name}.json").read_text(encoding="utf-8"))


def make_span(span_id, content, *, section_type="para", page=1, y0=0.1,
              x0=0.1, x1=0.9, h=0.05, table=None):
    span = {
        "span_id": span_id,
        "section_type": section_type,
        "page_number": page,
        "bbox_coords": {"x0": x0, "y0": y0, "x1": x1, "y1": y0 + h},
        "content": content,
    }
    if table:
        span["table"] = table
    return span


def make_payload(doc_id, spans, page_count=None):
    pages = max(s["page_number"] for s in spans) if spans else 1
    return {"doc_id": doc_id, "page_count": page_count or pages, "spans": spans}


def simple_payload(doc_id="doc", texts=("alpha one", "beta two", "gamma three")):
    spans = [make_span(f"s{i}", text, y0=0.1 + 0.1 * i)
             for i, text in enumerate(texts)]
    return make_payload(doc_id, spans)


@pytest.fixture
def clean_payload():
    return load_payload("doc_clean")


@pytest.fixture
def ocr_payload():
    return load_payload("doc_ocr")


@pytest.fixture
def tables_payload():
    return load_payload("doc_tables")


@pytest.fixture
def all_payloads(clean_payload, ocr_payload, tables_payload):
    return {p["doc_id"]: p for p in (clean_payload, ocr_payload, tables_payload)}
