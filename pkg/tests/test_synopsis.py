import pytest

from anchornav.alignment import align_fuzzy
from anchornav.errors import EmptyDocument
from anchornav.ingest import parse_layout
from anchornav.lexical import build_lexical
from anchornav.synopsis import (Synopsis, build_synopsis, first_sentences,
                                split_sentences)

from conftest import make_payload, make_span


def build(payload, scope="document", k=5):
    record = parse_layout(payload)
    index = build_lexical(record)
    return record, build_synopsis(record, index, scope=scope, k=k)


# ---------------------------------------------------------------------------
# sentence splitting
# ---------------------------------------------------------------------------

def test_split_basic():
    assert split_sentences("One here. Two there. Three.") == [
        "One here.", "Two there.", "Three."]


def test_split_respects_abbreviations():
    text = "Charge under Sec. 302 was framed. No. 7 annexure follows."
    assert split_sentences(text) == [
        "Charge under Sec. 302 was framed.", "No. 7 annexure follows."]
    text2 = "State vs. Ramesh was cited. The bench agreed."
    assert split_sentences(text2) == ["State vs. Ramesh was cited.",
                                      "The bench agreed."]


def test_split_question_exclamation():
    assert split_sentences("Was he there? He was! Indeed.") == [
        "Was he there?", "He was!", "Indeed."]


def test_first_sentences_prefix_verbatim():
    text = "Alpha beta. Gamma delta. Epsilon zeta."
    out = first_sentences(text, 2)
    assert out == "Alpha beta. Gamma delta."
    assert text.startswith(out)


def test_first_sentences_short_text():
    assert first_sentences("Only one sentence here", 2) == "Only one sentence here"


# ---------------------------------------------------------------------------
# build_synopsis
# ---------------------------------------------------------------------------

def test_single_paragraph_document():
    payload = make_payload("doc", [make_span("s0", "A single paragraph. More.")])
    record, synopsis = build(payload)
    assert len(synopsis.lines) == 1
    assert synopsis.lines[0].anchor_ids == (record.anchors[0].anchor_id,)


def test_ten_paragraphs_invariants(clean_payload):
    record = parse_layout(clean_payload)
    index = build_lexical(record)
    synopsis = build_synopsis(record, index, scope="document", k=5)
    assert len(synopsis.lines) == 5
    assert len(set(synopsis.cited_anchor_ids())) >= 2
    for line in synopsis.lines:
        assert line.anchor_ids
        result = align_fuzzy(record, line.text)
        assert result.method == "exact"
        assert result.anchor_id in line.anchor_ids


def test_scope_filter_charges(clean_payload):
    record = parse_layout(clean_payload)
    index = build_lexical(record)
    synopsis = build_synopsis(record, index, scope="charges", k=5)
    for line in synopsis.lines:
        for aid in line.anchor_ids:
            anchor = record.anchors_by_id[aid]
            assert anchor.section_path == ("CHARGES",)


def test_excerpt_at_most_two_sentences(clean_payload):
    record, synopsis = parse_layout(clean_payload), None
    index = build_lexical(record)
    synopsis = build_synopsis(record, index, scope="document")
    for line in synopsis.lines:
        assert len(split_sentences(line.text)) <= 2


def test_idempotence(clean_payload):
    record = parse_layout(clean_payload)
    index = build_lexical(record)
    s1 = build_synopsis(record, index, scope="charges")
    s2 = build_synopsis(record, index, scope="charges")
    assert s1 == s2  # built_at excluded from equality


def test_empty_document_rejected():
    record = parse_layout(make_payload("doc", [make_span("s0", "text")]))
    record.anchors = []
    with pytest.raises(EmptyDocument):
        build_synopsis(record, build_lexical(parse_layout(
            make_payload("doc", [make_span("s0", "text")]))))


def test_widened_pool_when_scope_sparse():
    # Document with >= 2 anchors must cite >= 2 distinct anchors even when
    # the scope keywords match only one paragraph.
    spans = [
        make_span("s0", "The charge sheet names one accused.", y0=0.1),
        make_span("s1", "Unrelated narration follows here.", y0=0.2),
        make_span("s2", "More text without the keyword.", y0=0.3),
    ]
    record = parse_layout(make_payload("doc", spans))
    index = build_lexical(record)
    synopsis = build_synopsis(record, index, scope="charges", k=5)
    assert len(set(synopsis.cited_anchor_ids())) >= 2
