import random

import pytest

from anchornav.alignment import (AlignmentResult, align_fuzzy, align_offset,
                                 levenshtein)
from anchornav.errors import NoAnchor, OutOfBounds
from anchornav.ingest import CharRange, parse_layout

from conftest import load_payload, make_payload, make_span


def oracle_levenshtein(a, b):
    """Independent DP oracle (full matrix, no tricks)."""
    rows = len(a) + 1
    cols = len(b) + 1
    dp = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        dp[i][0] = i
    for j in range(cols):
        dp[0][j] = j
    for i in range(1, rows):
        for j in range(1, cols):
            dp[i][j] = min(dp[i - 1][j - 1] + (a[i - 1] != b[j - 1]),
                           dp[i - 1][j] + 1,
                           dp[i][j - 1] + 1)
    return dp[-1][-1]


@pytest.fixture
def record():
    return parse_layout(load_payload("doc_clean"))


# ---------------------------------------------------------------------------
# align_offset
# ---------------------------------------------------------------------------

def test_offset_containment(record):
    anchor = record.anchors[3]
    r = anchor.char_range
    offset = CharRange(r.start + 2, r.start + 8)
    assert align_offset(record, offset) == anchor.anchor_id


def test_offset_majority_rule(record):
    a3, a4 = record.anchors[3], record.anchors[4]
    # 60% inside a3, 40% inside a4 (lengths chosen from the boundary).
    span = 10
    start = a3.char_range.end - 6
    offset = CharRange(start, start + span)
    assert align_offset(record, offset) == a3.anchor_id
    # Majority flipped.
    start = a3.char_range.end - 4
    offset = CharRange(start, start + span)
    assert align_offset(record, offset) == a4.anchor_id


def test_offset_tie_goes_earlier(record):
    a3, a4 = record.anchors[3], record.anchors[4]
    start = a3.char_range.end - 5
    offset = CharRange(start, start + 11)  # 5 chars in a3, separator, 5 in a4
    assert align_offset(record, offset) == a3.anchor_id


def test_offset_whole_document(record):
    # Whole document resolves to the anchor covering the most characters.
    offset = CharRange(0, len(record.canonical_text))
    longest = max(record.anchors,
                  key=lambda a: (len(a.char_range), -record.order_of[a.anchor_id]))
    assert align_offset(record, offset) == longest.anchor_id


def test_offset_out_of_bounds(record):
    with pytest.raises(OutOfBounds):
        align_offset(record, CharRange(0, len(record.canonical_text) + 1))


# ---------------------------------------------------------------------------
# align_fuzzy
# ---------------------------------------------------------------------------

def test_exact_match(record):
    anchor = record.anchors[7]
    quoted = record.text_of(anchor)[5:40]
    result = align_fuzzy(record, quoted)
    assert result.method == "exact"
    assert result.distance == 0.0
    assert result.anchor_id == anchor.anchor_id
    assert record.canonical_text[result.matched.start:result.matched.end] == quoted


def test_ocr_drift_example():
    spans = [make_span("s0", "The call detail records were exhibited."),
             make_span("s1", "Unrelated paragraph about sureties.", y0=0.3)]
    record = parse_layout(make_payload("doc", spans))
    result = align_fuzzy(record, "cal1 detail records")
    assert result.method == "tolerant"
    assert result.anchor_id == record.anchors[0].anchor_id
    assert result.distance == pytest.approx(1 / 19, abs=1e-12)


def test_random_absent_string(record):
    rng = random.Random(99)
    quoted = "".join(rng.choice("qxzjvwkyf") for _ in range(40))
    with pytest.raises(NoAnchor) as exc:
        align_fuzzy(record, quoted)
    assert exc.value.best_distance is not None
    assert exc.value.best_distance > 0.2


def test_empty_quoted_rejected(record):
    with pytest.raises(ValueError):
        align_fuzzy(record, "")


def test_exact_dominance(record):
    # Whenever the quoted text appears verbatim, method is exact.
    for anchor in record.anchors[:6]:
        text = record.text_of(anchor)
        result = align_fuzzy(record, text[: min(len(text), 30)])
        assert result.method == "exact"
        assert result.distance == 0.0


def test_determinism(record):
    quoted = "custodu timeline was reconstrukted"
    r1 = align_fuzzy(record, quoted)
    r2 = align_fuzzy(record, quoted)
    assert r1 == r2


def test_tolerance_monotonicity(record):
    anchor = record.anchors[4]
    text = record.text_of(anchor)
    corrupted = "x" + text[6:36] + "z"  # drift at both ends
    result = align_fuzzy(record, corrupted, tolerance=0.5)
    for tolerance in (0.6, 0.8, 1.0):
        wider = align_fuzzy(record, corrupted, tolerance=tolerance)
        assert wider.anchor_id == result.anchor_id
        assert wider.distance == result.distance


def test_tolerance_boundary():
    # 1000-char anchor; 199 substitutions pass at 0.2, 201 fail.
    base = "".join(random.Random(1).choice("abcdefgh ") for _ in range(1000)).strip()
    record = parse_layout(make_payload("doc", [make_span("s0", base)]))
    text = record.text_of(record.anchors[0])
    rng = random.Random(2)

    def corrupt(n):
        positions = rng.sample(range(len(text)), n)
        chars = list(text)
        for pos in positions:
            chars[pos] = "Q"
        return "".join(chars)

    ok = align_fuzzy(record, corrupt(199), tolerance=0.2)
    assert ok.method == "tolerant"
    assert ok.distance <= 0.2
    with pytest.raises(NoAnchor):
        align_fuzzy(record, corrupt(201), tolerance=0.2)


def test_distance_matches_oracle_on_segments(record):
    # The vectorized sliding DP agrees with a plain quadratic implementation.
    anchor = record.anchors[2]
    text = record.text_of(anchor)
    quoted = text[10:45].replace("e", "3").replace("r", "x")
    result = align_fuzzy(record, quoted, tolerance=0.6)
    segment = record.canonical_text[result.matched.start:result.matched.end]
    expected = oracle_levenshtein(quoted, segment) / max(len(quoted), len(segment))
    assert result.distance == pytest.approx(expected, abs=1e-12)


def test_levenshtein_helper_against_oracle():
    rng = random.Random(3)
    alphabet = "abcdef"
    for _ in range(40):
        a = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 12)))
        b = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 12)))
        assert levenshtein(a, b) == oracle_levenshtein(a, b)
