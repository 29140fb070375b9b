import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from anchornav.config import ServiceConfig
from anchornav.errors import (EmptyGold, MalformedCase, MissingDocument,
                              ServiceUnreachable)
from anchornav.evalharness import (MODES, EvalReport, QueryCase, format_latency,
                                   format_report, load_corpus, measure_latency,
                                   mode_engine_config, parse_case, percentile,
                                   run_eval, strict_f1)
from anchornav.fusion import FusionConfig
from anchornav.service import create_app

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


# ---------------------------------------------------------------------------
# strict_f1
# ---------------------------------------------------------------------------

def test_perfect_hit():
    assert strict_f1({"a1"}, {"a1"}) == (1.0, 1.0, 1.0)


def test_half_precision():
    p, r, f1 = strict_f1({"a1", "a2"}, {"a1"})
    assert (p, r) == (0.5, 1.0)
    assert f1 == pytest.approx(2 / 3)


def test_empty_prediction():
    assert strict_f1(set(), {"a1"}) == (0.0, 0.0, 0.0)


def test_both_empty():
    assert strict_f1(set(), set()) == (1.0, 1.0, 1.0)


def test_empty_gold_with_prediction_raises():
    with pytest.raises(EmptyGold):
        strict_f1({"a1"}, set())


def test_f1_zero_iff_empty_intersection():
    _, _, f1 = strict_f1({"a1", "a2"}, {"b1"})
    assert f1 == 0.0
    _, _, f1 = strict_f1({"a1", "b1"}, {"b1", "c1"})
    assert f1 > 0.0


def test_precision_recall_swap_symmetry():
    p1, r1, _ = strict_f1({"a", "b", "c"}, {"a", "d"})
    p2, r2, _ = strict_f1({"a", "d"}, {"a", "b", "c"})
    assert (p1, r1) == (r2, p2)


# ---------------------------------------------------------------------------
# corpus loading
# ---------------------------------------------------------------------------

def test_load_bundled_corpora():
    exact = load_corpus(FIXTURES / "corpus_exact.jsonl")
    assert len(exact) >= 60
    families = {c.family for c in exact}
    assert families == {"temporal", "contextual", "summarization"}
    assert all(c.gold_anchor_ids for c in exact)


def test_malformed_case_rejected():
    with pytest.raises(MalformedCase):
        parse_case({"query_id": "q", "doc_id": "d", "family": "contextual",
                    "utterance": "u", "gold_anchor_ids": []})
    with pytest.raises(MalformedCase):
        parse_case({"query_id": "q", "doc_id": "d", "family": "weird",
                    "utterance": "u", "gold_anchor_ids": ["a"]})
    with pytest.raises(MalformedCase):
        parse_case({"query_id": "q"})


def test_malformed_jsonl(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text("{not json}\n")
    with pytest.raises(MalformedCase):
        load_corpus(path)


# ---------------------------------------------------------------------------
# run_eval
# ---------------------------------------------------------------------------

def test_mode_configs():
    base = FusionConfig()
    kw = mode_engine_config("keyword_only", base)
    assert kw.fusion.alpha == 1.0 and not kw.use_dense and kw.window_width == 1
    dn = mode_engine_config("dense_only", base)
    assert dn.fusion.alpha == 0.0 and dn.use_dense and dn.window_width == 1
    hy = mode_engine_config("hybrid", base)
    assert hy.fusion.alpha == 0.7 and hy.window_width == 1
    lw = mode_engine_config("late_window_keyword", base)
    assert lw.fusion.alpha == 0.7 and lw.window_width == 3 and lw.window_stride == 1
    with pytest.raises(ValueError):
        mode_engine_config("bogus", base)


def test_unknown_document_rejected(all_payloads):
    case = QueryCase("q1", "ghost", "contextual", "anything",
                     frozenset({"ghost:000001"}))
    with pytest.raises(MissingDocument):
        run_eval([case], all_payloads, modes=("keyword_only",))


def test_unknown_gold_anchor_rejected(all_payloads):
    case = QueryCase("q1", "doc_clean", "contextual", "anything",
                     frozenset({"doc_clean:999999"}))
    with pytest.raises(MalformedCase):
        run_eval([case], all_payloads, modes=("keyword_only",))


def test_exact_corpus_mini_run(all_payloads):
    corpus = load_corpus(FIXTURES / "corpus_exact.jsonl")[:10]
    report = run_eval(corpus, all_payloads, modes=("keyword_only", "hybrid"))
    assert report.modes["keyword_only"].strict_f1 == 1.0
    assert report.modes["hybrid"].strict_f1 == 1.0
    assert report.modes["keyword_only"].queries == 10


def test_documents_from_directory():
    corpus = load_corpus(FIXTURES / "corpus_exact.jsonl")[:5]
    report = run_eval(corpus, FIXTURES, modes=("keyword_only",))
    assert report.modes["keyword_only"].strict_f1 == 1.0


def test_reproducibility(all_payloads):
    corpus = load_corpus(FIXTURES / "corpus_paraphrase.jsonl")
    r1 = run_eval(corpus, all_payloads, modes=("late_window_keyword",))
    r2 = run_eval(corpus, all_payloads, modes=("late_window_keyword",))
    assert r1.per_query == r2.per_query
    assert r1.modes["late_window_keyword"].strict_f1 == \
        r2.modes["late_window_keyword"].strict_f1


def test_report_serialization(all_payloads):
    corpus = load_corpus(FIXTURES / "corpus_exact.jsonl")[:5]
    report = run_eval(corpus, all_payloads, modes=("keyword_only",))
    data = report.to_dict()
    assert "reference_noncomparable" in data
    assert data["reference_noncomparable"]["strict_f1"]["late_window_keyword"] == 0.92
    table = format_report(report)
    assert "keyword_only" in table and "strict_f1" in table


# ---------------------------------------------------------------------------
# measure_latency
# ---------------------------------------------------------------------------

def test_percentile_nearest_rank():
    values = list(range(1, 101))
    assert percentile(values, 95) == 95
    assert percentile([5.0], 95) == 5.0
    with pytest.raises(ValueError):
        percentile([], 95)


def test_repetitions_precondition(all_payloads, tmp_path):
    corpus = load_corpus(FIXTURES / "corpus_exact.jsonl")[:1]
    with pytest.raises(ValueError):
        measure_latency(corpus, client=None, repetitions=0)


def test_measure_latency_in_process(all_payloads, tmp_path):
    app = create_app(ServiceConfig(audit_path=str(tmp_path / "a.ndjson")))
    with TestClient(app) as client:
        for payload in all_payloads.values():
            assert client.post("/documents", json=payload).status_code == 201
        corpus = load_corpus(FIXTURES / "corpus_exact.jsonl")[:9]
        latency = measure_latency(corpus, client, repetitions=2)
    assert latency
    for family, stats in latency.items():
        assert stats.mean_ms > 0
        assert stats.p95_ms >= stats.mean_ms * 0.1
        assert stats.samples > 0
    text = format_latency(latency)
    assert "non-comparable" in text


def test_service_unreachable(tmp_path):
    import httpx

    corpus = [QueryCase("q1", "doc", "temporal", "go to paragraph 1",
                        frozenset({"doc:000000"}))]
    client = httpx.Client(base_url="http://127.0.0.1:1", timeout=0.2)
    with pytest.raises(ServiceUnreachable):
        measure_latency(corpus, client, repetitions=1)
