"""Acceptance suite: one test per release criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines. Tolerances are pinned here, not calibrated elsewhere.
"""

import json
import math
import random
import re
import string
import time
from pathlib import Path

import numpy as np
import pytest
from fastapi.testclient import TestClient

from anchornav.alignment import align_fuzzy
from anchornav.config import ServiceConfig
from anchornav.dense import TokenMatrix, score_maxsim
from anchornav.engine import NavEngine, EngineConfig
from anchornav.errors import NoAnchor
from anchornav.evalharness import (MODES, load_corpus, measure_latency,
                                   run_eval)
from anchornav.fusion import Candidate, FusionConfig, fuse
from anchornav.ingest import parse_layout
from anchornav.lexical import DEFAULT_BOOSTS, build_lexical, score_lexical
from anchornav.router import parse_grammar, route
from anchornav.service import AUDIT_FIELDS, create_app

from conftest import load_payload, make_payload, make_span

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def ok(message):
    print(f"\n[PASS] {message}")


# ---------------------------------------------------------------------------
# 1. BM25 oracle equivalence
# ---------------------------------------------------------------------------

def test_bm25_oracle_equivalence():
    rng = random.Random(1001)
    vocab = [f"term{i}" for i in range(120)] + ["section", "302", "ipc", "rule"]
    texts = [" ".join(rng.choices(vocab, k=rng.randint(4, 30))) for _ in range(100)]
    types = [rng.choice(["para", "heading", "table_cell"]) for _ in range(100)]
    spans = [make_span(f"s{i}", t, section_type=typ,
                       page=i // 10 + 1, y0=0.03 + (i % 10) * 0.09,
                       table={"table_id": "t", "row": i, "col": 0}
                       if typ == "table_cell" else None)
             for i, (t, typ) in enumerate(zip(texts, types))]
    record = parse_layout(make_payload("oracle", spans))
    index = build_lexical(record)

    # Brute-force scorer: independent tokenizer, double loop, recomputed stats.
    def naive_tokenize(text):
        words = re.findall(r"\w+", text.lower())
        heads = {"section", "sec", "article", "art", "rule", "order", "clause"}
        bigrams = [w + "_" + x for w, x in zip(words, words[1:])
                   if w in heads and re.fullmatch(r"\d+[a-z]*", x)]
        return words + bigrams

    docs = [naive_tokenize(record.text_of(a)) for a in record.anchors]
    avglen = sum(len(d) for d in docs) / len(docs)

    def naive_score(query_terms, doc, typ):
        total = 0.0
        for term in query_terms:
            tf = doc.count(term)
            if tf == 0:
                continue
            df = sum(1 for d in docs if term in d)
            idf = math.log(1.0 + (len(docs) - df + 0.5) / (df + 0.5))
            total += idf * tf * 2.2 / (tf + 1.2 * (0.25 + 0.75 * len(doc) / avglen))
        return total * DEFAULT_BOOSTS[typ]

    start = time.perf_counter()
    checked = 0
    for q in range(20):
        query = " ".join(rng.choices(vocab, k=rng.randint(1, 6)))
        got = dict(score_lexical(index, query, top_k=100))
        query_terms = naive_tokenize(query)
        for pos, anchor in enumerate(record.anchors):
            want = naive_score(query_terms, docs[pos], anchor.type)
            have = got.get(anchor.anchor_id, 0.0)
            assert abs(have - want) < 1e-9, (query, anchor.anchor_id, have, want)
            checked += 1
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, f"runtime {elapsed:.2f}s exceeds 5s budget"
    ok(f"BM25 oracle equivalence: {checked} (query, anchor) pairs, "
       f"|delta| < 1e-9, {elapsed:.2f}s")


# ---------------------------------------------------------------------------
# 2. MaxSim oracle equivalence
# ---------------------------------------------------------------------------

def test_maxsim_oracle_equivalence():
    rng = np.random.default_rng(2002)
    checked = 0
    for _ in range(200):
        m = int(rng.integers(1, 11))
        n = int(rng.integers(1, 31))
        qv = rng.standard_normal((m, 64))
        dv = rng.standard_normal((n, 64))
        qv /= np.linalg.norm(qv, axis=1, keepdims=True)
        dv /= np.linalg.norm(dv, axis=1, keepdims=True)
        q = TokenMatrix(tokens=tuple(f"q{i}" for i in range(m)), vectors=qv)
        d = TokenMatrix(tokens=tuple(f"d{j}" for j in range(n)), vectors=dv)

        # Nested-loop oracle with explicit cosine normalization.
        total = 0.0
        for i in range(m):
            best = -math.inf
            for j in range(n):
                num = float(sum(qv[i][k] * dv[j][k] for k in range(64)))
                den = math.sqrt(sum(x * x for x in qv[i])) * \
                    math.sqrt(sum(x * x for x in dv[j]))
                best = max(best, num / den)
            total += best
        assert abs(score_maxsim(q, d) - total) < 1e-9
        checked += 1
    ok(f"MaxSim oracle equivalence: {checked} random (Q, D) pairs to 1e-9")


# ---------------------------------------------------------------------------
# 3. Fusion formula
# ---------------------------------------------------------------------------

def test_fusion_formula_exact():
    record = parse_layout(make_payload("f", [make_span("s0", "anchor text")]))
    aid = record.anchors[0].anchor_id
    rng = random.Random(3003)
    for _ in range(1000):
        k = rng.random()
        v = rng.random()
        alpha = rng.random()
        cfg = FusionConfig(alpha=alpha)
        [cand] = fuse(record, [(aid, k)], [("w", v, (aid,))], cfg)
        assert cand.fused == alpha * k + (1.0 - alpha) * v  # bit-exact
    [worked] = fuse(record, [(aid, 1.0)], [], FusionConfig(alpha=0.7))
    assert worked.fused == 0.7
    ok("Fusion formula: 1000 random (K, V, alpha) triples bit-exact; "
       "alpha=0.7, K=1, V=0 -> 0.7")


# ---------------------------------------------------------------------------
# 4. Grammar routing
# ---------------------------------------------------------------------------

def test_grammar_routing_fixture():
    class CountingBackoff:
        calls = 0

        def route(self, transcript):
            CountingBackoff.calls += 1
            raise AssertionError("back-off must not fire on grammar utterances")

    cases = [json.loads(line) for line in
             (FIXTURES / "grammar_cases.jsonl").read_text().splitlines() if line]
    assert len(cases) >= 50
    backoff = CountingBackoff()
    matched = 0
    for case in cases:
        intent = route(case["utterance"], backoff)
        assert intent.kind == case["kind"], case["utterance"]
        assert dict(intent.slots) == case["slots"], case["utterance"]
        assert intent.source == "grammar" and intent.confidence == 1.0
        matched += 1
    assert CountingBackoff.calls == 0
    ok(f"Grammar routing: {matched}/{len(cases)} utterances exact "
       f"intent+slot match, back-off invoked 0 times")


# ---------------------------------------------------------------------------
# 5. Strict-hit exactness on the exact-phrase corpus
# ---------------------------------------------------------------------------

def test_strict_hit_exactness_all_modes():
    corpus = load_corpus(FIXTURES / "corpus_exact.jsonl")
    assert len(corpus) >= 60
    assert {c.doc_id for c in corpus} == {"doc_clean", "doc_ocr", "doc_tables"}
    report = run_eval(corpus, FIXTURES, modes=MODES)
    for mode in MODES:
        metrics = report.modes[mode]
        assert metrics.strict_f1 == 1.0, (
            f"{mode}: F1={metrics.strict_f1}, "
            f"failures={[q for q, per in report.per_query.items() if per[mode] != 1.0]}")
    ok(f"Strict-hit exactness: {len(corpus)} queries, "
       f"F1 = 1.0 in all modes {list(MODES)}")


# ---------------------------------------------------------------------------
# 6. Ablation ordering on the paraphrase corpus
# ---------------------------------------------------------------------------

def test_ablation_ordering():
    corpus = load_corpus(FIXTURES / "corpus_paraphrase.jsonl")
    report = run_eval(corpus, FIXTURES,
                      modes=("keyword_only", "late_window_keyword"))
    kw = report.modes["keyword_only"].strict_f1
    lw = report.modes["late_window_keyword"].strict_f1
    assert kw < lw, f"expected keyword_only < late_window_keyword, got {kw} >= {lw}"
    ok(f"Ablation ordering: keyword_only F1={kw:.4f} < "
       f"late_window_keyword F1={lw:.4f} (reference direction 0.70 -> 0.92; "
       f"absolute reference values are documentation, not targets)")


# ---------------------------------------------------------------------------
# 7. Latency budget on a 350-page-equivalent document
# ---------------------------------------------------------------------------

def make_large_payload(n_paras=7000, per_page=20, seed=20260809):
    rng = random.Random(seed)
    vocab = [f"{a}{b}" for a in ("jur", "lex", "vad", "tor", "sen", "mag", "pet",
                                 "claus", "test", "fid", "nov", "ple", "dec",
                                 "reg", "cur", "arb")
             for b in ("iston", "ament", "ovate", "ilium", "arange", "ustion",
                       "eridge", "ontal", "andum", "exity", "ornate", "invar",
                       "ethics", "ulent", "orium", "escent", "anade", "illo",
                       "uction", "ander")]
    vocab += [f"w{i:03d}um" for i in range(600)]
    spans = []
    for i in range(n_paras):
        words = rng.choices(vocab, k=18)
        text = (f"{i + 1}. " + " ".join(words[:9]).capitalize() + ". "
                + " ".join(words[9:]).capitalize() + ".")
        y0 = 0.04 + (i % per_page) * 0.047
        spans.append({"span_id": f"s{i:05d}", "section_type": "para",
                      "page_number": i // per_page + 1,
                      "bbox_coords": {"x0": 0.08, "y0": round(y0, 4),
                                      "x1": 0.92, "y1": round(y0 + 0.04, 4)},
                      "content": text})
    return {"doc_id": "big", "page_count": (n_paras - 1) // per_page + 1,
            "spans": spans}


def test_latency_budget(tmp_path):
    payload = make_large_payload()
    app = create_app(ServiceConfig(audit_path=str(tmp_path / "audit.ndjson")))
    with TestClient(app) as client:
        resp = client.post("/documents", json=payload)
        assert resp.status_code == 201
        assert resp.json()["anchor_count"] == 7000
        assert resp.json()["page_count"] == 350

        rng = random.Random(77)
        record = app.state.engine.get("big").record
        cases = []
        for i in range(24):
            anchor = rng.choice(record.anchors)
            words = record.text_of(anchor).split()[1:7]
            cases.append({"query_id": f"lat{i}", "doc_id": "big",
                          "family": "contextual",
                          "utterance": "highlight " + " ".join(words),
                          "gold_anchor_ids": [anchor.anchor_id]})
        corpus_path = tmp_path / "latency.jsonl"
        corpus_path.write_text("\n".join(json.dumps(c) for c in cases))

        latency = measure_latency(load_corpus(corpus_path), client, repetitions=2)
    contextual = latency["contextual"]
    assert contextual.samples == 48
    assert contextual.p95_ms <= 500.0, f"p95 {contextual.p95_ms:.1f}ms over budget"
    ok(f"Latency budget: contextual p95 {contextual.p95_ms:.1f}ms "
       f"(mean {contextual.mean_ms:.1f}ms) <= 500ms on 7000 anchors / 350 pages")


# ---------------------------------------------------------------------------
# 8. Grounding and audit properties under fuzzed commands
# ---------------------------------------------------------------------------

def test_grounding_and_audit_fuzz(tmp_path):
    app = create_app(ServiceConfig(audit_path=str(tmp_path / "audit.ndjson")))
    doc_ids = ("doc_clean", "doc_ocr", "doc_tables")
    with TestClient(app) as client:
        known = {}
        for doc_id in doc_ids:
            payload = load_payload(doc_id)
            assert client.post("/documents", json=payload).status_code == 201
            known[doc_id] = {a["anchor_id"] for a in
                             client.get(f"/documents/{doc_id}/anchors").json()}

        rng = random.Random(8088)
        words = ("custody", "ledger", "tower", "padlock", "zeta", "affidavit",
                 "qqx", "monsoon", "verdict", "bundle", "amber", "junk")
        templates = [
            lambda: f"go to paragraph {rng.randint(1, 40)}",
            lambda: f"go to page {rng.randint(1, 6)}",
            lambda: f"open {rng.randint(1, 6)}",
            lambda: "next hit",
            lambda: "previous hit",
            lambda: "previous section",
            lambda: "back",
            lambda: "toggle highlights",
            lambda: f"summarize the {rng.choice(('charges', 'petition', 'document'))}",
            lambda: "highlight " + " ".join(rng.choices(words, k=rng.randint(1, 4))),
            lambda: " ".join(rng.choices(words, k=rng.randint(2, 6))),
            lambda: f"table t-acc row {rng.randint(0, 2)} column {rng.randint(0, 2)}",
        ]

        executed = {}
        for i in range(500):
            doc_id = rng.choice(doc_ids)
            session = f"fuzz{rng.randint(0, 4)}"
            transcript = rng.choice(templates)()
            resp = client.post(f"/sessions/{doc_id}/command",
                               json={"transcript": transcript, "confirm": True,
                                     "session_id": session})
            assert resp.status_code in (200, 422), resp.text
            if resp.status_code != 200:
                continue
            body = resp.json()
            action = body["action"]
            assert action["type"] != "await_confirm"  # confirm=True everywhere
            ids = set()
            if action["type"] == "scroll_to_anchor":
                ids.add(action["anchor_id"])
                ids.update(action["highlight_ids"])
            elif action["type"] == "show_disambiguation":
                ids.update(c["anchor_id"] for c in action["candidates"])
            elif action["type"] == "show_synopsis":
                for line in action["synopsis"]["lines"]:
                    ids.update(line["anchor_ids"])
            assert ids <= known[doc_id], f"ungrounded ids {ids - known[doc_id]}"
            executed[session] = executed.get(session, 0) + 1

        total_executed = sum(executed.values())
        audit_lines = [json.loads(l) for l in
                       client.get("/audit").text.splitlines()]
        assert len(audit_lines) == total_executed
        per_session = {}
        for record in audit_lines:
            assert set(record) == set(AUDIT_FIELDS)
            assert "audio" not in record
            assert not any("audio" in str(k).lower() for k in record)
            per_session[record["session_id"]] = \
                per_session.get(record["session_id"], 0) + 1
        assert per_session == executed
    ok(f"Grounding/audit: {total_executed} executed of 500 fuzzed commands, "
       f"0 ungrounded anchor ids, audit records == executed per session, "
       f"structured fields only")


# ---------------------------------------------------------------------------
# 9. Alignment tolerance under corruption
# ---------------------------------------------------------------------------

def _corrupt(text, rate, rng):
    k = max(1, int(rate * len(text)))
    positions = rng.sample(range(len(text)), k)
    chars = list(text)
    for pos in positions:
        repl = rng.choice(string.ascii_lowercase)
        while repl == chars[pos].lower():
            repl = rng.choice(string.ascii_lowercase)
        chars[pos] = repl
    return "".join(chars)


def test_alignment_tolerance():
    records = [parse_layout(load_payload(n))
               for n in ("doc_clean", "doc_ocr", "doc_tables")]
    rng = random.Random(4242)
    samples = []
    while len(samples) < 100:
        record = rng.choice(records)
        anchor = rng.choice(record.anchors)
        text = record.text_of(anchor)
        if len(text) < 30:
            continue
        length = min(len(text), rng.randint(40, 80))
        start = rng.randint(0, len(text) - length)
        samples.append((record, anchor, text[start:start + length]))

    recovered = 0
    for record, anchor, excerpt in samples:
        corrupted = _corrupt(excerpt, 0.10, rng)
        try:
            result = align_fuzzy(record, corrupted)
        except NoAnchor:
            continue
        if result.anchor_id == anchor.anchor_id:
            recovered += 1
    assert recovered >= 99, f"only {recovered}/100 recovered"

    rejected = 0
    for record, anchor, excerpt in samples:
        corrupted = _corrupt(excerpt, 0.30, rng)
        with pytest.raises(NoAnchor):
            align_fuzzy(record, corrupted)
        rejected += 1
    ok(f"Alignment tolerance: {recovered}/100 recovered at <=10% corruption, "
       f"{rejected}/{rejected} NoAnchor at 30% corruption")
