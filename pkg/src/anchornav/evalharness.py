"""Evaluation harness: strict-hit F1 over anchor sets, ablations, latency.

Strict-hit scoring demands exact anchor identity, not overlap. The
prediction for a query is whatever the engine commits to: the highlight
set for answers and disambiguations (candidates at/above the abstain
threshold), the cited anchors for synopses, the empty set for abstentions.

Retrieval-mode ablations rebuild the dense index per mode:
  keyword_only         alpha=1.0, no dense index at all
  dense_only           alpha=0.0, single-anchor windows (width 1)
  hybrid               alpha from config, single-anchor windows (width 1)
  late_window_keyword  alpha from config, sliding windows (width 3, stride 1)

Reference results from the system this engine is modeled on are carried in
reports for orientation only: they come from a private corpus, neural
embedding models, and human-timed trials, so they are documentation, not
targets.
"""

from __future__ import annotations

import json
import math
import statistics
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import httpx

from .engine import EngineConfig, NavContext, NavEngine
from .errors import (EmptyGold, MalformedCase, MissingDocument,
                     ServiceUnreachable)
from .fusion import FusionConfig
from .router import StubBackoff, route

FAMILIES = ("temporal", "contextual", "summarization")
MODES = ("keyword_only", "dense_only", "hybrid", "late_window_keyword")

# Published evaluation of the reference system (private corpus, neural
# models, human subjects). Not reproducible here; reported for orientation.
REFERENCE_STRICT_F1 = {
    "dense_minilm": 0.43,
    "dense_mpnet": 0.55,
    "keyword": 0.70,
    "hybrid": 0.85,
    "late_window_keyword": 0.92,
}
REFERENCE_TTR_SECONDS = {
    "temporal": {"mean": 5.0, "sd": 0.5},
    "contextual": {"mean": 6.0, "sd": 1.0},
    "summarization": {"mean": 6.0, "sd": 1.2},
}
REFERENCE_NOTE = ("end-to-end human trials including speech capture and visual "
                  "verification on a private corpus; non-comparable, not a target")


@dataclass(frozen=True)
class QueryCase:
    query_id: str
    doc_id: str
    family: str
    utterance: str
    gold_anchor_ids: frozenset[str]

    def to_dict(self) -> dict:
        return {"query_id": self.query_id, "doc_id": self.doc_id,
                "family": self.family, "utterance": self.utterance,
                "gold_anchor_ids": sorted(self.gold_anchor_ids)}


def parse_case(data: Mapping[str, Any]) -> QueryCase:
    for key in ("query_id", "doc_id", "family", "utterance", "gold_anchor_ids"):
        if key not in data:
            raise MalformedCase(f"query case missing field {key!r}: {data!r}")
    if data["family"] not in FAMILIES:
        raise MalformedCase(f"unknown family {data['family']!r}")
    gold = data["gold_anchor_ids"]
    if not isinstance(gold, (list, tuple)) or not gold:
        raise MalformedCase(f"gold_anchor_ids must be a non-empty list: {data!r}")
    return QueryCase(
        query_id=str(data["query_id"]),
        doc_id=str(data["doc_id"]),
        family=data["family"],
        utterance=str(data["utterance"]),
        gold_anchor_ids=frozenset(str(g) for g in gold),
    )


def load_corpus(path: str | Path) -> list[QueryCase]:
    cases = []
    for i, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines()):
        line = line.strip()
        if not line:
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedCase(f"{path}:{i + 1}: invalid JSON: {exc}") from exc
        cases.append(parse_case(data))
    return cases


def strict_f1(predicted: Iterable[str], gold: Iterable[str]) -> tuple[float, float, float]:
    """Precision, recall, F1 over anchor-id sets (exact identity)."""
    pred = frozenset(predicted)
    gold = frozenset(gold)
    if not gold:
        if pred:
            raise EmptyGold("gold set empty while prediction is non-empty")
        return (1.0, 1.0, 1.0)
    if not pred:
        return (0.0, 0.0, 0.0)
    hit = len(pred & gold)
    p = hit / len(pred)
    r = hit / len(gold)
    f1 = 0.0 if p + r == 0 else 2 * p * r / (p + r)
    return (p, r, f1)


def mode_engine_config(mode: str, base: FusionConfig) -> EngineConfig:
    if mode == "keyword_only":
        fusion = replace(base, alpha=1.0)
        return EngineConfig(window_width=1, window_stride=1, fusion=fusion,
                            use_dense=False)
    if mode == "dense_only":
        return EngineConfig(window_width=1, window_stride=1,
                            fusion=replace(base, alpha=0.0))
    if mode == "hybrid":
        return EngineConfig(window_width=1, window_stride=1, fusion=base)
    if mode == "late_window_keyword":
        return EngineConfig(window_width=3, window_stride=1, fusion=base)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass
class ModeMetrics:
    precision: float
    recall: float
    strict_f1: float
    queries: int

    def to_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall,
                "strict_f1": self.strict_f1, "queries": self.queries}


@dataclass
class EvalReport:
    modes: dict[str, ModeMetrics]
    per_query: dict[str, dict[str, float]] = field(default_factory=dict)
    latency: dict[str, "FamilyLatency"] | None = None

    def to_dict(self) -> dict:
        out = {
            "modes": {m: v.to_dict() for m, v in self.modes.items()},
            "per_query_f1": self.per_query,
            "reference_noncomparable": {
                "strict_f1": REFERENCE_STRICT_F1,
                "ttr_seconds": REFERENCE_TTR_SECONDS,
                "note": REFERENCE_NOTE,
            },
        }
        if self.latency is not None:
            out["latency_ms"] = {fam: stats.to_dict()
                                 for fam, stats in self.latency.items()}
        return out


def predict(engine: NavEngine, case: QueryCase) -> frozenset[str]:
    """Route the utterance and run it; return the committed anchor set."""
    intent = route(case.utterance, StubBackoff())
    result = engine.execute(case.doc_id, intent, NavContext())
    return result.predicted_anchor_ids()


def run_eval(corpus: Sequence[QueryCase] | str | Path,
             documents: Mapping[str, Mapping] | str | Path,
             modes: Sequence[str] = MODES,
             base_fusion: FusionConfig | None = None) -> EvalReport:
    """Score every query under every requested retrieval mode.

    `documents` maps doc_id to layout payload, or names a directory of
    layout interchange JSON files. The pipeline is deterministic end to
    end, so repeated runs produce identical reports.
    """
    if isinstance(corpus, (str, Path)):
        corpus = load_corpus(corpus)
    payloads = _load_documents(documents)
    base = base_fusion or FusionConfig()
    for mode in modes:
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")

    report = EvalReport(modes={})
    for mode in modes:
        engine = NavEngine(mode_engine_config(mode, base))
        for payload in payloads.values():
            engine.ingest(payload)
        for case in corpus:
            if case.doc_id not in payloads:
                raise MissingDocument(f"case {case.query_id}: unknown doc {case.doc_id}")
            bundle = engine.get(case.doc_id)
            missing = case.gold_anchor_ids - set(bundle.record.anchors_by_id)
            if missing:
                raise MalformedCase(
                    f"case {case.query_id}: gold anchors not in document: {sorted(missing)}")
        ps, rs, f1s = [], [], []
        for case in corpus:
            predicted = predict(engine, case)
            p, r, f1 = strict_f1(predicted, case.gold_anchor_ids)
            ps.append(p)
            rs.append(r)
            f1s.append(f1)
            report.per_query.setdefault(case.query_id, {})[mode] = f1
        report.modes[mode] = ModeMetrics(
            precision=statistics.fmean(ps) if ps else 0.0,
            recall=statistics.fmean(rs) if rs else 0.0,
            strict_f1=statistics.fmean(f1s) if f1s else 0.0,
            queries=len(f1s),
        )
    return report


def _load_documents(documents: Mapping[str, Mapping] | str | Path) -> dict[str, Mapping]:
    if isinstance(documents, Mapping):
        return dict(documents)
    root = Path(documents)
    payloads: dict[str, Mapping] = {}
    for path in sorted(root.glob("*.json")):
        data = json.loads(path.read_text(encoding="utf-8"))
        if isinstance(data, dict) and "spans" in data and "doc_id" in data:
            payloads[data["doc_id"]] = data
    return payloads


@dataclass
class FamilyLatency:
    mean_ms: float
    sd_ms: float
    p95_ms: float
    samples: int

    def to_dict(self) -> dict:
        return {"mean_ms": self.mean_ms, "sd_ms": self.sd_ms,
                "p95_ms": self.p95_ms, "samples": self.samples}


def percentile(values: Sequence[float], q: float) -> float:
    """Nearest-rank percentile (q in [0, 100])."""
    if not values:
        raise ValueError("no values")
    ordered = sorted(values)
    rank = max(1, math.ceil(q / 100.0 * len(ordered)))
    return ordered[rank - 1]


def measure_latency(corpus: Sequence[QueryCase] | str | Path,
                    client: httpx.Client,
                    repetitions: int = 20,
                    parallel: int = 0) -> dict[str, FamilyLatency]:
    """Server-reported latency_ms.total per query family.

    `client` must point at a running service with the corpus documents
    already ingested. Temporal jumps are sent with confirm=true so the
    measured path is execution, not the confirmation echo. Human time is
    not part of any number here.

    Queries run sequentially by default for stable numbers; `parallel` > 1
    fans them out over that many threads for throughput-only runs (the
    per-request latencies then include queueing inside the service).
    """
    if repetitions < 1:
        raise ValueError(f"repetitions must be >= 1, got {repetitions}")
    if isinstance(corpus, (str, Path)):
        corpus = load_corpus(corpus)
    totals: dict[str, list[float]] = {family: [] for family in FAMILIES}

    def issue(case: QueryCase) -> tuple[str, float]:
        try:
            resp = client.post(f"/sessions/{case.doc_id}/command",
                               json={"transcript": case.utterance, "confirm": True})
            resp.raise_for_status()
        except (httpx.HTTPError, httpx.InvalidURL) as exc:
            raise ServiceUnreachable(f"command failed: {exc}") from exc
        return case.family, resp.json()["latency_ms"]["total"]

    jobs = [case for case in corpus for _ in range(repetitions)]
    if parallel > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=parallel) as pool:
            for family, total in pool.map(issue, jobs):
                totals[family].append(total)
    else:
        for case in jobs:
            family, total = issue(case)
            totals[family].append(total)
    out: dict[str, FamilyLatency] = {}
    for family, values in totals.items():
        if not values:
            continue
        out[family] = FamilyLatency(
            mean_ms=statistics.fmean(values),
            sd_ms=statistics.stdev(values) if len(values) > 1 else 0.0,
            p95_ms=percentile(values, 95.0),
            samples=len(values),
        )
    return out


def format_report(report: EvalReport) -> str:
    """Aligned-column text table of per-mode metrics."""
    header = f"{'mode':<22}{'precision':>10}{'recall':>10}{'strict_f1':>11}{'queries':>9}"
    rows = [header, "-" * len(header)]
    for mode, m in report.modes.items():
        rows.append(f"{mode:<22}{m.precision:>10.4f}{m.recall:>10.4f}"
                    f"{m.strict_f1:>11.4f}{m.queries:>9d}")
    return "\n".join(rows)


def format_latency(latency: Mapping[str, FamilyLatency]) -> str:
    header = f"{'family':<16}{'mean_ms':>10}{'sd_ms':>10}{'p95_ms':>10}{'samples':>9}"
    rows = [header, "-" * len(header)]
    for family, stats in latency.items():
        rows.append(f"{family:<16}{stats.mean_ms:>10.2f}{stats.sd_ms:>10.2f}"
                    f"{stats.p95_ms:>10.2f}{stats.samples:>9d}")
    rows.append("")
    ref = ", ".join(f"{fam} {v['mean']:.0f}±{v['sd']:.1f}s"
                    for fam, v in REFERENCE_TTR_SECONDS.items())
    rows.append(f"reference (non-comparable): {ref}; {REFERENCE_NOTE}")
    return "\n".join(rows)
