"""Command-line entry points.

    anchornav route "go to paragraph 23"
    anchornav synopsis fixtures/doc_clean.json --scope charges
    anchornav eval run --corpus fixtures/corpus_exact.jsonl --docs fixtures --modes all
    anchornav eval latency --corpus fixtures/corpus_exact.jsonl --docs fixtures
    anchornav serve --config service.json
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import evalharness
from .config import load_config
from .engine import EngineConfig, NavEngine
from .fusion import FusionConfig
from .router import StubBackoff, route


def _cmd_route(args: argparse.Namespace) -> int:
    intent = route(args.utterance, StubBackoff())
    print(json.dumps(intent.to_dict(), indent=2))
    return 0


def _cmd_synopsis(args: argparse.Namespace) -> int:
    payload = json.loads(Path(args.layout).read_text(encoding="utf-8"))
    engine = NavEngine(EngineConfig(scopes=(args.scope,), use_dense=False))
    bundle = engine.ingest(payload)
    print(json.dumps(bundle.synopses[args.scope].to_dict(), indent=2))
    return 0


def _cmd_eval_run(args: argparse.Namespace) -> int:
    modes = evalharness.MODES if args.modes == "all" else tuple(args.modes.split(","))
    fusion = FusionConfig(alpha=args.alpha, abstain_threshold=args.tau,
                          disambiguation_margin=args.delta, top_k=args.top_k)
    report = evalharness.run_eval(args.corpus, args.docs, modes=modes,
                                  base_fusion=fusion)
    print(evalharness.format_report(report))
    if args.out:
        Path(args.out).write_text(json.dumps(report.to_dict(), indent=2),
                                  encoding="utf-8")
        print(f"\nreport written to {args.out}")
    return 0


def _cmd_eval_latency(args: argparse.Namespace) -> int:
    import httpx

    corpus = evalharness.load_corpus(args.corpus)
    if args.url:
        client = httpx.Client(base_url=args.url, timeout=30.0)
    else:
        # No URL: run the service in-process over the given documents.
        from fastapi.testclient import TestClient

        from .config import ServiceConfig
        from .service import create_app

        app = create_app(ServiceConfig(audit_path=args.audit_path))
        client = TestClient(app)
        for path in sorted(Path(args.docs).glob("*.json")):
            data = json.loads(path.read_text(encoding="utf-8"))
            if isinstance(data, dict) and "spans" in data:
                resp = client.post("/documents", json=data)
                if resp.status_code not in (201, 409):
                    print(f"failed to ingest {path}: {resp.text}", file=sys.stderr)
                    return 1
    latency = evalharness.measure_latency(corpus, client,
                                          repetitions=args.repetitions,
                                          parallel=args.parallel)
    print(evalharness.format_latency(latency))
    if args.out:
        payload = {fam: stats.to_dict() for fam, stats in latency.items()}
        payload["reference_noncomparable"] = {
            "ttr_seconds": evalharness.REFERENCE_TTR_SECONDS,
            "note": evalharness.REFERENCE_NOTE,
        }
        Path(args.out).write_text(json.dumps(payload, indent=2), encoding="utf-8")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    config = load_config(args.config)
    app = create_app(config)
    uvicorn.run(app, host=args.host, port=args.port or config.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="anchornav")
    sub = parser.add_subparsers(dest="command", required=True)

    p_route = sub.add_parser("route", help="parse one utterance and print the intent")
    p_route.add_argument("utterance")
    p_route.set_defaults(fn=_cmd_route)

    p_syn = sub.add_parser("synopsis", help="ingest a layout file and print its synopsis")
    p_syn.add_argument("layout", help="layout interchange JSON file")
    p_syn.add_argument("--scope", default="document")
    p_syn.set_defaults(fn=_cmd_synopsis)

    p_eval = sub.add_parser("eval", help="evaluation harness")
    eval_sub = p_eval.add_subparsers(dest="eval_command", required=True)

    p_run = eval_sub.add_parser("run", help="strict-hit F1 over retrieval modes")
    p_run.add_argument("--corpus", required=True)
    p_run.add_argument("--docs", required=True, help="directory of layout JSON files")
    p_run.add_argument("--modes", default="all",
                       help="comma-separated subset of " + ",".join(evalharness.MODES))
    p_run.add_argument("--out", default=None, help="write JSON report here")
    p_run.add_argument("--alpha", type=float, default=0.7)
    p_run.add_argument("--tau", type=float, default=0.35)
    p_run.add_argument("--delta", type=float, default=0.05)
    p_run.add_argument("--top-k", type=int, default=20, dest="top_k")
    p_run.set_defaults(fn=_cmd_eval_run)

    p_lat = eval_sub.add_parser("latency", help="per-family latency of a running service")
    p_lat.add_argument("--corpus", required=True)
    p_lat.add_argument("--docs", default="fixtures",
                       help="layout files to ingest when no --url is given")
    p_lat.add_argument("--url", default=None, help="base URL of a running service")
    p_lat.add_argument("--repetitions", type=int, default=20)
    p_lat.add_argument("--parallel", type=int, default=0,
                       help="thread count for throughput-only runs (default sequential)")
    p_lat.add_argument("--audit-path", default="anchornav-audit.ndjson", dest="audit_path")
    p_lat.add_argument("--out", default=None)
    p_lat.set_defaults(fn=_cmd_eval_latency)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--config", default=None, help="JSON config file")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=None)
    p_serve.set_defaults(fn=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
