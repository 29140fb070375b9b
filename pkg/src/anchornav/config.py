"""Service configuration: defaults < config file < environment variables."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Mapping

from .lexical import DEFAULT_BOOSTS

ENV_PREFIX = "ANCHORNAV_"


@dataclass(frozen=True)
class ServiceConfig:
    port: int = 8040
    alpha: float = 0.7
    top_k: int = 20
    tau: float = 0.35
    delta: float = 0.05
    window_width: int = 3
    window_stride: int = 1
    k1: float = 1.2
    b: float = 0.75
    boosts: dict = field(default_factory=lambda: dict(DEFAULT_BOOSTS))
    backoff_url: str | None = None       # None -> deterministic stub
    backoff_timeout: float = 2.0
    backoff_accept_threshold: float = 0.5
    embedding_url: str | None = None     # None -> built-in embedder
    embedding_timeout: float = 2.0
    embedding_dim: int = 64
    audit_path: str = "anchornav-audit.ndjson"
    session_ttl_seconds: float = 4 * 3600.0
    breadcrumb_cap: int = 50
    confirm_all_intents: bool = False
    synopsis_k: int = 5
    scopes: tuple[str, ...] = ("document", "charges", "petition")
    scope_keywords_path: str | None = None


_ENV_BOOL = {"1": True, "true": True, "yes": True, "0": False, "false": False, "no": False}


def _coerce(name: str, kind: type, raw: str) -> Any:
    if kind is bool:
        try:
            return _ENV_BOOL[raw.strip().lower()]
        except KeyError:
            raise ValueError(f"{ENV_PREFIX}{name.upper()}: not a boolean: {raw!r}")
    if kind is int:
        return int(raw)
    if kind is float:
        return float(raw)
    return raw


def load_config(path: str | Path | None = None,
                env: Mapping[str, str] | None = None) -> ServiceConfig:
    """Build a ServiceConfig.

    Precedence (lowest to highest): built-in defaults, then the JSON config
    file, then ANCHORNAV_* environment variables. Scalar fields only are
    overridable from the environment.
    """
    env = os.environ if env is None else env
    values: dict[str, Any] = {}
    if path is not None:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        known = {f.name for f in fields(ServiceConfig)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "scopes" in data:
            data["scopes"] = tuple(data["scopes"])
        values.update(data)
    for f in fields(ServiceConfig):
        raw = env.get(f"{ENV_PREFIX}{f.name.upper()}")
        if raw is None:
            continue
        if f.name in ("backoff_url", "embedding_url", "scope_keywords_path"):
            values[f.name] = raw or None
        elif f.name in ("boosts", "scopes"):
            values[f.name] = json.loads(raw)
            if f.name == "scopes":
                values[f.name] = tuple(values[f.name])
        else:
            values[f.name] = _coerce(f.name, type(f.default), raw)
    return ServiceConfig(**values)
