"""Windowed token-level embedding index with late-interaction MaxSim scoring.

Score(Q, D) = sum over query tokens of the maximum cosine similarity
against the window's tokens. The built-in embedder is a deterministic
stand-in for a neural late-interaction model: hashed character 3-grams
pushed through a fixed seeded sign-flip projection, then L2-normalized.
Determinism is what makes the oracle tests possible; a real model can be
plugged in over HTTP via the same provider interface.

Search is exact and exhaustive over all windows; approximate structures
are unnecessary at desk scale.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Protocol, Sequence, runtime_checkable

import httpx
import numpy as np

from .errors import (DimensionMismatch, EmptyMatrix, EmptyQuery,
                     ProviderUnavailable)
from .ingest import DocumentRecord, Window
from .tokenize import dense_tokenize

DEFAULT_DIM = 64
DEFAULT_SEED = 7349
_NORM_TOLERANCE = 1e-6


@dataclass
class TokenMatrix:
    """Per-token unit-norm embeddings for one owner (window or query)."""

    tokens: tuple[str, ...]
    vectors: np.ndarray  # (n, d) float64
    owner: str = "query"

    def __post_init__(self) -> None:
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2 or self.vectors.shape[0] != len(self.tokens):
            raise ValueError("vectors must be (token count, dim)")
        if self.vectors.shape[0]:
            norms = np.linalg.norm(self.vectors, axis=1)
            if np.any(np.abs(norms - 1.0) > _NORM_TOLERANCE):
                raise ValueError("all vectors must be unit norm within 1e-6")
            # Renormalize exactly so cosine reduces to a plain dot product.
            self.vectors = self.vectors / norms[:, None]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return len(self.tokens)


@runtime_checkable
class EmbeddingProvider(Protocol):
    name: str
    dimension: int
    context_independent: bool

    def embed(self, tokens: Sequence[str]) -> TokenMatrix: ...


class BuiltinEmbedder:
    """Deterministic hashed-3-gram embedder (context-independent per token).

    Each 3-gram contributes +-1 (a seeded random sign) to its hashed bucket:
    a sign-flip in gram space composed with the hash projection into d
    dimensions. The signs keep inner products unbiased under bucket
    collisions, so unrelated tokens sit near zero cosine while shared grams
    accumulate.
    """

    context_independent = True

    def __init__(self, dimension: int = DEFAULT_DIM, seed: int = DEFAULT_SEED):
        self.name = f"builtin-3gram-d{dimension}-s{seed}"
        self.dimension = dimension
        self._seed = seed
        self._cache: dict[str, np.ndarray] = {}

    def _gram_slot(self, gram: str) -> tuple[int, float]:
        digest = hashlib.blake2b(f"{self._seed}:{gram}".encode(), digest_size=9).digest()
        index = int.from_bytes(digest[:8], "big") % self.dimension
        sign = 1.0 if digest[8] & 1 else -1.0
        return index, sign

    def _vector(self, token: str) -> np.ndarray:
        cached = self._cache.get(token)
        if cached is not None:
            return cached
        vec = np.zeros(self.dimension)
        padded = f"#{token}#"
        for i in range(max(0, len(padded) - 2)):
            index, sign = self._gram_slot(padded[i : i + 3])
            vec[index] += sign
        norm = float(np.linalg.norm(vec))
        if norm < 1e-12:
            # Exact sign cancellation (or sub-3-char oddity): deterministic basis vector.
            vec = np.zeros(self.dimension)
            vec[self._gram_slot(padded)[0]] = 1.0
            norm = 1.0
        vec = vec / norm
        self._cache[token] = vec
        return vec

    def embed(self, tokens: Sequence[str]) -> TokenMatrix:
        if not tokens:
            return TokenMatrix(tokens=(), vectors=np.zeros((0, self.dimension)))
        rows = np.stack([self._vector(t) for t in tokens])
        return TokenMatrix(tokens=tuple(tokens), vectors=rows)


class HttpEmbeddingProvider:
    """Embeddings from an external POST /embed endpoint.

    Failures (connection, timeout, wrong dimension or row count) raise
    ProviderUnavailable; retrieval then degrades to lexical-only and the
    response is flagged.
    """

    context_independent = False

    def __init__(self, url: str, dimension: int = DEFAULT_DIM, timeout: float = 2.0,
                 transport: httpx.BaseTransport | None = None):
        self.name = f"http:{url}"
        self.dimension = dimension
        self.url = url.rstrip("/")
        self._client = httpx.Client(timeout=timeout, transport=transport)

    def embed(self, tokens: Sequence[str]) -> TokenMatrix:
        try:
            resp = self._client.post(f"{self.url}/embed", json={"tokens": list(tokens)})
            resp.raise_for_status()
            vectors = np.asarray(resp.json()["vectors"], dtype=np.float64)
        except Exception as exc:
            raise ProviderUnavailable(f"embedding provider failed: {exc}") from exc
        if vectors.ndim != 2 or vectors.shape[0] != len(tokens):
            raise ProviderUnavailable(
                f"provider returned {vectors.shape} for {len(tokens)} tokens")
        if vectors.shape[1] != self.dimension:
            raise ProviderUnavailable(
                f"provider dimension {vectors.shape[1]} != expected {self.dimension}")
        try:
            return TokenMatrix(tokens=tuple(tokens), vectors=vectors)
        except ValueError as exc:
            raise ProviderUnavailable(str(exc)) from exc


def embed_builtin(tokens: Sequence[str], *, dimension: int = DEFAULT_DIM,
                  seed: int = DEFAULT_SEED) -> TokenMatrix:
    """One-shot built-in embedding (convenience wrapper)."""
    return BuiltinEmbedder(dimension=dimension, seed=seed).embed(tokens)


def score_maxsim(query: TokenMatrix, window: TokenMatrix) -> float:
    """Late-interaction score: sum over query tokens of max cosine similarity."""
    if len(query) == 0 or len(window) == 0:
        raise EmptyMatrix("both matrices must have at least one row")
    if query.dim != window.dim:
        raise DimensionMismatch(f"query dim {query.dim} != window dim {window.dim}")
    sims = query.vectors @ window.vectors.T
    return float(sims.max(axis=1).sum())


@dataclass(frozen=True)
class DenseHit:
    window_id: str
    score: float
    anchor_ids: tuple[str, ...]


class WindowDenseIndex:
    """Token embeddings for every window of one document, built once at ingest.

    With a context-independent provider the index stores one vector per
    vocabulary token and per-window index arrays; scoring a query is then a
    single (m x vocab) similarity matrix plus a gather per window, exactly
    equal to per-window MaxSim. Context-dependent providers fall back to a
    full matrix per window.
    """

    def __init__(self, record: DocumentRecord, provider: EmbeddingProvider | None = None):
        self.provider = provider if provider is not None else BuiltinEmbedder()
        self.doc_id = record.doc_id
        self._windows: list[Window] = []
        self._window_tokens: list[list[str]] = []
        for window in record.windows:
            tokens = dense_tokenize(window.text)
            if not tokens:
                continue  # nothing to embed; anchor keeps lexical coverage only
            self._windows.append(window)
            self._window_tokens.append(tokens)

        self._vocab: dict[str, int] = {}
        self._vocab_matrix: np.ndarray | None = None
        self._window_vocab_ids: list[np.ndarray] = []
        self._window_matrices: list[TokenMatrix] = []
        if self.provider.context_independent:
            for tokens in self._window_tokens:
                for t in tokens:
                    self._vocab.setdefault(t, len(self._vocab))
            vocab_tokens = list(self._vocab)
            matrix = self.provider.embed(vocab_tokens)
            self._vocab_matrix = matrix.vectors
            for tokens in self._window_tokens:
                ids = np.unique(np.array([self._vocab[t] for t in tokens], dtype=np.int64))
                self._window_vocab_ids.append(ids)
        else:
            for window, tokens in zip(self._windows, self._window_tokens):
                m = self.provider.embed(tokens)
                self._window_matrices.append(
                    TokenMatrix(tokens=m.tokens, vectors=m.vectors, owner=window.window_id))

    def __len__(self) -> int:
        return len(self._windows)

    def matrix_for(self, window_id: str) -> TokenMatrix:
        """Full token matrix of one window (duplicates included)."""
        for i, window in enumerate(self._windows):
            if window.window_id == window_id:
                if self.provider.context_independent:
                    m = self.provider.embed(self._window_tokens[i])
                    return TokenMatrix(tokens=m.tokens, vectors=m.vectors, owner=window_id)
                return self._window_matrices[i]
        raise KeyError(window_id)

    def embed_query(self, query: str) -> TokenMatrix:
        tokens = dense_tokenize(query)
        if not tokens:
            raise EmptyQuery("query produced no tokens")
        return self.provider.embed(tokens)

    def search(self, query: str, top_k: int) -> list[DenseHit]:
        """Exhaustive MaxSim ranking of all windows; ties keep window order."""
        if top_k < 1:
            raise ValueError(f"top_k must be >= 1, got {top_k}")
        if not self._windows:
            return []
        qmatrix = self.embed_query(query)
        scores: list[float]
        if self.provider.context_independent:
            assert self._vocab_matrix is not None
            if qmatrix.dim != self._vocab_matrix.shape[1]:
                raise DimensionMismatch(
                    f"query dim {qmatrix.dim} != index dim {self._vocab_matrix.shape[1]}")
            sims = qmatrix.vectors @ self._vocab_matrix.T  # (m, vocab)
            scores = [float(sims[:, ids].max(axis=1).sum())
                      for ids in self._window_vocab_ids]
        else:
            scores = [score_maxsim(qmatrix, m) for m in self._window_matrices]
        order = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
        return [DenseHit(window_id=self._windows[i].window_id, score=scores[i],
                         anchor_ids=self._windows[i].anchor_ids)
                for i in order[:top_k]]


def search_dense(index: WindowDenseIndex, query: str, top_k: int) -> list[DenseHit]:
    """Module-level alias for WindowDenseIndex.search."""
    return index.search(query, top_k)
