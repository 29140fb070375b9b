"""Anchor-first navigation engine for long structured documents."""

from .alignment import AlignmentResult, align_fuzzy, align_offset
from .dense import (BuiltinEmbedder, HttpEmbeddingProvider, TokenMatrix,
                    WindowDenseIndex, embed_builtin, score_maxsim, search_dense)
from .engine import EngineConfig, NavContext, NavEngine
from .fusion import (Abstain, Answer, Candidate, Disambiguate, FusionConfig,
                     decide, fuse, normalize_scores)
from .ingest import (Anchor, BBox, CharRange, DocumentRecord, TableRef, Window,
                     build_windows, normalize_text, parse_layout)
from .lexical import LexicalIndex, build_lexical, score_lexical
from .router import Intent, StubBackoff, parse_grammar, route
from .synopsis import Synopsis, build_synopsis

__version__ = "0.1.0"

__all__ = [
    "AlignmentResult", "align_fuzzy", "align_offset",
    "BuiltinEmbedder", "HttpEmbeddingProvider", "TokenMatrix",
    "WindowDenseIndex", "embed_builtin", "score_maxsim", "search_dense",
    "EngineConfig", "NavContext", "NavEngine",
    "Abstain", "Answer", "Candidate", "Disambiguate", "FusionConfig",
    "decide", "fuse", "normalize_scores",
    "Anchor", "BBox", "CharRange", "DocumentRecord", "TableRef", "Window",
    "build_windows", "normalize_text", "parse_layout",
    "LexicalIndex", "build_lexical", "score_lexical",
    "Intent", "StubBackoff", "parse_grammar", "route",
    "Synopsis", "build_synopsis",
    "__version__",
]
