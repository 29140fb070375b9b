"""Exception types shared across the engine."""


class AnchorNavError(Exception):
    """Base class for all engine errors."""


class SchemaViolation(AnchorNavError):
    """Layout payload field missing, ill-typed, or out of range."""


class OverlapError(AnchorNavError):
    """Two spans claim the same identity or character range."""


class EmptyDocument(AnchorNavError):
    """Operation requires at least one span/anchor."""


class DuplicateDocument(AnchorNavError):
    """A document with this doc_id is already ingested."""


class MissingDocument(AnchorNavError):
    """Referenced doc_id is not in the store."""


class DimensionMismatch(AnchorNavError):
    """Token matrices have different embedding dimensions."""


class EmptyMatrix(AnchorNavError):
    """Token matrix has zero rows where at least one is required."""


class EmptyQuery(AnchorNavError):
    """Query produced no tokens."""


class ProviderUnavailable(AnchorNavError):
    """External embedding provider failed or returned malformed vectors."""


class OutOfBounds(AnchorNavError):
    """Character offset lies outside the canonical text."""


class NoAnchor(AnchorNavError):
    """No anchor matched within the alignment tolerance."""

    def __init__(self, message: str, best_distance: float | None = None):
        super().__init__(message)
        self.best_distance = best_distance


class MalformedCase(AnchorNavError):
    """Evaluation query case is ill-formed."""


class EmptyGold(AnchorNavError):
    """Gold anchor set is empty while a prediction exists."""


class ServiceUnreachable(AnchorNavError):
    """The navigation service did not answer."""
