"""Named domain errors.  The CLI maps every subclass of DeskcatError to exit 1."""

from __future__ import annotations


class DeskcatError(Exception):
    """Base class for all domain errors."""


class CategoryError(DeskcatError):
    pass


class MissingComposite(CategoryError):
    pass


class NonAssociative(CategoryError):
    pass


class IdentityLawViolation(CategoryError):
    pass


class OracleInconsistent(CategoryError):
    pass


class FunctorError(DeskcatError):
    pass


class PresheafError(DeskcatError):
    pass


class WindowTooSmall(DeskcatError):
    pass


class SearchExceeded(DeskcatError):
    def __init__(self, message: str, nodes: int | None = None):
        super().__init__(message)
        self.nodes = nodes


class BadStage(DeskcatError):
    def __init__(self, stage: int, reason: str):
        super().__init__(f"stage {stage}: {reason}")
        self.stage = stage
        self.reason = reason


class UniquenessFailure(DeskcatError):
    pass


class ConfigError(DeskcatError):
    """Invalid configuration (the CLI reports these as usage errors)."""
