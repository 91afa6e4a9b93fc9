"""Exception hierarchy shared by every prokit module."""

from __future__ import annotations


class ProkitError(Exception):
    """Base class for all library errors."""


class DocumentError(ProkitError):
    """A system or morphism document is malformed or self-inconsistent."""


class PreconditionError(ProkitError):
    """An operation was called on inputs that violate its stated contract."""


class CompositionError(ProkitError):
    """Morphism boundaries do not match."""


class UnsupportedQueryError(ProkitError):
    """The index set cannot answer this query (e.g. predecessor enumeration)."""


class GenerationError(ProkitError):
    """A plant specification cannot be realized."""


class InconclusiveError(ProkitError):
    """A required witness was not found inside the working window.

    Distinct from refutation: the witness may exist beyond rank `horizon`.
    Maps to exit code 2 at the CLI.
    """

    def __init__(self, message: str, horizon: int):
        super().__init__(message)
        self.horizon = horizon
