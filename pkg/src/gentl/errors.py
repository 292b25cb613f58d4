"""Exception hierarchy shared across the engine and the HTTP service."""

from __future__ import annotations


class GenTLError(Exception):
    """Base class for all engine errors."""


class InvalidParams(GenTLError):
    """A precondition on caller-supplied parameters was violated."""


class TooFewEvents(InvalidParams):
    """Relationship generation needs at least two events."""


class EmptyTimeline(InvalidParams):
    """Scale recomputation requires at least one event year."""


class UnknownSession(GenTLError):
    """Referenced session id is not registered."""


class UnknownNode(GenTLError):
    """Referenced event node does not exist in the session."""


class UnknownRecord(GenTLError):
    """Referenced generation record does not exist in the session."""


class MalformedResponse(GenTLError):
    """Model output could not be parsed into the expected shape."""


class TransportFailure(GenTLError):
    """Connection-level failure talking to a provider; retryable."""


class UpstreamError(GenTLError):
    """Provider returned an error status."""

    def __init__(self, message: str, status: int | None = None, body: str = ""):
        super().__init__(message)
        self.status = status
        self.body = body[:200]


class Timeout(GenTLError):
    """Provider call exceeded its deadline."""


class SearchUnavailable(GenTLError):
    """Provider cannot return source citations."""


class BudgetExceeded(GenTLError):
    """Per-session request cap reached."""


class IoError(GenTLError):
    """Filesystem failure while persisting or loading a session."""


class SchemaError(GenTLError):
    """Session document has a bad version or violates model invariants."""


class DanglingLabel(GenTLError):
    """Audit label references a record or item that is not in the log."""


class MissingStudyKey(GenTLError):
    """Macro-averaged audit requested but records lack the study field."""


class ParseError(GenTLError):
    """Labels file line could not be parsed."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line
