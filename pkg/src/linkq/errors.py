"""Exception hierarchy shared across the package."""


class LinkqError(Exception):
    """Base class for all errors raised by this package."""


class EmptyInput(LinkqError):
    """An operation received empty or blank input it cannot act on."""


class MalformedDirective(LinkqError):
    """A directive prefix was recognized but its arguments are invalid."""


class IllegalTransition(LinkqError):
    """A session attempted a state change outside the transition table."""


class GroundingViolation(LinkqError):
    """An identifier not returned by the knowledge graph tried to enter the resolved context."""


class NoQueryBlock(LinkqError):
    """The assistant reply lacked the required fenced query block (after one retry)."""


class LlmUnavailable(LinkqError):
    """The language-model backend failed after exhausting retries."""


class ScriptExhausted(LinkqError):
    """The scripted responder ran out of queued replies; a test bug signal."""


class KgUnavailable(LinkqError):
    """The knowledge-graph service could not be reached or failed server-side."""


class EmptyTerm(EmptyInput):
    """A search term was empty after trimming."""


class UnknownEntity(LinkqError):
    """The knowledge graph reports no entity with the given identifier."""


class QueryRejected(LinkqError):
    """The query endpoint rejected a query; carries the endpoint message verbatim."""


class QueryTimeout(LinkqError):
    """Query execution exceeded its time budget."""


class MissingBinding(LinkqError):
    """A prompt template placeholder was left unbound."""


class MissingLabel(LinkqError):
    """The label map does not cover an identifier used in the query graph."""


class MalformedDocument(LinkqError):
    """A query result document does not have the expected wire structure."""


class SessionNotFound(LinkqError):
    """No session exists with the given id."""


class InvalidQuery(LinkqError):
    """A query failed validation and was rejected before reaching the network."""

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position


class FixtureMissing(KgUnavailable):
    """Replay transport has no recorded fixture for the requested call."""
