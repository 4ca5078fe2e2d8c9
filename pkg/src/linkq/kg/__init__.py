"""Knowledge-graph access: Wikidata client, caching, and wire transports."""

from .client import (
    DEFAULT_SEARCH_LIMIT,
    EntityMatch,
    LabelRecord,
    PropertyFetchResult,
    PropertyRecord,
    SessionKg,
    SparqlResultDocument,
    WikidataClient,
    entity_id_from_iri,
)
from .transport import (
    LiveTransport,
    RateLimiter,
    RecordingTransport,
    ReplayTransport,
    Transport,
    WireResponse,
    canonical_args,
    fixture_path,
)

__all__ = [
    "DEFAULT_SEARCH_LIMIT",
    "EntityMatch",
    "LabelRecord",
    "LiveTransport",
    "PropertyFetchResult",
    "PropertyRecord",
    "RateLimiter",
    "RecordingTransport",
    "ReplayTransport",
    "SessionKg",
    "SparqlResultDocument",
    "Transport",
    "WikidataClient",
    "WireResponse",
    "canonical_args",
    "entity_id_from_iri",
    "fixture_path",
]
