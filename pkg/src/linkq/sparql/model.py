"""Term, triple-pattern, and query-graph model for query preview analysis."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

ENTITY_PREFIX = "wd"
PROPERTY_PREFIXES = ("wdt", "p", "ps", "pq")

# The standard Wikidata prefixes work undeclared, as generated queries use
# them without a prologue; explicit PREFIX declarations override these.
DEFAULT_PREFIXES = {
    "wd": "http://www.wikidata.org/entity/",
    "wdt": "http://www.wikidata.org/prop/direct/",
    "p": "http://www.wikidata.org/prop/",
    "ps": "http://www.wikidata.org/prop/statement/",
    "pq": "http://www.wikidata.org/prop/qualifier/",
    "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
    "rdf": "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
    "xsd": "http://www.w3.org/2001/XMLSchema#",
    "bd": "http://www.bigdata.com/rdf#",
    "wikibase": "http://wikiba.se/ontology#",
}


class TermKind(Enum):
    ENTITY = "entity"
    PROPERTY = "property"
    VARIABLE = "variable"
    LITERAL = "literal"
    OTHER_IRI = "otherIri"


@dataclass(frozen=True)
class Term:
    """One position of a triple pattern, as written in the query.

    ``text`` is the exact source form ("wd:Q312", "?founder", '"8000"');
    ``value`` is the payload: the bare identifier for entities/properties,
    the bare name for variables, the lexical form for literals.
    """

    kind: TermKind
    text: str
    value: str
    prefix: str | None = None
    datatype: str | None = None

    @property
    def is_known_entity(self) -> bool:
        return self.kind is TermKind.ENTITY

    @property
    def node_key(self) -> str:
        if self.kind is TermKind.VARIABLE:
            return "?" + self.value
        return self.text


@dataclass(frozen=True)
class TriplePattern:
    subject: Term
    predicate: Term
    object: Term

    def __post_init__(self):
        if self.predicate.kind is TermKind.LITERAL:
            raise ValueError("a literal cannot be a predicate")

    def terms(self) -> tuple[Term, Term, Term]:
        return (self.subject, self.predicate, self.object)


@dataclass(frozen=True)
class IdInventory:
    """Entity and property identifiers found in a query, in first-appearance order."""

    entity_ids: tuple[str, ...]
    property_ids: tuple[str, ...]

    def all_ids(self) -> tuple[str, ...]:
        return self.entity_ids + self.property_ids


KNOWN_ENTITY = "knownEntity"
VARIABLE = "variable"
LITERAL = "literal"


@dataclass(frozen=True)
class GraphNode:
    key: str
    display_label: str
    kind: str  # knownEntity | variable | literal


@dataclass(frozen=True)
class GraphEdge:
    source: str
    target: str
    property_ref: str  # "P112" for KG properties, otherwise the query text
    display_label: str


@dataclass(frozen=True)
class QueryGraph:
    nodes: tuple[GraphNode, ...]
    edges: tuple[GraphEdge, ...]
