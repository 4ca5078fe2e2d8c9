"""SPARQL structural analysis for the query preview panel."""

from .analysis import (
    QuerySyntaxError,
    ValidationResult,
    build_query_graph,
    extract_bgp,
    extract_ids,
    to_dot,
    triples_to_query,
    validate,
)
from .model import (
    GraphEdge,
    GraphNode,
    IdInventory,
    QueryGraph,
    Term,
    TermKind,
    TriplePattern,
)
from .parser import parse_query

__all__ = [
    "GraphEdge",
    "GraphNode",
    "IdInventory",
    "QueryGraph",
    "QuerySyntaxError",
    "Term",
    "TermKind",
    "TriplePattern",
    "ValidationResult",
    "build_query_graph",
    "extract_bgp",
    "extract_ids",
    "parse_query",
    "to_dot",
    "triples_to_query",
    "validate",
]
