"""Query-side analysis for the preview panel: validation, ID inventory,
basic-graph-pattern extraction, and query-graph construction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from ..errors import InvalidQuery, MissingLabel
from .model import (
    ENTITY_PREFIX,
    KNOWN_ENTITY,
    LITERAL,
    PROPERTY_PREFIXES,
    VARIABLE,
    GraphEdge,
    GraphNode,
    IdInventory,
    QueryGraph,
    Term,
    TermKind,
    TriplePattern,
)
from .parser import ParsedQuery, Token, _classify_pname, parse_query


@dataclass(frozen=True)
class QuerySyntaxError:
    position: int  # 0-based character offset
    line: int  # 1-based
    column: int  # 1-based
    message: str

    def describe(self) -> str:
        return f"line {self.line}, column {self.column}: {self.message}"


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    error: QuerySyntaxError | None = None


def _position_to_line_col(text: str, pos: int) -> tuple[int, int]:
    pos = max(0, min(pos, len(text)))
    line = text.count("\n", 0, pos) + 1
    column = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, column


def validate(query: str) -> ValidationResult:
    """Total syntactic check: ok, or a positioned error. Never raises."""
    try:
        parse_query(query)
    except InvalidQuery as exc:
        pos = exc.position if exc.position is not None else 0
        line, column = _position_to_line_col(query, pos)
        return ValidationResult(False, QuerySyntaxError(pos, line, column, str(exc)))
    except RecursionError:
        return ValidationResult(
            False, QuerySyntaxError(0, 1, 1, "query too deeply nested to parse")
        )
    return ValidationResult(True)


def extract_ids(query: str) -> IdInventory:
    """Every wd:Qn and wdt:/p:/ps:/pq:-prefixed Pn in the query, deduplicated,
    in first-appearance order, comments and strings excluded."""
    parsed = parse_query(query)
    entities: list[str] = []
    properties: list[str] = []
    for tok in parsed.tokens:
        if tok.kind != "pname":
            continue
        term = _classify_pname(tok)
        if term.kind is TermKind.ENTITY and term.value not in entities:
            entities.append(term.value)
        elif term.kind is TermKind.PROPERTY and term.value not in properties:
            properties.append(term.value)
    return IdInventory(tuple(entities), tuple(properties))


def extract_bgp(query: str) -> list[TriplePattern]:
    """Triple patterns of the top-level WHERE group, ';'/',' expanded.

    SERVICE blocks, FILTER expressions, FILTER NOT EXISTS groups, and other
    nested groups contribute nothing: the preview graph shows the query's own
    matching structure, not labeling boilerplate or negations.
    """
    return parse_query(query).where.triples()


def _node_display(term: Term, labels: Mapping[str, Sequence[str]]) -> str:
    if term.kind is TermKind.ENTITY:
        label = _label_for(term.value, labels)
        return f"{term.text} ({label})" if label else term.text
    if term.kind is TermKind.VARIABLE:
        return term.value
    if term.kind is TermKind.LITERAL:
        return term.value
    return term.text


def _label_for(identifier: str, labels: Mapping[str, Sequence[str]]) -> str:
    if identifier not in labels:
        raise MissingLabel(f"no label entry for {identifier}")
    return labels[identifier][0]


def _node_kind(term: Term) -> str:
    if term.kind is TermKind.ENTITY:
        return KNOWN_ENTITY
    if term.kind is TermKind.VARIABLE:
        return VARIABLE
    return LITERAL


def build_query_graph(
    triples: Sequence[TriplePattern], labels: Mapping[str, Sequence[str]]
) -> QueryGraph:
    """One node per distinct subject/object term, one edge per triple.

    ``labels`` must cover every entity and property ID appearing in the
    triples; values are (label, description) pairs from the KG.
    """
    nodes: dict[str, GraphNode] = {}
    edges: list[GraphEdge] = []
    for triple in triples:
        for term in (triple.subject, triple.object):
            key = term.node_key
            if key not in nodes:
                nodes[key] = GraphNode(key, _node_display(term, labels), _node_kind(term))
        pred = triple.predicate
        if pred.kind is TermKind.PROPERTY:
            label = _label_for(pred.value, labels)
            display = f"{pred.text} ({label})" if label else pred.text
            ref = pred.value
        else:
            display = pred.text
            ref = pred.text
        edges.append(
            GraphEdge(triple.subject.node_key, triple.object.node_key, ref, display)
        )
    return QueryGraph(tuple(nodes.values()), tuple(edges))


def triples_to_query(triples: Sequence[TriplePattern]) -> str:
    """Serialize triples back into a minimal SELECT query; reparsing the
    result yields the same triples."""
    lines = [f"  {t.subject.text} {t.predicate.text} {t.object.text} ." for t in triples]
    return "SELECT * WHERE {\n" + "\n".join(lines) + "\n}"


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(graph: QueryGraph) -> str:
    """Graphviz text export of a query graph, deterministic order."""
    lines = ["digraph query {"]
    for node in graph.nodes:
        shape = {"knownEntity": "box", "variable": "ellipse", "literal": "note"}[node.kind]
        lines.append(
            f'  "{_dot_escape(node.key)}" [label="{_dot_escape(node.display_label)}", '
            f'shape={shape}, kind="{node.kind}"];'
        )
    for edge in graph.edges:
        lines.append(
            f'  "{_dot_escape(edge.source)}" -> "{_dot_escape(edge.target)}" '
            f'[label="{_dot_escape(edge.display_label)}"];'
        )
    lines.append("}")
    return "\n".join(lines)
