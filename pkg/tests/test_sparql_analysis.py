import re

import pytest

from conftest import LABELS
from corpus import CORPUS, HEADS_OF_STATE_QUERY, MOUNTAINS_QUERY
from linkq.errors import MissingLabel
from linkq.sparql import (
    build_query_graph,
    extract_bgp,
    extract_ids,
    to_dot,
    validate,
)

_ENTITY_RE = re.compile(r"\bwd:(Q[0-9]+)\b")
_PROPERTY_RE = re.compile(r"\b(?:wdt|ps|pq|p):(P[0-9]+)\b")


def _regex_oracle(query: str):
    """Independent first-appearance scan over the raw query text."""
    entities, properties = [], []
    for match in _ENTITY_RE.finditer(query):
        if match.group(1) not in entities:
            entities.append(match.group(1))
    for match in _PROPERTY_RE.finditer(query):
        if match.group(1) not in properties:
            properties.append(match.group(1))
    return entities, properties


@pytest.mark.parametrize("name,query,_t,entities,properties", CORPUS, ids=[c[0] for c in CORPUS])
def test_extract_ids_matches_hand_parse(name, query, _t, entities, properties):
    inventory = extract_ids(query)
    assert list(inventory.entity_ids) == entities
    assert list(inventory.property_ids) == properties


@pytest.mark.parametrize("name,query,_t,_e,_p", CORPUS, ids=[c[0] for c in CORPUS])
def test_extract_ids_matches_regex_oracle(name, query, _t, _e, _p):
    entities, properties = _regex_oracle(query)
    inventory = extract_ids(query)
    assert list(inventory.entity_ids) == entities
    assert list(inventory.property_ids) == properties


def test_ids_are_deduplicated_in_first_appearance_order():
    # P35 occurs via both p: and ps: in the heads-of-state query.
    inventory = extract_ids(HEADS_OF_STATE_QUERY)
    assert list(inventory.property_ids) == ["P31", "P35", "P580", "P582"]


def test_filter_only_ids_are_included():
    inventory = extract_ids(HEADS_OF_STATE_QUERY)
    assert "P582" in inventory.property_ids  # appears only inside FILTER NOT EXISTS


def test_no_prefixed_ids_means_empty_inventory():
    inventory = extract_ids("SELECT ?x WHERE { ?x ?p ?y . }")
    assert inventory.entity_ids == ()
    assert inventory.property_ids == ()


def test_apple_graph_shape():
    name, query, *_ = CORPUS[0]
    graph = build_query_graph(extract_bgp(query), LABELS)
    assert len(graph.nodes) == 3
    assert len(graph.edges) == 2
    kinds = {n.key: n.kind for n in graph.nodes}
    assert kinds["wd:Q312"] == "knownEntity"
    assert kinds["?founder"] == "variable"
    assert kinds["?birthdate"] == "variable"
    by_key = {n.key: n for n in graph.nodes}
    assert by_key["wd:Q312"].display_label == "wd:Q312 (Apple Inc.)"
    assert by_key["?founder"].display_label == "founder"
    edge = graph.edges[0]
    assert (edge.source, edge.target) == ("wd:Q312", "?founder")
    assert edge.property_ref == "P112"
    assert edge.display_label == "wdt:P112 (founded by)"


def test_mountains_graph_shape():
    graph = build_query_graph(extract_bgp(MOUNTAINS_QUERY), LABELS)
    kinds = {n.key: n.kind for n in graph.nodes}
    assert kinds == {
        "?mountain": "variable",
        "wd:Q8502": "knownEntity",
        "?height": "variable",
    }
    assert {e.property_ref for e in graph.edges} == {"P31", "P2044"}


def test_empty_triples_give_empty_graph():
    graph = build_query_graph([], {})
    assert graph.nodes == ()
    assert graph.edges == ()


def test_shared_terms_map_to_one_node():
    query = "SELECT * WHERE { ?a wdt:P31 wd:Q1 . ?b wdt:P31 wd:Q1 . wd:Q1 wdt:P17 ?c . }"
    labels = {"Q1": ("one", ""), "P31": ("instance of", ""), "P17": ("country", "")}
    graph = build_query_graph(extract_bgp(query), labels)
    assert len([n for n in graph.nodes if n.key == "wd:Q1"]) == 1
    assert len(graph.edges) == 3


def test_filter_variables_do_not_become_nodes():
    graph = build_query_graph(extract_bgp(HEADS_OF_STATE_QUERY), LABELS)
    keys = {n.key for n in graph.nodes}
    assert "?endDate" not in keys  # referenced only inside FILTER NOT EXISTS


def test_literal_objects_become_literal_nodes():
    query = 'SELECT * WHERE { ?x rdfs:label "Everest" . }'
    graph = build_query_graph(extract_bgp(query), {})
    kinds = {n.kind for n in graph.nodes}
    assert kinds == {"variable", "literal"}
    literal = next(n for n in graph.nodes if n.kind == "literal")
    assert literal.display_label == "Everest"


def test_other_iri_predicates_use_query_text():
    name, query, *_ = CORPUS[3]  # beethoven: rdfs:label predicate
    graph = build_query_graph(extract_bgp(query), LABELS)
    labels_on_edges = {e.display_label for e in graph.edges}
    assert "rdfs:label" in labels_on_edges


def test_missing_label_raises():
    name, query, *_ = CORPUS[0]
    with pytest.raises(MissingLabel):
        build_query_graph(extract_bgp(query), {"Q312": ("Apple Inc.", "")})


@pytest.mark.parametrize("name,query,_t,_e,_p", CORPUS, ids=[c[0] for c in CORPUS])
def test_graph_invariants_over_corpus(name, query, _t, _e, _p):
    triples = extract_bgp(query)
    graph = build_query_graph(triples, LABELS)
    assert len(graph.edges) == len(triples)
    node_keys = {n.key for n in graph.nodes}
    for edge in graph.edges:
        assert edge.source in node_keys
        assert edge.target in node_keys
    entity_nodes = {n.key.split(":")[1] for n in graph.nodes if n.kind == "knownEntity"}
    assert entity_nodes <= set(extract_ids(query).entity_ids)


def test_dot_export_is_deterministic_and_escaped():
    graph = build_query_graph(extract_bgp(MOUNTAINS_QUERY), LABELS)
    first = to_dot(graph)
    second = to_dot(graph)
    assert first == second
    assert first.startswith("digraph query {")
    assert '"wd:Q8502"' in first
    assert "->" in first
    quoted = build_query_graph(
        extract_bgp('SELECT * WHERE { ?x rdfs:label "say \\"hi\\"" . }'), {}
    )
    assert '\\"hi\\"' in to_dot(quoted)


def test_validate_is_precondition_for_extract_ids():
    assert not validate("SELECT nonsense").ok
    with pytest.raises(Exception):
        extract_ids("SELECT nonsense")
