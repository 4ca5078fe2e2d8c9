import random
import string

import pytest

from corpus import CORPUS
from linkq.sparql import extract_bgp, parse_query, triples_to_query, validate


@pytest.mark.parametrize("name,query,_t,_e,_p", CORPUS, ids=[c[0] for c in CORPUS])
def test_corpus_queries_validate(name, query, _t, _e, _p):
    result = validate(query)
    assert result.ok, result.error


@pytest.mark.parametrize("name,query,expected,_e,_p", CORPUS, ids=[c[0] for c in CORPUS])
def test_corpus_bgp_matches_hand_parse(name, query, expected, _e, _p):
    triples = extract_bgp(query)
    observed = [(t.subject.text, t.predicate.text, t.object.text) for t in triples]
    assert observed == expected


def test_truncated_input_yields_positioned_error():
    result = validate("SELECT ?x WHERE { ?x wdt:P31 ")
    assert not result.ok
    assert result.error.position >= 0
    assert result.error.line == 1
    assert result.error.message


def test_error_position_line_and_column():
    result = validate("SELECT ?x\nWHERE {\n  ?x wdt:P31 }\n")
    assert not result.ok
    assert result.error.line == 3
    # the '}' arrives where the object term was expected
    assert result.error.column == 14


@pytest.mark.parametrize(
    "bad",
    [
        "",
        "SELECT",
        "SELECT *",
        "ASK { ?x ?p ?o }",
        "SELECT * WHERE { BIND(1 AS ?x) }",
        "SELECT * WHERE { ?a ?b ?c } UNION { ?d ?e ?f }",
        "SELECT * WHERE { ?a ?b ?c . } LIMIT LIMIT",
        "SELECT * WHERE { ?a ?b ?c . } LIMIT 5 LIMIT 6",
        "SELECT * WHERE { 5 ?p ?o . }",
        "SELECT * WHERE { ?a ?b ?c ?d ?e ?f . }",
        'SELECT * WHERE { ?a ?b "unterminated }',
        "SELECT * WHERE { ?a ?b ?c",
        "SELECT ?x WHERE { ?x wdt:P31 wd:Q1 . } trailing",
        "SELECT (?x) WHERE { ?x ?p ?o . }",
    ],
)
def test_rejections_carry_positions(bad):
    result = validate(bad)
    assert not result.ok
    assert result.error is not None
    assert result.error.position >= 0


def test_comments_and_hash_inside_strings():
    query = (
        "SELECT ?x WHERE {\n"
        "  ?x rdfs:label ?l . # a comment with wd:Q999 inside\n"
        '  FILTER(CONTAINS(?l, "ab#c"))\n'
        "}"
    )
    assert validate(query).ok
    triples = extract_bgp(query)
    assert len(triples) == 1


def test_prefix_declarations_accepted():
    query = 'PREFIX ex: <http://example.org/> SELECT ?x WHERE { ?x ex:thing "v" . }'
    assert validate(query).ok


def test_effective_prefix_map_defaults_and_overrides():
    parsed = parse_query("SELECT ?x WHERE { ?x wdt:P31 wd:Q1 . }")
    assert parsed.prefixes["wd"] == "http://www.wikidata.org/entity/"
    assert parsed.prefixes["wdt"] == "http://www.wikidata.org/prop/direct/"
    overridden = parse_query(
        "PREFIX wd: <http://example.org/custom/> SELECT ?x WHERE { ?x wdt:P31 wd:Q1 . }"
    )
    assert overridden.prefixes["wd"] == "http://example.org/custom/"
    assert overridden.prefixes["wdt"] == "http://www.wikidata.org/prop/direct/"


def test_semicolon_and_comma_expansion():
    query = "SELECT * WHERE { ?a wdt:P31 wd:Q1, wd:Q2; wdt:P17 ?b . }"
    triples = extract_bgp(query)
    observed = [(t.subject.text, t.predicate.text, t.object.text) for t in triples]
    assert observed == [
        ("?a", "wdt:P31", "wd:Q1"),
        ("?a", "wdt:P31", "wd:Q2"),
        ("?a", "wdt:P17", "?b"),
    ]


def test_optional_and_subgroups_are_excluded_from_bgp():
    query = (
        "SELECT * WHERE { ?a wdt:P31 wd:Q1 . "
        "OPTIONAL { ?a wdt:P569 ?d . } { ?a wdt:P18 ?img . } }"
    )
    assert validate(query).ok
    assert len(extract_bgp(query)) == 1


def test_a_keyword_and_full_iris():
    query = "SELECT * WHERE { ?x a <http://example.org/Type> . }"
    triples = extract_bgp(query)
    assert triples[0].predicate.text == "a"
    assert triples[0].object.text == "<http://example.org/Type>"


def test_literal_forms():
    query = (
        "SELECT * WHERE { "
        '?x ?p "plain" . '
        '?x ?p "tagged"@en . '
        '?x ?p "typed"^^xsd:dateTime . '
        "?x ?p 8000 . "
        "?x ?p 8848.86 . "
        "?x ?p true . "
        "}"
    )
    triples = extract_bgp(query)
    assert [t.object.text for t in triples] == [
        '"plain"', '"tagged"@en', '"typed"^^xsd:dateTime', "8000", "8848.86", "true",
    ]
    assert triples[3].object.datatype == "integer"
    assert triples[4].object.datatype == "decimal"


def test_escaped_quotes_round_trip():
    query = r'SELECT * WHERE { ?x rdfs:label "say \"hi\"" . }'
    triples = extract_bgp(query)
    assert triples[0].object.value == 'say "hi"'
    assert extract_bgp(triples_to_query(triples)) == triples


@pytest.mark.parametrize("name,query,_t,_e,_p", CORPUS, ids=[c[0] for c in CORPUS])
def test_render_reparse_stability(name, query, _t, _e, _p):
    triples = extract_bgp(query)
    assert extract_bgp(triples_to_query(triples)) == triples


def test_deep_nesting_is_an_error_not_a_crash():
    assert not validate("SELECT * WHERE " + "{" * 500 + "}" * 500).ok
    assert not validate("SELECT * WHERE { FILTER(" + "(" * 500 + "1" + ")" * 500 + ") }").ok


def test_parse_query_keeps_tokens_for_scanning():
    parsed = parse_query("SELECT ?x WHERE { ?x wdt:P31 wd:Q8502 . }")
    kinds = {t.kind for t in parsed.tokens}
    assert "pname" in kinds and "var" in kinds


def _random_garbage(rng: random.Random) -> str:
    alphabet = string.printable
    length = rng.randrange(0, 80)
    return "".join(rng.choice(alphabet) for _ in range(length))


def _mutated_corpus_query(rng: random.Random) -> str:
    query = rng.choice(CORPUS)[1]
    chars = list(query)
    for _ in range(rng.randrange(1, 6)):
        action = rng.randrange(3)
        pos = rng.randrange(len(chars)) if chars else 0
        if action == 0 and chars:
            del chars[pos]
        elif action == 1:
            chars.insert(pos, rng.choice(string.printable))
        elif chars:
            chars[pos] = rng.choice(string.printable)
    return "".join(chars)


def test_fuzz_smoke_validate_is_total():
    rng = random.Random(20240501)
    for i in range(2000):
        text = _random_garbage(rng) if i % 2 else _mutated_corpus_query(rng)
        result = validate(text)  # must never raise
        assert result.ok or result.error is not None
