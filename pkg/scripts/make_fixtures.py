#!/usr/bin/env python3
"""Regenerates the committed replay fixtures in fixtures/.

A canned upstream stands in for the real services; every response is routed
through the real client code and a RecordingTransport, so fixture keys always
match what the client asks for at replay time. Run from the repo root:

    python scripts/make_fixtures.py
"""

from __future__ import annotations

import json
import shutil
import sys
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT / "tests"))

from corpus import (  # noqa: E402
    APPLE_QUERY,
    EMPTY_RESULT_QUERY,
    MOUNTAINS_QUERY,
    TALLEST_EXPLANATION,
    TALLEST_QUERY,
    TALLEST_SUMMARY,
)
from linkq.kg.client import WikidataClient  # noqa: E402
from linkq.kg.transport import RecordingTransport, WireResponse  # noqa: E402

FIXTURE_DIR = REPO_ROOT / "fixtures"

ENTITY = "http://www.wikidata.org/entity/"

SEARCHES = {
    "Apple": [
        {"id": "Q312", "label": "Apple Inc.", "description": "American multinational technology company"},
        {"id": "Q89", "label": "apple", "description": "fruit of the apple tree"},
        {"id": "Q213710", "label": "Apple Records", "description": "British record label founded by the Beatles"},
    ],
    "mountain": [
        {"id": "Q8502", "label": "mountain", "description": "large landform that rises above the surrounding land"},
        {"id": "Q46831", "label": "mountain range", "description": "geographic area containing several mountains"},
    ],
    "zxqvwk-nonexistent-9881": [],
}

LABELS = {
    "Q312": ("Apple Inc.", "American multinational technology company"),
    "Q8502": ("mountain", "large landform that rises above the surrounding land"),
    "P112": ("founded by", "founder or co-founder of this organization, religion or place"),
    "P569": ("date of birth", "date on which the subject was born"),
    "P31": ("instance of", "that class of which this subject is a particular example and member"),
    "P2044": ("elevation above sea level", "height of the item as measured relative to sea level"),
    "P17": ("country", "sovereign state that this item is in"),
}

CLAIMS = {
    "Q312": [
        ("P112", "founded by", {"type": "uri", "value": ENTITY + "Q19837"}),
        ("P31", "instance of", {"type": "uri", "value": ENTITY + "Q4830453"}),
        ("P159", "headquarters location", {"type": "uri", "value": ENTITY + "Q844837"}),
        ("P571", "inception", {
            "type": "literal",
            "datatype": "http://www.w3.org/2001/XMLSchema#dateTime",
            "value": "1976-04-01T00:00:00Z",
        }),
        ("P17", "country", {"type": "uri", "value": ENTITY + "Q30"}),
    ],
    "Q8502": [
        ("P279", "subclass of", {"type": "uri", "value": ENTITY + "Q271669"}),
        ("P31", "instance of", {"type": "uri", "value": ENTITY + "Q19478619"}),
        ("P18", "image", {"type": "uri", "value": "http://commons.wikimedia.org/wiki/Special:FilePath/EverestKalapatthar.jpg"}),
        ("P910", "topic's main category", {"type": "uri", "value": ENTITY + "Q7214225"}),
    ],
    "Q999999999999": [],
}

FOUNDERS = [
    ("Q19837", "Steve Jobs", "1955-02-24T00:00:00Z"),
    ("Q483382", "Steve Wozniak", "1950-08-11T00:00:00Z"),
    ("Q92619", "Ronald Wayne", "1934-05-17T00:00:00Z"),
]

FIVE_MOUNTAINS = [
    ("Q513", "Mount Everest", "8848.86"),
    ("Q43512", "K2", "8611"),
    ("Q45979", "Kangchenjunga", "8586"),
    ("Q43194", "Lhotse", "8516"),
    ("Q43195", "Makalu", "8485"),
]

TEN_MOUNTAINS = FIVE_MOUNTAINS + [
    ("Q45315", "Cho Oyu", "8188"),
    ("Q45319", "Dhaulagiri", "8167"),
    ("Q45311", "Manaslu", "8163"),
    ("Q43407", "Nanga Parbat", "8126"),
    ("Q482931", "Annapurna I", "8091"),
]

MOUNTAIN_COUNTRIES = {
    "Q513": "Nepal",
    "Q43512": "Pakistan",
    "Q45979": "Nepal",
    "Q43194": "Nepal",
    "Q43195": "Nepal",
    "Q45315": "Nepal",
    "Q45319": "Nepal",
    "Q45311": "Nepal",
    "Q43407": "Pakistan",
    "Q482931": "Nepal",
}


def _literal(value, datatype=None, lang=None):
    entry = {"type": "literal", "value": value}
    if datatype:
        entry["datatype"] = datatype
    if lang:
        entry["xml:lang"] = lang
    return entry


def _decimal(value):
    return _literal(value, datatype="http://www.w3.org/2001/XMLSchema#decimal")


def _uri(value):
    return {"type": "uri", "value": value}


def _doc(variables, bindings):
    return {"head": {"vars": variables}, "results": {"bindings": bindings}}


def founders_doc():
    bindings = [
        {
            "founder": _uri(ENTITY + qid),
            "founderLabel": _literal(label, lang="en"),
            "birthdate": _literal(born, datatype="http://www.w3.org/2001/XMLSchema#dateTime"),
        }
        for qid, label, born in FOUNDERS
    ]
    return _doc(["founder", "founderLabel", "birthdate"], bindings)


def five_mountains_doc():
    bindings = [
        {
            "mountain": _uri(ENTITY + qid),
            "mountainLabel": _literal(label, lang="en"),
            "height": _decimal(height),
        }
        for qid, label, height in FIVE_MOUNTAINS
    ]
    return _doc(["mountain", "mountainLabel", "height"], bindings)


def ten_mountains_doc():
    bindings = [
        {
            "mountain": _uri(ENTITY + qid),
            "mountainLabel": _literal(label, lang="en"),
            "height": _decimal(height),
            "countryLabel": _literal(MOUNTAIN_COUNTRIES[qid], lang="en"),
        }
        for qid, label, height in TEN_MOUNTAINS
    ]
    return _doc(["mountain", "mountainLabel", "height", "countryLabel"], bindings)


def claims_doc(entity_id):
    bindings = [
        {
            "prop": _uri(ENTITY + pid),
            "propLabel": _literal(label, lang="en"),
            "propDescription": _literal(f"Wikidata property: {label}", lang="en"),
            "sample": sample,
        }
        for pid, label, sample in CLAIMS[entity_id]
    ]
    return _doc(["prop", "propLabel", "propDescription", "sample"], bindings)


USER_QUERY_DOCS = {
    APPLE_QUERY: founders_doc,
    MOUNTAINS_QUERY: five_mountains_doc,
    TALLEST_QUERY: ten_mountains_doc,
    EMPTY_RESULT_QUERY: lambda: _doc(["x"], []),
}


class CannedUpstream:
    """Answers like the real services would, from the tables above."""

    def call(self, operation, args, timeout=None):
        if operation == "wbsearchentities":
            items = SEARCHES.get(args["search"])
            if items is None:
                raise KeyError(f"no canned search for {args['search']!r}")
            body = {"searchinfo": {"search": args["search"]}, "search": items, "success": 1}
            return WireResponse(200, json.dumps(body))
        if operation == "wbgetentities":
            entities = {}
            for identifier in args["ids"].split("|"):
                if identifier in LABELS:
                    label, description = LABELS[identifier]
                    entities[identifier] = {
                        "id": identifier,
                        "labels": {"en": {"language": "en", "value": label}},
                        "descriptions": {"en": {"language": "en", "value": description}},
                    }
                else:
                    entities[identifier] = {"id": identifier, "missing": ""}
            return WireResponse(200, json.dumps({"entities": entities, "success": 1}))
        if operation == "sparql":
            query = args["query"]
            for text, doc_fn in USER_QUERY_DOCS.items():
                if query == text:
                    return WireResponse(200, json.dumps(doc_fn()))
            for entity_id in CLAIMS:
                if f"wd:{entity_id} ?claim ?val" in query:
                    return WireResponse(200, json.dumps(claims_doc(entity_id)))
            if "wd:Q312 wdt:P112 ?tail" in query:
                bindings = [
                    {
                        "tail": _uri(ENTITY + qid),
                        "tailLabel": _literal(label, lang="en"),
                        "tailDescription": _literal("co-founder of Apple Inc.", lang="en"),
                    }
                    for qid, label, _ in FOUNDERS
                ]
                return WireResponse(
                    200, json.dumps(_doc(["tail", "tailLabel", "tailDescription"], bindings))
                )
            if "wd:Q312 wdt:P2044 ?tail" in query:
                return WireResponse(
                    200, json.dumps(_doc(["tail", "tailLabel", "tailDescription"], []))
                )
            raise KeyError(f"no canned sparql response for:\n{query}")
        raise KeyError(f"unknown operation {operation!r}")


def record_all() -> None:
    if FIXTURE_DIR.exists():
        shutil.rmtree(FIXTURE_DIR)
    client = WikidataClient(RecordingTransport(CannedUpstream(), FIXTURE_DIR))

    client.fuzzy_search_entities("Apple", 7)
    client.fuzzy_search_entities("Apple", 5)
    client.fuzzy_search_entities("mountain", 7)
    client.fuzzy_search_entities("zxqvwk-nonexistent-9881", 5)

    client.fetch_entity_properties("Q312")
    client.fetch_entity_properties("Q8502")
    try:
        client.fetch_entity_properties("Q999999999999")
    except Exception:
        pass  # the UnknownEntity path still records both wire calls

    client.traverse("Q312", "P112")
    client.traverse("Q312", "P2044")

    client.fetch_labels(["Q312", "P112", "P569"])
    client.fetch_labels(["Q8502", "P31", "P2044", "P17"])
    client.fetch_labels(["Q8502", "P31", "P2044"])
    client.fetch_labels(["Q8502", "P2044"])

    client.execute_sparql(APPLE_QUERY)
    client.execute_sparql(MOUNTAINS_QUERY)
    client.execute_sparql(TALLEST_QUERY)
    client.execute_sparql(EMPTY_RESULT_QUERY)

    script = {
        "replies": [
            "BUILD QUERY",
            "ENTITY SEARCH: mountain",
            "PROPERTIES SEARCH: Q8502",
            "STOP",
            f"```sparql\n{TALLEST_QUERY}\n```\n{TALLEST_EXPLANATION}",
            TALLEST_SUMMARY,
        ]
    }
    (FIXTURE_DIR / "llm_script.json").write_text(
        json.dumps(script, indent=2, ensure_ascii=False), "utf-8"
    )

    count = sum(1 for _ in FIXTURE_DIR.rglob("*.json"))
    print(f"wrote {count} fixture files under {FIXTURE_DIR}")


if __name__ == "__main__":
    record_all()
