"""Shared test doubles: an in-memory KG, a routing wire transport, a local
chat-completions stub server, and a fixed clock."""

from __future__ import annotations

import json
import threading
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

from linkq.config import Config
from linkq.errors import KgUnavailable
from linkq.kg.client import (
    EntityMatch,
    LabelRecord,
    PropertyFetchResult,
    PropertyRecord,
    SparqlResultDocument,
)
from linkq.kg.transport import WireResponse

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURE_DIR = REPO_ROOT / "fixtures"


def fixed_clock(year=2024, month=5, day=1):
    moment = datetime(year, month, day, 12, 0, 0, tzinfo=timezone.utc)
    return lambda: moment


def make_config(**overrides) -> Config:
    config = Config()
    config.llm_model = "test-model"
    for key, value in overrides.items():
        setattr(config, key, value)
    return config


# -- canned knowledge-graph content -----------------------------------------

APPLE_MATCHES = [
    EntityMatch("Q312", "Apple Inc.", "American multinational technology company", 0),
    EntityMatch("Q89", "apple", "fruit of the apple tree", 1),
    EntityMatch("Q213710", "Apple Records", "British record label", 2),
]

FOUNDER_TAILS = [
    EntityMatch("Q19837", "Steve Jobs", "American entrepreneur (1955-2011)", 0),
    EntityMatch("Q483382", "Steve Wozniak", "American computer engineer", 1),
    EntityMatch("Q92619", "Ronald Wayne", "American retired worker", 2),
]

Q312_PROPERTIES = PropertyFetchResult(
    (
        PropertyRecord("P112", "founded by", "founder or co-founder of this organization", "Q19837"),
        PropertyRecord("P31", "instance of", "class this subject is an example of", "Q4830453"),
        PropertyRecord("P159", "headquarters location", "city where the organization is seated", "Q844837"),
    ),
    truncated=False,
)

LABELS = {
    "Q312": LabelRecord("Apple Inc.", "American multinational technology company"),
    "Q8502": LabelRecord("mountain", "large landform that rises above the surrounding land"),
    "Q6256": LabelRecord("country", "distinct territorial body or political entity"),
    "P112": LabelRecord("founded by", "founder or co-founder of this organization"),
    "P569": LabelRecord("date of birth", "date on which the subject was born"),
    "P31": LabelRecord("instance of", "class this subject is an example of"),
    "P2044": LabelRecord("elevation above sea level", "height of the item relative to sea level"),
    "P35": LabelRecord("head of state", "official with the highest formal authority"),
    "P580": LabelRecord("start time", "time an item begins to exist"),
    "P582": LabelRecord("end time", "time an item ceases to exist"),
    "P86": LabelRecord("composer", "person who wrote the music"),
    "P17": LabelRecord("country", "sovereign state this item is in"),
    "Q105543609": LabelRecord("Beethoven symphony", "symphony by Ludwig van Beethoven"),
    "Q255": LabelRecord("Ludwig van Beethoven", "German composer (1770-1827)"),
}

FOUNDERS_DOC = SparqlResultDocument(
    variables=("founder", "founderLabel", "birthdate"),
    bindings=(
        {
            "founder": {"type": "uri", "value": "http://www.wikidata.org/entity/Q19837"},
            "founderLabel": {"type": "literal", "xml:lang": "en", "value": "Steve Jobs"},
            "birthdate": {
                "type": "literal",
                "datatype": "http://www.w3.org/2001/XMLSchema#dateTime",
                "value": "1955-02-24T00:00:00Z",
            },
        },
        {
            "founder": {"type": "uri", "value": "http://www.wikidata.org/entity/Q483382"},
            "founderLabel": {"type": "literal", "xml:lang": "en", "value": "Steve Wozniak"},
            "birthdate": {
                "type": "literal",
                "datatype": "http://www.w3.org/2001/XMLSchema#dateTime",
                "value": "1950-08-11T00:00:00Z",
            },
        },
        {
            "founder": {"type": "uri", "value": "http://www.wikidata.org/entity/Q92619"},
            "founderLabel": {"type": "literal", "xml:lang": "en", "value": "Ronald Wayne"},
            "birthdate": {
                "type": "literal",
                "datatype": "http://www.w3.org/2001/XMLSchema#dateTime",
                "value": "1934-05-17T00:00:00Z",
            },
        },
    ),
)

EMPTY_DOC = SparqlResultDocument(variables=("x",), bindings=())


class FakeKg:
    """SessionKg-compatible double serving the canned content above."""

    def __init__(self, sparql_docs: dict[str, SparqlResultDocument] | None = None):
        self.sparql_docs = sparql_docs or {}
        self.label_requests: list[tuple[str, ...]] = []
        self.executed: list[str] = []

    def fuzzy_search_entities(self, term, limit=7):
        if term.strip().lower().startswith("apple"):
            return APPLE_MATCHES[:limit]
        return []

    def fetch_entity_properties(self, entity_id):
        if entity_id == "Q312":
            return Q312_PROPERTIES
        return PropertyFetchResult((), False)

    def traverse(self, entity_id, property_id):
        if (entity_id, property_id) == ("Q312", "P112"):
            return list(FOUNDER_TAILS)
        return []

    def fetch_labels(self, ids):
        ids = tuple(ids)
        self.label_requests.append(ids)
        return {i: LABELS.get(i, LabelRecord("", "", missing=True)) for i in ids}

    def execute_sparql(self, query, timeout_seconds=60):
        self.executed.append(query)
        for needle, doc in self.sparql_docs.items():
            if needle in query:
                return doc
        return FOUNDERS_DOC if "P112" in query else EMPTY_DOC


class UnavailableKg:
    """Every operation fails as if the KG were down."""

    def _boom(self, *args, **kwargs):
        raise KgUnavailable("synthetic outage")

    fuzzy_search_entities = _boom
    fetch_entity_properties = _boom
    traverse = _boom
    fetch_labels = _boom
    execute_sparql = _boom


class RoutingTransport:
    """Wire-level double: a handler maps (operation, args) to a response body."""

    def __init__(self, handler):
        self._handler = handler
        self.calls: list[tuple[str, dict]] = []

    def call(self, operation, args, timeout=None):
        self.calls.append((operation, dict(args)))
        result = self._handler(operation, args)
        if isinstance(result, WireResponse):
            return result
        status, body = result
        if not isinstance(body, str):
            body = json.dumps(body)
        return WireResponse(status, body)

    def call_count(self, operation=None):
        if operation is None:
            return len(self.calls)
        return sum(1 for op, _ in self.calls if op == operation)


# -- local chat-completions stub ---------------------------------------------


class StubLlmServer:
    """Minimal OpenAI-compatible endpoint driven by a list of behaviors.

    Each behavior is (status, body-dict-or-text); one is consumed per request.
    """

    def __init__(self, behaviors):
        self.behaviors = list(behaviors)
        self.requests: list[dict] = []
        server = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                raw = self.rfile.read(length)
                server.requests.append(
                    {
                        "body": json.loads(raw) if raw else {},
                        "authorization": self.headers.get("Authorization", ""),
                    }
                )
                status, body = (
                    server.behaviors.pop(0) if server.behaviors else (500, "exhausted")
                )
                payload = body if isinstance(body, str) else json.dumps(body)
                data = payload.encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

            def log_message(self, *args):
                pass

        self._httpd = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)

    @property
    def url(self) -> str:
        host, port = self._httpd.server_address
        return f"http://{host}:{port}/v1/chat/completions"

    def __enter__(self):
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self._httpd.shutdown()
        self._httpd.server_close()


def completion_body(content: str) -> dict:
    return {"choices": [{"message": {"role": "assistant", "content": content}}]}


@pytest.fixture
def apple_llm_script():
    """Scripted replies that drive the full protocol for the Apple question."""
    from corpus import APPLE_EXPLANATION, APPLE_QUERY, APPLE_SUMMARY

    return [
        "BUILD QUERY",
        "ENTITY SEARCH: Apple",
        "PROPERTIES SEARCH: Q312",
        "STOP",
        f"```sparql\n{APPLE_QUERY}\n```\n{APPLE_EXPLANATION}",
        APPLE_SUMMARY,
    ]
