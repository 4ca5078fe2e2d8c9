"""Wikidata operations: fuzzy entity search, property enumeration, graph
traversal, batch label lookup, and SPARQL execution."""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from ..config import LABEL_BATCH_SIZE, PROPERTY_CAP
from ..directives import is_entity_id, is_property_id
from ..errors import (
    EmptyInput,
    EmptyTerm,
    KgUnavailable,
    MalformedDocument,
    QueryRejected,
    UnknownEntity,
)
from .transport import WIRE_ENTITIES, WIRE_SEARCH, WIRE_SPARQL, Transport, WireResponse

DEFAULT_SEARCH_LIMIT = 7
TRAVERSAL_LIMIT = 100

_ID_TAIL_RE = re.compile(r"[QP][0-9]+$")


@dataclass(frozen=True)
class EntityMatch:
    id: str
    label: str
    description: str
    match_rank: int


@dataclass(frozen=True)
class PropertyRecord:
    id: str
    label: str
    description: str
    sample_value: str | None = None


class LabelRecord(NamedTuple):
    label: str
    description: str
    missing: bool = False


@dataclass(frozen=True)
class PropertyFetchResult:
    records: tuple[PropertyRecord, ...]
    truncated: bool


@dataclass(frozen=True)
class SparqlResultDocument:
    variables: tuple[str, ...]
    bindings: tuple[dict, ...]

    @classmethod
    def from_wire(cls, body: dict) -> "SparqlResultDocument":
        try:
            variables = tuple(body["head"]["vars"])
            bindings = tuple(body["results"]["bindings"])
        except (KeyError, TypeError) as exc:
            raise MalformedDocument(f"not a SPARQL results document: {exc}") from exc
        for binding in bindings:
            if not isinstance(binding, dict):
                raise MalformedDocument("binding is not a map")
            for var in binding:
                if var not in variables:
                    raise MalformedDocument(f"binding variable {var!r} not in head.vars")
        return cls(variables, bindings)


def entity_id_from_iri(iri: str) -> str | None:
    """Q312 from http://www.wikidata.org/entity/Q312, else None."""
    tail = iri.rsplit("/", 1)[-1].rsplit("#", 1)[-1]
    return tail if _ID_TAIL_RE.fullmatch(tail) else None


def _shorten(value: str, value_type: str) -> str:
    if value_type == "uri":
        tail = entity_id_from_iri(value)
        if tail:
            return tail
    return value


class WikidataClient:
    """Stateless client over a transport; see SessionKg for per-session caching."""

    def __init__(self, transport: Transport, property_cap: int = PROPERTY_CAP):
        self._transport = transport
        self._property_cap = property_cap

    # -- searches ---------------------------------------------------------

    def fuzzy_search_entities(
        self, term: str, limit: int = DEFAULT_SEARCH_LIMIT
    ) -> list[EntityMatch]:
        term = term.strip()
        if not term:
            raise EmptyTerm("search term is empty")
        if limit <= 0:
            raise ValueError("limit must be positive")
        body = self._api_json(WIRE_SEARCH, {"search": term, "limit": limit, "language": "en"})
        matches = []
        for rank, item in enumerate(body.get("search", [])):
            matches.append(
                EntityMatch(
                    id=item["id"],
                    label=item.get("label", ""),
                    description=item.get("description", ""),
                    match_rank=rank,
                )
            )
        return matches[:limit]

    def fetch_entity_properties(self, entity_id: str) -> PropertyFetchResult:
        if not is_entity_id(entity_id):
            raise ValueError(f"not a Q-identifier: {entity_id!r}")
        cap = self._property_cap
        query = (
            "SELECT ?prop ?propLabel ?propDescription (SAMPLE(?val) AS ?sample) WHERE {\n"
            f"  wd:{entity_id} ?claim ?val .\n"
            "  ?prop wikibase:directClaim ?claim .\n"
            '  SERVICE wikibase:label { bd:serviceParam wikibase:language "en". }\n'
            "}\n"
            "GROUP BY ?prop ?propLabel ?propDescription\n"
            f"LIMIT {cap + 1}"
        )
        doc = self.execute_sparql(query)
        records = []
        for binding in doc.bindings:
            prop_iri = binding.get("prop", {}).get("value", "")
            pid = entity_id_from_iri(prop_iri)
            if pid is None or not is_property_id(pid):
                continue
            sample = binding.get("sample")
            records.append(
                PropertyRecord(
                    id=pid,
                    label=binding.get("propLabel", {}).get("value", ""),
                    description=binding.get("propDescription", {}).get("value", ""),
                    sample_value=_shorten(sample["value"], sample.get("type", ""))
                    if sample
                    else None,
                )
            )
        if not records:
            # No claims at all: distinguish an empty entity from a missing one.
            body = self._api_json(WIRE_ENTITIES, {"ids": entity_id})
            entry = body.get("entities", {}).get(entity_id, {})
            if "missing" in entry:
                raise UnknownEntity(f"no entity {entity_id} in the knowledge graph")
        truncated = len(records) > cap
        return PropertyFetchResult(tuple(records[:cap]), truncated)

    def traverse(self, entity_id: str, property_id: str) -> list[EntityMatch]:
        if not is_entity_id(entity_id):
            raise ValueError(f"not a Q-identifier: {entity_id!r}")
        if not is_property_id(property_id):
            raise ValueError(f"not a P-identifier: {property_id!r}")
        query = (
            "SELECT ?tail ?tailLabel ?tailDescription WHERE {\n"
            f"  wd:{entity_id} wdt:{property_id} ?tail .\n"
            '  SERVICE wikibase:label { bd:serviceParam wikibase:language "en". }\n'
            "}\n"
            f"LIMIT {TRAVERSAL_LIMIT}"
        )
        doc = self.execute_sparql(query)
        tails = []
        for binding in doc.bindings:
            tail = binding.get("tail", {})
            if tail.get("type") != "uri":
                continue
            tail_id = entity_id_from_iri(tail.get("value", ""))
            if tail_id is None or not is_entity_id(tail_id):
                continue
            tails.append(
                EntityMatch(
                    id=tail_id,
                    label=binding.get("tailLabel", {}).get("value", ""),
                    description=binding.get("tailDescription", {}).get("value", ""),
                    match_rank=len(tails),
                )
            )
        return tails

    def fetch_labels(self, ids: Iterable[str]) -> dict[str, LabelRecord]:
        id_list = list(dict.fromkeys(ids))
        if not id_list:
            raise EmptyInput("no ids to look up")
        for identifier in id_list:
            if not (is_entity_id(identifier) or is_property_id(identifier)):
                raise ValueError(f"not a Q/P identifier: {identifier!r}")
        # Deterministic batching: items first, then properties, numeric order.
        ordered = sorted(id_list, key=lambda i: (i[0] != "Q", int(i[1:])))
        out: dict[str, LabelRecord] = {}
        for start in range(0, len(ordered), LABEL_BATCH_SIZE):
            batch = ordered[start:start + LABEL_BATCH_SIZE]
            body = self._api_json(WIRE_ENTITIES, {"ids": "|".join(batch)})
            entities = body.get("entities", {})
            for identifier in batch:
                entry = entities.get(identifier, {"missing": ""})
                if "missing" in entry:
                    out[identifier] = LabelRecord("", "", missing=True)
                    continue
                label = entry.get("labels", {}).get("en", {}).get("value", "")
                description = entry.get("descriptions", {}).get("en", {}).get("value", "")
                out[identifier] = LabelRecord(label, description)
        return {identifier: out[identifier] for identifier in id_list}

    def execute_sparql(self, query: str, timeout_seconds: float = 60) -> SparqlResultDocument:
        if timeout_seconds <= 0:
            raise ValueError("timeout must be positive")
        response = self._transport.call(WIRE_SPARQL, {"query": query}, timeout=timeout_seconds)
        if 400 <= response.status < 500:
            raise QueryRejected(response.body)
        if response.status != 200:
            raise KgUnavailable(f"query endpoint returned status {response.status}")
        try:
            body = response.json()
        except ValueError as exc:
            raise MalformedDocument("query endpoint returned non-JSON content") from exc
        return SparqlResultDocument.from_wire(body)

    # -- plumbing ----------------------------------------------------------

    def _api_json(self, operation: str, args: dict) -> dict:
        response = self._transport.call(operation, args)
        if response.status != 200:
            raise KgUnavailable(f"{operation} returned status {response.status}")
        try:
            body = response.json()
        except ValueError as exc:
            raise KgUnavailable(f"{operation} returned non-JSON content") from exc
        if "error" in body:
            raise KgUnavailable(f"{operation} error: {body['error'].get('info', 'unknown')}")
        return body


class SessionKg:
    """Per-session caching view over a shared client.

    Within one session an identical (operation, arguments) pair hits the
    network at most once; the cache dies with the session.
    """

    def __init__(self, client: WikidataClient):
        self._client = client
        self._cache: dict = {}
        self._lock = threading.Lock()

    def _cached(self, key: tuple, compute):
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        value = compute()
        with self._lock:
            self._cache.setdefault(key, value)
        return value

    def fuzzy_search_entities(self, term: str, limit: int = DEFAULT_SEARCH_LIMIT):
        return self._cached(
            ("search", term.strip(), limit),
            lambda: self._client.fuzzy_search_entities(term, limit),
        )

    def fetch_entity_properties(self, entity_id: str) -> PropertyFetchResult:
        return self._cached(
            ("properties", entity_id),
            lambda: self._client.fetch_entity_properties(entity_id),
        )

    def traverse(self, entity_id: str, property_id: str):
        return self._cached(
            ("traverse", entity_id, property_id),
            lambda: self._client.traverse(entity_id, property_id),
        )

    def fetch_labels(self, ids: Iterable[str]) -> dict[str, LabelRecord]:
        key = ("labels", tuple(sorted(set(ids))))
        return self._cached(key, lambda: self._client.fetch_labels(key[1]))

    def execute_sparql(self, query: str, timeout_seconds: float = 60) -> SparqlResultDocument:
        return self._cached(
            ("sparql", query), lambda: self._client.execute_sparql(query, timeout_seconds)
        )
