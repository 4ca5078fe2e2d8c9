"""The fixed-prefix command language the model uses to talk to the system.

A directive is one assistant message that starts with one of five literal
prefixes: ``ENTITY SEARCH:``, ``PROPERTIES SEARCH:``,
``ENTITY PROPERTY SEARCH:``, ``STOP`` or ``BUILD QUERY``. Anything else is
ordinary prose. Prefixes are matched case-sensitively and only at the start
of the message, so a directive quoted mid-explanation never triggers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .errors import MalformedDirective

Q_ID_RE = re.compile(r"Q[0-9]+")
P_ID_RE = re.compile(r"P[0-9]+")


def is_entity_id(text: str) -> bool:
    return Q_ID_RE.fullmatch(text) is not None


def is_property_id(text: str) -> bool:
    return P_ID_RE.fullmatch(text) is not None


def _validate_term(term: str) -> None:
    if term != term.strip() or not term:
        raise ValueError("search term must be non-empty and trimmed")
    if term.endswith("."):
        # A trailing period would be eaten by the parser's tolerance rule,
        # breaking render/parse round-trips.
        raise ValueError("search term must not end with a period")


@dataclass(frozen=True)
class EntitySearch:
    """Fuzzy-search the KG for entities matching a free-text name."""

    term: str

    def __post_init__(self):
        _validate_term(self.term)


@dataclass(frozen=True)
class PropertiesSearch:
    """List the properties asserted on one entity."""

    entity_id: str

    def __post_init__(self):
        if not is_entity_id(self.entity_id):
            raise ValueError(f"not a Q-identifier: {self.entity_id!r}")


@dataclass(frozen=True)
class EntityPropertySearch:
    """Traverse from a head entity along a property to its tail entities."""

    entity_id: str
    property_id: str

    def __post_init__(self):
        if not is_entity_id(self.entity_id):
            raise ValueError(f"not a Q-identifier: {self.entity_id!r}")
        if not is_property_id(self.property_id):
            raise ValueError(f"not a P-identifier: {self.property_id!r}")


@dataclass(frozen=True)
class Stop:
    """The model has all the IDs it needs."""


@dataclass(frozen=True)
class BuildQuery:
    """The model is ready to leave chat and start the grounding workflow."""


Directive = Union[EntitySearch, PropertiesSearch, EntityPropertySearch, Stop, BuildQuery]

ENTITY_SEARCH_PREFIX = "ENTITY SEARCH:"
PROPERTIES_SEARCH_PREFIX = "PROPERTIES SEARCH:"
ENTITY_PROPERTY_SEARCH_PREFIX = "ENTITY PROPERTY SEARCH:"
STOP_KEYWORD = "STOP"
BUILD_QUERY_KEYWORD = "BUILD QUERY"

#: The four legal reply forms during ID resolution, used in corrective messages.
LEGAL_FORMS = (
    "ENTITY SEARCH: <entity name>",
    "PROPERTIES SEARCH: <entity ID>",
    "ENTITY PROPERTY SEARCH: <entity ID> <property ID>",
    "STOP",
)


def _strip_trailing_period(text: str) -> str:
    # Tolerate exactly one trailing period; the prompt forbids it but
    # models emit it anyway.
    if text.endswith("."):
        return text[:-1].rstrip()
    return text


def _keyword_at_start(text: str, keyword: str) -> bool:
    if not text.startswith(keyword):
        return False
    rest = text[len(keyword):]
    return not rest or not rest[0].isalnum()


def parse_directive(assistant_text: str) -> Directive | None:
    """Parse one full assistant message into a directive.

    Returns None for ordinary prose. Raises MalformedDirective when a
    recognized prefix is present but its arguments fail ID syntax; the
    caller is expected to relay a corrective message to the model.
    """
    text = assistant_text.strip()

    if text.startswith(ENTITY_PROPERTY_SEARCH_PREFIX):
        args = _strip_trailing_period(text[len(ENTITY_PROPERTY_SEARCH_PREFIX):].strip())
        parts = args.split()
        if len(parts) != 2 or not is_entity_id(parts[0]) or not is_property_id(parts[1]):
            raise MalformedDirective(
                f"ENTITY PROPERTY SEARCH needs one entity ID and one property ID, got {args!r}"
            )
        return EntityPropertySearch(parts[0], parts[1])

    if text.startswith(PROPERTIES_SEARCH_PREFIX):
        arg = _strip_trailing_period(text[len(PROPERTIES_SEARCH_PREFIX):].strip())
        if not is_entity_id(arg):
            raise MalformedDirective(f"PROPERTIES SEARCH needs an entity ID, got {arg!r}")
        return PropertiesSearch(arg)

    if text.startswith(ENTITY_SEARCH_PREFIX):
        term = _strip_trailing_period(text[len(ENTITY_SEARCH_PREFIX):].strip())
        if not term:
            raise MalformedDirective("ENTITY SEARCH needs a non-empty search term")
        return EntitySearch(term)

    if _keyword_at_start(text, BUILD_QUERY_KEYWORD):
        return BuildQuery()

    if _keyword_at_start(text, STOP_KEYWORD):
        return Stop()

    return None


def render_directive(d: Directive) -> str:
    """Emit the canonical textual form, with no trailing period."""
    if isinstance(d, EntitySearch):
        return f"{ENTITY_SEARCH_PREFIX} {d.term}"
    if isinstance(d, PropertiesSearch):
        return f"{PROPERTIES_SEARCH_PREFIX} {d.entity_id}"
    if isinstance(d, EntityPropertySearch):
        return f"{ENTITY_PROPERTY_SEARCH_PREFIX} {d.entity_id} {d.property_id}"
    if isinstance(d, Stop):
        return STOP_KEYWORD
    if isinstance(d, BuildQuery):
        return BUILD_QUERY_KEYWORD
    raise TypeError(f"not a directive: {d!r}")
