"""The conversation state machine and the model/system message protocol.

A session moves from open-ended chat into a grounding loop where the model
must fetch every entity and property ID from the knowledge graph before it
is allowed to write a query. Identifiers the model merely asserts can never
enter the resolved context; only identifiers returned by the KG can.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Callable

from . import prompts
from .config import Config
from .directives import (
    BuildQuery,
    Directive,
    EntityPropertySearch,
    EntitySearch,
    LEGAL_FORMS,
    PropertiesSearch,
    Stop,
    parse_directive,
)
from .errors import (
    EmptyInput,
    GroundingViolation,
    IllegalTransition,
    KgUnavailable,
    LlmUnavailable,
    MalformedDirective,
    NoQueryBlock,
    ScriptExhausted,
    UnknownEntity,
)
from .kg.client import EntityMatch, PropertyRecord, SessionKg
from .llm import CompletionRequest, LlmClient, Message

logger = logging.getLogger(__name__)

# After this many corrective nudges in one resolution run, a bad reply is
# treated as STOP instead of being corrected again.
MAX_CORRECTIONS = 2

BUILD_QUERY_MARKER = "BUILD QUERY"

_FENCE_RE = re.compile(r"```sparql[ \t]*\n(.*?)\n?```", re.DOTALL)


class ProtocolState(Enum):
    CHATTING = "Chatting"
    RESOLVING_IDS = "ResolvingIds"
    GENERATING_QUERY = "GeneratingQuery"
    AWAITING_USER_RUN_DECISION = "AwaitingUserRunDecision"
    EXECUTING_QUERY = "ExecutingQuery"
    SUMMARIZING = "Summarizing"


# Normal workflow plus the error-recovery edges back to Chatting (KG outage
# during resolution, missing query block, failed execution).
ALLOWED_TRANSITIONS: dict[ProtocolState, frozenset[ProtocolState]] = {
    ProtocolState.CHATTING: frozenset(
        {ProtocolState.RESOLVING_IDS, ProtocolState.EXECUTING_QUERY}
    ),
    ProtocolState.RESOLVING_IDS: frozenset(
        {ProtocolState.RESOLVING_IDS, ProtocolState.GENERATING_QUERY, ProtocolState.CHATTING}
    ),
    ProtocolState.GENERATING_QUERY: frozenset(
        {ProtocolState.AWAITING_USER_RUN_DECISION, ProtocolState.CHATTING}
    ),
    ProtocolState.AWAITING_USER_RUN_DECISION: frozenset(
        {ProtocolState.EXECUTING_QUERY, ProtocolState.CHATTING}
    ),
    ProtocolState.EXECUTING_QUERY: frozenset(
        {ProtocolState.SUMMARIZING, ProtocolState.CHATTING}
    ),
    ProtocolState.SUMMARIZING: frozenset({ProtocolState.CHATTING}),
}


class Visibility(Enum):
    SHOWN = "shown"
    INTERNAL = "internalProtocol"


@dataclass(frozen=True)
class ChatMessage:
    role: str  # system | user | assistant
    content: str
    timestamp: datetime
    visibility: Visibility = Visibility.SHOWN
    provenance: str = "system"  # user | llm | kg | system


@dataclass(frozen=True)
class SearchRecord:
    directive: Directive
    response_text: str
    returned_ids: frozenset[str]


class ResolvedContext:
    """Ground-truth identifiers gathered during resolution.

    ``record`` logs one directive/response exchange; only identifiers that
    appeared in a logged KG response can subsequently be added.
    """

    def __init__(self):
        self.entities: dict[str, EntityMatch] = {}
        self.properties: dict[str, PropertyRecord] = {}
        self.traversals: list[tuple[str, str, str]] = []
        self.search_log: list[SearchRecord] = []
        self._seen_ids: set[str] = set()

    def record(self, directive: Directive, response_text: str, returned_ids) -> None:
        ids = frozenset(returned_ids)
        self.search_log.append(SearchRecord(directive, response_text, ids))
        self._seen_ids.update(ids)

    def _require_grounded(self, identifier: str) -> None:
        if identifier not in self._seen_ids:
            raise GroundingViolation(
                f"{identifier} was never returned by the knowledge graph"
            )

    def add_entity(self, match: EntityMatch) -> None:
        self._require_grounded(match.id)
        self.entities.setdefault(match.id, match)

    def add_property(self, record: PropertyRecord) -> None:
        self._require_grounded(record.id)
        self.properties.setdefault(record.id, record)

    def add_traversal(self, head_id: str, property_id: str, tail_id: str) -> None:
        self.traversals.append((head_id, property_id, tail_id))

    def all_ids(self) -> set[str]:
        return set(self.entities) | set(self.properties)


@dataclass
class QueryHistoryEntry:
    query: str
    origin: str  # llmGenerated | userEdited
    created_at: datetime
    executed: bool = False


@dataclass
class SessionState:
    """One conversation. Callers serialize operations on a session; distinct
    sessions are independent."""

    session_id: str
    state: ProtocolState = ProtocolState.CHATTING
    messages: list[ChatMessage] = field(default_factory=list)
    resolved: ResolvedContext | None = None
    history: list[QueryHistoryEntry] = field(default_factory=list)
    latest_query: str | None = None
    latest_explanation: str | None = None
    resolution_stalled: bool = False
    resolution_empty: bool = False

    def transition(self, new_state: ProtocolState, validated_query: str | None = None) -> None:
        if new_state not in ALLOWED_TRANSITIONS[self.state]:
            raise IllegalTransition(f"{self.state.value} -> {new_state.value}")
        if new_state is ProtocolState.EXECUTING_QUERY and validated_query is None:
            raise IllegalTransition(
                "a query must pass validation before execution can start"
            )
        self.state = new_state

    def append(self, message: ChatMessage) -> None:
        self.messages.append(message)

    def transcript(self, include_internal: bool = False) -> list[ChatMessage]:
        if include_internal:
            return list(self.messages)
        return [m for m in self.messages if m.visibility is Visibility.SHOWN]

    def wire_messages(self) -> list[Message]:
        return [{"role": m.role, "content": m.content} for m in self.messages]

    def last_user_text(self) -> str:
        for message in reversed(self.messages):
            if message.role == "user":
                return message.content
        return ""


def _extract_fenced_query(reply: str) -> tuple[str | None, str]:
    """First fenced query block plus the prose after the last fence."""
    matches = list(_FENCE_RE.finditer(reply))
    if not matches:
        return None, ""
    if len(matches) > 1:
        logger.info("assistant reply contained %d fenced blocks; using the first", len(matches))
    explanation = reply[matches[-1].end():].strip()
    return matches[0].group(1), explanation


class ProtocolEngine:
    """Drives sessions through the state machine, one operation at a time."""

    def __init__(
        self,
        llm: LlmClient,
        config: Config,
        clock: Callable[[], datetime] | None = None,
    ):
        self.llm = llm
        self.config = config
        self.clock = clock or (lambda: datetime.now(timezone.utc))

    # -- session setup ------------------------------------------------------

    def new_session(self, session_id: str) -> SessionState:
        date_text = self.clock().strftime("%Y-%m-%d")
        system_prompt = prompts.render(prompts.INITIAL_SYSTEM, {"date": date_text})
        session = SessionState(session_id=session_id)
        session.append(self._message("system", system_prompt, Visibility.INTERNAL, "system"))
        return session

    # -- chat ---------------------------------------------------------------

    def step_chat(self, session: SessionState, kg: SessionKg, user_text: str) -> str:
        """One user turn. A reply containing BUILD QUERY switches the session
        into the grounding loop and runs it to completion."""
        if session.state is not ProtocolState.CHATTING:
            raise IllegalTransition(f"cannot chat while {session.state.value}")
        if not user_text.strip():
            raise EmptyInput("message text is empty")
        session.append(self._message("user", user_text, Visibility.SHOWN, "user"))
        reply = self._complete(session)
        if BUILD_QUERY_MARKER in reply:
            session.append(self._message("assistant", reply, Visibility.INTERNAL, "llm"))
            session.transition(ProtocolState.RESOLVING_IDS)
            id_prompt = prompts.render(prompts.ID_IDENTIFICATION, {})
            session.append(self._message("system", id_prompt, Visibility.INTERNAL, "system"))
            self.run_id_resolution(session, kg)
        else:
            session.append(self._message("assistant", reply, Visibility.SHOWN, "llm"))
        return reply

    # -- grounding loop -------------------------------------------------------

    def run_id_resolution(self, session: SessionState, kg: SessionKg) -> ResolvedContext:
        """Ask-search-repeat until the model says STOP or the iteration cap
        is reached; every returned identifier lands in the resolved context."""
        if session.state is not ProtocolState.RESOLVING_IDS:
            raise IllegalTransition(f"cannot resolve IDs while {session.state.value}")
        context = ResolvedContext()
        session.resolved = context
        session.resolution_stalled = False
        corrections = 0
        for _ in range(self.config.max_resolution_iterations):
            reply = self._complete_or_abort(session)
            session.append(self._message("assistant", reply, Visibility.INTERNAL, "llm"))
            try:
                directive = parse_directive(reply)
            except MalformedDirective:
                directive = None
            if directive is None or isinstance(directive, BuildQuery):
                if corrections >= MAX_CORRECTIONS:
                    logger.info("correction budget exhausted; treating reply as STOP")
                    break
                corrections += 1
                session.append(
                    self._message("system", _corrective_text(), Visibility.INTERNAL, "system")
                )
                continue
            if isinstance(directive, Stop):
                break
            session.transition(ProtocolState.RESOLVING_IDS)
            try:
                response_text = self._dispatch_search(directive, kg, context)
            except KgUnavailable as exc:
                session.append(
                    self._message(
                        "system",
                        f"The knowledge graph service is unavailable: {exc}",
                        Visibility.SHOWN,
                        "system",
                    )
                )
                session.transition(ProtocolState.CHATTING)
                raise
            session.append(self._message("system", response_text, Visibility.INTERNAL, "kg"))
        else:
            session.resolution_stalled = True
            logger.warning(
                "resolution stalled after %d iterations without STOP",
                self.config.max_resolution_iterations,
            )
        session.resolution_empty = not context.all_ids()
        session.transition(ProtocolState.GENERATING_QUERY)
        return context

    def _dispatch_search(
        self, directive: Directive, kg: SessionKg, context: ResolvedContext
    ) -> str:
        if isinstance(directive, EntitySearch):
            matches = kg.fuzzy_search_entities(directive.term)
            text = _format_entity_matches(directive.term, matches)
            context.record(directive, text, (m.id for m in matches))
            for match in matches:
                context.add_entity(match)
            return text
        if isinstance(directive, PropertiesSearch):
            try:
                result = kg.fetch_entity_properties(directive.entity_id)
            except UnknownEntity:
                text = f"The knowledge graph has no entity with ID {directive.entity_id}."
                context.record(directive, text, ())
                return text
            text = _format_properties(directive.entity_id, result.records, result.truncated)
            context.record(directive, text, (p.id for p in result.records))
            for record in result.records:
                context.add_property(record)
            return text
        if isinstance(directive, EntityPropertySearch):
            tails = kg.traverse(directive.entity_id, directive.property_id)
            text = _format_tails(directive.entity_id, directive.property_id, tails)
            context.record(directive, text, (t.id for t in tails))
            for tail in tails:
                context.add_entity(tail)
                context.add_traversal(directive.entity_id, directive.property_id, tail.id)
            return text
        raise TypeError(f"not a search directive: {directive!r}")

    # -- query generation -----------------------------------------------------

    def generate_query(self, session: SessionState) -> tuple[str, str]:
        """Render the query prompt, extract the fenced query and the trailing
        explanation, and hand the decision to the user."""
        if session.state is not ProtocolState.GENERATING_QUERY:
            raise IllegalTransition(f"cannot generate a query while {session.state.value}")
        question = session.last_user_text()
        query_prompt = prompts.render(prompts.QUERY_GENERATION, {"text": question})
        session.append(self._message("system", query_prompt, Visibility.INTERNAL, "system"))

        reply = self._complete_or_abort(session)
        session.append(self._message("assistant", reply, Visibility.INTERNAL, "llm"))
        query, explanation = _extract_fenced_query(reply)
        if query is None:
            session.append(
                self._message(
                    "system",
                    "Your reply must contain the SPARQL query in a fenced block "
                    "starting with ```sparql and ending with ```.",
                    Visibility.INTERNAL,
                    "system",
                )
            )
            reply = self._complete_or_abort(session)
            session.append(self._message("assistant", reply, Visibility.INTERNAL, "llm"))
            query, explanation = _extract_fenced_query(reply)
            if query is None:
                session.transition(ProtocolState.CHATTING)
                raise NoQueryBlock("assistant reply lacked a ```sparql fenced block")

        session.history.append(
            QueryHistoryEntry(query=query, origin="llmGenerated", created_at=self.clock())
        )
        session.latest_query = query
        session.latest_explanation = explanation
        if explanation:
            session.append(self._message("assistant", explanation, Visibility.SHOWN, "llm"))
        session.transition(ProtocolState.AWAITING_USER_RUN_DECISION)
        return query, explanation

    # -- plumbing ---------------------------------------------------------------

    def _complete(self, session: SessionState) -> str:
        request = CompletionRequest(
            messages=session.wire_messages(), model=self.config.llm_model
        )
        return self.llm.complete(request)

    def _complete_or_abort(self, session: SessionState) -> str:
        """Completion inside a protocol phase: on model failure the session
        falls back to chatting instead of wedging mid-phase."""
        try:
            return self._complete(session)
        except (LlmUnavailable, ScriptExhausted):
            session.append(
                self._message(
                    "system",
                    "The language model service is unavailable; returning to chat.",
                    Visibility.SHOWN,
                    "system",
                )
            )
            session.transition(ProtocolState.CHATTING)
            raise

    def _message(
        self, role: str, content: str, visibility: Visibility, provenance: str
    ) -> ChatMessage:
        return ChatMessage(
            role=role,
            content=content,
            timestamp=self.clock(),
            visibility=visibility,
            provenance=provenance,
        )


def _corrective_text() -> str:
    forms = "\n".join(f"- {form}" for form in LEGAL_FORMS)
    return (
        "Your last message was not a valid search command. "
        "Respond with exactly one of these forms and nothing else:\n" + forms
    )


def _format_entity_matches(term: str, matches: list[EntityMatch]) -> str:
    if not matches:
        return f"No entities found for '{term}'."
    lines = [f"Entity matches for '{term}':"]
    for match in matches:
        lines.append(f"{match.id}: {match.label} ({match.description})")
    return "\n".join(lines)


def _format_properties(entity_id: str, records, truncated: bool) -> str:
    if not records:
        return f"{entity_id} has no properties."
    lines = [f"Properties of {entity_id}:"]
    for record in records:
        line = f"{record.id}: {record.label} ({record.description})"
        if record.sample_value:
            line += f" [example value: {record.sample_value}]"
        lines.append(line)
    if truncated:
        lines.append("(list truncated)")
    return "\n".join(lines)


def _format_tails(entity_id: str, property_id: str, tails: list[EntityMatch]) -> str:
    if not tails:
        return f"No entities are connected to {entity_id} via {property_id}."
    lines = [f"Entities connected to {entity_id} via {property_id}:"]
    for tail in tails:
        lines.append(f"{tail.id}: {tail.label} ({tail.description})")
    return "\n".join(lines)
