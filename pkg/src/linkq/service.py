"""Multi-session orchestration: the operations behind the HTTP API and CLI.

Requests for different sessions run concurrently; requests for one session
are serialized with a per-session lock. The generated query and whatever the
user edits or runs are always distinct values: nothing here ever overwrites
the model's query with the user's text or vice versa.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Callable

from .config import Config
from .errors import (
    InvalidQuery,
    KgUnavailable,
    LlmUnavailable,
    NoQueryBlock,
    QueryRejected,
    QueryTimeout,
    ScriptExhausted,
    SessionNotFound,
)
from .kg.client import LabelRecord, SessionKg, WikidataClient
from .llm import LlmClient
from .protocol import (
    ChatMessage,
    ProtocolEngine,
    ProtocolState,
    QueryHistoryEntry,
    SessionState,
)
from .results import ResultTable, clean_results, summarize
from .sparql import (
    QueryGraph,
    ValidationResult,
    build_query_graph,
    extract_bgp,
    extract_ids,
    validate,
)


@dataclass(frozen=True)
class EntityRelationRow:
    id: str
    kind: str  # entity | property
    label: str
    description: str


@dataclass
class QueryPreviewBundle:
    """Everything the preview panel needs: validation, ID table, query graph."""

    query: str
    validation: ValidationResult
    entity_relation_rows: list[EntityRelationRow] = field(default_factory=list)
    query_graph: QueryGraph | None = None
    labels_unavailable: bool = False


@dataclass
class MessageDelta:
    """Everything new that one chat turn produced."""

    messages: list[ChatMessage]
    state: ProtocolState
    generated_query: str | None = None
    explanation: str | None = None
    resolution_stalled: bool = False
    error: dict | None = None


@dataclass
class RunResult:
    query: str
    table: ResultTable
    summary: str | None
    summary_error: str | None = None


class _Session:
    def __init__(self, state: SessionState, kg: SessionKg):
        self.state = state
        self.kg = kg
        self.lock = threading.Lock()
        self.last_active = time.monotonic()
        self.latest_table: ResultTable | None = None


class SessionManager:
    def __init__(
        self,
        llm: LlmClient,
        kg_client: WikidataClient,
        config: Config | None = None,
        clock: Callable[[], datetime] | None = None,
    ):
        self.config = config or Config()
        self.llm = llm
        self.kg_client = kg_client
        self.engine = ProtocolEngine(llm, self.config, clock)
        self._sessions: dict[str, _Session] = {}
        self._registry_lock = threading.Lock()

    # -- session lifecycle -------------------------------------------------

    def create_session(self) -> str:
        session_id = uuid.uuid4().hex
        state = self.engine.new_session(session_id)
        session = _Session(state, SessionKg(self.kg_client))
        with self._registry_lock:
            self._evict_idle()
            self._sessions[session_id] = session
        self._log_event(session_id, "created", {})
        return session_id

    def _get(self, session_id: str) -> _Session:
        with self._registry_lock:
            self._evict_idle()
            session = self._sessions.get(session_id)
            if session is None:
                raise SessionNotFound(session_id)
            session.last_active = time.monotonic()
            return session

    def _evict_idle(self) -> None:
        deadline = time.monotonic() - self.config.session_idle_seconds
        stale = [sid for sid, s in self._sessions.items() if s.last_active < deadline]
        for sid in stale:
            del self._sessions[sid]

    # -- chat --------------------------------------------------------------

    def post_message(self, session_id: str, text: str) -> MessageDelta:
        """Drive the protocol as far as this turn goes: possibly all the way
        from chat through grounding to a generated query."""
        session = self._get(session_id)
        with session.lock:
            state = session.state
            start = len(state.messages)
            if state.state is ProtocolState.AWAITING_USER_RUN_DECISION:
                # The user kept chatting instead of running the pending query.
                state.transition(ProtocolState.CHATTING)
            generated_query = None
            explanation = None
            error = None
            try:
                self.engine.step_chat(state, session.kg, text)
                if state.state is ProtocolState.GENERATING_QUERY:
                    generated_query, explanation = self.engine.generate_query(state)
            except (LlmUnavailable, KgUnavailable, NoQueryBlock, ScriptExhausted) as exc:
                error = {"type": type(exc).__name__, "message": str(exc)}
            new_messages = list(state.messages[start:])
            delta = MessageDelta(
                messages=new_messages,
                state=state.state,
                generated_query=generated_query,
                explanation=explanation,
                resolution_stalled=state.resolution_stalled,
                error=error,
            )
        for message in new_messages:
            self._log_event(session_id, "message", _message_dict(message))
        return delta

    # -- preview -------------------------------------------------------------

    def preview_query(self, session_id: str, query: str) -> QueryPreviewBundle:
        session = self._get(session_id)
        validation = validate(query)
        if not validation.ok:
            return QueryPreviewBundle(query=query, validation=validation)
        inventory = extract_ids(query)
        ordered_ids = list(inventory.entity_ids) + list(inventory.property_ids)
        labels: dict[str, LabelRecord] = {}
        labels_unavailable = False
        if ordered_ids:
            try:
                labels = session.kg.fetch_labels(ordered_ids)
            except KgUnavailable:
                labels_unavailable = True
                labels = {i: LabelRecord("", "", missing=True) for i in ordered_ids}
        rows = [
            EntityRelationRow(
                id=identifier,
                kind="entity" if identifier in inventory.entity_ids else "property",
                label=labels[identifier].label,
                description=labels[identifier].description,
            )
            for identifier in ordered_ids
        ]
        triples = extract_bgp(query)
        graph = build_query_graph(triples, labels)
        return QueryPreviewBundle(
            query=query,
            validation=validation,
            entity_relation_rows=rows,
            query_graph=graph,
            labels_unavailable=labels_unavailable,
        )

    # -- execution -------------------------------------------------------------

    def run_query(self, session_id: str, query: str, timeout_seconds: float = 60) -> RunResult:
        session = self._get(session_id)
        with session.lock:
            state = session.state
            validation = validate(query)
            if not validation.ok:
                raise InvalidQuery(
                    validation.error.describe(), position=validation.error.position
                )
            entry = next((e for e in reversed(state.history) if e.query == query), None)
            if entry is None:
                entry = QueryHistoryEntry(
                    query=query, origin="userEdited", created_at=self.engine.clock()
                )
                state.history.append(entry)
                self._log_event(session_id, "history", {"query": query, "origin": entry.origin})
            state.transition(ProtocolState.EXECUTING_QUERY, validated_query=query)
            try:
                doc = session.kg.execute_sparql(query, timeout_seconds)
            except (QueryRejected, QueryTimeout, KgUnavailable):
                state.transition(ProtocolState.CHATTING)
                raise
            state.transition(ProtocolState.SUMMARIZING)
            table = clean_results(doc)
            entry.executed = True
            session.latest_table = table
            summary = None
            summary_error = None
            try:
                summary = summarize(
                    state.last_user_text(),
                    query,
                    table,
                    self.llm,
                    self.config.llm_model,
                    row_cap=self.config.summary_row_cap,
                )
            except (LlmUnavailable, ScriptExhausted) as exc:
                summary_error = str(exc)
            state.transition(ProtocolState.CHATTING)
            self._log_event(session_id, "executed", {"query": query, "rows": len(table.rows)})
            return RunResult(query=query, table=table, summary=summary, summary_error=summary_error)

    # -- accessors ----------------------------------------------------------------

    def get_history(self, session_id: str) -> list[QueryHistoryEntry]:
        session = self._get(session_id)
        with session.lock:
            return list(session.state.history)

    def get_transcript(self, session_id: str, include_internal: bool = False) -> list[ChatMessage]:
        session = self._get(session_id)
        with session.lock:
            return session.state.transcript(include_internal)

    def get_generated_query(self, session_id: str) -> tuple[str | None, str | None]:
        session = self._get(session_id)
        with session.lock:
            return session.state.latest_query, session.state.latest_explanation

    def latest_table(self, session_id: str) -> ResultTable | None:
        session = self._get(session_id)
        with session.lock:
            return session.latest_table

    # -- optional append-only persistence --------------------------------------

    def _log_event(self, session_id: str, kind: str, payload: dict) -> None:
        directory = self.config.session_log_dir
        if not directory:
            return
        path = Path(directory)
        path.mkdir(parents=True, exist_ok=True)
        record = {"at": self.engine.clock().isoformat(), "kind": kind, **payload}
        with (path / f"{session_id}.jsonl").open("a", encoding="utf-8") as handle:
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")


def _message_dict(message: ChatMessage) -> dict:
    return {
        "role": message.role,
        "content": message.content,
        "timestamp": message.timestamp.isoformat(),
        "visibility": message.visibility.value,
        "provenance": message.provenance,
    }
