"""HTTP API consumed by the web client.

Responses tag where content came from: ``provenance: kg`` for knowledge-graph
facts (labels, tables, graphs), ``provenance: llm`` for model-written text.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel

from .errors import (
    EmptyInput,
    InvalidQuery,
    KgUnavailable,
    LinkqError,
    LlmUnavailable,
    QueryRejected,
    QueryTimeout,
    ScriptExhausted,
    SessionNotFound,
)
from .protocol import ChatMessage
from .results import to_csv
from .service import MessageDelta, QueryPreviewBundle, RunResult, SessionManager
from .sparql import QueryGraph

_STATUS_BY_ERROR = (
    (SessionNotFound, 404),
    (EmptyInput, 400),
    (InvalidQuery, 400),
    (QueryRejected, 422),
    (QueryTimeout, 504),
    (KgUnavailable, 502),
    (LlmUnavailable, 502),
    (ScriptExhausted, 502),
)


class MessageIn(BaseModel):
    text: str


class QueryIn(BaseModel):
    query: str


def _message_payload(message: ChatMessage) -> dict:
    return {
        "role": message.role,
        "content": message.content,
        "timestamp": message.timestamp.isoformat(),
        "visibility": message.visibility.value,
        "provenance": message.provenance,
    }


def _llm_text(text: str | None) -> dict | None:
    return None if text is None else {"text": text, "provenance": "llm"}


def _delta_payload(delta: MessageDelta) -> dict:
    return {
        "state": delta.state.value,
        "messages": [_message_payload(m) for m in delta.messages],
        "generatedQuery": _llm_text(delta.generated_query),
        "explanation": _llm_text(delta.explanation),
        "resolutionStalled": delta.resolution_stalled,
        "error": delta.error,
    }


def _graph_payload(graph: QueryGraph | None) -> dict | None:
    if graph is None:
        return None
    return {
        "provenance": "kg",
        "nodes": [
            {"key": n.key, "displayLabel": n.display_label, "kind": n.kind}
            for n in graph.nodes
        ],
        "edges": [
            {
                "source": e.source,
                "target": e.target,
                "propertyRef": e.property_ref,
                "displayLabel": e.display_label,
            }
            for e in graph.edges
        ],
    }


def _preview_payload(bundle: QueryPreviewBundle) -> dict:
    if bundle.validation.ok:
        validation = {"ok": True}
    else:
        err = bundle.validation.error
        validation = {
            "ok": False,
            "error": {
                "position": err.position,
                "line": err.line,
                "column": err.column,
                "message": err.message,
            },
        }
    return {
        "query": bundle.query,
        "validation": validation,
        "entityRelationRows": {
            "provenance": "kg",
            "rows": [
                {
                    "id": row.id,
                    "kind": row.kind,
                    "label": row.label,
                    "description": row.description,
                }
                for row in bundle.entity_relation_rows
            ],
        },
        "queryGraph": _graph_payload(bundle.query_graph),
        "labelsUnavailable": bundle.labels_unavailable,
    }


def _run_payload(session_id: str, run: RunResult) -> dict:
    return {
        "query": run.query,
        "table": {
            "provenance": "kg",
            "columns": list(run.table.columns),
            "rows": [list(row) for row in run.table.rows],
            "sourceRowCount": run.table.source_row_count,
        },
        "summary": _llm_text(run.summary),
        "summaryError": run.summary_error,
        "csv": f"/sessions/{session_id}/results/latest.csv",
    }


def create_app(manager: SessionManager, frontend_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="linkq", version="0.1.0")

    @app.exception_handler(LinkqError)
    async def _handle_linkq_error(request: Request, exc: LinkqError) -> JSONResponse:
        status = 500
        for error_type, code in _STATUS_BY_ERROR:
            if isinstance(exc, error_type):
                status = code
                break
        payload = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        if isinstance(exc, InvalidQuery) and exc.position is not None:
            payload["error"]["position"] = exc.position
        return JSONResponse(payload, status_code=status)

    @app.post("/sessions")
    def create_session() -> dict:
        return {"sessionId": manager.create_session()}

    @app.post("/sessions/{session_id}/messages")
    def post_message(session_id: str, body: MessageIn) -> dict:
        return _delta_payload(manager.post_message(session_id, body.text))

    @app.post("/sessions/{session_id}/preview")
    def preview(session_id: str, body: QueryIn) -> dict:
        return _preview_payload(manager.preview_query(session_id, body.query))

    @app.post("/sessions/{session_id}/run")
    def run(session_id: str, body: QueryIn) -> dict:
        return _run_payload(session_id, manager.run_query(session_id, body.query))

    @app.get("/sessions/{session_id}/history")
    def history(session_id: str) -> dict:
        return {
            "history": [
                {
                    "query": entry.query,
                    "origin": entry.origin,
                    "createdAt": entry.created_at.isoformat(),
                    "executed": entry.executed,
                }
                for entry in manager.get_history(session_id)
            ]
        }

    @app.get("/sessions/{session_id}/transcript")
    def transcript(
        session_id: str, includeInternal: bool = Query(default=False)
    ) -> dict:
        messages = manager.get_transcript(session_id, include_internal=includeInternal)
        return {"messages": [_message_payload(m) for m in messages]}

    @app.get("/sessions/{session_id}/results/latest.csv")
    def latest_csv(session_id: str) -> Response:
        table = manager.latest_table(session_id)
        if table is None:
            return JSONResponse(
                {"error": {"type": "NoResults", "message": "no results yet"}},
                status_code=404,
            )
        return Response(
            content=to_csv(table),
            media_type="text/csv",
            headers={"Content-Disposition": 'attachment; filename="results.csv"'},
        )

    if frontend_dir and Path(frontend_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="ui")

    return app
