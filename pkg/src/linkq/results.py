"""Turns raw query result documents into the two result modalities: a
cleaned exportable table and a model-written text summary."""

from __future__ import annotations

from dataclasses import dataclass

from . import prompts
from .errors import MalformedDocument
from .kg.client import SparqlResultDocument, entity_id_from_iri
from .llm import CompletionRequest, LlmClient


@dataclass(frozen=True)
class ResultTable:
    """Plain-text tabular results: no type tags, datatypes, or language tags."""

    columns: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]
    source_row_count: int

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError("every row must have exactly one cell per column")


def _cell_value(binding_entry: dict) -> str:
    value = binding_entry.get("value", "")
    if binding_entry.get("type") == "uri":
        # Entity IRIs are shown as their bare identifier; the *Label columns
        # carry the human-readable text.
        short = entity_id_from_iri(value)
        if short:
            return short
    return value


def clean_results(doc: SparqlResultDocument) -> ResultTable:
    """Column order follows the document's variable order; unbound variables
    become empty cells."""
    if not isinstance(doc, SparqlResultDocument):
        raise MalformedDocument("expected a SparqlResultDocument")
    rows = []
    for binding in doc.bindings:
        row = []
        for var in doc.variables:
            entry = binding.get(var)
            if entry is None:
                row.append("")
                continue
            if not isinstance(entry, dict):
                raise MalformedDocument(f"binding for {var!r} is not a map")
            row.append(_cell_value(entry))
        rows.append(tuple(row))
    return ResultTable(tuple(doc.variables), tuple(rows), len(doc.bindings))


def _csv_field(text: str) -> str:
    if any(ch in text for ch in (',', '"', '\r', '\n')):
        return '"' + text.replace('"', '""') + '"'
    return text


def _csv_line(cells) -> str:
    line = ",".join(_csv_field(cell) for cell in cells)
    # A lone empty field would serialize as a blank line, which readers treat
    # as no record at all; quote it to keep the row.
    return '""' if line == "" else line


def to_csv(table: ResultTable) -> str:
    """RFC-4180 text: header row, CRLF line endings, minimal quoting."""
    lines = [_csv_line(table.columns)]
    lines.extend(_csv_line(row) for row in table.rows)
    return "\r\n".join(lines) + "\r\n"


def summarize(
    question: str,
    query: str,
    table: ResultTable,
    llm: LlmClient,
    model: str,
    row_cap: int | None = None,
) -> str:
    """One short paragraph about the results; for an empty table the prompt
    asks for a best guess at what went wrong instead."""
    kwargs = {} if row_cap is None else {"row_cap": row_cap}
    prompt = prompts.render_summary_prompt(question, query, table, **kwargs)
    request = CompletionRequest(messages=[{"role": "system", "content": prompt}], model=model)
    return llm.complete(request)
