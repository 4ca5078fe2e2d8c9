"""Prompt templates, loaded from text files so edits need no code change.

The results-summary template is our own wording: it must ask for a succinct
summary when there are rows, and for a best guess at what went wrong when
there are none.
"""

from __future__ import annotations

from importlib import resources
from typing import TYPE_CHECKING, Mapping

from ..config import SUMMARY_ROW_CAP
from ..errors import MissingBinding

if TYPE_CHECKING:
    from ..results import ResultTable

INITIAL_SYSTEM = "initialSystem"
ID_IDENTIFICATION = "idIdentification"
QUERY_GENERATION = "queryGeneration"
RESULTS_SUMMARY = "resultsSummary"

_TEMPLATE_FILES = {
    INITIAL_SYSTEM: "initial_system.txt",
    ID_IDENTIFICATION: "id_identification.txt",
    QUERY_GENERATION: "query_generation.txt",
    RESULTS_SUMMARY: "results_summary.txt",
}

# Placeholders each template is allowed to reference. Substitution is by
# literal marker, never str.format, because the SPARQL examples are full of
# braces that must survive untouched.
_TEMPLATE_PLACEHOLDERS = {
    INITIAL_SYSTEM: ("date",),
    ID_IDENTIFICATION: (),
    QUERY_GENERATION: ("text",),
    RESULTS_SUMMARY: ("question", "query", "guidance", "results"),
}

SUMMARIZE_GUIDANCE = (
    "Succinctly summarize the query results below for the user in one short "
    "paragraph, relating them back to the user's question."
)
DIAGNOSE_GUIDANCE = (
    "The query returned no results. Provide a best guess for what could have "
    "gone wrong with the query, for example incorrect entity or property IDs, "
    "wrong units or datatypes, or data missing from Wikidata."
)


def template_ids() -> tuple[str, ...]:
    return tuple(_TEMPLATE_FILES)


def template_body(template_id: str) -> str:
    """Raw template text with placeholders unresolved."""
    try:
        fname = _TEMPLATE_FILES[template_id]
    except KeyError:
        raise KeyError(f"unknown template id: {template_id!r}") from None
    text = (resources.files(__package__) / "templates" / fname).read_text(encoding="utf-8")
    # Text files carry one final newline; templates are used inline.
    return text[:-1] if text.endswith("\n") else text


def render(template_id: str, bindings: Mapping[str, str]) -> str:
    """Substitute every declared placeholder; unbound ones are an error."""
    body = template_body(template_id)
    names = _TEMPLATE_PLACEHOLDERS[template_id]
    for name in names:
        if name not in bindings:
            raise MissingBinding(f"template {template_id!r} needs a value for {{{name}}}")
        body = body.replace("{" + name + "}", str(bindings[name]))
    for name in names:
        if "{" + name + "}" in body:
            raise MissingBinding(f"placeholder {{{name}}} survived substitution")
    return body


def serialize_rows(table: "ResultTable", cap: int) -> tuple[str, int]:
    """Compact pipe-separated serialization of up to ``cap`` rows."""
    shown = min(len(table.rows), cap)
    lines = [" | ".join(table.columns)]
    for row in table.rows[:shown]:
        lines.append(" | ".join(row))
    return "\n".join(lines), shown


def render_summary_prompt(
    question: str,
    query: str,
    table: "ResultTable",
    row_cap: int = SUMMARY_ROW_CAP,
) -> str:
    """Prompt asking the model to summarize results, or diagnose an empty set."""
    if table.rows:
        guidance = SUMMARIZE_GUIDANCE
        serialized, shown = serialize_rows(table, row_cap)
        header = f"Query results ({shown} of {len(table.rows)} rows shown):"
        if shown < len(table.rows):
            header += " [truncated]"
        results = f"{header}\n{serialized}"
    else:
        guidance = DIAGNOSE_GUIDANCE
        results = "Query results: (none)"
    return render(
        RESULTS_SUMMARY,
        {"question": question, "query": query, "guidance": guidance, "results": results},
    )
