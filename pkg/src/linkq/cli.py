"""Terminal entry point: chat REPL, one-shot questions, query preview, and
the HTTP service, with live/record/replay fixture control.

Exit status: 0 on success, 1 on user or input errors, 2 when an upstream
service (model or knowledge graph) fails.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .config import Config
from .errors import (
    EmptyInput,
    FixtureMissing,
    InvalidQuery,
    KgUnavailable,
    LinkqError,
    LlmUnavailable,
    QueryRejected,
    QueryTimeout,
    ScriptExhausted,
    SessionNotFound,
)
from .results import to_csv
from .service import SessionManager
from .sparql import to_dot
from .wiring import build_manager, resolve_mode

_UPSTREAM_ERRORS = (
    LlmUnavailable,
    KgUnavailable,
    QueryRejected,
    QueryTimeout,
    FixtureMissing,
    ScriptExhausted,
)
_INPUT_ERRORS = (EmptyInput, InvalidQuery, SessionNotFound)


def format_table(columns: list[str], rows: list[list[str]]) -> str:
    """Aligned plain-text table."""
    widths = [len(c) for c in columns]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    def fmt(cells):
        return "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(cells)).rstrip()
    lines = [fmt(columns), fmt(["-" * w for w in widths])]
    lines.extend(fmt(list(row)) for row in rows)
    return "\n".join(lines)


def _build(ctx: click.Context) -> SessionManager:
    options = ctx.obj
    config = Config.from_env()
    if options["fixtures"]:
        config.fixture_dir = options["fixtures"]
    if options["model"]:
        config.llm_model = options["model"]
    mode = resolve_mode(config.fixture_dir, record=options["record"], live=options["live"])
    return build_manager(config, mode)


@click.group()
@click.option("--fixtures", type=click.Path(), default=None, envvar="LINKQ_FIXTURE_DIR",
              help="Fixture directory; enables replay unless --record or --live is set.")
@click.option("--record", is_flag=True, help="Talk to live services and record fixtures.")
@click.option("--live", is_flag=True, help="Force live services even if fixtures are set.")
@click.option("--model", default=None, help="Model name for the chat-completion backend.")
@click.pass_context
def cli(ctx: click.Context, fixtures: str | None, record: bool, live: bool, model: str | None):
    ctx.obj = {"fixtures": fixtures, "record": record, "live": live, "model": model}


@cli.command()
@click.argument("question", required=False)
@click.option("--output", type=click.Path(), default=None, help="Write results CSV here.")
@click.pass_context
def ask(ctx: click.Context, question: str | None, output: str | None):
    """Run one question through the full protocol and print the results."""
    if not question or not question.strip():
        raise click.UsageError("ask needs a question, e.g. linkq ask \"Who founded Apple?\"")
    manager = _build(ctx)
    session_id = manager.create_session()
    delta = manager.post_message(session_id, question)
    if delta.error:
        raise _to_exception(delta.error)
    for message in delta.messages:
        if message.visibility.value == "shown" and message.role == "assistant":
            click.echo(message.content)
            click.echo()
    if delta.generated_query is None:
        # The model kept chatting (e.g. asked for clarification); nothing to run.
        return 0
    click.echo("Generated query:")
    click.echo(delta.generated_query)
    click.echo()

    bundle = manager.preview_query(session_id, delta.generated_query)
    if bundle.entity_relation_rows:
        click.echo("Identifiers in the query:")
        click.echo(
            format_table(
                ["id", "kind", "label", "description"],
                [[r.id, r.kind, r.label, r.description] for r in bundle.entity_relation_rows],
            )
        )
        click.echo()

    run = manager.run_query(session_id, delta.generated_query)
    click.echo(f"Results ({len(run.table.rows)} rows):")
    click.echo(format_table(list(run.table.columns), [list(r) for r in run.table.rows]))
    if run.summary:
        click.echo()
        click.echo(f"Summary: {run.summary}")
    if output:
        Path(output).write_text(to_csv(run.table), encoding="utf-8", newline="")
        click.echo()
        click.echo(f"CSV written to {output}")
    return 0


@cli.command()
@click.option("--query", "query_file", type=click.Path(exists=False), required=False,
              help="File containing the query to preview.")
@click.pass_context
def preview(ctx: click.Context, query_file: str | None):
    """Validate a query file and print its ID table and graph as DOT."""
    if not query_file:
        raise click.UsageError("preview needs --query <file>")
    path = Path(query_file)
    if not path.exists():
        raise click.UsageError(f"no such file: {query_file}")
    query = path.read_text(encoding="utf-8")
    manager = _build(ctx)
    session_id = manager.create_session()
    bundle = manager.preview_query(session_id, query)
    if not bundle.validation.ok:
        raise InvalidQuery(bundle.validation.error.describe())
    click.echo("Query is syntactically valid.")
    click.echo()
    click.echo(
        format_table(
            ["id", "kind", "label", "description"],
            [[r.id, r.kind, r.label, r.description] for r in bundle.entity_relation_rows],
        )
    )
    click.echo()
    click.echo(to_dot(bundle.query_graph))
    return 0


@cli.command()
@click.pass_context
def repl(ctx: click.Context):
    """Interactive chat. Commands: /run, /show, /history, /quit."""
    manager = _build(ctx)
    session_id = manager.create_session()
    click.echo("Ask a question about Wikidata. /run executes the generated query, /quit exits.")
    while True:
        try:
            line = input("you> ").strip()
        except (EOFError, KeyboardInterrupt):
            click.echo()
            return 0
        if not line:
            continue
        if line in ("/quit", "/exit"):
            return 0
        try:
            if line == "/show":
                query, explanation = manager.get_generated_query(session_id)
                click.echo(query or "(no query generated yet)")
                continue
            if line == "/history":
                for entry in manager.get_history(session_id):
                    marker = "*" if entry.executed else " "
                    click.echo(f"[{marker}] {entry.origin}: {entry.query.splitlines()[0]}")
                continue
            if line == "/run":
                query, _ = manager.get_generated_query(session_id)
                if not query:
                    click.echo("(no query generated yet)")
                    continue
                run = manager.run_query(session_id, query)
                click.echo(format_table(list(run.table.columns), [list(r) for r in run.table.rows]))
                if run.summary:
                    click.echo(f"Summary: {run.summary}")
                continue
            delta = manager.post_message(session_id, line)
            if delta.error:
                click.echo(f"error: {delta.error['message']}", err=True)
                continue
            for message in delta.messages:
                if message.visibility.value == "shown" and message.role == "assistant":
                    click.echo(f"assistant> {message.content}")
            if delta.generated_query:
                click.echo("generated query:")
                click.echo(delta.generated_query)
                click.echo("(/run to execute it)")
        except LinkqError as exc:
            click.echo(f"error: {exc}", err=True)
    return 0


@cli.command()
@click.option("--port", type=int, default=None, help="Listen port (default from LINKQ_PORT).")
@click.option("--frontend", type=click.Path(), default=None, help="Static web client directory.")
@click.pass_context
def serve(ctx: click.Context, port: int | None, frontend: str | None):
    """Start the HTTP service."""
    import uvicorn

    from .api import create_app

    manager = _build(ctx)
    app = create_app(manager, frontend_dir=frontend)
    config = manager.config
    uvicorn.run(app, host="127.0.0.1", port=port or config.port)
    return 0


def _to_exception(error: dict) -> LinkqError:
    mapping = {cls.__name__: cls for cls in _UPSTREAM_ERRORS + _INPUT_ERRORS}
    cls = mapping.get(error.get("type", ""), LinkqError)
    return cls(error.get("message", "unknown error"))


def main(argv: list[str] | None = None) -> int:
    try:
        result = cli.main(args=argv, standalone_mode=False)
        return result if isinstance(result, int) else 0
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        if exc.ctx is not None:
            click.echo(exc.ctx.get_usage(), err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        return 1
    except _UPSTREAM_ERRORS as exc:
        click.echo(f"upstream failure: {exc}", err=True)
        return 2
    except _INPUT_ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except SystemExit as exc:
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
