"""Assembles the gateways for a given fixture mode.

Modes: ``live`` talks to the real endpoints, ``record`` talks live while
saving every response, ``replay`` serves saved fixtures and never touches
the network. In replay mode the model side is a scripted responder read from
``llm_script.json`` in the fixture directory.
"""

from __future__ import annotations

import json
from pathlib import Path

from .config import Config
from .errors import FixtureMissing
from .kg.client import WikidataClient
from .kg.transport import LiveTransport, RecordingTransport, ReplayTransport, Transport
from .llm import CompletionRequest, LlmClient, OpenAiCompatClient, ScriptedLlm
from .service import SessionManager

LIVE = "live"
RECORD = "record"
REPLAY = "replay"

LLM_SCRIPT_FILE = "llm_script.json"


def resolve_mode(fixture_dir: str | None, record: bool = False, live: bool = False) -> str:
    if record:
        return RECORD
    if live:
        return LIVE
    return REPLAY if fixture_dir else LIVE


class RecordingLlm:
    """Wraps a live model client and appends every reply to the script file,
    so a recorded conversation can be replayed verbatim."""

    def __init__(self, inner: LlmClient, directory: str | Path):
        self._inner = inner
        self._path = Path(directory) / LLM_SCRIPT_FILE
        self._replies: list[str] = []

    def complete(self, request: CompletionRequest) -> str:
        reply = self._inner.complete(request)
        self._replies.append(reply)
        self._path.parent.mkdir(parents=True, exist_ok=True)
        self._path.write_text(
            json.dumps({"replies": self._replies}, indent=2, ensure_ascii=False), "utf-8"
        )
        return reply


def load_scripted_llm(fixture_dir: str | Path) -> ScriptedLlm:
    path = Path(fixture_dir) / LLM_SCRIPT_FILE
    if not path.exists():
        raise FixtureMissing(f"no {LLM_SCRIPT_FILE} in {fixture_dir}")
    data = json.loads(path.read_text("utf-8"))
    return ScriptedLlm(queue=list(data["replies"]))


def build_transport(config: Config, mode: str) -> Transport:
    if mode == REPLAY:
        if not config.fixture_dir:
            raise FixtureMissing("replay mode needs a fixture directory")
        return ReplayTransport(config.fixture_dir)
    live = LiveTransport(config.wikidata_api_url, config.sparql_url)
    if mode == RECORD:
        if not config.fixture_dir:
            raise FixtureMissing("record mode needs a fixture directory")
        return RecordingTransport(live, config.fixture_dir)
    return live


def build_llm(config: Config, mode: str) -> LlmClient:
    if mode == REPLAY:
        return load_scripted_llm(config.fixture_dir)
    live = OpenAiCompatClient(config.llm_url, config.llm_api_key)
    if mode == RECORD:
        return RecordingLlm(live, config.fixture_dir)
    return live


def build_manager(config: Config | None = None, mode: str | None = None) -> SessionManager:
    config = config or Config.from_env()
    mode = mode or resolve_mode(config.fixture_dir)
    transport = build_transport(config, mode)
    kg_client = WikidataClient(transport, property_cap=config.property_cap)
    llm = build_llm(config, mode)
    return SessionManager(llm, kg_client, config)
