"""Wire transports for Wikidata access: live HTTP, recording, and replay.

Every knowledge-graph operation goes through ``Transport.call`` with a wire
operation name and canonicalizable arguments, so one mechanism covers live
traffic, fixture recording, and byte-stable offline replay.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Protocol

import requests

from ..config import KG_MIN_CALL_INTERVAL, USER_AGENT
from ..errors import FixtureMissing, KgUnavailable, QueryTimeout

WIRE_SEARCH = "wbsearchentities"
WIRE_ENTITIES = "wbgetentities"
WIRE_SPARQL = "sparql"


@dataclass(frozen=True)
class WireResponse:
    status: int
    body: str

    def json(self) -> dict:
        return json.loads(self.body)


class Transport(Protocol):
    def call(
        self, operation: str, args: dict, timeout: float | None = None
    ) -> WireResponse: ...


def canonical_args(args: dict) -> str:
    return json.dumps(args, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def fixture_path(directory: Path, operation: str, args: dict) -> Path:
    digest = hashlib.sha256(canonical_args(args).encode("utf-8")).hexdigest()[:20]
    return directory / operation / f"{digest}.json"


class RateLimiter:
    """Enforces a minimum spacing between calls; clock and sleep injectable."""

    def __init__(
        self,
        min_interval: float = KG_MIN_CALL_INTERVAL,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self._min_interval = min_interval
        self._clock = clock
        self._sleep = sleep
        self._last: float | None = None
        self._lock = threading.Lock()

    def wait(self) -> None:
        with self._lock:
            now = self._clock()
            if self._last is not None:
                remaining = self._min_interval - (now - self._last)
                if remaining > 0:
                    self._sleep(remaining)
            self._last = self._clock()


class LiveTransport:
    """Talks to the real Wikidata API and query service."""

    def __init__(
        self,
        api_url: str,
        sparql_url: str,
        rate_limiter: RateLimiter | None = None,
        session: requests.Session | None = None,
        timeout: float = 30.0,
    ):
        self._api_url = api_url
        self._sparql_url = sparql_url
        self._rate = rate_limiter or RateLimiter()
        self._session = session or requests.Session()
        self._timeout = timeout

    def call(self, operation: str, args: dict, timeout: float | None = None) -> WireResponse:
        self._rate.wait()
        effective_timeout = timeout if timeout is not None else self._timeout
        headers = {"User-Agent": USER_AGENT}
        try:
            if operation == WIRE_SPARQL:
                headers["Accept"] = "application/sparql-results+json"
                response = self._session.get(
                    self._sparql_url,
                    params={"query": args["query"]},
                    headers=headers,
                    timeout=effective_timeout,
                )
            elif operation in (WIRE_SEARCH, WIRE_ENTITIES):
                params = {"action": operation, "format": "json", **args}
                response = self._session.get(
                    self._api_url, params=params, headers=headers, timeout=effective_timeout
                )
            else:
                raise ValueError(f"unknown wire operation: {operation!r}")
        except requests.Timeout as exc:
            raise QueryTimeout(f"{operation} timed out after {effective_timeout}s") from exc
        except requests.RequestException as exc:
            raise KgUnavailable(f"{operation} failed: {exc.__class__.__name__}") from exc
        return WireResponse(response.status_code, response.text)


class RecordingTransport:
    """Delegates to a live transport and saves each response as a fixture."""

    def __init__(self, inner: Transport, directory: str | Path):
        self._inner = inner
        self._directory = Path(directory)

    def call(self, operation: str, args: dict, timeout: float | None = None) -> WireResponse:
        response = self._inner.call(operation, args, timeout=timeout)
        path = fixture_path(self._directory, operation, args)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = {
            "operation": operation,
            "args": args,
            "status": response.status,
            "body": response.body,
        }
        path.write_text(json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False), "utf-8")
        return response


class ReplayTransport:
    """Serves recorded fixtures; any unrecorded call is an error, never the network."""

    def __init__(self, directory: str | Path):
        self._directory = Path(directory)
        self.calls: list[tuple[str, str]] = []

    def call(self, operation: str, args: dict, timeout: float | None = None) -> WireResponse:
        self.calls.append((operation, canonical_args(args)))
        path = fixture_path(self._directory, operation, args)
        if not path.exists():
            raise FixtureMissing(
                f"no fixture for {operation} with args {canonical_args(args)} "
                f"(expected {path})"
            )
        payload = json.loads(path.read_text("utf-8"))
        return WireResponse(payload["status"], payload["body"])

    def call_count(self, operation: str | None = None) -> int:
        if operation is None:
            return len(self.calls)
        return sum(1 for op, _ in self.calls if op == operation)
