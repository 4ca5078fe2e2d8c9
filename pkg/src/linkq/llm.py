"""Chat-completion gateway: a live OpenAI-compatible client and a scripted
deterministic mock for offline tests. Any model behind the same wire
protocol can sit on the other side."""

from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Protocol

import requests

from .errors import LlmUnavailable, ScriptExhausted

logger = logging.getLogger(__name__)

Message = dict[str, str]  # {"role": "system"|"user"|"assistant", "content": ...}

DEFAULT_TEMPERATURE = 0.0  # directive parsing wants determinism where the model allows it
DEFAULT_MAX_TOKENS = 1800
REQUEST_TIMEOUT_SECONDS = 60.0
MAX_ATTEMPTS = 3
RETRYABLE_STATUSES = frozenset({429, 500, 502, 503, 504})


@dataclass
class CompletionRequest:
    messages: list[Message]
    model: str
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int = DEFAULT_MAX_TOKENS

    def __post_init__(self):
        if not self.messages:
            raise ValueError("messages must be non-empty")
        if self.messages[0].get("role") != "system":
            raise ValueError("first message must have role=system")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")


class LlmClient(Protocol):
    def complete(self, request: CompletionRequest) -> str: ...


@dataclass
class ScriptedLlm:
    """Test double: pops one canned reply per call and records every request."""

    queue: list[str] = field(default_factory=list)
    call_log: list[CompletionRequest] = field(default_factory=list)

    def complete(self, request: CompletionRequest) -> str:
        self.call_log.append(request)
        if not self.queue:
            raise ScriptExhausted(
                f"scripted responder exhausted after {len(self.call_log) - 1} replies"
            )
        return self.queue.pop(0)


class OpenAiCompatClient:
    """Live client for an OpenAI-compatible chat-completions endpoint.

    Retries transient failures (429 and 5xx) with exponential backoff, up to
    three attempts. The credential is sent as a bearer token and is never
    logged or exposed in repr.
    """

    def __init__(
        self,
        url: str,
        api_key: str,
        timeout: float = REQUEST_TIMEOUT_SECONDS,
        max_attempts: int = MAX_ATTEMPTS,
        backoff_base: float = 0.5,
        sleep: Callable[[float], None] = time.sleep,
        session: requests.Session | None = None,
    ):
        self._url = url
        self._api_key = api_key
        self._timeout = timeout
        self._max_attempts = max_attempts
        self._backoff_base = backoff_base
        self._sleep = sleep
        self._session = session or requests.Session()
        self._lock = threading.Lock()

    def __repr__(self) -> str:
        return f"OpenAiCompatClient(url={self._url!r}, api_key=<redacted>)"

    def complete(self, request: CompletionRequest) -> str:
        payload = {
            "model": request.model,
            "messages": request.messages,
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        headers = {"Authorization": f"Bearer {self._api_key}"}
        last_failure = "no attempts made"
        for attempt in range(self._max_attempts):
            if attempt:
                self._sleep(self._backoff_base * (2 ** (attempt - 1)))
            logger.debug(
                "chat completion attempt %d: model=%s, %d messages",
                attempt + 1,
                request.model,
                len(request.messages),
            )
            try:
                with self._lock:
                    response = self._session.post(
                        self._url, json=payload, headers=headers, timeout=self._timeout
                    )
            except requests.RequestException as exc:
                last_failure = f"network error: {exc.__class__.__name__}"
                logger.warning("chat completion attempt failed: %s", last_failure)
                continue
            if response.status_code in RETRYABLE_STATUSES:
                last_failure = f"transient status {response.status_code}"
                logger.warning("chat completion attempt failed: %s", last_failure)
                continue
            if response.status_code != 200:
                raise LlmUnavailable(
                    f"chat completion failed with status {response.status_code}"
                )
            return self._extract_content(response)
        raise LlmUnavailable(f"retries exhausted; last failure: {last_failure}")

    @staticmethod
    def _extract_content(response: requests.Response) -> str:
        try:
            body = response.json()
            content = body["choices"][0]["message"]["content"]
        except (ValueError, LookupError, TypeError) as exc:
            raise LlmUnavailable(f"malformed completion response: {exc}") from exc
        if not isinstance(content, str):
            raise LlmUnavailable("completion content is not text")
        return content
