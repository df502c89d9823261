"""Completion-service clients: a live HTTP client and a replay client.

The wire protocol is a single JSON POST to a configurable base URL with a
flat body ``{model, prompt | messages, temperature, max_tokens}``; the
completion text is read from ``choices[0].text`` (prompt mode) or
``choices[0].message.content`` (messages mode), falling back to a
top-level ``text`` key. The API key comes from the ``MTC_API_KEY``
environment variable unless given explicitly.

The replay client serves canned responses from a fixtures directory keyed
by a stable hash of the prompt bytes, which makes whole extraction runs
reproducible byte-for-byte and testable offline.
"""

from __future__ import annotations

import hashlib
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import requests

API_KEY_ENV = "MTC_API_KEY"


@dataclass(frozen=True)
class CompletionRequest:
    prompt: str
    temperature: float = 0.0
    max_tokens: int = 256
    model: str = ""


@dataclass(frozen=True)
class CompletionResponse:
    text: str
    finish: str = "stop"


class ServiceError(RuntimeError):
    """A completion call failed (after retries, for retryable failures)."""

    def __init__(self, message: str, status: int | None = None, attempt: int = 1):
        super().__init__(message)
        self.status = status
        self.attempt = attempt


class CompletionClient(Protocol):
    def complete(self, request: CompletionRequest) -> CompletionResponse: ...


def prompt_fingerprint(prompt: str) -> str:
    """Stable hex key of a prompt's UTF-8 bytes (replay fixture filename)."""
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class ReplayClient:
    """Serves responses from ``<fixtures_dir>/<prompt_fingerprint>.txt``."""

    def __init__(self, fixtures_dir: str | Path):
        self.fixtures_dir = Path(fixtures_dir)

    def _path(self, prompt: str) -> Path:
        return self.fixtures_dir / f"{prompt_fingerprint(prompt)}.txt"

    def store(self, prompt: str, response_text: str) -> Path:
        """Write a fixture for ``prompt``; returns the fixture path."""
        self.fixtures_dir.mkdir(parents=True, exist_ok=True)
        path = self._path(prompt)
        path.write_text(response_text, encoding="utf-8")
        return path

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        path = self._path(request.prompt)
        if not path.exists():
            raise ServiceError(f"no replay fixture {path.name} in {self.fixtures_dir}")
        return CompletionResponse(path.read_text(encoding="utf-8"))


class HttpCompletionClient:
    """Live client with bounded retries and exponential backoff.

    Server errors (5xx) and transport failures are retried up to
    ``max_attempts`` with backoff ``backoff * 2**attempt`` seconds; client
    errors (4xx) fail immediately.
    """

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key: str | None = None,
        use_messages: bool = False,
        timeout: float = 60.0,
        max_attempts: int = 3,
        backoff: float = 1.0,
        session: requests.Session | None = None,
    ):
        self.base_url = base_url
        self.model = model
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        self.use_messages = use_messages
        self.timeout = timeout
        self.max_attempts = max_attempts
        self.backoff = backoff
        self._session = session or requests.Session()

    def _body(self, request: CompletionRequest) -> dict:
        body: dict = {
            "model": request.model or self.model,
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        if self.use_messages:
            body["messages"] = [{"role": "user", "content": request.prompt}]
        else:
            body["prompt"] = request.prompt
        return body

    def _extract_text(self, data: dict) -> tuple[str, str]:
        choices = data.get("choices")
        if isinstance(choices, list) and choices:
            choice = choices[0]
            finish = str(choice.get("finish_reason", "stop"))
            if self.use_messages:
                message = choice.get("message", {})
                if isinstance(message, dict) and isinstance(message.get("content"), str):
                    return message["content"], finish
            if isinstance(choice.get("text"), str):
                return choice["text"], finish
        if isinstance(data.get("text"), str):
            return data["text"], "stop"
        raise ServiceError("completion text not found in response body")

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = self._body(request)
        last_error: ServiceError | None = None
        for attempt in range(1, self.max_attempts + 1):
            try:
                response = self._session.post(
                    self.base_url, json=body, headers=headers, timeout=self.timeout
                )
            except requests.RequestException as exc:
                last_error = ServiceError(f"request failed: {exc}", attempt=attempt)
            else:
                if response.status_code >= 500:
                    last_error = ServiceError(
                        f"server error {response.status_code}",
                        status=response.status_code,
                        attempt=attempt,
                    )
                elif response.status_code >= 400:
                    raise ServiceError(
                        f"client error {response.status_code}: {response.text[:200]}",
                        status=response.status_code,
                        attempt=attempt,
                    )
                else:
                    try:
                        data = response.json()
                    except ValueError:
                        raise ServiceError("response body is not JSON", attempt=attempt) from None
                    text, finish = self._extract_text(data)
                    return CompletionResponse(text, finish)
            if attempt < self.max_attempts:
                time.sleep(self.backoff * 2 ** (attempt - 1))
        assert last_error is not None
        raise last_error
