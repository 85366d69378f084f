"""Minimal chat-completions client with retries, rate limiting, and
token-spend accounting."""
from __future__ import annotations

import logging
import os
import time
from dataclasses import asdict, dataclass

import requests

from .records import BridgeError, atomic_write_json

logger = logging.getLogger(__name__)


class EndpointError(BridgeError):
    pass


@dataclass
class SpendCounter:
    requests: int = 0
    input_tokens: int = 0
    output_tokens: int = 0

    def add(self, usage: dict | None) -> None:
        self.requests += 1
        if usage:
            self.input_tokens += int(usage.get("prompt_tokens", 0))
            self.output_tokens += int(usage.get("completion_tokens", 0))

    def write(self, path) -> None:
        atomic_write_json(path, asdict(self))


class LlmClient:
    """POSTs single-prompt chat completions to an OpenAI-style endpoint.

    Transport failures and 5xx responses retry with backoff up to
    ``max_attempts``; content-level retries (malformed model output) are the
    caller's business.
    """

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key_env: str = "ANNOBRIDGE_API_KEY",
        timeout: float = 60.0,
        requests_per_second: float | None = None,
        max_attempts: int = 3,
        session: requests.Session | None = None,
    ):
        self.endpoint = endpoint.rstrip("/")
        self.model = model
        self.timeout = timeout
        self.max_attempts = max_attempts
        self.spend = SpendCounter()
        self._api_key = os.environ.get(api_key_env, "")
        self._min_interval = 1.0 / requests_per_second if requests_per_second else 0.0
        self._last_request = 0.0
        self._session = session or requests.Session()

    def _throttle(self) -> None:
        if self._min_interval <= 0:
            return
        wait = self._last_request + self._min_interval - time.monotonic()
        if wait > 0:
            time.sleep(wait)

    def complete(self, prompt: str) -> str:
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
        }
        headers = {"Content-Type": "application/json"}
        if self._api_key:
            headers["Authorization"] = f"Bearer {self._api_key}"
        last_error: Exception | None = None
        for attempt in range(1, self.max_attempts + 1):
            self._throttle()
            self._last_request = time.monotonic()
            try:
                resp = self._session.post(
                    f"{self.endpoint}/chat/completions",
                    json=payload,
                    headers=headers,
                    timeout=self.timeout,
                )
            except requests.RequestException as exc:
                last_error = exc
                logger.warning("request failed (attempt %d): %s", attempt, exc)
                time.sleep(min(2.0 ** (attempt - 1) * 0.1, 2.0))
                continue
            if resp.status_code >= 500:
                last_error = EndpointError(f"server error {resp.status_code}")
                logger.warning("server error %d (attempt %d)", resp.status_code, attempt)
                time.sleep(min(2.0 ** (attempt - 1) * 0.1, 2.0))
                continue
            if resp.status_code != 200:
                raise EndpointError(f"endpoint returned {resp.status_code}: {resp.text[:200]}")
            body = resp.json()
            try:
                content = body["choices"][0]["message"]["content"]
            except (KeyError, IndexError, TypeError) as exc:
                raise EndpointError(f"unexpected response shape: {body}") from exc
            self.spend.add(body.get("usage"))
            return str(content)
        raise EndpointError(f"endpoint unreachable after {self.max_attempts} attempts: {last_error}")
