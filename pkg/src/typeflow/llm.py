"""Completion backends: OpenAI-compatible HTTP chat endpoints and a
deterministic local mock.

The HTTP backend speaks the chat-completions JSON shape against any
configured base URL, batches ``n`` samples natively when the endpoint
allows it, retries transient failures with exponential backoff, and bounds
in-flight requests with a semaphore.  Credentials come only from an
environment variable.

The mock backend is fully deterministic and file-driven: ``canned`` mode
replays fixture texts keyed by ``<file>::<target id>``; ``echo`` mode reads
a dataset sidecar and answers with a conclusion sentence quoting the
ground-truth type, which makes end-to-end pipeline tests hermetic.
"""

from __future__ import annotations

import json
import logging
import math
import os
import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from . import templates

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 50
DEFAULT_TEMPERATURE = 1.0
DEFAULT_MAX_NEW_TOKENS = 256


class BackendError(Exception):
    """Base class for completion failures."""


class AuthError(BackendError):
    pass


class RateLimited(BackendError):
    pass


class BackendTimeout(BackendError):
    pass


class MalformedResponse(BackendError):
    pass


class MissingFixture(BackendError):
    """Mock backend has no canned text / sidecar entry for the request."""


class BackendKind(Enum):
    HTTP_CHAT = "http"
    MOCK = "mock"


@dataclass(frozen=True)
class CompletionRequest:
    prompt: str
    n_samples: int = DEFAULT_SAMPLES
    temperature: float = DEFAULT_TEMPERATURE
    max_new_tokens: int = DEFAULT_MAX_NEW_TOKENS
    model: str = ""
    tag: str = ""  # routing key for mock fixture lookup, "<file>::<id>"

    def __post_init__(self) -> None:
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.max_new_tokens < 1:
            raise ValueError("max_new_tokens must be >= 1")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


@dataclass(frozen=True)
class BackendConfig:
    kind: BackendKind = BackendKind.MOCK
    base_url: str = ""
    model: str = ""
    credential_env: str = "OPENAI_API_KEY"
    timeout: float = 60.0
    max_retries: int = 3
    max_concurrency: int = 4
    supports_n: bool = True
    mock_mode: str = "echo"  # "echo" | "canned"
    mock_fixtures: str | None = None
    mock_sidecar: str | None = None

    def __post_init__(self) -> None:
        if self.kind is BackendKind.HTTP_CHAT and not (self.base_url and self.model):
            raise ValueError("http backend requires base_url and model")


def complete(cfg: BackendConfig, req: CompletionRequest) -> list[str]:
    """Return exactly ``req.n_samples`` generation texts."""
    return make_backend(cfg).complete(req)


def make_backend(cfg: BackendConfig) -> "Backend":
    if cfg.kind is BackendKind.MOCK:
        return MockBackend(cfg)
    return HttpChatBackend(cfg)


class Backend:
    def complete(self, req: CompletionRequest) -> list[str]:  # pragma: no cover
        raise NotImplementedError


class MockBackend(Backend):
    """Deterministic replay backend; same config + request => same samples."""

    def __init__(self, cfg: BackendConfig) -> None:
        self.cfg = cfg
        self._canned: dict[str, str] = {}
        self._sidecar: dict[str, dict] = {}
        if cfg.mock_fixtures:
            self._canned = json.loads(
                Path(cfg.mock_fixtures).read_text(encoding="utf-8")
            )
        if cfg.mock_sidecar:
            with open(cfg.mock_sidecar, encoding="utf-8") as handle:
                for line in handle:
                    line = line.strip()
                    if not line:
                        continue
                    record = json.loads(line)
                    self._sidecar[str(record["id"])] = record

    def complete(self, req: CompletionRequest) -> list[str]:
        if self.cfg.mock_mode == "canned":
            text = self._canned.get(req.tag)
            if text is None:
                raise MissingFixture(f"no canned generation for {req.tag!r}")
            return [text] * req.n_samples
        if self.cfg.mock_mode == "echo":
            return [self._echo_text(req)] * req.n_samples
        raise ValueError(f"unknown mock mode {self.cfg.mock_mode!r}")

    def _echo_text(self, req: CompletionRequest) -> str:
        record = self._lookup_sidecar(req.tag)
        if record is None:
            raise MissingFixture(f"no sidecar record for tag {req.tag!r}")
        selector = {
            "arg": templates.SELECTOR_ARGUMENT,
            "ret": templates.SELECTOR_RETURN,
        }.get(record.get("kind", "var"), templates.SELECTOR_VARIABLE)
        name = record.get("name") or str(record.get("function", "")).rsplit(".", 1)[-1]
        return templates.CONCLUSION.format(
            selector=selector, name=name, type=record["annotation"]
        )

    def _lookup_sidecar(self, tag: str) -> dict | None:
        """Tags are ``<file>::<id>``; ids may themselves contain colons, so
        match the longest sidecar id the tag ends with."""
        if tag in self._sidecar:
            return self._sidecar[tag]
        best: dict | None = None
        best_len = -1
        for target_id, record in self._sidecar.items():
            if tag.endswith(f"::{target_id}") and len(target_id) > best_len:
                best, best_len = record, len(target_id)
        return best


class HttpChatBackend(Backend):
    """Chat-completions client with retries, backoff, and a concurrency cap.

    Samples from one logical call keep arrival order; batches are appended
    sequentially so retries never reorder or duplicate them.
    """

    RETRY_STATUS = (429, 500, 502, 503, 504)

    def __init__(self, cfg: BackendConfig) -> None:
        self.cfg = cfg
        self._gate = threading.Semaphore(max(1, cfg.max_concurrency))

    def complete(self, req: CompletionRequest) -> list[str]:
        token = os.environ.get(self.cfg.credential_env, "")
        if not token:
            raise AuthError(
                f"missing credential: set {self.cfg.credential_env}"
            )
        samples: list[str] = []
        remaining = req.n_samples
        while remaining > 0:
            batch = remaining if self.cfg.supports_n else 1
            got = self._one_request(req, batch, token)
            if not got:
                raise MalformedResponse("endpoint returned zero choices")
            samples.extend(got)
            remaining = req.n_samples - len(samples)
        return samples[: req.n_samples]

    def _one_request(self, req: CompletionRequest, n: int, token: str) -> list[str]:
        import requests

        url = self.cfg.base_url.rstrip("/") + "/chat/completions"
        payload = {
            "model": req.model or self.cfg.model,
            "messages": [{"role": "user", "content": req.prompt}],
            "n": n,
            "temperature": req.temperature,
            "max_tokens": req.max_new_tokens,
        }
        headers = {"Authorization": f"Bearer {token}"}
        last_error: BackendError | None = None
        for attempt in range(self.cfg.max_retries + 1):
            if attempt:
                time.sleep(min(30.0, 0.5 * 2 ** (attempt - 1)))
            try:
                with self._gate:
                    response = requests.post(
                        url, json=payload, headers=headers, timeout=self.cfg.timeout
                    )
            except requests.Timeout:
                last_error = BackendTimeout(f"timed out after {self.cfg.timeout}s")
                continue
            except requests.RequestException as exc:
                last_error = BackendError(str(exc))
                continue
            if response.status_code in (401, 403):
                raise AuthError(f"endpoint rejected credentials ({response.status_code})")
            if response.status_code in self.RETRY_STATUS:
                last_error = (
                    RateLimited("rate limited (429)")
                    if response.status_code == 429
                    else BackendError(f"server error {response.status_code}")
                )
                logger.warning("retryable response %s (attempt %d)",
                               response.status_code, attempt + 1)
                continue
            if response.status_code != 200:
                raise MalformedResponse(
                    f"unexpected status {response.status_code}: {response.text[:200]}"
                )
            return self._parse_choices(response, n)
        assert last_error is not None
        raise last_error

    @staticmethod
    def _parse_choices(response, n: int) -> list[str]:
        try:
            data = response.json()
            choices = data["choices"]
            texts = []
            for choice in choices:
                if "message" in choice:
                    texts.append(choice["message"]["content"])
                else:
                    texts.append(choice["text"])
        except (ValueError, KeyError, TypeError) as exc:
            raise MalformedResponse(f"cannot parse completion payload: {exc}") from exc
        if len(texts) < n:
            logger.warning("endpoint returned %d/%d choices", len(texts), n)
        return texts


def estimate_tokens(text: str) -> int:
    """Conservative token estimate for budget enforcement.

    Monotone under text extension; roughly one token per four characters
    with a floor of one token per whitespace-separated word.
    """
    if not text:
        return 0
    return max(math.ceil(len(text) / 4), len(text.split()))
