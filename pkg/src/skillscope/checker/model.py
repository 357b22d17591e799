"""Model-backed checking through a chat-completions style endpoint.

The gateway is opt-in: nothing here runs unless a caller builds one, and the
test suite only ever uses in-process stubs.  Each skill costs one logical
request at temperature 0; transport failures (connection errors, 429 and
5xx answers) are retried a bounded number of times, but a well-formed answer
with bad content is never retried.
"""

from __future__ import annotations

import json
import os
import threading
import time
import urllib.error
import urllib.request
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from string import Template
from typing import Any, Callable, Mapping, Protocol

from ..errors import GatewayConfigError, MalformedModelOutput, TransportError
from ..spg import deserialize_spg
from ..taxonomy import Taxonomy, load_taxonomy
from .report import CheckReport, parse_model_output, uncertain_report

ENV_ENDPOINT = "SKILLSCOPE_MODEL_ENDPOINT"
ENV_NAME = "SKILLSCOPE_MODEL_NAME"
ENV_KEY = "SKILLSCOPE_MODEL_KEY"
PROMPT_VERSION = "v1"
MAX_ATTEMPTS = 3
DEFAULT_IN_FLIGHT = 4


@lru_cache(maxsize=None)
def _template(version: str = PROMPT_VERSION) -> Template:
    text = resources.files("skillscope.data").joinpath(f"prompt_{version}.txt").read_text("utf-8")
    return Template(text)


def taxonomy_block(taxonomy: Taxonomy) -> str:
    lines = []
    for category in taxonomy.categories:
        lines.append(f"#### {category.id}")
        lines.extend(f"- {label.code}: {label.description}" for label in category.labels)
    return "\n".join(lines)


def render_prompt(taxonomy: Taxonomy | None, skill_md: str, graph_doc: Mapping[str, Any]) -> str:
    """Instantiate the prompt template; byte-stable for fixed inputs.

    ``graph_doc`` must be a valid code graph document, otherwise
    :class:`~skillscope.errors.SchemaError` is raised.
    """
    deserialize_spg(graph_doc)
    taxonomy = taxonomy or load_taxonomy()
    graph = json.dumps(graph_doc, sort_keys=True, indent=2, ensure_ascii=False)
    return _template().substitute(taxonomy=taxonomy_block(taxonomy), skill_md=skill_md.rstrip("\n"), graph=graph)


class ChatGateway(Protocol):
    name: str

    def complete(self, prompt: str) -> str: ...


@dataclass(frozen=True)
class GatewayConfig:
    endpoint: str
    model: str
    key: str | None = None
    timeout: float = 120.0

    @classmethod
    def from_env(cls, environ: Mapping[str, str] | None = None) -> "GatewayConfig":
        env = os.environ if environ is None else environ
        endpoint, model = env.get(ENV_ENDPOINT, "").strip(), env.get(ENV_NAME, "").strip()
        missing = [name for name, value in ((ENV_ENDPOINT, endpoint), (ENV_NAME, model)) if not value]
        if missing:
            raise GatewayConfigError(f"model backend needs {', '.join(missing)} in the environment")
        return cls(endpoint, model, env.get(ENV_KEY) or None)


class RateLimiter:
    """Caps concurrent requests and spaces out their start times."""

    def __init__(self, in_flight: int = DEFAULT_IN_FLIGHT, min_interval: float = 0.0) -> None:
        self._slots = threading.BoundedSemaphore(max(1, in_flight))
        self._lock = threading.Lock()
        self._interval = min_interval
        self._next_start = 0.0

    def __enter__(self) -> "RateLimiter":
        self._slots.acquire()
        with self._lock:
            now = time.monotonic()
            wait = self._next_start - now
            self._next_start = max(now, self._next_start) + self._interval
        if wait > 0:
            time.sleep(wait)
        return self

    def __exit__(self, *exc: object) -> None:
        self._slots.release()


class HttpChatGateway:
    """Minimal chat-completions client built on :mod:`urllib`."""

    def __init__(
        self,
        config: GatewayConfig,
        *,
        limiter: RateLimiter | None = None,
        sleep: Callable[[float], None] = time.sleep,
        opener: Callable[..., Any] = urllib.request.urlopen,
    ) -> None:
        self.config = config
        self.name = config.model
        self.limiter = limiter or RateLimiter()
        self._sleep = sleep
        self._open = opener

    def _request(self, prompt: str) -> urllib.request.Request:
        body = {
            "model": self.config.model,
            "temperature": 0,
            "messages": [{"role": "user", "content": prompt}],
        }
        headers = {"Content-Type": "application/json"}
        if self.config.key:
            headers["Authorization"] = f"Bearer {self.config.key}"
        return urllib.request.Request(
            self.config.endpoint, data=json.dumps(body).encode("utf-8"), headers=headers, method="POST"
        )

    def _attempt(self, prompt: str) -> str:
        try:
            with self.limiter, self._open(self._request(prompt), timeout=self.config.timeout) as resp:
                payload = resp.read()
        except urllib.error.HTTPError as exc:
            if exc.code == 429 or exc.code >= 500:
                raise TransportError(f"gateway answered HTTP {exc.code}") from exc
            raise GatewayConfigError(f"gateway rejected the request with HTTP {exc.code}") from exc
        except (urllib.error.URLError, TimeoutError, ConnectionError, OSError) as exc:
            raise TransportError(f"gateway unreachable: {exc}") from exc
        try:
            doc = json.loads(payload)
            return doc["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            text = payload.decode("utf-8", errors="replace") if isinstance(payload, bytes) else str(payload)
            raise MalformedModelOutput("gateway reply is not a chat completion", text) from exc

    def complete(self, prompt: str) -> str:
        return with_retries(lambda: self._attempt(prompt), sleep=self._sleep)


def with_retries(
    call: Callable[[], str],
    *,
    attempts: int = MAX_ATTEMPTS,
    base_delay: float = 1.0,
    sleep: Callable[[float], None] = time.sleep,
) -> str:
    """Run ``call``, retrying only :class:`TransportError` with exponential backoff."""
    for attempt in range(attempts):
        try:
            return call()
        except TransportError:
            if attempt == attempts - 1:
                raise
            sleep(base_delay * 2**attempt)
    raise AssertionError("unreachable")


def check_with_model(
    gateway: ChatGateway,
    skill_id: str,
    skill_md: str,
    graph_doc: Mapping[str, Any],
    taxonomy: Taxonomy | None = None,
) -> CheckReport:
    """One model call for one skill, parsed into a :class:`CheckReport`.

    Raises :class:`TransportError` once retries are exhausted and
    :class:`MalformedModelOutput` when the answer breaks the schema.
    """
    prompt = render_prompt(taxonomy, skill_md, graph_doc)
    raw = gateway.complete(prompt)
    edges = tuple((e["from"], e["to"]) for e in graph_doc["edges"])
    return parse_model_output(raw, skill_id, f"Model({gateway.name})", edges)


def check_with_model_safe(
    gateway: ChatGateway,
    skill_id: str,
    skill_md: str,
    graph_doc: Mapping[str, Any],
    taxonomy: Taxonomy | None = None,
) -> CheckReport:
    """Like :func:`check_with_model`, but a malformed answer becomes an uncertain report."""
    try:
        return check_with_model(gateway, skill_id, skill_md, graph_doc, taxonomy)
    except MalformedModelOutput as exc:
        return uncertain_report(skill_id, f"malformed model output: {exc}", f"Model({gateway.name})")
