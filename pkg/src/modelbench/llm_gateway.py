"""Provider-neutral chat access with deterministic record/replay.

Requests are keyed by a content hash of (backend id, model name, prompt,
decode parameters). ``record`` mode persists every response before
returning it; ``replay`` mode serves stored responses byte-identically and
never touches the network, which is what makes offline pipeline runs
reproducible.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import httpx

MODES = ("live", "record", "replay")

_RETRY_ATTEMPTS = 3
_RETRY_BASE_DELAY = 1.0


class GatewayError(RuntimeError):
    pass


class ReplayMissError(GatewayError):
    def __init__(self, request_hash: str):
        super().__init__(f"transcript-not-found: no stored response for "
                         f"request hash {request_hash}")
        self.request_hash = request_hash


@dataclass(frozen=True)
class BackendConfig:
    """One chat backend: endpoint, model, decode params, wire dialect.

    ``request_fields`` maps the logical body fields (model/prompt/params)
    to provider field names; ``response_path`` is a dotted path (with
    integer segments for list indices) to the response text.
    """

    id: str
    endpoint: str
    model_name: str
    auth_env_var: str = ""
    temperature: float = 0.2
    max_output_tokens: int = 4096
    request_fields: dict[str, str] = field(
        default_factory=lambda: {"model": "model", "prompt": "prompt",
                                 "params": "params"})
    response_path: str = "text"

    @classmethod
    def from_json(cls, obj: dict) -> "BackendConfig":
        decode = obj.get("decode", {})
        return cls(
            id=obj["id"],
            endpoint=obj.get("endpoint", ""),
            model_name=obj.get("model_name", obj["id"]),
            auth_env_var=obj.get("auth_env_var", ""),
            temperature=float(decode.get("temperature", obj.get("temperature", 0.2))),
            max_output_tokens=int(decode.get("max_output_tokens",
                                             obj.get("max_output_tokens", 4096))),
            request_fields=obj.get("request_fields",
                                   {"model": "model", "prompt": "prompt",
                                    "params": "params"}),
            response_path=obj.get("response_path", "text"),
        )


@dataclass(frozen=True)
class ChatRequest:
    backend_id: str
    model_name: str
    prompt: str
    temperature: float
    max_output_tokens: int

    @property
    def request_hash(self) -> str:
        payload = json.dumps(
            {
                "backend_id": self.backend_id,
                "model_name": self.model_name,
                "prompt": self.prompt,
                "decode": {"temperature": self.temperature,
                           "max_output_tokens": self.max_output_tokens},
            },
            sort_keys=True, ensure_ascii=False,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    @classmethod
    def for_backend(cls, backend: BackendConfig, prompt: str) -> "ChatRequest":
        return cls(backend_id=backend.id, model_name=backend.model_name,
                   prompt=prompt, temperature=backend.temperature,
                   max_output_tokens=backend.max_output_tokens)


@dataclass(frozen=True)
class Health:
    ok: bool
    detail: str = ""


class TranscriptStore:
    """Append-only JSON-lines store of request/response transcripts.

    One canonical response per request hash: appends for an existing hash
    are ignored, so retries can never duplicate an entry.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._by_hash: dict[str, dict] = {}
        if self.path.exists():
            with self.path.open(encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    obj = json.loads(line)
                    self._by_hash.setdefault(obj["request_hash"], obj)

    def __len__(self) -> int:
        return len(self._by_hash)

    def get(self, request_hash: str) -> dict | None:
        return self._by_hash.get(request_hash)

    def put(self, request: ChatRequest, response_text: str,
            latency_ms: float = 0.0) -> dict:
        with self._lock:
            existing = self._by_hash.get(request.request_hash)
            if existing is not None:
                return existing
            record = {
                "request_hash": request.request_hash,
                "backend_id": request.backend_id,
                "prompt": request.prompt,
                "response_text": response_text,
                "latency_ms": latency_ms,
                "created_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            }
            self._by_hash[request.request_hash] = record
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")
            return record


def _dig(obj, path: str):
    cur = obj
    for seg in path.split("."):
        if isinstance(cur, list):
            cur = cur[int(seg)]
        else:
            cur = cur[seg]
    return cur


class LlmGateway:
    """Dispatches chat requests across configured backends in one of three modes."""

    def __init__(self, backends: list[BackendConfig], mode: str,
                 store: TranscriptStore | None = None,
                 max_in_flight: int = 2, sleep=time.sleep):
        if mode not in MODES:
            raise GatewayError(f"unknown mode {mode!r}")
        if mode in ("record", "replay") and store is None:
            raise GatewayError(f"{mode} mode requires a transcript store")
        self.mode = mode
        self.store = store
        self.backends = {b.id: b for b in backends}
        if len(self.backends) != len(backends):
            raise GatewayError("backend ids must be unique")
        self._semaphores = {b.id: threading.Semaphore(max_in_flight)
                            for b in backends}
        self._sleep = sleep

    def backend(self, backend_id: str) -> BackendConfig:
        try:
            return self.backends[backend_id]
        except KeyError:
            raise GatewayError(f"unknown backend {backend_id!r}") from None

    def send(self, request: ChatRequest) -> str:
        """Resolve a chat request per the gateway mode; returns response text."""
        if self.mode == "replay":
            record = self.store.get(request.request_hash)
            if record is None:
                raise ReplayMissError(request.request_hash)
            return record["response_text"]
        if self.mode == "record":
            record = self.store.get(request.request_hash)
            if record is not None:
                return record["response_text"]
        backend = self.backend(request.backend_id)
        with self._semaphores[backend.id]:
            started = time.monotonic()
            text = self._call(backend, request)
            latency_ms = (time.monotonic() - started) * 1000.0
        if self.mode == "record":
            self.store.put(request, text, latency_ms=latency_ms)
        return text

    def _call(self, backend: BackendConfig, request: ChatRequest) -> str:
        headers = {}
        if backend.auth_env_var:
            key = os.environ.get(backend.auth_env_var)
            if not key:
                raise GatewayError(
                    f"auth-missing: environment variable {backend.auth_env_var} "
                    f"not set for backend {backend.id}")
            headers["Authorization"] = f"Bearer {key}"
        body = {
            backend.request_fields["model"]: backend.model_name,
            backend.request_fields["prompt"]: request.prompt,
            backend.request_fields["params"]: {
                "temperature": request.temperature,
                "max_output_tokens": request.max_output_tokens,
            },
        }
        last_error: Exception | None = None
        for attempt in range(_RETRY_ATTEMPTS):
            if attempt:
                self._sleep(_RETRY_BASE_DELAY * 2 ** (attempt - 1))
            try:
                resp = httpx.post(backend.endpoint, json=body, headers=headers,
                                  timeout=120.0)
            except httpx.HTTPError as exc:
                last_error = exc
                continue
            if resp.status_code == 429 or resp.status_code >= 500:
                last_error = GatewayError(
                    f"backend {backend.id} returned HTTP {resp.status_code}")
                continue
            if resp.status_code >= 400:
                raise GatewayError(
                    f"backend {backend.id} rejected request: HTTP {resp.status_code}")
            try:
                return str(_dig(resp.json(), backend.response_path))
            except (KeyError, IndexError, ValueError) as exc:
                raise GatewayError(
                    f"backend {backend.id}: cannot find response text at "
                    f"path {backend.response_path!r}") from exc
        raise GatewayError(
            f"backend {backend.id} unreachable after {_RETRY_ATTEMPTS} attempts: "
            f"{last_error}")


def probe(backend: BackendConfig) -> Health:
    """Non-mutating reachability/auth check; never writes transcripts."""
    if backend.auth_env_var and not os.environ.get(backend.auth_env_var):
        return Health(ok=False,
                      detail=f"auth-missing: {backend.auth_env_var} not set")
    try:
        resp = httpx.get(backend.endpoint, timeout=10.0)
    except httpx.HTTPError as exc:
        return Health(ok=False, detail=f"connection failure: {exc}")
    return Health(ok=True, detail=f"HTTP {resp.status_code}")
