"""Chat-completion client with deterministic record/replay.

Queries go to OpenAI-style chat endpoints; which URL and credential
environment variable a provider name maps to comes from an INI config
(a packaged default covers the common providers).  Every request is
keyed by a digest of (provider, model, temperature, prompt bytes); in
record mode the response is persisted into a cassette JSON file under
that digest, and replay mode answers purely from the cassette — no
transport is ever constructed, so the test suite runs with zero network
access.  Temperature defaults to 0 for stable runs.

Truncation is not an error: a response cut off at the token limit comes
back with finish_reason "length" and is scored like any other.
"""

from __future__ import annotations

import configparser
import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

import httpx

MODES = ("live", "record", "replay")
CASSETTE_VERSION = 1


class CassetteMissError(KeyError):
    """Replay mode was asked for a request that was never recorded."""


class MissingCredentialsError(RuntimeError):
    pass


class CompletionTransportError(RuntimeError):
    pass


@dataclass
class ModelConfig:
    provider: str
    model: str
    temperature: float = 0.0
    max_output_tokens: int = 4096
    timeout: float = 120.0

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature {self.temperature} outside [0, 2]")


@dataclass
class Completion:
    text: str
    finish_reason: str
    token_counts: dict = field(default_factory=dict)


def request_digest(provider: str, model: str, temperature: float, prompt: str) -> str:
    payload = json.dumps(
        [provider, model, temperature, prompt], ensure_ascii=False, separators=(",", ":")
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class Cassette:
    """One JSON file of recorded responses; entries are immutable once
    written (re-recording the same digest must not change it)."""

    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()
        if self.path.exists():
            doc = json.loads(self.path.read_text("utf-8"))
            if doc.get("v") != CASSETTE_VERSION:
                raise ValueError(f"unsupported cassette version {doc.get('v')!r}")
            self.entries = doc["entries"]
        else:
            self.entries = {}

    def get(self, digest: str):
        entry = self.entries.get(digest)
        if entry is None:
            return None
        return Completion(
            text=entry["response_text"],
            finish_reason=entry["finish_reason"],
            token_counts=dict(entry.get("token_counts", {})),
        )

    def put(self, digest: str, completion: Completion) -> None:
        with self._lock:
            if digest in self.entries:
                return
            self.entries[digest] = {
                "response_text": completion.text,
                "finish_reason": completion.finish_reason,
                "token_counts": dict(completion.token_counts),
                "timestamp": datetime.now(timezone.utc).isoformat(),
            }

    def save(self) -> None:
        with self._lock:
            doc = {"v": CASSETTE_VERSION, "entries": self.entries}
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.write_text(
                json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n", "utf-8"
            )


@dataclass
class ProviderConfig:
    url: str
    api_key_env: str


def load_providers(path=None) -> dict:
    parser = configparser.ConfigParser()
    if path is None:
        parser.read_string(
            resources.files("absint").joinpath("providers.ini").read_text("utf-8")
        )
    else:
        with open(path) as fh:
            parser.read_file(fh)
    providers = {}
    for section in parser.sections():
        providers[section] = ProviderConfig(
            url=parser.get(section, "url"),
            api_key_env=parser.get(section, "api_key_env"),
        )
    return providers


class LlmClient:
    """Thread-safe client; at most ``max_inflight`` live requests per
    provider at a time."""

    def __init__(
        self,
        providers: dict = None,
        transport: httpx.BaseTransport = None,
        sleeper=time.sleep,
        max_attempts: int = 3,
        max_inflight: int = 4,
    ):
        self.providers = providers if providers is not None else load_providers()
        self.transport = transport
        self.sleeper = sleeper
        self.max_attempts = max_attempts
        self.max_inflight = max_inflight
        self._semaphores = {}
        self._sem_lock = threading.Lock()

    def _semaphore(self, provider: str) -> threading.Semaphore:
        with self._sem_lock:
            if provider not in self._semaphores:
                self._semaphores[provider] = threading.Semaphore(self.max_inflight)
            return self._semaphores[provider]

    def complete(
        self, cfg: ModelConfig, prompt: str, mode: str = "replay", cassette: Cassette = None
    ) -> Completion:
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        digest = request_digest(cfg.provider, cfg.model, cfg.temperature, prompt)
        if mode == "replay":
            if cassette is None:
                raise CassetteMissError("replay mode requires a cassette")
            hit = cassette.get(digest)
            if hit is None:
                raise CassetteMissError(f"no recorded response for digest {digest}")
            return hit
        if mode == "record" and cassette is not None:
            hit = cassette.get(digest)
            if hit is not None:
                return hit
        completion = self._live(cfg, prompt)
        if mode == "record":
            if cassette is None:
                raise ValueError("record mode requires a cassette")
            cassette.put(digest, completion)
            cassette.save()
        return completion

    def _live(self, cfg: ModelConfig, prompt: str) -> Completion:
        provider = self.providers.get(cfg.provider)
        if provider is None:
            raise ValueError(f"provider {cfg.provider!r} not configured")
        api_key = os.environ.get(provider.api_key_env)
        if not api_key:
            raise MissingCredentialsError(
                f"environment variable {provider.api_key_env} is not set"
            )
        payload = {
            "model": cfg.model,
            "temperature": cfg.temperature,
            "max_tokens": cfg.max_output_tokens,
            "messages": [{"role": "user", "content": prompt}],
        }
        headers = {"Authorization": f"Bearer {api_key}"}
        last_error = None
        with self._semaphore(cfg.provider):
            for attempt in range(self.max_attempts):
                if attempt:
                    self.sleeper(0.5 * 2 ** (attempt - 1))
                try:
                    with httpx.Client(transport=self.transport, timeout=cfg.timeout) as client:
                        response = client.post(provider.url, json=payload, headers=headers)
                except httpx.HTTPError as exc:
                    last_error = exc
                    continue
                if response.status_code in (429,) or response.status_code >= 500:
                    last_error = CompletionTransportError(
                        f"HTTP {response.status_code}: {response.text[:200]}"
                    )
                    continue
                if response.status_code != 200:
                    raise CompletionTransportError(
                        f"HTTP {response.status_code}: {response.text[:200]}"
                    )
                doc = response.json()
                choice = doc["choices"][0]
                return Completion(
                    text=choice["message"]["content"],
                    finish_reason=choice.get("finish_reason", "stop"),
                    token_counts=dict(doc.get("usage", {})),
                )
        raise CompletionTransportError(
            f"request failed after {self.max_attempts} attempts: {last_error}"
        )


def complete(cfg: ModelConfig, prompt: str, mode: str, cassette_path=None, **kwargs) -> Completion:
    cassette = Cassette(cassette_path) if cassette_path else None
    return LlmClient(**kwargs).complete(cfg, prompt, mode=mode, cassette=cassette)
