"""HTTP client for a chat-completions oracle, plus transcript record/replay.

The remote endpoint is any OpenAI-compatible chat completions server. The API
key is read from an environment variable only; it never appears in config
files. Replies are reduced to a decision by whole-word keyword search, and an
optional JSONL transcript allows bit-exact offline replay of a remote run.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import requests

from .delay import DECISIONS
from .errors import ConfigError, OracleProtocolError, OracleTransportError
from .icl import MetaPrompt

KEYWORD_RE = re.compile(r"\b(local|offload)\b", re.IGNORECASE)


@dataclass
class OracleEndpointConfig:
    base_url: str
    model_name: str
    api_key_env_var: str = "OFFLOADSIM_API_KEY"
    timeout_s: float = 30.0
    max_retries: int = 2
    temperature: float = 0.0
    backoff_s: float = 0.5  # doubled per retry

    def __post_init__(self) -> None:
        if not self.base_url:
            raise ConfigError("base_url must be non-empty")
        if not self.model_name:
            raise ConfigError("model_name must be non-empty")
        if self.timeout_s <= 0:
            raise ConfigError("timeout_s must be > 0")
        if self.max_retries < 0:
            raise ConfigError("max_retries must be >= 0")
        if self.backoff_s < 0:
            raise ConfigError("backoff_s must be >= 0")


def extract_decision(reply: str) -> str:
    """Pick the decision keyword out of a free-form reply.

    Exactly one distinct keyword must occur as a whole word; anything else is
    a protocol error so the caller can retry the query.
    """
    found = {m.lower() for m in KEYWORD_RE.findall(reply)}
    if len(found) != 1:
        raise OracleProtocolError(f"reply does not name exactly one decision: {reply!r}")
    return found.pop()


def _api_key(cfg: OracleEndpointConfig) -> str:
    key = os.environ.get(cfg.api_key_env_var)
    if not key:
        raise ConfigError(f"environment variable {cfg.api_key_env_var} is not set")
    return key


def remote_answer(cfg: OracleEndpointConfig, prompt_text: str) -> str:
    """POST the prompt and return the raw completion text.

    Timeouts, connection failures and 5xx responses are retried with
    exponential backoff; other HTTP errors fail immediately.
    """
    url = cfg.base_url.rstrip("/") + "/chat/completions"
    payload = {
        "model": cfg.model_name,
        "messages": [{"role": "user", "content": prompt_text}],
        "temperature": cfg.temperature,
    }
    headers = {
        "Authorization": f"Bearer {_api_key(cfg)}",
        "Content-Type": "application/json",
    }
    last_error: Optional[Exception] = None
    for attempt in range(cfg.max_retries + 1):
        if attempt > 0 and cfg.backoff_s > 0:
            time.sleep(cfg.backoff_s * 2 ** (attempt - 1))
        try:
            resp = requests.post(url, json=payload, headers=headers,
                                 timeout=cfg.timeout_s)
        except (requests.Timeout, requests.ConnectionError) as exc:
            last_error = exc
            continue
        if resp.status_code >= 500:
            last_error = OracleTransportError(f"server error {resp.status_code}")
            continue
        if resp.status_code >= 400:
            raise OracleTransportError(f"request rejected: {resp.status_code} {resp.text!r}")
        try:
            body = resp.json()
            content = body["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise OracleProtocolError("malformed completion response") from exc
        if not isinstance(content, str):
            raise OracleProtocolError("completion content is not text")
        return content
    raise OracleTransportError(
        f"no response after {cfg.max_retries + 1} attempts"
    ) from last_error


def prompt_hash(prompt_text: str) -> str:
    return hashlib.sha256(prompt_text.encode("utf-8")).hexdigest()


class TranscriptWriter:
    """Append-only JSONL log of oracle exchanges."""

    def __init__(self, path: "str | Path") -> None:
        self.path = Path(path)
        self._fh = self.path.open("a", encoding="utf-8")

    def record(self, step: int, prompt_text: str, reply: str,
               decision: Optional[str]) -> None:
        entry = {
            "ts": time.time(),
            "step": step,
            "prompt_sha256": prompt_hash(prompt_text),
            "reply": reply,
            "decision": decision,
        }
        self._fh.write(json.dumps(entry) + "\n")
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self) -> "TranscriptWriter":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


@dataclass
class RemoteOracle:
    """DecisionOracle backed by the HTTP endpoint, with optional transcript."""

    config: OracleEndpointConfig
    transcript: Optional[TranscriptWriter] = None
    _step: int = field(default=0, init=False, repr=False)

    def answer(self, prompt: MetaPrompt) -> str:
        reply = remote_answer(self.config, prompt.text)
        try:
            decision = extract_decision(reply)
        except OracleProtocolError:
            if self.transcript is not None:
                self.transcript.record(self._step, prompt.text, reply, None)
            self._step += 1
            raise
        if self.transcript is not None:
            self.transcript.record(self._step, prompt.text, reply, decision)
        self._step += 1
        return decision


class ReplayOracle:
    """Replays a recorded transcript in order.

    With strict=True every replayed prompt must hash to the recorded value,
    which guards against replaying a transcript into a diverged run.
    """

    def __init__(self, transcript_path: "str | Path", strict: bool = True) -> None:
        self.strict = strict
        self._entries = []
        for line in Path(transcript_path).read_text(encoding="utf-8").splitlines():
            if line.strip():
                self._entries.append(json.loads(line))
        self._next = 0

    def answer(self, prompt: MetaPrompt) -> str:
        if self._next >= len(self._entries):
            raise OracleProtocolError("transcript exhausted")
        entry = self._entries[self._next]
        index = self._next
        self._next += 1
        if self.strict and entry.get("prompt_sha256") != prompt_hash(prompt.text):
            raise OracleProtocolError(f"prompt hash mismatch at transcript entry {index}")
        decision = entry.get("decision")
        if decision not in DECISIONS:
            raise OracleProtocolError(f"transcript entry {index} has no usable decision")
        return decision
