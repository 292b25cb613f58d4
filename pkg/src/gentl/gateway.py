"""Provider abstraction for text generation and citation-returning search.

Two providers ship: a deterministic mock backed by a fixture directory
(with rule-based synthesis for unknown keys in demo mode) and a live
HTTPS chat-completion client. The gateway owns retries, timeouts, latency
measurement, and the per-session request budget; everything above it is
provider-agnostic.

Fixture directory layout: one UTF-8 ``<hash>.txt`` per response, where
``<hash>`` is a stable digest of (kind, topic, context, subevents);
optional ``<hash>.citations.json`` sidecars carry source metadata; an
``index.json`` maps hashes back to human-readable keys.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import httpx

from gentl.errors import (
    BudgetExceeded,
    InvalidParams,
    Timeout,
    TransportFailure,
    UpstreamError,
)
from gentl.model import Citation, RecordKind

logger = logging.getLogger("gentl.gateway")

DEFAULT_TEMPERATURE = 0.7
DEFAULT_TIMEOUT_MS = 60_000
MAX_RETRIES = 2
BACKOFF_BASE_S = 0.5
DEMO_BASE_YEAR = 1900

# Informational latency envelopes (ms) observed for each interaction in
# live operation; logged for comparison, never asserted.
LATENCY_ENVELOPES_MS: dict[RecordKind, tuple[int, int]] = {
    RecordKind.EVENTS: (8_000, 10_000),
    RecordKind.EXPLAIN: (2_000, 4_000),
    RecordKind.QUESTIONS: (2_000, 4_000),
    RecordKind.RELATIONSHIP: (2_000, 4_000),
    RecordKind.IMAGE: (8_000, 10_000),
}


@dataclass
class CompletionRequest:
    """One generation request.

    ``topic`` / ``context`` / ``subevents`` / ``num_of_topics`` mirror the
    prompt parameters; the mock provider keys its fixture lookup on them
    and the live provider ignores them.
    """

    prompt: str
    kind: RecordKind
    temperature: float = DEFAULT_TEMPERATURE
    timeout_ms: int = DEFAULT_TIMEOUT_MS
    topic: str = ""
    context: str = ""
    subevents: tuple[str, ...] | None = None
    num_of_topics: int = 8


@dataclass
class SourceRef:
    title: str
    url: str
    anchor: tuple[int, int] | None = None


@dataclass
class ProviderResponse:
    text: str
    sources: list[SourceRef] = field(default_factory=list)


@dataclass
class CompletionResult:
    text: str
    citations: list[Citation] = field(default_factory=list)
    latency_ms: int = 0
    warnings: list[str] = field(default_factory=list)


@dataclass
class RequestBudget:
    """Optional per-session cap on provider calls."""

    max_requests: int
    used: int = 0

    def consume(self) -> None:
        if self.used >= self.max_requests:
            raise BudgetExceeded(
                f"session request budget of {self.max_requests} exhausted"
            )
        self.used += 1


class Provider(Protocol):
    name: str
    supports_search: bool

    def generate(self, request: CompletionRequest) -> ProviderResponse: ...


def fixture_key(
    kind: RecordKind,
    topic: str,
    context: str,
    subevents: tuple[str, ...] | None = None,
) -> str:
    payload = json.dumps(
        [kind.value, topic, context, list(subevents or [])],
        ensure_ascii=False,
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def _slug(text: str) -> str:
    return re.sub(r"[^a-z0-9]+", "-", text.lower()).strip("-") or "topic"


class MockProvider:
    """Bit-deterministic provider for tests, demos, and CI.

    ``strict`` mode serves fixtures only and fails on unknown keys;
    ``demo`` mode falls back to rule-based synthesis so any exploration
    works offline.
    """

    name = "mock"
    supports_search = True

    def __init__(self, fixtures_dir: str | Path | None = None, mode: str = "demo"):
        if mode not in ("demo", "strict"):
            raise InvalidParams(f"unknown mock mode {mode!r}")
        self.fixtures_dir = Path(fixtures_dir) if fixtures_dir else None
        self.mode = mode

    def generate(self, request: CompletionRequest) -> ProviderResponse:
        key = fixture_key(
            request.kind, request.topic, request.context, request.subevents
        )
        if self.fixtures_dir is not None:
            text_path = self.fixtures_dir / f"{key}.txt"
            if text_path.exists():
                sources = self._load_sources(key)
                return ProviderResponse(
                    text=text_path.read_text("utf-8"), sources=sources
                )
        if self.mode == "strict":
            raise UpstreamError(
                f"no fixture for ({request.kind.value}, {request.topic!r}, "
                f"{request.context!r})",
                status=404,
            )
        return self._synthesize(request)

    def _load_sources(self, key: str) -> list[SourceRef]:
        sidecar = self.fixtures_dir / f"{key}.citations.json"
        if not sidecar.exists():
            return []
        entries = json.loads(sidecar.read_text("utf-8"))
        return [
            SourceRef(
                title=e["title"],
                url=e["url"],
                anchor=tuple(e["anchor"]) if e.get("anchor") else None,
            )
            for e in entries
        ]

    def _synthesize(self, request: CompletionRequest) -> ProviderResponse:
        topic, context = request.topic, request.context
        if request.kind is RecordKind.EVENTS:
            n = max(1, request.num_of_topics)
            events = [
                {
                    "Event_name": f"{topic} — event {k}",
                    "Year": str(DEMO_BASE_YEAR + k - 1),
                    "Type": "Other",
                }
                for k in range(1, n + 1)
            ]
            return ProviderResponse(json.dumps({"events": events}, ensure_ascii=False))
        if request.kind is RecordKind.EXPLAIN:
            text = (
                f"{topic} developed within {context} through several connected steps. "
                "Early work established the foundations and later refinements "
                "broadened its reach. Its influence is still traced in how the "
                "topic is studied today."
            )
            return ProviderResponse(text, sources=self._demo_sources(topic))
        if request.kind is RecordKind.QUESTIONS:
            text = (
                f"What led to {topic}?, How did {topic} develop within {context}?, "
                f"Who shaped {topic}?, What changed after {topic}?, "
                f"Why does {topic} matter today?"
            )
            return ProviderResponse(text)
        if request.kind is RecordKind.RELATIONSHIP:
            names = list(request.subevents or [])
            parts = [f"Within {topic}, these events trace one developing chain."]
            for i in range(len(names) - 1):
                parts.append(
                    f"=event {i + 1}@{names[i]}= prepared the ground for "
                    f"=event {i + 2}@{names[i + 1]}=."
                )
            return ProviderResponse(" ".join(parts), sources=self._demo_sources(topic))
        if request.kind is RecordKind.IMAGE:
            return ProviderResponse(f"image://demo/{_slug(topic)}")
        raise UpstreamError(f"unsupported kind {request.kind}", status=400)

    def _demo_sources(self, topic: str) -> list[SourceRef]:
        slug = _slug(topic)
        return [
            SourceRef(title=f"Reference: {topic}", url=f"https://example.org/ref/{slug}"),
            SourceRef(title=f"Background on {topic}", url=f"https://example.org/bg/{slug}"),
        ]


class LiveProvider:
    """HTTPS chat-completion client.

    Credentials come from the GENTL_API_KEY environment variable; model
    and endpoint are configuration. When ``search`` is enabled the
    endpoint is expected to return a ``citations`` list alongside the
    message (title/url plus optional character offsets).
    """

    name = "live"

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key: str | None = None,
        search: bool = False,
        transport: httpx.BaseTransport | None = None,
    ):
        key = api_key if api_key is not None else os.environ.get("GENTL_API_KEY", "")
        if not key:
            raise InvalidParams("GENTL_API_KEY is not set")
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.supports_search = search
        self._client = httpx.Client(
            headers={"Authorization": f"Bearer {key}"}, transport=transport
        )

    def generate(self, request: CompletionRequest) -> ProviderResponse:
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": request.prompt}],
            "temperature": request.temperature,
        }
        if self.supports_search:
            payload["web_search"] = True
        try:
            response = self._client.post(
                f"{self.base_url}/chat/completions",
                json=payload,
                timeout=request.timeout_ms / 1000.0,
            )
        except httpx.TimeoutException as exc:
            raise Timeout(f"provider call exceeded {request.timeout_ms} ms") from exc
        except httpx.TransportError as exc:
            raise TransportFailure(str(exc)) from exc
        if response.status_code >= 400:
            raise UpstreamError(
                f"provider returned status {response.status_code}",
                status=response.status_code,
                body=response.text,
            )
        data = response.json()
        text = data["choices"][0]["message"]["content"]
        sources = [
            SourceRef(
                title=c.get("title", ""),
                url=c.get("url", ""),
                anchor=(c["start"], c["end"]) if "start" in c and "end" in c else None,
            )
            for c in data.get("citations", [])
        ]
        return ProviderResponse(text=text, sources=sources)


def _run_with_retries(
    request: CompletionRequest,
    provider: Provider,
    budget: RequestBudget | None,
    backoff_base_s: float,
) -> tuple[ProviderResponse, int]:
    if request.timeout_ms < 1000:
        raise InvalidParams("timeout_ms must be at least 1000")
    if budget is not None:
        budget.consume()
    start = time.monotonic()
    attempt = 0
    while True:
        try:
            response = provider.generate(request)
            break
        except TransportFailure:
            if attempt >= MAX_RETRIES:
                raise
            time.sleep(backoff_base_s * (2**attempt))
            attempt += 1
    latency_ms = int((time.monotonic() - start) * 1000)
    _note_latency(provider, request.kind, latency_ms)
    return response, latency_ms


def complete(
    request: CompletionRequest,
    provider: Provider,
    budget: RequestBudget | None = None,
    backoff_base_s: float = BACKOFF_BASE_S,
) -> CompletionResult:
    """Run one completion with retry-on-transport-failure and latency
    measurement. Up to 2 retries with exponential backoff (500 ms base)."""
    response, latency_ms = _run_with_retries(request, provider, budget, backoff_base_s)
    return CompletionResult(text=response.text, latency_ms=latency_ms)


def complete_with_citations(
    request: CompletionRequest,
    provider: Provider,
    budget: RequestBudget | None = None,
    backoff_base_s: float = BACKOFF_BASE_S,
) -> CompletionResult:
    """As ``complete`` but with source citations when the provider can
    search; otherwise degrades to a plain completion with a warning."""
    if not getattr(provider, "supports_search", False):
        result = complete(request, provider, budget, backoff_base_s)
        result.warnings.append("provider does not support search; citations omitted")
        return result
    response, latency_ms = _run_with_retries(request, provider, budget, backoff_base_s)

    warnings: list[str] = []
    citations: list[Citation] = []
    for source in response.sources:
        anchor = source.anchor
        if anchor is not None:
            start_off, end_off = anchor
            if not (0 <= start_off <= end_off <= len(response.text)):
                warnings.append(
                    f"citation {source.title!r}: anchor {anchor} beyond text, dropped"
                )
                anchor = None
        citations.append(Citation(title=source.title, url=source.url, anchor=anchor))
    return CompletionResult(
        text=response.text,
        citations=citations,
        latency_ms=latency_ms,
        warnings=warnings,
    )


def _note_latency(provider: Provider, kind: RecordKind, latency_ms: int) -> None:
    if getattr(provider, "name", "") == "mock":
        return
    envelope = LATENCY_ENVELOPES_MS.get(kind)
    if envelope is None:
        return
    lo, hi = envelope
    logger.info(
        "%s completion took %d ms (typical live envelope %d-%d ms)",
        kind.value,
        latency_ms,
        lo,
        hi,
    )


def write_fixture(
    fixtures_dir: str | Path,
    kind: RecordKind,
    topic: str,
    context: str,
    text: str,
    subevents: tuple[str, ...] | None = None,
    citations: list[dict] | None = None,
) -> str:
    """Add one fixture (plus optional citations sidecar) and update the
    human-readable index. Returns the fixture hash."""
    directory = Path(fixtures_dir)
    directory.mkdir(parents=True, exist_ok=True)
    key = fixture_key(kind, topic, context, subevents)
    (directory / f"{key}.txt").write_text(text, "utf-8")
    if citations is not None:
        (directory / f"{key}.citations.json").write_text(
            json.dumps(citations, ensure_ascii=False, indent=2), "utf-8"
        )
    index_path = directory / "index.json"
    index = json.loads(index_path.read_text("utf-8")) if index_path.exists() else {}
    index[key] = {
        "kind": kind.value,
        "topic": topic,
        "context": context,
        "subevents": list(subevents or []),
    }
    index_path.write_text(
        json.dumps(index, ensure_ascii=False, indent=2, sort_keys=True), "utf-8"
    )
    return key
