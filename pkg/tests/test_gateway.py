from __future__ import annotations

import json

import httpx
import pytest

from gentl.errors import (
    BudgetExceeded,
    InvalidParams,
    Timeout,
    TransportFailure,
    UpstreamError,
)
from gentl.gateway import (
    CompletionRequest,
    LiveProvider,
    MockProvider,
    ProviderResponse,
    RequestBudget,
    SourceRef,
    complete,
    complete_with_citations,
    fixture_key,
    write_fixture,
)
from gentl.model import RecordKind
from gentl.parsers import parse_events

from .conftest import AOD_NAMES, FIXTURES_DIR


def events_request(topic="Age of Discovery", context="North America", **kw):
    return CompletionRequest(
        prompt="p", kind=RecordKind.EVENTS, topic=topic, context=context, **kw
    )


# --- mock provider: fixtures ----


def test_fixture_served_verbatim():
    provider = MockProvider(fixtures_dir=FIXTURES_DIR, mode="strict")
    result = complete(events_request(), provider)
    expected = (
        FIXTURES_DIR
        / f"{fixture_key(RecordKind.EVENTS, 'Age of Discovery', 'North America')}.txt"
    ).read_text("utf-8")
    assert result.text == expected
    drafts, _ = parse_events(result.text)
    assert [d.name for d in drafts] == AOD_NAMES


def test_strict_mode_unknown_key_errors():
    provider = MockProvider(fixtures_dir=FIXTURES_DIR, mode="strict")
    with pytest.raises(UpstreamError, match="no fixture"):
        complete(events_request(topic="Unknown Topic"), provider)


def test_fixture_index_is_consistent():
    index = json.loads((FIXTURES_DIR / "index.json").read_text("utf-8"))
    for key, entry in index.items():
        assert (FIXTURES_DIR / f"{key}.txt").exists()
        assert key == fixture_key(
            RecordKind(entry["kind"]),
            entry["topic"],
            entry["context"],
            tuple(entry["subevents"]) or None,
        )


# --- mock provider: demo synthesis ----


def test_demo_events_synthesis_parses():
    provider = MockProvider(mode="demo")
    result = complete(events_request(topic="Some Topic", num_of_topics=6), provider)
    drafts, warnings = parse_events(result.text)
    assert len(drafts) == 6
    assert [d.name for d in drafts] == [f"Some Topic — event {k}" for k in range(1, 7)]
    assert [d.year for d in drafts] == list(range(1900, 1906))
    assert all(d.event_type.value == "Other" for d in drafts)
    # fallback synthesis emits recognized labels only
    assert not any("unrecognized" in w for w in warnings)


def test_demo_synthesis_is_bit_deterministic():
    a = MockProvider(mode="demo")
    b = MockProvider(mode="demo")
    for kind in RecordKind:
        request = CompletionRequest(
            prompt="p",
            kind=kind,
            topic="T",
            context="C",
            subevents=("A", "B") if kind is RecordKind.RELATIONSHIP else None,
        )
        assert a.generate(request).text.encode() == b.generate(request).text.encode()


def test_demo_questions_synthesis_yields_five():
    provider = MockProvider(mode="demo")
    result = complete(
        CompletionRequest(prompt="p", kind=RecordKind.QUESTIONS, topic="T", context="C"),
        provider,
    )
    from gentl.parsers import parse_questions

    questions, _ = parse_questions(result.text)
    assert len(questions) == 5


def test_demo_relationship_synthesis_references_subevents():
    provider = MockProvider(mode="demo")
    response = provider.generate(
        CompletionRequest(
            prompt="p",
            kind=RecordKind.RELATIONSHIP,
            topic="T",
            context="C",
            subevents=("First Thing", "Second Thing"),
        )
    )
    assert "@First Thing=" in response.text
    assert "@Second Thing=" in response.text


# --- citations ----


def test_fixture_citations_preserved_in_order():
    provider = MockProvider(fixtures_dir=FIXTURES_DIR, mode="strict")
    result = complete_with_citations(
        CompletionRequest(
            prompt="p",
            kind=RecordKind.EXPLAIN,
            topic="Age of Discovery",
            context="North America",
        ),
        provider,
    )
    assert [c.title for c in result.citations] == [
        "Age of Discovery - Wikipedia",
        "European exploration | Britannica",
    ]
    assert result.citations[0].anchor == (4, 20)
    assert result.warnings == []


class NoSearchProvider:
    name = "nosearch"
    supports_search = False

    def generate(self, request):
        return ProviderResponse(text="plain text")


def test_provider_without_search_degrades_with_warning():
    result = complete_with_citations(
        CompletionRequest(prompt="p", kind=RecordKind.EXPLAIN), NoSearchProvider()
    )
    assert result.citations == []
    assert any("citations omitted" in w for w in result.warnings)


def test_out_of_range_anchor_dropped_with_warning(tmp_path):
    write_fixture(
        tmp_path,
        RecordKind.EXPLAIN,
        "T",
        "C",
        "tiny",
        citations=[{"title": "src", "url": "u", "anchor": [0, 400]}],
    )
    provider = MockProvider(fixtures_dir=tmp_path, mode="strict")
    result = complete_with_citations(
        CompletionRequest(prompt="p", kind=RecordKind.EXPLAIN, topic="T", context="C"),
        provider,
    )
    assert len(result.citations) == 1
    assert result.citations[0].anchor is None
    assert any("anchor" in w for w in result.warnings)


# --- retries, budget, latency ----


class FlakyProvider:
    name = "flaky"
    supports_search = False

    def __init__(self, failures: int):
        self.failures = failures
        self.calls = 0

    def generate(self, request):
        self.calls += 1
        if self.calls <= self.failures:
            raise TransportFailure("connection reset")
        return ProviderResponse(text="ok")


def test_transport_failures_retried_twice():
    provider = FlakyProvider(failures=2)
    result = complete(
        CompletionRequest(prompt="p", kind=RecordKind.EXPLAIN),
        provider,
        backoff_base_s=0.0,
    )
    assert result.text == "ok"
    assert provider.calls == 3


def test_three_transport_failures_exhaust_retries():
    provider = FlakyProvider(failures=3)
    with pytest.raises(TransportFailure):
        complete(
            CompletionRequest(prompt="p", kind=RecordKind.EXPLAIN),
            provider,
            backoff_base_s=0.0,
        )
    assert provider.calls == 3


def test_latency_is_measured():
    result = complete(events_request(), MockProvider(mode="demo"))
    assert result.latency_ms >= 0


def test_timeout_floor_enforced():
    with pytest.raises(InvalidParams):
        complete(events_request(timeout_ms=500), MockProvider(mode="demo"))


def test_budget_exhaustion():
    budget = RequestBudget(max_requests=2)
    provider = MockProvider(mode="demo")
    complete(events_request(), provider, budget)
    complete(events_request(), provider, budget)
    with pytest.raises(BudgetExceeded):
        complete(events_request(), provider, budget)


# --- live provider over a stub transport ----


def _live(handler, search=False):
    return LiveProvider(
        base_url="https://llm.test/v1",
        model="m",
        api_key="k",
        search=search,
        transport=httpx.MockTransport(handler),
    )


def test_live_provider_happy_path():
    def handler(request):
        body = json.loads(request.content)
        assert body["model"] == "m"
        assert request.headers["authorization"] == "Bearer k"
        return httpx.Response(
            200, json={"choices": [{"message": {"content": "hello"}}]}
        )

    result = complete(events_request(), _live(handler))
    assert result.text == "hello"


def test_live_provider_maps_http_errors():
    def handler(request):
        return httpx.Response(503, text="overloaded")

    with pytest.raises(UpstreamError) as info:
        complete(events_request(), _live(handler), backoff_base_s=0.0)
    assert info.value.status == 503
    assert "overloaded" in info.value.body


def test_live_provider_maps_timeouts():
    def handler(request):
        raise httpx.ReadTimeout("too slow")

    with pytest.raises(Timeout):
        complete(events_request(), _live(handler))


def test_live_provider_retries_transport_errors():
    calls = {"n": 0}

    def handler(request):
        calls["n"] += 1
        if calls["n"] < 3:
            raise httpx.ConnectError("refused")
        return httpx.Response(200, json={"choices": [{"message": {"content": "ok"}}]})

    result = complete(events_request(), _live(handler), backoff_base_s=0.0)
    assert result.text == "ok"
    assert calls["n"] == 3


def test_live_provider_citations():
    def handler(request):
        return httpx.Response(
            200,
            json={
                "choices": [{"message": {"content": "cited text"}}],
                "citations": [
                    {"title": "S1", "url": "https://s1", "start": 0, "end": 5},
                    {"title": "S2", "url": "https://s2"},
                ],
            },
        )

    result = complete_with_citations(events_request(), _live(handler, search=True))
    assert [c.title for c in result.citations] == ["S1", "S2"]
    assert result.citations[0].anchor == (0, 5)
    assert result.citations[1].anchor is None


def test_live_provider_requires_key(monkeypatch):
    monkeypatch.delenv("GENTL_API_KEY", raising=False)
    with pytest.raises(InvalidParams):
        LiveProvider(base_url="https://x", model="m")


def test_source_ref_defaults():
    ref = SourceRef(title="t", url="u")
    assert ref.anchor is None
