from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gentl.errors import InvalidParams, TooFewEvents
from gentl.prompts import (
    PromptParams,
    build_events_prompt,
    build_explain_prompt,
    build_image_prompt,
    build_questions_prompt,
    build_relationship_prompt,
    leftover_placeholders,
)

from .conftest import AOD_NAMES, golden


def aod_params(**overrides) -> PromptParams:
    params = dict(topic="Age of Discovery", context="North America")
    params.update(overrides)
    return PromptParams(**params)


# --- golden transcriptions ----


def test_events_prompt_matches_golden():
    assert build_events_prompt(aod_params()) == golden("events_example.txt")


def test_events_prompt_sentinel_matches_golden():
    params = PromptParams(topic="⟨T⟩", context="⟨C⟩")
    assert build_events_prompt(params) == golden("events_sentinel.txt")


def test_explain_prompt_matches_golden():
    assert build_explain_prompt("Age of Discovery", "North America") == golden(
        "explain_example.txt"
    )


def test_questions_prompt_matches_golden():
    assert build_questions_prompt("Age of Discovery", "North America") == golden(
        "questions_example.txt"
    )


def test_image_prompt_matches_golden():
    prompt = build_image_prompt("Age of Discovery", "Description for Age of Discovery")
    assert prompt == golden("image_example.txt")


def test_relationship_prompt_matches_golden():
    prompt = build_relationship_prompt("Age of Discovery", "North America", AOD_NAMES)
    assert prompt == golden("relationship_example.txt")


# --- events ----


def test_events_prompt_opening_sentence():
    prompt = build_events_prompt(aod_params())
    assert prompt.startswith(
        "Give me 8 give or take 2 events that helped to directly support "
        "Age of Discovery within the broader context of North America."
    )


def test_events_prompt_minimal_counts():
    prompt = build_events_prompt(
        PromptParams(topic="X", context="Y", num_of_topics=1, num_of_margin=0)
    )
    assert prompt.startswith("Give me 1 give or take 0 events")


def test_events_prompt_contains_format_clause():
    prompt = build_events_prompt(aod_params())
    assert "within 500 years" in prompt
    assert prompt.endswith(
        '{"events":[{"Event_name":"Event_name","Year":"Year","Type":"Type"}]}'
    )


def test_events_prompt_empty_topic_rejected():
    with pytest.raises(InvalidParams):
        build_events_prompt(aod_params(topic="   "))


def test_margin_must_not_swallow_request():
    with pytest.raises(InvalidParams):
        build_events_prompt(aod_params(num_of_topics=2, num_of_margin=2))


# --- explain / questions / image ----


def test_explain_prompt_substitution():
    prompt = build_explain_prompt("Age of Discovery", "North America")
    assert (
        "Explain Age of Discovery within the broader context of North America."
        in prompt
    )
    assert "3000 characters" in prompt


def test_explain_prompt_focus_clause():
    assert "focus on A" in build_explain_prompt("A", "B")


def test_questions_prompt_substitution():
    prompt = build_questions_prompt("Age of Discovery", "North America")
    assert (
        "I need to learn about Age of Discovery in relation to the overall "
        "context of North America." in prompt
    )


def test_questions_prompt_constants():
    prompt = build_questions_prompt("A", "B")
    assert "total of 5 questions" in prompt
    assert "comma separated values (CSV)" in prompt


def test_image_prompt_substitution():
    prompt = build_image_prompt("Age of Discovery", "some description")
    assert "sketch-like image for the concept: Age of Discovery" in prompt


def test_image_prompt_result_clause():
    assert "representative of the following content: B" in build_image_prompt("A", "B")


def test_image_prompt_rejects_empty():
    with pytest.raises(InvalidParams):
        build_image_prompt("A", " ")


# --- relationship ----


def test_relationship_prompt_contains_all_names():
    prompt = build_relationship_prompt("Age of Discovery", "North America", AOD_NAMES)
    assert "tell me how these events relate" in prompt
    for name in AOD_NAMES:
        assert name in prompt


def test_relationship_prompt_bracketed_list():
    prompt = build_relationship_prompt("T", "C", ["A", "B"])
    assert prompt.count("[A, B]") == 1


def test_relationship_prompt_needs_two_events():
    with pytest.raises(TooFewEvents):
        build_relationship_prompt("T", "C", ["only one"])


# --- properties ----


def test_determinism():
    first = build_events_prompt(aod_params())
    second = build_events_prompt(aod_params())
    assert first == second


_plain = st.text(
    alphabet=st.characters(blacklist_characters="{}", blacklist_categories=("Cs",)),
    min_size=1,
    max_size=40,
).filter(lambda s: s.strip())


@given(topic=_plain, context=_plain, names=st.lists(_plain, min_size=2, max_size=5))
def test_no_placeholder_residue(topic, context, names):
    rendered = [
        build_events_prompt(PromptParams(topic=topic, context=context)),
        build_explain_prompt(topic, context),
        build_questions_prompt(topic, context),
        build_relationship_prompt(topic, context, names),
        build_image_prompt(topic, context),
    ]
    for prompt in rendered:
        assert leftover_placeholders(prompt) == []
