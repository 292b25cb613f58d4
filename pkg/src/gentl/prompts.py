"""Prompt construction for the five generation kinds.

Templates live as checked-in text files under ``templates/`` so golden
tests and runtime share one source of truth. Rendering is plain token
substitution (the events template contains literal JSON braces, so
``str.format`` is unusable here) and is deterministic byte-for-byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

from gentl.errors import InvalidParams, TooFewEvents

DEFAULT_NUM_OF_TOPICS = 8
DEFAULT_NUM_OF_MARGIN = 2
DEFAULT_CONTEXT = "general knowledge"

_PLACEHOLDERS = (
    "{numOfTopics}",
    "{numOfMargin}",
    "{topic}",
    "{context}",
    "{subevents}",
    "{result}",
)


@dataclass
class PromptParams:
    """Structured inputs for prompt construction.

    ``num_of_topics`` / ``num_of_margin`` steer how many events are asked
    for ("N give or take M"); the margin may never swallow the request
    (N - M >= 1).
    """

    topic: str
    context: str = DEFAULT_CONTEXT
    num_of_topics: int = DEFAULT_NUM_OF_TOPICS
    num_of_margin: int = DEFAULT_NUM_OF_MARGIN
    subevents: list[str] = field(default_factory=list)
    result: str = ""

    def validate(self) -> None:
        if not self.topic.strip():
            raise InvalidParams("topic must be nonempty")
        if self.num_of_topics < 1:
            raise InvalidParams("num_of_topics must be positive")
        if self.num_of_margin < 0:
            raise InvalidParams("num_of_margin must be nonnegative")
        if self.num_of_topics - self.num_of_margin < 1:
            raise InvalidParams(
                "num_of_topics minus num_of_margin must be at least 1"
            )


def _load_template(name: str) -> str:
    text = resources.files("gentl.templates").joinpath(f"{name}.txt").read_text("utf-8")
    return text.rstrip("\n")


def _render(template: str, values: dict[str, str]) -> str:
    out = template
    for key, value in values.items():
        out = out.replace("{" + key + "}", value)
    return out


def leftover_placeholders(prompt: str) -> list[str]:
    """Template tokens still present after rendering (should be none)."""
    return [p for p in _PLACEHOLDERS if p in prompt]


def build_events_prompt(params: PromptParams) -> str:
    params.validate()
    return _render(
        _load_template("events"),
        {
            "numOfTopics": str(params.num_of_topics),
            "numOfMargin": str(params.num_of_margin),
            "topic": params.topic,
            "context": params.context,
        },
    )


def build_explain_prompt(topic: str, context: str = DEFAULT_CONTEXT) -> str:
    if not topic.strip():
        raise InvalidParams("topic must be nonempty")
    return _render(_load_template("explain"), {"topic": topic, "context": context})


def build_questions_prompt(topic: str, context: str = DEFAULT_CONTEXT) -> str:
    if not topic.strip():
        raise InvalidParams("topic must be nonempty")
    return _render(_load_template("questions"), {"topic": topic, "context": context})


def build_relationship_prompt(
    topic: str, context: str, subevents: list[str]
) -> str:
    if not topic.strip():
        raise InvalidParams("topic must be nonempty")
    if len(subevents) < 2:
        raise TooFewEvents("relationship generation needs at least two events")
    rendered = "[" + ", ".join(subevents) + "]"
    return _render(
        _load_template("relationship"),
        {"topic": topic, "context": context, "subevents": rendered},
    )


def build_image_prompt(topic: str, result: str) -> str:
    if not topic.strip():
        raise InvalidParams("topic must be nonempty")
    if not result.strip():
        raise InvalidParams("result must be nonempty")
    return _render(_load_template("image"), {"topic": topic, "result": result})
