"""Input-prompt assembly and generation parsing.

An input prompt is: preamble, then each example section (code slice, hint
line, question, answered COT) in ascending similarity order, then the
target section (slice, hint, question) ending with an open ``A:`` for the
model to complete.  Generated samples are parsed back by taking the last
backquoted span as the predicted type, and sample sets are frequency-ranked
into a :class:`PredictionSet`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Sequence

from . import templates
from .cot import selector_for
from .evaluation import parse_type
from .frontend import TargetKind, TargetVariable
from .llm import estimate_tokens
from .retrieval import ExampleRecord

DEFAULT_TOP_K = 5

_KIND_BY_NAME = {
    "arg": TargetKind.ARGUMENT,
    "ret": TargetKind.RETURN_VALUE,
    "var": TargetKind.LOCAL_VARIABLE,
    "gvar": TargetKind.GLOBAL_VARIABLE,
}

_BACKTICK_SPAN = re.compile(r"`([^`\n]+)`")
_QUOTE_SPAN = re.compile(r"'([^'\n]+)'")
_TRAILING_IS = re.compile(r"\bis\s+([^.`'\n]+?)\.?\s*$")


class ContextOverflow(Exception):
    """Prompt exceeds the token budget even at one example."""


@dataclass(frozen=True)
class InputPrompt:
    preamble: str
    example_sections: tuple[str, ...]
    target_section: str
    dropped_examples: int = 0

    @property
    def rendered(self) -> str:
        parts = (self.preamble, *self.example_sections, self.target_section)
        return "\n\n".join(parts)

    @property
    def token_estimate(self) -> int:
        return estimate_tokens(self.rendered)

    @property
    def shots(self) -> int:
        return len(self.example_sections)


@dataclass(frozen=True)
class PredictionSet:
    """Frequency-ranked type strings extracted from sampled generations."""

    ranked: tuple[tuple[str, int], ...]
    samples_used: int

    def __post_init__(self) -> None:
        counts = [c for _, c in self.ranked]
        if counts != sorted(counts, reverse=True):
            raise ValueError("prediction counts must be non-increasing")
        if sum(counts) > self.samples_used:
            raise ValueError("counts exceed samples_used")

    @property
    def types(self) -> list[str]:
        return [t for t, _ in self.ranked]


def question_for(kind: TargetKind, name: str) -> str:
    selector = templates.QUESTION_SELECTORS[selector_for(kind)]
    return templates.QUESTION.format(selector=selector, name=name)


def render_example_section(record: ExampleRecord) -> str:
    kind = _KIND_BY_NAME.get(record.target_kind, TargetKind.LOCAL_VARIABLE)
    lines = [templates.CODE_HEADER, record.slice_text, ""]
    if record.hint_text:
        lines.append(record.hint_text)
    lines.append(f"Q: {question_for(kind, record.target_name)}")
    lines.append(f"A: {record.cot_text}")
    return "\n".join(lines)


def render_target_section(
    target_slice: str, target_hint: str, target: TargetVariable
) -> str:
    lines = [templates.CODE_HEADER, target_slice, ""]
    if target_hint:
        lines.append(target_hint)
    lines.append(f"Q: {question_for(target.kind, target.display_name)}")
    lines.append("A:")
    return "\n".join(lines)


def assemble_prompt(
    examples: Sequence[ExampleRecord],
    target_slice: str,
    target_hint: str,
    target: TargetVariable,
    *,
    token_budget: int | None = None,
    estimator: Callable[[str], int] = estimate_tokens,
) -> InputPrompt:
    """Build the full ICL prompt; deterministic for identical inputs.

    ``examples`` must already be in ascending-similarity order.  When a
    token budget is given, least-similar examples (the front of the list)
    are dropped one by one down to a single example; overflowing even then
    raises :class:`ContextOverflow`.
    """
    target_section = render_target_section(target_slice, target_hint, target)
    sections = [render_example_section(r) for r in examples]
    dropped = 0
    while True:
        prompt = InputPrompt(
            preamble=templates.PREAMBLE,
            example_sections=tuple(sections),
            target_section=target_section,
            dropped_examples=dropped,
        )
        if token_budget is None or estimator(prompt.rendered) <= token_budget:
            return prompt
        if len(sections) <= 1:
            raise ContextOverflow(
                f"prompt needs ~{estimator(prompt.rendered)} tokens, "
                f"budget is {token_budget} with {len(sections)} example(s) left"
            )
        sections.pop(0)
        dropped += 1


def extract_predictions(generation: str) -> list[str]:
    """Pull the predicted type out of one generated COT.

    The last backquoted span wins (the conclusion); straight single quotes
    are accepted as a fallback, then a final "... is TYPE." clause.  An
    empty list means the sample is unparseable.
    """
    spans = _BACKTICK_SPAN.findall(generation)
    if not spans:
        spans = _QUOTE_SPAN.findall(generation)
    spans = [s.strip() for s in spans if s.strip()]
    if spans:
        return [spans[-1]]
    tail = _TRAILING_IS.search(generation.strip())
    if tail:
        return [tail.group(1).strip()]
    return []


def rank_samples(samples: Sequence[str], top_k: int = DEFAULT_TOP_K) -> PredictionSet:
    """Frequency-rank extracted predictions across samples.

    Types are normalized to canonical form before counting so spelling
    variants ("List[int]", "list[int]") merge; ties keep first-seen order.
    """
    counts: dict[str, int] = {}
    first_seen: dict[str, int] = {}
    used = 0
    for position, sample in enumerate(samples):
        used += 1
        extracted = extract_predictions(sample)
        if not extracted:
            continue
        canonical = parse_type(extracted[0]).canonical_text
        if not canonical:
            continue
        counts[canonical] = counts.get(canonical, 0) + 1
        first_seen.setdefault(canonical, position)
    ranked = sorted(counts, key=lambda t: (-counts[t], first_seen[t]))[:top_k]
    return PredictionSet(
        ranked=tuple((t, counts[t]) for t in ranked),
        samples_used=used,
    )
