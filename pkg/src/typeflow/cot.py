"""Chain-of-thought prompts: one numbered sentence per type dependency.

Backward slices (locals, returns, globals) translate every edge of the
sliced TDG into a template sentence, breadth-first from the target so the
closest dependencies come first.  Forward slices (arguments) compress to a
usage sentence plus a naming-convention sentence.  The conclusion carries
the annotated type in backquotes; models learn to mark their prediction the
same way.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from . import templates
from .frontend import TargetKind, TargetVariable
from .tdg import Direction, Edge, NodeKind, SlicedTDG, TypeDependencyGraph


@dataclass(frozen=True)
class CotPrompt:
    steps: tuple[str, ...]
    conclusion: str

    @property
    def rendered(self) -> str:
        return " ".join((*self.steps, self.conclusion))

    @property
    def sentences(self) -> tuple[str, ...]:
        return (*self.steps, self.conclusion)


def selector_for(kind: TargetKind) -> str:
    if kind is TargetKind.ARGUMENT:
        return templates.SELECTOR_ARGUMENT
    if kind is TargetKind.RETURN_VALUE:
        return templates.SELECTOR_RETURN
    return templates.SELECTOR_VARIABLE


def generate_cot(
    s: SlicedTDG, target: TargetVariable, annotated_type: str
) -> CotPrompt:
    """Render the COT for a sliced TDG and its ground-truth/predicted type.

    An empty dependency graph (the anchor alone) yields a conclusion-only
    prompt; this includes arguments without any recorded usage.
    """
    if s.direction is Direction.FORWARD:
        body = _argument_sentences(s, target, annotated_type)
    else:
        body = _backward_sentences(s)
    steps = tuple(f"{i}. {text}" for i, text in enumerate(body, start=1))
    conclusion = templates.CONCLUSION.format(
        selector=selector_for(target.kind),
        name=target.display_name,
        type=annotated_type,
    )
    return CotPrompt(steps, conclusion)


def op_phrase(op_kind: str, detail: str = "") -> str:
    """Re-export of the phrase table entry point (see templates)."""
    return templates.op_phrase(op_kind, detail)


# ---------------------------------------------------------------------------


def _backward_sentences(s: SlicedTDG) -> list[str]:
    graph = s.graph
    sentences: list[str] = []
    visited = {s.target_node}
    queue = deque([s.target_node])
    while queue:
        nid = queue.popleft()
        incoming = sorted(
            graph.in_edges(nid),
            key=lambda e: (
                graph.node(e.src).line,
                graph.node(e.src).col,
                e.src,
            ),
        )
        for edge in incoming:
            sentences.append(_edge_sentence(graph, edge))
            if edge.src not in visited:
                visited.add(edge.src)
                queue.append(edge.src)
    return sentences


def _edge_sentence(graph: TypeDependencyGraph, edge: Edge) -> str:
    src = graph.node(edge.src)
    dst = graph.node(edge.dst)
    if dst.kind is NodeKind.SYMBOL:
        selector = (
            templates.SELECTOR_RETURN if dst.is_return else templates.SELECTOR_VARIABLE
        )
        common = {"selector": selector, "name": dst.name}
        if src.kind is NodeKind.OPERATION:
            return templates.OP_TO_SYMBOL.format(
                op=templates.op_phrase(src.name, src.detail), **common
            )
        if src.kind is NodeKind.SYMBOL:
            return templates.SYMBOL_TO_SYMBOL.format(source=src.name, **common)
        return templates.TYPE_TO_SYMBOL.format(type=src.name, **common)

    assert dst.kind is NodeKind.OPERATION, "type literals have no inputs"
    common = {"role": edge.role, "op": templates.op_phrase(dst.name, dst.detail)}
    if src.kind is NodeKind.OPERATION:
        return templates.OP_TO_OP.format(
            source_op=templates.op_phrase(src.name, src.detail), **common
        )
    if src.kind is NodeKind.SYMBOL:
        return templates.SYMBOL_TO_OP.format(source=src.name, **common)
    return templates.TYPE_TO_OP.format(type=src.name, **common)


def _argument_sentences(
    s: SlicedTDG, target: TargetVariable, annotated_type: str
) -> list[str]:
    graph = s.graph
    anchors = set(s.anchors)
    users = sorted(
        (
            node
            for node in graph.nodes
            if node.id not in anchors and node.kind is not NodeKind.TYPELIT
        ),
        key=lambda n: (s.hops.get(n.id, 0), n.line, n.col, n.id),
    )
    phrases: list[str] = []
    for node in users:
        if node.kind is NodeKind.OPERATION:
            phrase = templates.op_phrase(node.name, node.detail)
        else:
            phrase = node.name
        if phrase not in phrases:
            phrases.append(phrase)
    if not phrases:
        return []
    usage = templates.ARG_USAGE.format(
        name=target.display_name, usages=_join(phrases)
    )
    naming = templates.ARG_NAMING.format(
        name=target.display_name, type=annotated_type
    )
    return [usage, naming]


def _join(phrases: list[str]) -> str:
    if len(phrases) == 1:
        return phrases[0]
    return ", ".join(phrases[:-1]) + " and " + phrases[-1]
