"""Render a sliced TDG back into a minimal, readable code slice.

The slice is the ordered, deduplicated set of statements owning the
surviving graph nodes.  Entry text is byte-identical to the original source
lines; only the final ``rendered`` block strips the common leading indent so
slices taken from nested code read naturally.  Control-flow headers
(``if``/``for``/``while``/``with``/``try``) that enclose a selected
statement are kept by default so the slice stays understandable; pass
``flat=True`` for bare statements only.  Function targets always include
their ``def`` header line.
"""

from __future__ import annotations

from dataclasses import dataclass

from .frontend import (
    CONTROL_KINDS,
    MODULE_SCOPE,
    SourceModule,
    TargetKind,
    TargetVariable,
)
from .tdg import Direction, SlicedTDG


@dataclass(frozen=True)
class SliceEntry:
    start_line: int
    text: str
    statement_id: int
    header_only: bool = False


@dataclass(frozen=True)
class CodeSlice:
    entries: tuple[SliceEntry, ...]
    target: TargetVariable
    rendered: str

    @property
    def start_lines(self) -> list[int]:
        return [e.start_line for e in self.entries]


def slice_code(
    s: SlicedTDG,
    m: SourceModule,
    *,
    flat: bool = False,
    target: TargetVariable | None = None,
) -> CodeSlice:
    """Assemble the code slice for a sliced TDG.

    Statements appear in source order exactly once.  Nodes owned by a
    compound statement (an ``if`` test, a ``def`` header argument)
    contribute only that statement's header lines, never the whole block.
    """
    if target is None:
        target = _target_of(s, m)
    full: set[int] = set()
    headers: set[int] = set()

    for node in s.graph.nodes:
        for sid in node.statement_ids:
            stmt = m.statement(sid)
            if stmt.is_compound:
                headers.add(sid)
            else:
                full.add(sid)
            if not flat:
                headers.update(_enclosing_control_headers(m, sid))

    if target.kind is not TargetKind.GLOBAL_VARIABLE:
        assert target.enclosing_function is not None
        headers.add(m.function(target.enclosing_function).def_statement_id)

    headers -= full
    entries = sorted(
        [
            SliceEntry(m.statement(sid).start, m.statement_text(sid), sid)
            for sid in full
        ]
        + [
            SliceEntry(m.statement(sid).start, m.header_text(sid), sid, header_only=True)
            for sid in headers
        ],
        key=lambda e: (e.start_line, e.statement_id),
    )
    return CodeSlice(tuple(entries), target, _render(entries))


def _target_of(s: SlicedTDG, m: SourceModule) -> TargetVariable:
    # the sliced TDG does not carry the TargetVariable itself; reconstruct the
    # pieces the renderer needs from the anchor node and slice direction
    anchor = s.graph.node(s.target_node)
    scope = s.graph.scope
    if s.direction is Direction.FORWARD:
        return TargetVariable(
            TargetKind.ARGUMENT, anchor.name, scope, anchor.line, anchor.col
        )
    if anchor.is_return:
        return TargetVariable(TargetKind.RETURN_VALUE, "", scope, anchor.line, anchor.col)
    if scope == MODULE_SCOPE:
        return TargetVariable(
            TargetKind.GLOBAL_VARIABLE, anchor.name, None, anchor.line, anchor.col
        )
    return TargetVariable(
        TargetKind.LOCAL_VARIABLE, anchor.name, scope, anchor.line, anchor.col
    )


def _enclosing_control_headers(m: SourceModule, sid: int) -> list[int]:
    out = []
    parent = m.statement(sid).parent
    while parent is not None:
        stmt = m.statement(parent)
        if stmt.kind in CONTROL_KINDS:
            out.append(parent)
        parent = stmt.parent
    return out


def _render(entries: list[SliceEntry]) -> str:
    lines: list[str] = []
    for entry in entries:
        lines.extend(entry.text.splitlines())
    indents = [
        len(line) - len(line.lstrip()) for line in lines if line.strip()
    ]
    dedent = min(indents, default=0)
    return "\n".join(line[dedent:] if line.strip() else "" for line in lines)
