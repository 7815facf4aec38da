"""Type-expression normalization and Exact Match / Match to Parametric.

Type strings are parsed into a small constructor grammar and normalized:
``typing.`` prefixes stripped, capitalized aliases lowered to builtins,
``Optional[X]`` expanded to a union with ``None``, and union members
deduplicated and sorted so argument order never matters.  Strings the
grammar cannot read become opaque atoms whose canonical text is the trimmed
input, so purely textual comparison still works.

Exact Match is structural equality after normalization; Match to Parametric
compares only the outermost constructor.  Reports tally both metrics per
variable category (Arg/Ret/Var/All), type category (Ele/Gen/Usr/All), and
prediction rank cutoff (top 1/3/5).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .datasets import DatasetRecord

VAR_CATEGORIES = ("Arg", "Ret", "Var", "All")
TYPE_CATEGORIES = ("Ele", "Gen", "Usr", "All")
TOP_KS = (1, 3, 5)

_ALIASES = {
    "List": "list",
    "Dict": "dict",
    "Set": "set",
    "Tuple": "tuple",
    "FrozenSet": "frozenset",
    "Type": "type",
    "NoneType": "None",
}

ELEMENTARY_TYPES = frozenset(
    {
        "int", "float", "complex", "bool", "str", "bytes", "bytearray",
        "None", "Any", "object", "memoryview", "Ellipsis", "...",
    }
)

CONTAINER_TYPES = frozenset(
    {
        "list", "dict", "set", "tuple", "frozenset", "type", "defaultdict",
        "OrderedDict", "Counter", "deque", "ChainMap",
    }
)

TYPING_GENERICS = frozenset(
    {
        "Union", "Optional", "Callable", "Iterable", "Iterator", "Sequence",
        "MutableSequence", "Mapping", "MutableMapping", "MutableSet",
        "AbstractSet", "Awaitable", "Coroutine", "Generator",
        "AsyncGenerator", "AsyncIterator", "AsyncIterable", "Collection",
        "Container", "ItemsView", "KeysView", "ValuesView", "Reversible",
        "IO", "TextIO", "BinaryIO", "Pattern", "Match", "Literal",
        "Final", "ClassVar", "Annotated",
    }
)


class UnknownTargetId(Exception):
    """A prediction refers to a target id absent from the dataset."""


@dataclass(frozen=True)
class TypeExpr:
    constructor: str
    args: tuple["TypeExpr", ...] = ()

    @property
    def canonical_text(self) -> str:
        if not self.args:
            return self.constructor
        inner = ", ".join(a.canonical_text for a in self.args)
        return f"{self.constructor}[{inner}]"

    def __str__(self) -> str:
        return self.canonical_text


def parse_type(s: str, *, normalize: bool = True) -> TypeExpr:
    """Parse a type string; never raises.

    Unreadable input collapses to an opaque atom carrying the trimmed text,
    so Exact Match degrades to textual comparison.  ``normalize=False``
    keeps structure but skips alias/Optional/Union rewriting (the strict
    text mode).
    """
    text = s.strip()
    if not text:
        return TypeExpr("")
    try:
        expr, pos = _parse_expr(text, 0, normalize)
        if pos != len(text):
            raise _ParseError(pos)
        return expr
    except _ParseError:
        return TypeExpr(text)


def exact_match(pred: TypeExpr, gt: TypeExpr) -> bool:
    """Structural equality of normalized type expressions."""
    return pred == gt


def match_to_parametric(pred: TypeExpr, gt: TypeExpr) -> bool:
    """Outermost constructors equal; type arguments ignored."""
    return pred.constructor == gt.constructor


def categorize_type(t: TypeExpr, known_user_types: Iterable[str] = ()) -> str:
    """Ele / Gen / Usr per the reporting taxonomy.

    Parameterized types are Gen even when the constructor is user-defined
    (``Foo[int]``); bare container and typing-vocabulary constructors are
    Gen; other non-builtin constructors are Usr whether or not they appear
    in ``known_user_types`` (the set is advisory).
    """
    if t.args:
        return "Gen"
    if t.constructor in CONTAINER_TYPES or t.constructor in TYPING_GENERICS:
        return "Gen"
    if t.constructor in ELEMENTARY_TYPES:
        return "Ele"
    return "Usr"


# -- parser ------------------------------------------------------------------


class _ParseError(Exception):
    def __init__(self, pos: int) -> None:
        super().__init__(f"parse error at {pos}")
        self.pos = pos


def _skip_ws(text: str, pos: int) -> int:
    while pos < len(text) and text[pos].isspace():
        pos += 1
    return pos


def _parse_expr(text: str, pos: int, normalize: bool) -> tuple[TypeExpr, int]:
    members = []
    expr, pos = _parse_unit(text, pos, normalize)
    members.append(expr)
    pos = _skip_ws(text, pos)
    while pos < len(text) and text[pos] == "|":
        expr, pos = _parse_unit(text, pos + 1, normalize)
        members.append(expr)
        pos = _skip_ws(text, pos)
    if len(members) == 1:
        return members[0], pos
    return _make_union(members, normalize), pos


def _parse_unit(text: str, pos: int, normalize: bool) -> tuple[TypeExpr, int]:
    pos = _skip_ws(text, pos)
    if pos < len(text) and text[pos] == "[":
        args, pos = _parse_args(text, pos, normalize)
        return TypeExpr("", tuple(args)), pos
    start = pos
    while pos < len(text) and text[pos] not in "[],|":
        pos += 1
    name = text[start:pos].strip()
    if not name:
        raise _ParseError(pos)
    pos = _skip_ws(text, pos)
    args: list[TypeExpr] = []
    if pos < len(text) and text[pos] == "[":
        args, pos = _parse_args(text, pos, normalize)
    return _make(name, tuple(args), normalize), pos


def _parse_args(text: str, pos: int, normalize: bool) -> tuple[list[TypeExpr], int]:
    assert text[pos] == "["
    pos = _skip_ws(text, pos + 1)
    args: list[TypeExpr] = []
    if pos < len(text) and text[pos] == "]":
        return args, _skip_ws(text, pos + 1)
    while True:
        expr, pos = _parse_expr(text, pos, normalize)
        args.append(expr)
        pos = _skip_ws(text, pos)
        if pos >= len(text):
            raise _ParseError(pos)
        if text[pos] == ",":
            pos = _skip_ws(text, pos + 1)
            continue
        if text[pos] == "]":
            return args, _skip_ws(text, pos + 1)
        raise _ParseError(pos)


def _make(name: str, args: tuple[TypeExpr, ...], normalize: bool) -> TypeExpr:
    if not normalize:
        return TypeExpr(name, args)
    if name.startswith("typing."):
        name = name[len("typing."):]
    name = _ALIASES.get(name, name)
    if name == "Optional":
        none = TypeExpr("None")
        return _make_union([*args, none], normalize)
    if name == "Union":
        return _make_union(list(args), normalize)
    return TypeExpr(name, args)


def _make_union(members: list[TypeExpr], normalize: bool) -> TypeExpr:
    if not normalize:
        return TypeExpr("Union", tuple(members))
    flat: list[TypeExpr] = []
    for member in members:
        if member.constructor == "Union":
            flat.extend(member.args)
        else:
            flat.append(member)
    unique = {m.canonical_text: m for m in flat}
    ordered = tuple(unique[k] for k in sorted(unique))
    if len(ordered) == 1:
        return ordered[0]
    return TypeExpr("Union", ordered)


# -- report ------------------------------------------------------------------


@dataclass
class Cell:
    total: int = 0
    em: dict[int, int] | None = None
    mtp: dict[int, int] | None = None

    def __post_init__(self) -> None:
        self.em = self.em or {k: 0 for k in TOP_KS}
        self.mtp = self.mtp or {k: 0 for k in TOP_KS}

    def pct(self, metric: str, k: int) -> float | None:
        if self.total == 0:
            return None
        hits = (self.em if metric == "em" else self.mtp)[k]
        return 100.0 * hits / self.total


class EvalReport:
    """EM/MTP tallies per variable category x type category x top-k."""

    def __init__(self) -> None:
        self.cells: dict[tuple[str, str], Cell] = {
            (vc, tc): Cell() for vc in VAR_CATEGORIES for tc in TYPE_CATEGORIES
        }

    def record(
        self, var_cat: str, type_cat: str,
        em_at: Mapping[int, bool], mtp_at: Mapping[int, bool],
    ) -> None:
        for vc in (var_cat, "All"):
            for tc in (type_cat, "All"):
                cell = self.cells[(vc, tc)]
                cell.total += 1
                for k in TOP_KS:
                    cell.em[k] += bool(em_at[k])
                    cell.mtp[k] += bool(mtp_at[k])

    def cell(self, var_cat: str, type_cat: str = "All") -> Cell:
        return self.cells[(var_cat, type_cat)]

    def to_json(self) -> str:
        payload: dict = {"totals": {}, "exact_match": {}, "match_to_parametric": {}}
        for (vc, tc), cell in self.cells.items():
            payload["totals"].setdefault(vc, {})[tc] = cell.total
            for metric, key in (("em", "exact_match"), ("mtp", "match_to_parametric")):
                payload[key].setdefault(vc, {})[tc] = {
                    f"top{k}": cell.pct(metric, k) for k in TOP_KS
                }
        return json.dumps(payload, indent=2)

    def to_text(self) -> str:
        lines: list[str] = []
        header = "        " + "".join(
            f"{f'Top-{k}':^26}" for k in TOP_KS
        )
        sub = "        " + ("".join(f"{c:>6}" for c in VAR_CATEGORIES) + "  ") * len(TOP_KS)
        for metric, title in (("em", "Exact Match (%)"), ("mtp", "Match to Parametric (%)")):
            lines.append(title)
            lines.append(header)
            lines.append(sub)
            for tc in TYPE_CATEGORIES:
                row = f"  {tc:<6}"
                for k in TOP_KS:
                    for vc in VAR_CATEGORIES:
                        pct = self.cells[(vc, tc)].pct(metric, k)
                        row += f"{pct:>6.1f}" if pct is not None else f"{'-':>6}"
                    row += "  "
                lines.append(row)
            lines.append("")
        totals = ", ".join(
            f"{vc}={self.cells[(vc, 'All')].total}" for vc in VAR_CATEGORIES
        )
        lines.append(f"targets: {totals}")
        return "\n".join(lines)


def evaluate(
    dataset: Sequence[DatasetRecord],
    predictions: Mapping[str, object],
    *,
    strict_text: bool = False,
) -> EvalReport:
    """Score ranked predictions against dataset annotations.

    A target scores EM@k / MTP@k when ANY of its first k predictions
    matches; targets without predictions (or with empty ones) are misses.
    Prediction ids not present in the dataset raise :class:`UnknownTargetId`.
    """
    known = {r.id for r in dataset}
    unknown = sorted(set(map(str, predictions)) - known)
    if unknown:
        raise UnknownTargetId(f"prediction ids not in dataset: {unknown[:5]}")

    report = EvalReport()
    for record in dataset:
        gt = parse_type(record.annotation, normalize=not strict_text)
        ranked = _ranked_types(predictions.get(record.id))
        parsed = [parse_type(p, normalize=not strict_text) for p in ranked]
        em_at = {
            k: any(exact_match(p, gt) for p in parsed[:k]) for k in TOP_KS
        }
        mtp_at = {
            k: any(match_to_parametric(p, gt) for p in parsed[:k]) for k in TOP_KS
        }
        var_cat = {"arg": "Arg", "ret": "Ret", "var": "Var"}[record.kind]
        report.record(var_cat, categorize_type(gt), em_at, mtp_at)
    return report


def _ranked_types(value: object) -> list[str]:
    if value is None:
        return []
    ranked = getattr(value, "ranked", value)
    out = []
    for item in ranked:  # type: ignore[union-attr]
        if isinstance(item, str):
            out.append(item)
        else:  # (type, count) pairs from a PredictionSet
            out.append(item[0])
    return out
