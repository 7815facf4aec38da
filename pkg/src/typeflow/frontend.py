"""Parsing front end: source modules, annotated targets, and imports.

Everything downstream (graph building, slicing, hint collection) works off a
``SourceModule``: an immutable snapshot of one parsed file that keeps the raw
source lines, a flat statement table with byte-exact line spans, the function
and class inventory, and the import records.  Statement spans are the unit of
code slicing, so they must reproduce the original lines exactly.
"""

from __future__ import annotations

import ast
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Mapping

logger = logging.getLogger(__name__)

MODULE_SCOPE = "<module>"

#: statement kinds that open an indented block
COMPOUND_KINDS = frozenset(
    {"if", "for", "while", "with", "try", "def", "class", "match"}
)
#: control-flow headers that slices keep for readability
CONTROL_KINDS = frozenset({"if", "for", "while", "with", "try"})


class TargetKind(Enum):
    ARGUMENT = "arg"
    RETURN_VALUE = "ret"
    LOCAL_VARIABLE = "var"
    GLOBAL_VARIABLE = "gvar"

    @property
    def dataset_kind(self) -> str:
        """Collapse to the dataset's arg|ret|var vocabulary."""
        return "var" if self is TargetKind.GLOBAL_VARIABLE else self.value


@dataclass(frozen=True)
class Statement:
    """One source statement with its byte-exact line span.

    ``header_end`` is the last line of the header for compound statements
    (``if``/``for``/``def``/...), equal to ``end`` for simple statements.
    """

    id: int
    start: int
    end: int
    kind: str
    parent: int | None
    header_end: int

    @property
    def is_compound(self) -> bool:
        return self.kind in COMPOUND_KINDS


@dataclass(frozen=True)
class ImportRecord:
    """One import binding: ``module`` keeps leading dots for relative forms."""

    module: str
    names: tuple[str, ...] = ()
    aliases: Mapping[str, str] = field(default_factory=dict)
    is_relative: bool = False
    line: int = 0

    def __post_init__(self) -> None:
        if not self.module:
            raise ValueError("import record requires a non-empty module path")

    @property
    def top_level(self) -> str:
        """First dotted segment, e.g. ``numpy`` for ``numpy.linalg``."""
        return self.module.lstrip(".").split(".", 1)[0]


@dataclass(frozen=True)
class TargetVariable:
    """A variable whose type is asked for.

    ``name`` is empty for return values; ``display_name`` then falls back to
    the enclosing function's name, which is how return targets are addressed
    in prompts and sentences.
    """

    kind: TargetKind
    name: str
    enclosing_function: str | None
    line: int
    col: int
    annotation: str | None = None

    def __post_init__(self) -> None:
        if self.kind is TargetKind.GLOBAL_VARIABLE:
            if self.enclosing_function is not None:
                raise ValueError("global targets have no enclosing function")
        elif not self.enclosing_function:
            raise ValueError(f"{self.kind.name} target requires an enclosing function")

    @property
    def display_name(self) -> str:
        if self.name:
            return self.name
        assert self.enclosing_function is not None
        return self.enclosing_function.rsplit(".", 1)[-1]


@dataclass(frozen=True)
class FunctionInfo:
    qualname: str
    args: tuple[str, ...]
    statement_ids: tuple[int, ...]
    def_statement_id: int
    line: int
    col: int
    returns: str | None = None
    is_method: bool = False


class SourceModule:
    """Immutable view of one parsed Python file."""

    def __init__(self, path: str, text: str) -> None:
        self.path = path
        self.text = text
        self.lines: tuple[str, ...] = tuple(text.splitlines())
        self._tree = ast.parse(text, filename=path or "<string>")
        self._stmt_ids: dict[ast.stmt, int] = {}
        self._func_nodes: dict[str, ast.FunctionDef | ast.AsyncFunctionDef] = {}
        statements: list[Statement] = []
        self._index_statements(self._tree.body, None, statements)
        self.statements: tuple[Statement, ...] = tuple(statements)
        self._by_id = {s.id: s for s in self.statements}
        functions: list[FunctionInfo] = []
        classes: list[str] = []
        self._collect_definitions(self._tree.body, "", False, functions, classes)
        self.functions: tuple[FunctionInfo, ...] = tuple(functions)
        self.classes: tuple[str, ...] = tuple(classes)
        self.imports: tuple[ImportRecord, ...] = tuple(self._collect_imports())

    # -- construction ------------------------------------------------------

    def _index_statements(
        self,
        body: list[ast.stmt],
        parent: int | None,
        out: list[Statement],
    ) -> None:
        for node in body:
            sid = len(out)
            kind = _stmt_kind(node)
            start, end = node.lineno, node.end_lineno or node.lineno
            header_end = end
            children = _child_bodies(node)
            if children:
                first = children[0][0]
                header_end = max(start, min(end, first.lineno - 1))
            out.append(Statement(sid, start, end, kind, parent, header_end))
            self._stmt_ids[node] = sid
            for child_body in children:
                self._index_statements(child_body, sid, out)

    def _collect_definitions(
        self,
        body: list[ast.stmt],
        prefix: str,
        in_class: bool,
        functions: list[FunctionInfo],
        classes: list[str],
    ) -> None:
        for node in body:
            if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
                qualname = f"{prefix}{node.name}"
                args = tuple(a.arg for a in _all_args(node.args))
                stmt_ids = tuple(self._body_statement_ids(node))
                returns = ast.unparse(node.returns) if node.returns else None
                functions.append(
                    FunctionInfo(
                        qualname=qualname,
                        args=args,
                        statement_ids=stmt_ids,
                        def_statement_id=self._stmt_ids[node],
                        line=node.lineno,
                        col=node.col_offset,
                        returns=returns,
                        is_method=in_class,
                    )
                )
                self._func_nodes[qualname] = node
                self._collect_definitions(
                    node.body, f"{qualname}.", False, functions, classes
                )
            elif isinstance(node, ast.ClassDef):
                classes.append(node.name)
                self._collect_definitions(
                    node.body, f"{node.name}.", True, functions, classes
                )
            else:
                for child_body in _child_bodies(node):
                    self._collect_definitions(
                        child_body, prefix, in_class, functions, classes
                    )

    def _body_statement_ids(self, func: ast.AST) -> Iterator[int]:
        """Leaf and compound statement ids in a function body, skipping
        nested function/class subtrees (they form their own scopes)."""

        def walk(body: list[ast.stmt]) -> Iterator[int]:
            for node in body:
                yield self._stmt_ids[node]
                if isinstance(
                    node, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)
                ):
                    continue
                for child_body in _child_bodies(node):
                    yield from walk(child_body)

        return walk(func.body)  # type: ignore[attr-defined]

    def _collect_imports(self) -> Iterator[ImportRecord]:
        for node in ast.walk(self._tree):
            if isinstance(node, ast.Import):
                for alias in node.names:
                    aliases = {alias.asname: alias.name} if alias.asname else {}
                    yield ImportRecord(
                        module=alias.name, aliases=aliases, line=node.lineno
                    )
            elif isinstance(node, ast.ImportFrom):
                module = "." * node.level + (node.module or "")
                names = tuple(a.name for a in node.names)
                aliases = {a.asname: a.name for a in node.names if a.asname}
                yield ImportRecord(
                    module=module,
                    names=names,
                    aliases=aliases,
                    is_relative=node.level > 0,
                    line=node.lineno,
                )

    # -- queries -----------------------------------------------------------

    def statement(self, sid: int) -> Statement:
        return self._by_id[sid]

    def statement_text(self, sid: int) -> str:
        """Byte-exact source lines of the statement's full span."""
        s = self._by_id[sid]
        return "\n".join(self.lines[s.start - 1 : s.end])

    def header_text(self, sid: int) -> str:
        """Byte-exact source lines of a compound statement's header."""
        s = self._by_id[sid]
        return "\n".join(self.lines[s.start - 1 : s.header_end])

    def statement_id_of(self, node: ast.stmt) -> int:
        return self._stmt_ids[node]

    def function(self, qualname: str) -> FunctionInfo:
        for fn in self.functions:
            if fn.qualname == qualname:
                return fn
        raise KeyError(f"no function {qualname!r} in {self.path}")

    def function_node(self, qualname: str) -> ast.FunctionDef | ast.AsyncFunctionDef:
        return self._func_nodes[qualname]

    @property
    def tree(self) -> ast.Module:
        return self._tree

    def __repr__(self) -> str:  # pragma: no cover - debug aid
        return (
            f"SourceModule({self.path!r}, {len(self.statements)} statements, "
            f"{len(self.functions)} functions)"
        )


def parse_module(text: str, path: str = "<string>") -> SourceModule:
    """Parse source text into a :class:`SourceModule`.

    Raises ``SyntaxError`` (with line/column) for invalid Python 3; parsing is
    idempotent for identical input.
    """
    return SourceModule(path, text)


def enumerate_targets(m: SourceModule, mode: str = "annotated-only") -> list[TargetVariable]:
    """List target variables of a module, ordered by (line, column).

    ``annotated-only`` keeps targets whose annotation is written in the file
    (the evaluation setting); ``all`` also yields unannotated arguments,
    returns, and first bindings for inference on plain code.
    """
    if mode not in ("annotated-only", "all"):
        raise ValueError(f"unknown enumerate mode {mode!r}")
    annotated_only = mode == "annotated-only"
    targets: list[TargetVariable] = []

    for fn in m.functions:
        node = m.function_node(fn.qualname)
        args = _all_args(node.args)
        if fn.is_method and args and args[0].arg in ("self", "cls"):
            args = args[1:]
        for a in args:
            ann = ast.unparse(a.annotation) if a.annotation else None
            if ann is None and annotated_only:
                continue
            targets.append(
                TargetVariable(
                    TargetKind.ARGUMENT, a.arg, fn.qualname, a.lineno, a.col_offset, ann
                )
            )
        ret_ann = fn.returns
        if ret_ann is not None or not annotated_only:
            if node.returns is not None:
                line, col = node.returns.lineno, node.returns.col_offset
            else:
                line, col = fn.line, fn.col + len("def ")
            targets.append(
                TargetVariable(
                    TargetKind.RETURN_VALUE, "", fn.qualname, line, col, ret_ann
                )
            )

    seen: set[tuple[str | None, str]] = set()
    for scope, node, name_node, ann in _iter_bindings(m):
        annotation = ast.unparse(ann) if ann is not None else None
        if annotation is None and annotated_only:
            continue
        if (scope, name_node.id) in seen:
            continue
        seen.add((scope, name_node.id))
        kind = TargetKind.GLOBAL_VARIABLE if scope is None else TargetKind.LOCAL_VARIABLE
        targets.append(
            TargetVariable(
                kind, name_node.id, scope, name_node.lineno, name_node.col_offset, annotation
            )
        )

    targets.sort(key=lambda t: (t.line, t.col))
    return targets


def collect_imports(m: SourceModule) -> list[ImportRecord]:
    """Import records in source order."""
    return sorted(m.imports, key=lambda r: r.line)


# -- helpers ---------------------------------------------------------------


def _stmt_kind(node: ast.stmt) -> str:
    mapping = {
        ast.FunctionDef: "def",
        ast.AsyncFunctionDef: "def",
        ast.ClassDef: "class",
        ast.If: "if",
        ast.For: "for",
        ast.AsyncFor: "for",
        ast.While: "while",
        ast.With: "with",
        ast.AsyncWith: "with",
        ast.Try: "try",
        ast.Import: "import",
        ast.ImportFrom: "import",
    }
    for klass, kind in mapping.items():
        if isinstance(node, klass):
            return kind
    return type(node).__name__.lower()


def _child_bodies(node: ast.stmt) -> list[list[ast.stmt]]:
    bodies: list[list[ast.stmt]] = []
    for attr in ("body", "orelse", "finalbody"):
        child = getattr(node, attr, None)
        if child and isinstance(child[0], ast.stmt):
            bodies.append(child)
    for handler in getattr(node, "handlers", []):
        bodies.append(handler.body)
    for case in getattr(node, "cases", []):  # match statements
        bodies.append(case.body)
    return bodies


def _all_args(args: ast.arguments) -> list[ast.arg]:
    out = list(args.posonlyargs) + list(args.args)
    if args.vararg:
        out.append(args.vararg)
    out += list(args.kwonlyargs)
    if args.kwarg:
        out.append(args.kwarg)
    return out


def _iter_bindings(
    m: SourceModule,
) -> Iterator[tuple[str | None, ast.stmt, ast.Name, ast.expr | None]]:
    """Yield (scope qualname or None, stmt, Name target, annotation) for
    AnnAssign/Assign bindings at module level and inside each function."""

    def scan(body: list[ast.stmt], scope: str | None) -> Iterator:
        for node in body:
            if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
                continue
            if isinstance(node, ast.AnnAssign) and isinstance(node.target, ast.Name):
                yield scope, node, node.target, node.annotation
            elif isinstance(node, ast.Assign):
                for target in node.targets:
                    if isinstance(target, ast.Name):
                        yield scope, node, target, None
            for child_body in _child_bodies(node):
                yield from scan(child_body, scope)

    yield from scan(m.tree.body, None)
    for fn in m.functions:
        node = m.function_node(fn.qualname)
        yield from scan(node.body, fn.qualname)
