"""Type dependency graphs: build, prune, merge, and slice.

A TDG is a directed graph whose nodes are variable occurrences (symbol
nodes), operations, and literal types, and whose edges point from an input
to the output whose type depends on it.  The pipeline is::

    build_tdg -> prune -> merge_symbols -> slice_tdg

``build_tdg`` covers one scope: a single function, or the module globals
(every statement outside function/class bodies).  Variable uses are linked
to their most recent textual definition; loop bodies additionally get a
loop-carried edge from a later definition back to an earlier use, so graphs
built from loops can be cyclic and every traversal here uses a visited set.
"""

from __future__ import annotations

import ast
import logging
from collections import deque
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Mapping

from .frontend import MODULE_SCOPE, SourceModule, TargetKind, TargetVariable

logger = logging.getLogger(__name__)

DEFAULT_MAX_HOP = 3


class TargetNotFound(Exception):
    """No node in the graph corresponds to the requested target variable."""


class NodeKind(Enum):
    SYMBOL = "symbol"
    OPERATION = "operation"
    TYPELIT = "type"


class Direction(Enum):
    BACKWARD = "backward"
    FORWARD = "forward"


#: edge roles drive the operand(s)/target(s)/key(s)/value(s) template slot
ROLE_OPERAND = "operand"
ROLE_TARGET = "target"
ROLE_KEY = "key"
ROLE_VALUE = "value"

#: operation-kind vocabulary; anything else is logged and skipped
OP_KINDS = frozenset(
    {
        "assignment",
        "aug_add", "aug_sub", "aug_mult", "aug_div", "aug_floordiv",
        "aug_mod", "aug_pow", "aug_bitand", "aug_bitor", "aug_bitxor",
        "aug_lshift", "aug_rshift", "aug_matmult",
        "binop_add", "binop_sub", "binop_mult", "binop_div", "binop_floordiv",
        "binop_mod", "binop_pow", "binop_bitand", "binop_bitor", "binop_bitxor",
        "binop_lshift", "binop_rshift", "binop_matmult",
        "unaryop_usub", "unaryop_uadd", "unaryop_invert", "unaryop_not",
        "boolop_and", "boolop_or",
        "comparison",
        "call",
        "attribute",
        "subscript_read", "subscript_write",
        "List_Read", "Tuple_Read", "Set_Read", "Dict_Read",
        "comprehension",
        "cond_expr",
        "return",
    }
)

_BINOP_KINDS = {
    ast.Add: "add", ast.Sub: "sub", ast.Mult: "mult", ast.Div: "div",
    ast.FloorDiv: "floordiv", ast.Mod: "mod", ast.Pow: "pow",
    ast.BitAnd: "bitand", ast.BitOr: "bitor", ast.BitXor: "bitxor",
    ast.LShift: "lshift", ast.RShift: "rshift", ast.MatMult: "matmult",
}
_UNARY_KINDS = {
    ast.USub: "usub", ast.UAdd: "uadd", ast.Invert: "invert", ast.Not: "not",
}


@dataclass(frozen=True)
class TdgNode:
    """One graph node.

    ``name`` holds the variable name for symbols, the op kind for operations,
    and the type string for type literals.  Merged symbol nodes accumulate
    occurrences and statement ids; ``statement_id`` stays the primary one.
    """

    id: int
    kind: NodeKind
    name: str
    detail: str = ""
    line: int = 0
    col: int = 0
    statement_ids: tuple[int, ...] = ()
    occurrences: tuple[tuple[int, int], ...] = ()
    is_return: bool = False

    @property
    def statement_id(self) -> int:
        return self.statement_ids[0]

    def label(self) -> str:
        if self.kind is NodeKind.SYMBOL:
            return f"Symbol({self.name}@{self.line})"
        if self.kind is NodeKind.OPERATION:
            inner = f"{self.name}:{self.detail}" if self.detail else self.name
            return f"Operation({inner}@{self.line})"
        return f"Type({self.name}@{self.line})"


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    role: str = ROLE_OPERAND


@dataclass(frozen=True)
class TypeDependencyGraph:
    """Immutable graph value; derived indexes are built once."""

    nodes: tuple[TdgNode, ...]
    edges: tuple[Edge, ...]
    scope: str = MODULE_SCOPE

    def __post_init__(self) -> None:
        by_id = {n.id: n for n in self.nodes}
        if len(by_id) != len(self.nodes):
            raise ValueError("duplicate node ids")
        preds: dict[int, list[Edge]] = {n.id: [] for n in self.nodes}
        succs: dict[int, list[Edge]] = {n.id: [] for n in self.nodes}
        for e in self.edges:
            if e.src not in by_id or e.dst not in by_id:
                raise ValueError(f"dangling edge {e.src}->{e.dst}")
            if e.src == e.dst:
                raise ValueError(f"self-loop on node {e.src}")
            if by_id[e.dst].kind is NodeKind.TYPELIT:
                raise ValueError("type literal nodes cannot have incoming edges")
            preds[e.dst].append(e)
            succs[e.src].append(e)
        object.__setattr__(self, "_by_id", by_id)
        object.__setattr__(self, "_preds", preds)
        object.__setattr__(self, "_succs", succs)

    def node(self, node_id: int) -> TdgNode:
        return self._by_id[node_id]

    def in_edges(self, node_id: int) -> list[Edge]:
        return list(self._preds[node_id])

    def out_edges(self, node_id: int) -> list[Edge]:
        return list(self._succs[node_id])

    def symbols(self, name: str) -> list[TdgNode]:
        return [n for n in self.nodes if n.kind is NodeKind.SYMBOL and n.name == name]

    def to_debug_text(self) -> str:
        """Node table plus one ``src -> dst`` line per edge, for inspection."""
        out = [f"# scope {self.scope}: {len(self.nodes)} nodes, {len(self.edges)} edges"]
        for n in sorted(self.nodes, key=lambda n: n.id):
            out.append(f"n{n.id}\t{n.label()}\tstmts={list(n.statement_ids)}")
        for e in sorted(self.edges, key=lambda e: (e.src, e.dst)):
            out.append(f"n{e.src} -> n{e.dst} [{e.role}]")
        return "\n".join(out)


@dataclass(frozen=True)
class SlicedTDG:
    """Target-anchored subgraph with per-node hop distances."""

    graph: TypeDependencyGraph
    target_node: int
    anchors: tuple[int, ...]
    hops: Mapping[int, int]
    direction: Direction

    def nodes_at(self, hop: int) -> list[TdgNode]:
        return [self.graph.node(i) for i, h in self.hops.items() if h == hop]

    @property
    def max_hop(self) -> int:
        return max(self.hops.values(), default=0)


# ---------------------------------------------------------------------------
# construction


class _ScopeBuilder:
    """Translates one scope's statements into nodes and edges."""

    def __init__(self, module: SourceModule, scope: str) -> None:
        self.module = module
        self.scope = scope
        self.nodes: list[TdgNode] = []
        self.edges: set[Edge] = set()
        self.defs: dict[str, int] = {}
        self.events: list[tuple[str, str, int]] = []  # ("def"|"use", name, node id)
        self.return_node: int | None = None
        self._stmt_id = 0

    # -- node factories --

    def _add(self, node: TdgNode) -> int:
        self.nodes.append(node)
        return node.id

    def new_symbol(
        self, name: str, line: int, col: int, *, is_return: bool = False
    ) -> int:
        nid = len(self.nodes)
        return self._add(
            TdgNode(
                nid, NodeKind.SYMBOL, name,
                line=line, col=col,
                statement_ids=(self._stmt_id,),
                occurrences=((line, col),),
                is_return=is_return,
            )
        )

    def new_op(self, kind: str, node: ast.expr | ast.stmt, detail: str = "") -> int:
        if kind not in OP_KINDS:
            logger.warning("%s: unsupported op kind %s, node skipped", self.module.path, kind)
            raise _Unsupported(kind)
        nid = len(self.nodes)
        return self._add(
            TdgNode(
                nid, NodeKind.OPERATION, kind, detail=detail,
                line=node.lineno, col=node.col_offset,
                statement_ids=(self._stmt_id,),
            )
        )

    def new_typelit(self, type_name: str, node: ast.expr) -> int:
        nid = len(self.nodes)
        return self._add(
            TdgNode(
                nid, NodeKind.TYPELIT, type_name,
                line=node.lineno, col=node.col_offset,
                statement_ids=(self._stmt_id,),
            )
        )

    def edge(self, src: int | None, dst: int | None, role: str = ROLE_OPERAND) -> None:
        if src is None or dst is None or src == dst:
            return
        self.edges.add(Edge(src, dst, role))

    # -- def/use bookkeeping --

    def define(self, name: str, node_id: int) -> None:
        self.defs[name] = node_id
        self.events.append(("def", name, node_id))

    def use(self, name: str, line: int, col: int) -> int:
        nid = self.new_symbol(name, line, col)
        if name in self.defs:
            self.edge(self.defs[name], nid)
        self.events.append(("use", name, nid))
        return nid

    # -- statements --

    def run_statements(self, body: Iterable[ast.stmt]) -> None:
        for stmt in body:
            if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
                continue  # separate scopes; module TDG excludes them entirely
            self.statement(stmt)

    def statement(self, stmt: ast.stmt) -> None:
        self._stmt_id = self.module.statement_id_of(stmt)
        try:
            self._statement(stmt)
        except _Unsupported as exc:
            logger.warning(
                "%s:%d: skipped %s (%s)", self.module.path, stmt.lineno,
                type(stmt).__name__, exc,
            )

    def _statement(self, stmt: ast.stmt) -> None:
        if isinstance(stmt, ast.Assign):
            producer = self.expr(stmt.value)
            for target in stmt.targets:
                self.assign_to(target, producer)
        elif isinstance(stmt, ast.AnnAssign):
            # the annotation itself never becomes a node: a TypeLit made from
            # the target's own annotation would leak ground truth into prompts
            if stmt.value is not None:
                self.assign_to(stmt.target, self.expr(stmt.value))
            elif isinstance(stmt.target, ast.Name):
                self.define(
                    stmt.target.id,
                    self.new_symbol(stmt.target.id, stmt.target.lineno, stmt.target.col_offset),
                )
        elif isinstance(stmt, ast.AugAssign) and isinstance(stmt.target, ast.Name):
            old = self.use(stmt.target.id, stmt.target.lineno, stmt.target.col_offset)
            value = self.expr(stmt.value)
            op = self.new_op(f"aug_{_BINOP_KINDS[type(stmt.op)]}", stmt)
            self.edge(old, op)
            self.edge(value, op)
            store = self.new_symbol(
                stmt.target.id, stmt.target.lineno, stmt.target.col_offset
            )
            self.edge(op, store)
            self.define(stmt.target.id, store)
        elif isinstance(stmt, ast.Return):
            producer = self.expr(stmt.value) if stmt.value else self.new_typelit("None", stmt)  # type: ignore[arg-type]
            self.edge(producer, self.return_node)
        elif isinstance(stmt, ast.Expr):
            self.expr(stmt.value)
        elif isinstance(stmt, (ast.If, ast.While)):
            self.expr(stmt.test)
            self._loop_aware_bodies(stmt, [stmt.body, stmt.orelse], loop=isinstance(stmt, ast.While))
        elif isinstance(stmt, (ast.For, ast.AsyncFor)):
            iterable = self.expr(stmt.iter)
            op = self.new_op("subscript_read", stmt)  # loop variable ~ element read
            self.edge(iterable, op)
            self.assign_to(stmt.target, op)
            self._loop_aware_bodies(stmt, [stmt.body, stmt.orelse], loop=True)
        elif isinstance(stmt, (ast.With, ast.AsyncWith)):
            for item in stmt.items:
                producer = self.expr(item.context_expr)
                if item.optional_vars is not None:
                    self.assign_to(item.optional_vars, producer)
            self.run_statements(stmt.body)
        elif isinstance(stmt, ast.Try):
            self.run_statements(stmt.body)
            for handler in stmt.handlers:
                self.run_statements(handler.body)
            self.run_statements(stmt.orelse)
            self.run_statements(stmt.finalbody)
        elif isinstance(stmt, (ast.Import, ast.ImportFrom)):
            # imports bind modules/names but carry no dataflow we model;
            # linking every use of a module alias to one import definition
            # would undirectedly connect unrelated statements through it
            pass
        elif isinstance(stmt, (ast.Pass, ast.Break, ast.Continue, ast.Global,
                               ast.Nonlocal, ast.Delete, ast.Assert, ast.Raise)):
            if isinstance(stmt, ast.Assert) and stmt.test is not None:
                self.expr(stmt.test)
            if isinstance(stmt, ast.Raise) and stmt.exc is not None:
                self.expr(stmt.exc)
        else:
            logger.info(
                "%s:%d: construct %s outside the op vocabulary, skipped",
                self.module.path, stmt.lineno, type(stmt).__name__,
            )

    def _loop_aware_bodies(
        self, stmt: ast.stmt, bodies: list[list[ast.stmt]], *, loop: bool
    ) -> None:
        mark = len(self.events)
        for body in bodies:
            self.run_statements(body)
        if loop:
            self._add_loop_carried(mark)

    def _add_loop_carried(self, mark: int) -> None:
        """Connect a later in-body definition to an earlier in-body use of the
        same name (the next iteration's reaching definition)."""
        body_events = self.events[mark:]
        last_def: dict[str, tuple[int, int]] = {}  # name -> (position, node id)
        for pos, (etype, name, nid) in enumerate(body_events):
            if etype == "def":
                last_def[name] = (pos, nid)
        for pos, (etype, name, nid) in enumerate(body_events):
            if etype != "use" or name not in last_def:
                continue
            def_pos, def_id = last_def[name]
            if def_pos > pos:
                self.edge(def_id, nid)

    def assign_to(self, target: ast.expr, producer: int | None) -> None:
        if isinstance(target, ast.Name):
            store = self.new_symbol(target.id, target.lineno, target.col_offset)
            self.edge(producer, store)
            self.define(target.id, store)
        elif isinstance(target, (ast.Tuple, ast.List)):
            op = self.new_op("assignment", target)
            self.edge(producer, op, ROLE_TARGET)
            for elt in target.elts:
                self.assign_to(elt, op)
        elif isinstance(target, ast.Subscript):
            op = self.new_op("subscript_write", target)
            self.edge(producer, op)
            base = self.expr(target.value)
            self.edge(base, op)
            self.edge(self.expr(target.slice), op)
            if isinstance(target.value, ast.Name):
                store = self.new_symbol(
                    target.value.id, target.lineno, target.col_offset
                )
                self.edge(op, store)
                self.define(target.value.id, store)
        elif isinstance(target, ast.Attribute):
            op = self.new_op("attribute", target, detail=target.attr)
            self.edge(producer, op)
            self.edge(self.expr(target.value), op)
        elif isinstance(target, ast.Starred):
            self.assign_to(target.value, producer)
        else:
            raise _Unsupported(f"assignment target {type(target).__name__}")

    # -- expressions --

    def expr(self, node: ast.expr) -> int | None:
        """Return the producer node id of an expression, or None when the
        construct carries no type information we model."""
        if isinstance(node, ast.Constant):
            return self.new_typelit(_const_type_name(node.value), node)
        if isinstance(node, ast.Name):
            return self.use(node.id, node.lineno, node.col_offset)
        if isinstance(node, ast.BinOp):
            op = self.new_op(f"binop_{_BINOP_KINDS[type(node.op)]}", node)
            self.edge(self.expr(node.left), op)
            self.edge(self.expr(node.right), op)
            return op
        if isinstance(node, ast.UnaryOp):
            op = self.new_op(f"unaryop_{_UNARY_KINDS[type(node.op)]}", node)
            self.edge(self.expr(node.operand), op)
            return op
        if isinstance(node, ast.BoolOp):
            kind = "boolop_and" if isinstance(node.op, ast.And) else "boolop_or"
            op = self.new_op(kind, node)
            for value in node.values:
                self.edge(self.expr(value), op)
            return op
        if isinstance(node, ast.Compare):
            op = self.new_op("comparison", node)
            self.edge(self.expr(node.left), op)
            for comparator in node.comparators:
                self.edge(self.expr(comparator), op)
            return op
        if isinstance(node, ast.Call):
            op = self.new_op("call", node, detail=_callee_name(node.func))
            if isinstance(node.func, ast.Attribute):
                self.edge(self.expr(node.func.value), op)
            for arg in node.args:
                self.edge(self.expr(arg), op)
            for kw in node.keywords:
                self.edge(self.expr(kw.value), op)
            return op
        if isinstance(node, ast.Attribute):
            op = self.new_op("attribute", node, detail=node.attr)
            self.edge(self.expr(node.value), op)
            return op
        if isinstance(node, ast.Subscript):
            op = self.new_op("subscript_read", node)
            self.edge(self.expr(node.value), op)
            self.edge(self.expr(node.slice), op)
            return op
        if isinstance(node, ast.Slice):
            for part in (node.lower, node.upper, node.step):
                if part is not None:
                    self.expr(part)
            return None
        if isinstance(node, (ast.List, ast.Set, ast.Tuple)):
            kind = {ast.List: "List_Read", ast.Set: "Set_Read", ast.Tuple: "Tuple_Read"}[type(node)]
            op = self.new_op(kind, node)
            for elt in node.elts:
                self.edge(self.expr(elt), op)
            return op
        if isinstance(node, ast.Dict):
            op = self.new_op("Dict_Read", node)
            for key, value in zip(node.keys, node.values):
                if key is not None:
                    self.edge(self.expr(key), op, ROLE_KEY)
                self.edge(self.expr(value), op, ROLE_VALUE)
            return op
        if isinstance(node, (ast.ListComp, ast.SetComp, ast.GeneratorExp, ast.DictComp)):
            flavor = {
                ast.ListComp: "list", ast.SetComp: "set",
                ast.GeneratorExp: "generator", ast.DictComp: "dict",
            }[type(node)]
            op = self.new_op("comprehension", node, detail=flavor)
            for gen in node.generators:
                self.edge(self.expr(gen.iter), op)
                self.assign_to(gen.target, None)
                for cond in gen.ifs:
                    self.expr(cond)
            if isinstance(node, ast.DictComp):
                self.edge(self.expr(node.key), op, ROLE_KEY)
                self.edge(self.expr(node.value), op, ROLE_VALUE)
            else:
                self.edge(self.expr(node.elt), op)
            return op
        if isinstance(node, ast.IfExp):
            op = self.new_op("cond_expr", node)
            self.edge(self.expr(node.body), op)
            self.edge(self.expr(node.orelse), op)
            self.edge(self.expr(node.test), op)
            return op
        if isinstance(node, ast.JoinedStr):
            # formatted strings are string literals; interpolated values are
            # visited so their uses exist, but a TypeLit accepts no inputs
            for value in node.values:
                if isinstance(value, ast.FormattedValue):
                    self.expr(value.value)
            return self.new_typelit("str", node)
        if isinstance(node, ast.NamedExpr):
            producer = self.expr(node.value)
            store = self.new_symbol(
                node.target.id, node.target.lineno, node.target.col_offset
            )
            self.edge(producer, store)
            self.define(node.target.id, store)
            return store
        if isinstance(node, ast.Starred):
            return self.expr(node.value)
        if isinstance(node, ast.Await):
            return self.expr(node.value)
        if isinstance(node, ast.Lambda):
            logger.info("%s:%d: lambda outside the op vocabulary, skipped",
                        self.module.path, node.lineno)
            return None
        if isinstance(node, (ast.Yield, ast.YieldFrom)):
            if node.value is not None:
                self.expr(node.value)
            return None
        logger.info(
            "%s:%d: expression %s outside the op vocabulary, skipped",
            self.module.path, node.lineno, type(node).__name__,
        )
        return None


class _Unsupported(Exception):
    pass


def _const_type_name(value: object) -> str:
    if value is None:
        return "None"
    if value is Ellipsis:
        return "..."
    return type(value).__name__


def _callee_name(func: ast.expr) -> str:
    if isinstance(func, ast.Name):
        return func.id
    if isinstance(func, ast.Attribute):
        base = _callee_name(func.value)
        return f"{base}.{func.attr}" if base else func.attr
    if isinstance(func, ast.Call):
        return _callee_name(func.func)
    if isinstance(func, ast.Subscript):
        return _callee_name(func.value)
    return ""


def build_tdg(m: SourceModule, scope: str = MODULE_SCOPE) -> TypeDependencyGraph:
    """Build the TDG for a function scope, or for the module's global
    statements when ``scope`` is :data:`MODULE_SCOPE`."""
    builder = _ScopeBuilder(m, scope)
    if scope == MODULE_SCOPE:
        builder.run_statements(m.tree.body)
    else:
        fn = m.function(scope)
        node = m.function_node(scope)
        builder._stmt_id = fn.def_statement_id
        builder.return_node = builder.new_symbol(
            fn.qualname.rsplit(".", 1)[-1], fn.line, fn.col, is_return=True
        )
        for arg in _arg_nodes(node):
            builder.define(
                arg.arg, builder.new_symbol(arg.arg, arg.lineno, arg.col_offset)
            )
        builder.run_statements(node.body)
    return TypeDependencyGraph(tuple(builder.nodes), tuple(sorted(
        builder.edges, key=lambda e: (e.src, e.dst, e.role))), scope=scope)


def _arg_nodes(node: ast.FunctionDef | ast.AsyncFunctionDef) -> list[ast.arg]:
    args = node.args
    out = list(args.posonlyargs) + list(args.args)
    if args.vararg:
        out.append(args.vararg)
    out += list(args.kwonlyargs)
    if args.kwarg:
        out.append(args.kwarg)
    return out


# ---------------------------------------------------------------------------
# refinement


def _target_occurrences(g: TypeDependencyGraph, target: TargetVariable) -> list[TdgNode]:
    if target.kind is TargetKind.RETURN_VALUE:
        found = [n for n in g.nodes if n.is_return]
    else:
        found = g.symbols(target.name)
    if not found:
        raise TargetNotFound(
            f"no node for {target.kind.name} {target.display_name!r} in scope {g.scope}"
        )
    return found


def prune(g: TypeDependencyGraph, target: TargetVariable) -> TypeDependencyGraph:
    """Keep only nodes with an (undirected) type-dependency path to some
    occurrence of the target variable."""
    seeds = [n.id for n in _target_occurrences(g, target)]
    neighbors: dict[int, set[int]] = {n.id: set() for n in g.nodes}
    for e in g.edges:
        neighbors[e.src].add(e.dst)
        neighbors[e.dst].add(e.src)
    keep: set[int] = set()
    queue = deque(seeds)
    while queue:
        nid = queue.popleft()
        if nid in keep:
            continue
        keep.add(nid)
        queue.extend(neighbors[nid] - keep)
    nodes = tuple(n for n in g.nodes if n.id in keep)
    edges = tuple(e for e in g.edges if e.src in keep and e.dst in keep)
    return TypeDependencyGraph(nodes, edges, scope=g.scope)


def merge_symbols(g: TypeDependencyGraph) -> TypeDependencyGraph:
    """Collapse directly connected same-name symbol pairs (occurrences of one
    variable) to a fixpoint, unioning their edges and occurrence sets."""
    parent: dict[int, int] = {n.id: n.id for n in g.nodes}

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    by_id = {n.id: n for n in g.nodes}
    for e in g.edges:
        a, b = by_id[e.src], by_id[e.dst]
        if (
            a.kind is NodeKind.SYMBOL
            and b.kind is NodeKind.SYMBOL
            and a.name == b.name
        ):
            parent[find(e.src)] = find(e.dst)

    groups: dict[int, list[TdgNode]] = {}
    for n in g.nodes:
        groups.setdefault(find(n.id), []).append(n)

    merged: dict[int, TdgNode] = {}
    canon: dict[int, int] = {}
    for members in groups.values():
        members.sort(key=lambda n: n.id)
        rep = members[0]
        for m in members:
            canon[m.id] = rep.id
        if len(members) == 1:
            merged[rep.id] = rep
            continue
        stmt_ids = tuple(dict.fromkeys(s for m in members for s in m.statement_ids))
        occurrences = tuple(sorted({o for m in members for o in m.occurrences}))
        merged[rep.id] = replace(
            rep,
            statement_ids=stmt_ids,
            occurrences=occurrences,
            is_return=any(m.is_return for m in members),
        )

    edges = {
        Edge(canon[e.src], canon[e.dst], e.role)
        for e in g.edges
        if canon[e.src] != canon[e.dst]
    }
    nodes = tuple(sorted(merged.values(), key=lambda n: n.id))
    return TypeDependencyGraph(
        nodes, tuple(sorted(edges, key=lambda e: (e.src, e.dst, e.role))), scope=g.scope
    )


def slice_tdg(
    g: TypeDependencyGraph,
    target: TargetVariable,
    max_hop: int = DEFAULT_MAX_HOP,
) -> SlicedTDG:
    """Extract the hop-bounded subgraph around the target.

    Locals, returns, and globals anchor at the definition node and walk
    backward (against edge direction); arguments anchor at every occurrence
    node and walk forward.  Hops are breadth-first distances; nodes past
    ``max_hop`` are dropped and edges are restricted to surviving nodes.
    """
    if max_hop < 0:
        raise ValueError("max_hop must be >= 0")
    direction = (
        Direction.FORWARD
        if target.kind is TargetKind.ARGUMENT
        else Direction.BACKWARD
    )
    occurrences = _target_occurrences(g, target)
    if direction is Direction.FORWARD:
        anchors = [n.id for n in occurrences]
    else:
        anchors = [_definition_anchor(occurrences, target)]

    step = g.out_edges if direction is Direction.FORWARD else g.in_edges
    other_end = (lambda e: e.dst) if direction is Direction.FORWARD else (lambda e: e.src)

    hops: dict[int, int] = {a: 0 for a in anchors}
    queue = deque(anchors)
    while queue:
        nid = queue.popleft()
        depth = hops[nid]
        if depth == max_hop:
            continue
        for e in step(nid):
            nxt = other_end(e)
            if nxt not in hops:
                hops[nxt] = depth + 1
                queue.append(nxt)

    keep = set(hops)
    nodes = tuple(n for n in g.nodes if n.id in keep)
    edges = tuple(e for e in g.edges if e.src in keep and e.dst in keep)
    sub = TypeDependencyGraph(nodes, edges, scope=g.scope)
    return SlicedTDG(
        graph=sub,
        target_node=min(anchors),
        anchors=tuple(sorted(anchors)),
        hops=hops,
        direction=direction,
    )


def _definition_anchor(occurrences: list[TdgNode], target: TargetVariable) -> int:
    loc = (target.line, target.col)
    for n in occurrences:
        if loc in n.occurrences:
            return n.id
    # fall back to the occurrence whose first position is closest above the
    # requested line; dataset line numbers may point inside a span
    best = min(
        occurrences,
        key=lambda n: (abs(n.line - target.line), n.line, n.col),
    )
    return best.id


def refine(
    g: TypeDependencyGraph, target: TargetVariable, max_hop: int = DEFAULT_MAX_HOP
) -> SlicedTDG:
    """prune -> merge_symbols -> slice_tdg, the standard pipeline order."""
    return slice_tdg(merge_symbols(prune(g, target)), target, max_hop)
