"""End-to-end plumbing: dataset records -> prompts -> predictions.

This module connects the phases for batch runs: locate a dataset record's
target in its parsed file, produce its slice/hints/COT context, turn
training records into indexed examples, and drive inference over a dataset
with a bounded worker pool.  Each target's pipeline state is independent,
so results are deterministic regardless of worker scheduling.
"""

from __future__ import annotations

import ast
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import tdg as tdg_mod
from .cot import generate_cot
from .datasets import DatasetRecord
from .frontend import (
    MODULE_SCOPE,
    SourceModule,
    TargetKind,
    TargetVariable,
    parse_module,
)
from .hints import TypeDatabase, collect_hints, render_hint
from .llm import Backend, CompletionRequest
from .prompting import ContextOverflow, InputPrompt, assemble_prompt, rank_samples
from .retrieval import Bm25Index, ExampleRecord, select_examples, select_fixed
from .slicer import CodeSlice, slice_code
from .tdg import DEFAULT_MAX_HOP, SlicedTDG, TargetNotFound

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TargetContext:
    """Everything the prompt needs for one target."""

    target: TargetVariable
    sliced: SlicedTDG
    code_slice: CodeSlice
    hint_text: str

    @property
    def slice_text(self) -> str:
        return self.code_slice.rendered


@dataclass(frozen=True)
class PipelineConfig:
    max_hop: int = DEFAULT_MAX_HOP
    hint_cap: int = 50
    flat_slices: bool = False
    qualified_hints: bool = False
    project_root: str | None = None
    typedb: TypeDatabase | None = None


def load_module(path: str | Path) -> SourceModule:
    return parse_module(Path(path).read_text(encoding="utf-8"), str(path))


def locate_target(m: SourceModule, record: DatasetRecord) -> TargetVariable:
    """Resolve a dataset record to a concrete target in the parsed file."""
    if record.kind == "arg":
        if not record.function:
            raise TargetNotFound(f"{record.id}: argument target needs a function")
        node = m.function_node(record.function)
        for arg in _args_of(node):
            if arg.arg == record.name:
                return TargetVariable(
                    TargetKind.ARGUMENT, record.name, record.function,
                    arg.lineno, arg.col_offset, record.annotation,
                )
        raise TargetNotFound(
            f"{record.id}: no argument {record.name!r} in {record.function}"
        )
    if record.kind == "ret":
        if not record.function:
            raise TargetNotFound(f"{record.id}: return target needs a function")
        fn = m.function(record.function)
        return TargetVariable(
            TargetKind.RETURN_VALUE, "", record.function,
            fn.line, fn.col, record.annotation,
        )
    # kind == "var": local when a function is named, else module global
    kind = TargetKind.LOCAL_VARIABLE if record.function else TargetKind.GLOBAL_VARIABLE
    line, col = _find_binding(m, record)
    return TargetVariable(
        kind, record.name, record.function or None, line, col, record.annotation
    )


def _args_of(node: ast.FunctionDef | ast.AsyncFunctionDef) -> list[ast.arg]:
    a = node.args
    out = list(a.posonlyargs) + list(a.args)
    if a.vararg:
        out.append(a.vararg)
    out += list(a.kwonlyargs)
    if a.kwarg:
        out.append(a.kwarg)
    return out


def _find_binding(m: SourceModule, record: DatasetRecord) -> tuple[int, int]:
    """Locate the binding occurrence of a variable near the recorded line."""
    candidates: list[tuple[int, int]] = []
    for node in ast.walk(m.tree):
        if isinstance(node, ast.Name) and node.id == record.name and isinstance(
            node.ctx, ast.Store
        ):
            candidates.append((node.lineno, node.col_offset))
    if not candidates:
        raise TargetNotFound(f"{record.id}: no binding of {record.name!r} in {record.file}")
    return min(candidates, key=lambda lc: (abs(lc[0] - record.line), lc[1]))


def prepare_target(
    m: SourceModule, target: TargetVariable, cfg: PipelineConfig
) -> TargetContext:
    """Run build -> prune -> merge -> slice -> hints for one target."""
    scope = target.enclosing_function or MODULE_SCOPE
    graph = tdg_mod.build_tdg(m, scope)
    sliced = tdg_mod.refine(graph, target, cfg.max_hop)
    code_slice = slice_code(sliced, m, flat=cfg.flat_slices, target=target)
    hints = collect_hints(
        m,
        cfg.project_root or str(Path(m.path).parent),
        cfg.typedb,
        cfg.hint_cap,
        qualified=cfg.qualified_hints,
    )
    return TargetContext(target, sliced, code_slice, render_hint(hints))


def build_example(
    record: DatasetRecord, cfg: PipelineConfig, *, module: SourceModule | None = None
) -> ExampleRecord:
    """Turn one annotated training record into an indexed example."""
    m = module if module is not None else load_module(record.file)
    target = locate_target(m, record)
    context = prepare_target(m, target, cfg)
    cot = generate_cot(context.sliced, target, record.annotation)
    return ExampleRecord(
        id=record.id,
        slice_text=context.slice_text,
        hint_text=context.hint_text,
        cot_text=cot.rendered,
        annotated_type=record.annotation,
        target_kind=target.kind.dataset_kind,
        target_name=target.display_name,
    )


def build_examples(
    records: list[DatasetRecord], cfg: PipelineConfig
) -> list[ExampleRecord]:
    """Batch example construction; per-record failures are logged, skipped."""
    modules: dict[str, SourceModule] = {}
    out: list[ExampleRecord] = []
    for record in records:
        try:
            if record.file not in modules:
                modules[record.file] = load_module(record.file)
            out.append(build_example(record, cfg, module=modules[record.file]))
        except (SyntaxError, TargetNotFound, OSError) as exc:
            logger.warning("skipping training record %s: %s", record.id, exc)
    return out


def prompt_for_record(
    record: DatasetRecord,
    index: Bm25Index | None,
    cfg: PipelineConfig,
    *,
    shots: int = 5,
    token_budget: int | None = None,
    fixed_examples: list[str] | None = None,
) -> InputPrompt:
    m = load_module(record.file)
    target = locate_target(m, record)
    context = prepare_target(m, target, cfg)
    if index is None or shots == 0:
        examples = []
    elif fixed_examples:
        examples = select_fixed(index, fixed_examples)
    else:
        examples = select_examples(index, context.slice_text, shots)
    return assemble_prompt(
        examples,
        context.slice_text,
        context.hint_text,
        target,
        token_budget=token_budget,
    )


def infer_targets(
    dataset: list[DatasetRecord],
    index: Bm25Index | None,
    backend: Backend,
    cfg: PipelineConfig,
    *,
    shots: int = 5,
    n_samples: int = 50,
    temperature: float = 1.0,
    top_k: int = 5,
    max_new_tokens: int = 256,
    token_budget: int | None = None,
    fixed_examples: list[str] | None = None,
    workers: int = 4,
) -> dict[str, list[str]]:
    """Run the full pipeline over a dataset; returns id -> ranked types.

    Records that fail (missing file, syntax error, absent target) produce an
    empty ranked list and a log line rather than aborting the batch.
    """

    def run_one(record: DatasetRecord) -> tuple[str, list[str]]:
        try:
            prompt = prompt_for_record(
                record, index, cfg,
                shots=shots, token_budget=token_budget,
                fixed_examples=fixed_examples,
            )
            request = CompletionRequest(
                prompt=prompt.rendered,
                n_samples=n_samples,
                temperature=temperature,
                max_new_tokens=max_new_tokens,
                tag=f"{record.file}::{record.id}",
            )
            samples = backend.complete(request)
            ranked = rank_samples(samples, top_k)
            return record.id, ranked.types
        except (SyntaxError, TargetNotFound, ContextOverflow, OSError) as exc:
            logger.warning("target %s failed: %s", record.id, exc)
            return record.id, []

    if workers <= 1:
        results = [run_one(r) for r in dataset]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_one, dataset))
    return dict(results)
