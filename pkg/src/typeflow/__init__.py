"""typeflow: few-shot generative type inference for Python source code.

The pipeline: parse a file, build the type dependency graph around a target
variable, slice it to the statements that shape the target's type, collect
visible user-defined and third-party type names, render chain-of-thought
reasoning from the graph, pick similar solved examples with BM25, ask a
completion backend, and score frequency-ranked predictions with Exact Match
and Match to Parametric.
"""

from .cot import CotPrompt, generate_cot, op_phrase
from .datasets import DatasetRecord, read_dataset, read_predictions
from .evaluation import (
    EvalReport,
    TypeExpr,
    categorize_type,
    evaluate,
    exact_match,
    match_to_parametric,
    parse_type,
)
from .frontend import (
    ImportRecord,
    SourceModule,
    TargetKind,
    TargetVariable,
    collect_imports,
    enumerate_targets,
    parse_module,
)
from .hints import TypeDatabase, TypeHintSet, build_typedb, collect_hints, render_hint
from .llm import BackendConfig, BackendKind, CompletionRequest, complete, estimate_tokens
from .pipeline import PipelineConfig, infer_targets, locate_target, prepare_target
from .prompting import (
    InputPrompt,
    PredictionSet,
    assemble_prompt,
    extract_predictions,
    rank_samples,
)
from .retrieval import Bm25Index, ExampleRecord, build_index, select_examples, tokenize
from .slicer import CodeSlice, slice_code
from .tdg import (
    SlicedTDG,
    TargetNotFound,
    TypeDependencyGraph,
    build_tdg,
    merge_symbols,
    prune,
    slice_tdg,
)

__version__ = "0.1.0"

__all__ = [
    "BackendConfig",
    "BackendKind",
    "Bm25Index",
    "CodeSlice",
    "CompletionRequest",
    "CotPrompt",
    "DatasetRecord",
    "EvalReport",
    "ExampleRecord",
    "ImportRecord",
    "InputPrompt",
    "PipelineConfig",
    "PredictionSet",
    "SlicedTDG",
    "SourceModule",
    "TargetKind",
    "TargetNotFound",
    "TargetVariable",
    "TypeDatabase",
    "TypeDependencyGraph",
    "TypeExpr",
    "TypeHintSet",
    "assemble_prompt",
    "build_index",
    "build_tdg",
    "build_typedb",
    "categorize_type",
    "collect_hints",
    "collect_imports",
    "complete",
    "enumerate_targets",
    "estimate_tokens",
    "evaluate",
    "exact_match",
    "extract_predictions",
    "generate_cot",
    "infer_targets",
    "locate_target",
    "match_to_parametric",
    "merge_symbols",
    "op_phrase",
    "parse_module",
    "parse_type",
    "prepare_target",
    "prune",
    "rank_samples",
    "read_dataset",
    "read_predictions",
    "render_hint",
    "select_examples",
    "slice_code",
    "slice_tdg",
    "tokenize",
]
