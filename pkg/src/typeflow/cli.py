"""Command-line interface: each pipeline phase, plus end-to-end infer/eval.

Exit codes: 0 success, 1 usage error, 2 input error (missing/invalid files
or targets), 3 backend error.  Every flag can also be set in a TOML config
file passed with ``--config``; explicit flags win over file values.
"""

from __future__ import annotations

import argparse
import logging
import random
import sys
from dataclasses import dataclass, fields
from pathlib import Path

try:  # Python 3.11+
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - 3.10 fallback
    import tomli as tomllib

from . import pipeline
from .cot import generate_cot
from .datasets import DatasetRecord, read_dataset, read_predictions, write_predictions
from .evaluation import UnknownTargetId, evaluate
from .frontend import SourceModule
from .hints import TypeDatabase, build_typedb, collect_hints, render_hint
from .llm import BackendConfig, BackendError, BackendKind, make_backend
from .prompting import ContextOverflow
from .retrieval import Bm25Index, build_index
from .tdg import TargetNotFound

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_BACKEND = 3


@dataclass
class RunConfig:
    """Pipeline defaults; the defaults-audit test pins these values."""

    max_hop: int = 3
    shots: int = 5
    n_samples: int = 50
    temperature: float = 1.0
    top_k: int = 5
    hint_cap: int = 50
    backend: str = "mock"
    base_url: str = ""
    model: str = ""
    token_budget: int | None = None
    index_path: str | None = None
    typedb_path: str | None = None


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


def build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="TOML config file; flags win over it")
    common.add_argument("--seed", type=int, default=None,
                        help="seed randomized behavior (remote sampling stays "
                             "nondeterministic by nature)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="typeflow", description=__doc__, parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_command(name: str, help: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, help=help, parents=[common])

    defaults = RunConfig()

    def locator_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("target", help="target locator file.py:LINE:NAME")
        p.add_argument("--kind", choices=("arg", "ret", "var"),
                       help="override inferred target kind")
        p.add_argument("--max-hop", type=int, default=defaults.max_hop)
        p.add_argument("--flat-slices", action="store_true",
                       help="omit enclosing control-flow headers from slices")

    def hint_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--typedb", dest="typedb_path", default=None)
        p.add_argument("--hint-cap", type=int, default=defaults.hint_cap)
        p.add_argument("--project-root", default=None)
        p.add_argument("--qualified", action="store_true",
                       help="prefix third-party hint names with their package")

    p_slice = add_command("slice", "print the code slice for a target")
    locator_args(p_slice)

    p_hints = add_command("hints", "print the type-hint line for a file")
    p_hints.add_argument("file")
    hint_args(p_hints)

    p_cot = add_command("cot", "print the chain-of-thought for a target")
    locator_args(p_cot)
    p_cot.add_argument("--annotation", required=True,
                       help="ground-truth type for the conclusion sentence")

    p_prompt = add_command("prompt", "print the assembled input prompt")
    locator_args(p_prompt)
    hint_args(p_prompt)
    p_prompt.add_argument("--index", dest="index_path", default=None)
    p_prompt.add_argument("--shots", type=int, default=defaults.shots)
    p_prompt.add_argument("--token-budget", type=int, default=defaults.token_budget)
    p_prompt.add_argument("--fixed-examples", default=None,
                          help="comma-separated example ids, used in the given order")

    p_index = add_command("index", "BM25 example index operations")
    index_sub = p_index.add_subparsers(dest="index_command", required=True, parser_class=_Parser)
    p_index_build = index_sub.add_parser("build", help="build an index from train.jsonl", parents=[common])
    p_index_build.add_argument("--train", required=True)
    p_index_build.add_argument("-o", "--out", required=True)
    p_index_build.add_argument("--max-hop", type=int, default=defaults.max_hop)
    p_index_build.add_argument("--flat-slices", action="store_true")
    hint_args(p_index_build)

    p_typedb = add_command("typedb", "type database operations")
    typedb_sub = p_typedb.add_subparsers(dest="typedb_command", required=True, parser_class=_Parser)
    p_typedb_build = typedb_sub.add_parser("build", help="scan installed packages", parents=[common])
    p_typedb_build.add_argument("--site-packages", required=True)
    p_typedb_build.add_argument("-o", "--out", required=True)

    p_infer = add_command("infer", "predict types for a dataset")
    p_infer.add_argument("dataset")
    p_infer.add_argument("-o", "--out", required=True)
    p_infer.add_argument("--index", dest="index_path", default=None)
    hint_args(p_infer)
    p_infer.add_argument("--max-hop", type=int, default=defaults.max_hop)
    p_infer.add_argument("--flat-slices", action="store_true")
    p_infer.add_argument("--shots", type=int, default=defaults.shots)
    p_infer.add_argument("--samples", type=int, default=defaults.n_samples)
    p_infer.add_argument("--temperature", type=float, default=defaults.temperature)
    p_infer.add_argument("--top-k", type=int, default=defaults.top_k)
    p_infer.add_argument("--token-budget", type=int, default=defaults.token_budget)
    p_infer.add_argument("--fixed-examples", default=None)
    p_infer.add_argument("--backend", choices=("mock", "http"), default=defaults.backend)
    p_infer.add_argument("--base-url", default=defaults.base_url)
    p_infer.add_argument("--model", default=defaults.model)
    p_infer.add_argument("--mock-mode", choices=("echo", "canned"), default="echo")
    p_infer.add_argument("--mock-fixtures", default=None)
    p_infer.add_argument("--workers", type=int, default=4)
    p_infer.add_argument("--max-new-tokens", type=int, default=256)

    p_eval = add_command("eval", "score predictions against a dataset")
    p_eval.add_argument("dataset")
    p_eval.add_argument("predictions")
    p_eval.add_argument("--strict-text", action="store_true",
                        help="compare annotation text without normalization")
    p_eval.add_argument("-o", "--out", default=None,
                        help="also write the machine-readable JSON report here")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = _parse_with_config(parser, argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.seed is not None:
        random.seed(args.seed)

    try:
        return _dispatch(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BackendError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except (
        FileNotFoundError,
        SyntaxError,
        TargetNotFound,
        UnknownTargetId,
        ContextOverflow,
        ValueError,
        KeyError,
        OSError,
    ) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def _parse_with_config(parser: _Parser, argv: list[str] | None) -> argparse.Namespace:
    probe = _Parser(add_help=False)
    probe.add_argument("--config", default=None)
    known, _ = probe.parse_known_args(argv)
    if known.config:
        with open(known.config, "rb") as handle:
            file_values = tomllib.load(handle)
        valid = {f.name for f in fields(RunConfig)} | {
            "seed", "verbose", "kind", "shots", "samples", "workers",
            "mock_mode", "mock_fixtures", "project_root", "qualified",
            "flat_slices", "strict_text", "fixed_examples", "token_budget",
        }
        unknown = set(file_values) - valid
        if unknown:
            raise _UsageError(f"unknown config keys: {sorted(unknown)}")
        _set_defaults_everywhere(parser, file_values)
    return parser.parse_args(argv)


def _set_defaults_everywhere(parser: argparse.ArgumentParser, values: dict) -> None:
    """Apply config-file values as defaults on the parser and every
    subparser, so explicit flags still win."""
    parser.set_defaults(**values)
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for sub in action.choices.values():
                _set_defaults_everywhere(sub, values)


def _dispatch(args: argparse.Namespace) -> int:
    handlers = {
        "slice": cmd_slice,
        "hints": cmd_hints,
        "cot": cmd_cot,
        "prompt": cmd_prompt,
        "index": cmd_index,
        "typedb": cmd_typedb,
        "infer": cmd_infer,
        "eval": cmd_eval,
    }
    return handlers[args.command](args)


# -- target locators ---------------------------------------------------------


def _parse_locator(value: str) -> tuple[str, int, str]:
    parts = value.rsplit(":", 2)
    if len(parts) != 3 or not parts[1].isdigit():
        raise _UsageError(f"locator must be file.py:LINE:NAME, got {value!r}")
    return parts[0], int(parts[1]), parts[2]


def _record_for_locator(args: argparse.Namespace) -> tuple[SourceModule, DatasetRecord]:
    file, line, name = _parse_locator(args.target)
    m = pipeline.load_module(file)
    kind = getattr(args, "kind", None) or _infer_kind(m, line, name)
    function = _enclosing_function(m, line, name, kind)
    record = DatasetRecord(
        id=f"{file}:{line}:{name}", file=file, kind=kind,
        name="" if kind == "ret" else name, function=function,
        line=line, annotation=getattr(args, "annotation", "") or "",
    )
    return m, record


def _infer_kind(m: SourceModule, line: int, name: str) -> str:
    for fn in m.functions:
        node = m.function_node(fn.qualname)
        for arg in pipeline._args_of(node):
            if arg.arg == name and arg.lineno == line:
                return "arg"
    for fn in m.functions:
        if fn.qualname.rsplit(".", 1)[-1] == name and fn.line == line:
            return "ret"
    return "var"


def _enclosing_function(m: SourceModule, line: int, name: str, kind: str) -> str | None:
    if kind == "arg":
        for fn in m.functions:
            node = m.function_node(fn.qualname)
            if any(a.arg == name for a in pipeline._args_of(node)):
                span = m.statement(fn.def_statement_id)
                if span.start <= line <= span.end:
                    return fn.qualname
        for fn in m.functions:
            node = m.function_node(fn.qualname)
            if any(a.arg == name for a in pipeline._args_of(node)):
                return fn.qualname
        raise TargetNotFound(f"no function argument {name!r} near line {line}")
    if kind == "ret":
        for fn in m.functions:
            if fn.qualname.rsplit(".", 1)[-1] == name:
                return fn.qualname
        raise TargetNotFound(f"no function named {name!r}")
    best: str | None = None
    for fn in m.functions:
        for sid in fn.statement_ids:
            s = m.statement(sid)
            if s.start <= line <= s.end:
                if best is None or len(fn.qualname) > len(best):
                    best = fn.qualname
    return best


def _pipeline_config(args: argparse.Namespace) -> pipeline.PipelineConfig:
    typedb = None
    typedb_path = getattr(args, "typedb_path", None)
    if typedb_path:
        typedb = TypeDatabase.load(typedb_path)
    return pipeline.PipelineConfig(
        max_hop=getattr(args, "max_hop", 3),
        hint_cap=getattr(args, "hint_cap", 50),
        flat_slices=getattr(args, "flat_slices", False),
        qualified_hints=getattr(args, "qualified", False),
        project_root=getattr(args, "project_root", None),
        typedb=typedb,
    )


# -- commands ----------------------------------------------------------------


def cmd_slice(args: argparse.Namespace) -> int:
    m, record = _record_for_locator(args)
    target = pipeline.locate_target(m, record)
    context = pipeline.prepare_target(m, target, _pipeline_config(args))
    print(context.slice_text)
    return EXIT_OK


def cmd_hints(args: argparse.Namespace) -> int:
    m = pipeline.load_module(args.file)
    typedb = TypeDatabase.load(args.typedb_path) if args.typedb_path else None
    hints = collect_hints(
        m,
        args.project_root or str(Path(args.file).parent),
        typedb,
        args.hint_cap,
        qualified=args.qualified,
    )
    print(render_hint(hints))
    return EXIT_OK


def cmd_cot(args: argparse.Namespace) -> int:
    m, record = _record_for_locator(args)
    target = pipeline.locate_target(m, record)
    context = pipeline.prepare_target(m, target, _pipeline_config(args))
    print(generate_cot(context.sliced, target, args.annotation).rendered)
    return EXIT_OK


def cmd_prompt(args: argparse.Namespace) -> int:
    m, record = _record_for_locator(args)
    index = Bm25Index.load(args.index_path) if args.index_path else None
    fixed = args.fixed_examples.split(",") if args.fixed_examples else None
    prompt = pipeline.prompt_for_record(
        record, index, _pipeline_config(args),
        shots=args.shots, token_budget=args.token_budget, fixed_examples=fixed,
    )
    print(prompt.rendered)
    return EXIT_OK


def cmd_index(args: argparse.Namespace) -> int:
    if args.index_command != "build":
        raise _UsageError(f"unknown index command {args.index_command!r}")
    records = read_dataset(args.train)
    examples = pipeline.build_examples(records, _pipeline_config(args))
    if not examples:
        raise ValueError("no usable training records; cannot build an index")
    index = build_index(examples)
    index.save(args.out)
    print(f"indexed {index.size} examples -> {args.out}")
    return EXIT_OK


def cmd_typedb(args: argparse.Namespace) -> int:
    if args.typedb_command != "build":
        raise _UsageError(f"unknown typedb command {args.typedb_command!r}")
    site = Path(args.site_packages)
    if not site.is_dir():
        raise FileNotFoundError(f"not a directory: {site}")
    roots = sorted(
        p for p in site.iterdir()
        if (p.is_dir() and not p.name.endswith(".dist-info") and p.name != "__pycache__")
        or p.suffix == ".py"
    )
    db = build_typedb(roots)
    db.save(args.out)
    print(f"indexed {len(db.packages())} packages -> {args.out}")
    return EXIT_OK


def cmd_infer(args: argparse.Namespace) -> int:
    dataset = read_dataset(args.dataset)
    index = Bm25Index.load(args.index_path) if args.index_path else None
    if index is None and args.shots > 0:
        raise _UsageError("--index is required unless --shots 0")
    if args.backend == "http":
        backend_cfg = BackendConfig(
            kind=BackendKind.HTTP_CHAT, base_url=args.base_url, model=args.model,
        )
    else:
        backend_cfg = BackendConfig(
            kind=BackendKind.MOCK,
            mock_mode=args.mock_mode,
            mock_fixtures=args.mock_fixtures,
            mock_sidecar=args.dataset if args.mock_mode == "echo" else None,
        )
    backend = make_backend(backend_cfg)
    fixed = args.fixed_examples.split(",") if args.fixed_examples else None
    predictions = pipeline.infer_targets(
        dataset, index, backend, _pipeline_config(args),
        shots=args.shots, n_samples=args.samples, temperature=args.temperature,
        top_k=args.top_k, max_new_tokens=args.max_new_tokens,
        token_budget=args.token_budget, fixed_examples=fixed,
        workers=args.workers,
    )
    ordered = {r.id: predictions[r.id] for r in dataset}
    write_predictions(ordered, args.out)
    print(f"wrote {len(ordered)} prediction records -> {args.out}")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    dataset = read_dataset(args.dataset)
    predictions = read_predictions(args.predictions)
    report = evaluate(dataset, predictions, strict_text=args.strict_text)
    print(report.to_text())
    if args.out:
        Path(args.out).write_text(report.to_json() + "\n", encoding="utf-8")
        print(f"json report -> {args.out}")
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
