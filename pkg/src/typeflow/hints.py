"""Type hints: user-defined and third-party type names visible in a file.

Hints give the model names it cannot invent from the code slice alone.
Collection follows a strict priority order: classes defined in the current
file, then classes from project files the current file imports (one level),
then third-party types looked up in a :class:`TypeDatabase` keyed by
package name.  The total is capped (default 50), truncating from the lowest
priority end.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .frontend import ImportRecord, SourceModule, parse_module

logger = logging.getLogger(__name__)

DEFAULT_HINT_CAP = 50


class Provenance(Enum):
    USER_CURRENT_FILE = 0
    USER_OTHER_FILE = 1
    THIRD_PARTY = 2


@dataclass(frozen=True)
class TypeHintSet:
    entries: tuple[tuple[str, Provenance], ...]

    def __post_init__(self) -> None:
        names = [name for name, _ in self.entries]
        if len(set(names)) != len(names):
            raise ValueError("duplicate type names in hint set")
        ranks = [p.value for _, p in self.entries]
        if ranks != sorted(ranks):
            raise ValueError("hint entries out of provenance order")

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.entries]

    def __len__(self) -> int:
        return len(self.entries)


class TypeDatabase:
    """package name -> ordered, deduplicated exported type names."""

    def __init__(self, packages: dict[str, list[str]] | None = None) -> None:
        self._packages: dict[str, list[str]] = {}
        for name, types in (packages or {}).items():
            self._packages[name] = list(dict.fromkeys(types))

    def lookup(self, package: str) -> list[str]:
        return list(self._packages.get(package, []))

    def __contains__(self, package: str) -> bool:
        return package in self._packages

    def packages(self) -> list[str]:
        return sorted(self._packages)

    def to_json(self) -> str:
        return json.dumps(self._packages, indent=2, sort_keys=True)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "TypeDatabase":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(data)


def build_typedb(package_roots: list[str | Path]) -> TypeDatabase:
    """Scan installed package roots and record their class names.

    A root is a package directory or a single-file module.  Classes are found
    with the same import analysis applied to user code: class definitions in
    every module of the package, which also covers names re-exported through
    relative imports.  Ordering is (module path, class name); files that fail
    to parse are logged and skipped.
    """
    packages: dict[str, list[str]] = {}
    for root in package_roots:
        root = Path(root)
        name = root.stem if root.suffix == ".py" else root.name
        found: list[tuple[str, str]] = []
        for path in _package_files(root):
            try:
                module = parse_module(path.read_text(encoding="utf-8"), str(path))
            except (SyntaxError, UnicodeDecodeError) as exc:
                logger.warning("typedb: skipping %s (%s)", path, exc)
                continue
            found.extend((str(path), cls) for cls in module.classes)
        found.sort()
        packages[name] = list(dict.fromkeys(cls for _, cls in found))
    return TypeDatabase(packages)


def _package_files(root: Path) -> list[Path]:
    if root.suffix == ".py":
        return [root] if root.exists() else []
    return sorted(root.rglob("*.py"))


def collect_hints(
    m: SourceModule,
    project_root: str | Path | None = None,
    db: TypeDatabase | None = None,
    cap: int = DEFAULT_HINT_CAP,
    *,
    qualified: bool = False,
) -> TypeHintSet:
    """Gather visible type names for a module in priority order, capped.

    Unresolvable imports are ignored with a log line.  Deterministic for a
    fixed file system state: current-file classes in source order, imported
    project files in import order, database lookups in import order.
    ``qualified`` prefixes third-party names with their package
    (``requests.Session``); user-defined names stay bare either way.
    """
    picked: list[tuple[str, Provenance]] = []
    seen: set[str] = set()

    def add(name: str, provenance: Provenance) -> None:
        if name not in seen:
            seen.add(name)
            picked.append((name, provenance))

    for cls in m.classes:
        add(cls, Provenance.USER_CURRENT_FILE)

    root = Path(project_root) if project_root is not None else None
    third_party: list[str] = []
    for record in m.imports:
        resolved = _resolve_project_import(record, m, root) if root else None
        if resolved is not None:
            try:
                imported = parse_module(resolved.read_text(encoding="utf-8"), str(resolved))
            except (SyntaxError, UnicodeDecodeError) as exc:
                logger.info("hints: cannot parse %s (%s)", resolved, exc)
                continue
            for cls in imported.classes:
                add(cls, Provenance.USER_OTHER_FILE)
        elif not record.is_relative:
            third_party.append(record.top_level)

    if db is not None:
        for package in dict.fromkeys(third_party):
            for cls in db.lookup(package):
                add(f"{package}.{cls}" if qualified else cls, Provenance.THIRD_PARTY)

    return TypeHintSet(tuple(picked[:cap]))


def _resolve_project_import(
    record: ImportRecord, m: SourceModule, root: Path
) -> Path | None:
    """Map one import record to a project file, or None for external ones."""
    if record.is_relative:
        level = len(record.module) - len(record.module.lstrip("."))
        base = Path(m.path).resolve().parent
        for _ in range(level - 1):
            base = base.parent
        tail = record.module.lstrip(".")
        candidate = base.joinpath(*tail.split(".")) if tail else base
    else:
        candidate = root / Path(*record.module.split("."))
    for option in (
        candidate.with_suffix(".py"),
        candidate / "__init__.py",
    ):
        if option.exists():
            return option
    if not record.is_relative:
        return None
    logger.info("hints: unresolved relative import %s in %s", record.module, m.path)
    return None


def render_hint(h: TypeHintSet) -> str:
    """One-sentence hint line; empty set renders the empty string."""
    if not h.entries:
        return ""
    return "Available user-defined and third-party types: " + ", ".join(h.names) + "."
