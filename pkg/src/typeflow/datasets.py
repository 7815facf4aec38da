"""Dataset and prediction file formats (JSON Lines).

One dataset record per target variable::

    {"id": ..., "file": ..., "kind": "arg"|"ret"|"var", "name": ...,
     "function": ..., "line": ..., "annotation": ...}

One prediction record per target::

    {"id": ..., "ranked": [type, ...]}
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable

KINDS = ("arg", "ret", "var")


@dataclass(frozen=True)
class DatasetRecord:
    id: str
    file: str
    kind: str
    name: str
    function: str | None
    line: int
    annotation: str

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"record {self.id}: kind must be one of {KINDS}")

    @classmethod
    def from_dict(cls, data: dict) -> "DatasetRecord":
        return cls(
            id=str(data["id"]),
            file=data["file"],
            kind=data["kind"],
            name=data.get("name", ""),
            function=data.get("function") or None,
            line=int(data["line"]),
            annotation=data.get("annotation", ""),
        )


def read_dataset(path: str | Path) -> list[DatasetRecord]:
    """Read records; relative file paths resolve against the dataset's dir."""
    base = Path(path).resolve().parent
    records = []
    for obj in read_jsonl(path):
        record = DatasetRecord.from_dict(obj)
        if not Path(record.file).is_absolute():
            record = DatasetRecord(
                id=record.id, file=str(base / record.file), kind=record.kind,
                name=record.name, function=record.function,
                line=record.line, annotation=record.annotation,
            )
        records.append(record)
    return records


def write_dataset(records: Iterable[DatasetRecord], path: str | Path) -> None:
    write_jsonl((asdict(r) for r in records), path)


def read_predictions(path: str | Path) -> dict[str, list[str]]:
    return {str(obj["id"]): list(obj["ranked"]) for obj in read_jsonl(path)}


def write_predictions(
    predictions: dict[str, list[str]], path: str | Path
) -> None:
    write_jsonl(
        ({"id": pid, "ranked": ranked} for pid, ranked in predictions.items()), path
    )


def read_jsonl(path: str | Path) -> list[dict]:
    out = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{line_no}: invalid JSON ({exc})") from exc
    return out


def write_jsonl(objs: Iterable[dict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for obj in objs:
            handle.write(json.dumps(obj, ensure_ascii=False) + "\n")
