"""BM25 retrieval over training code slices for in-context examples.

Slices are tokenized into lowercase sub-words (snake_case and camelCase
split), scored with Okapi BM25 (k1=1.2, b=0.75, IDF floored at zero), and
the k best examples are returned in ascending score order so the most
similar example sits immediately before the target prompt.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

DEFAULT_K1 = 1.2
DEFAULT_B = 0.75
DEFAULT_SHOTS = 5

INDEX_FORMAT = "typeflow-bm25-index"
INDEX_VERSION = 1

_WORD_RE = re.compile(r"[A-Za-z0-9]+")
_CAMEL_RE = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|[0-9]+")


def tokenize(text: str) -> list[str]:
    """Alphanumeric runs, split again on camelCase boundaries, lowercased."""
    tokens: list[str] = []
    for word in _WORD_RE.findall(text):
        tokens.extend(part.lower() for part in _CAMEL_RE.findall(word))
    return tokens


@dataclass(frozen=True)
class ExampleRecord:
    """One solved training example: slice + hints + COT + answer."""

    id: str
    slice_text: str
    hint_text: str
    cot_text: str
    annotated_type: str
    target_kind: str
    target_name: str = ""

    def __post_init__(self) -> None:
        if not self.annotated_type:
            raise ValueError(f"example {self.id}: empty annotated type")
        if f"`{self.annotated_type}`" not in self.cot_text:
            raise ValueError(
                f"example {self.id}: COT conclusion does not quote the annotated type"
            )

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "slice_text": self.slice_text,
            "hint_text": self.hint_text,
            "cot_text": self.cot_text,
            "annotated_type": self.annotated_type,
            "target_kind": self.target_kind,
            "target_name": self.target_name,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExampleRecord":
        return cls(**{k: data[k] for k in (
            "id", "slice_text", "hint_text", "cot_text",
            "annotated_type", "target_kind", "target_name",
        )})


@dataclass
class Bm25Index:
    """Okapi BM25 postings over tokenized example slices."""

    records: list[ExampleRecord]
    k1: float = DEFAULT_K1
    b: float = DEFAULT_B
    doc_counts: list[Counter] = field(default_factory=list)
    doc_lengths: list[int] = field(default_factory=list)
    avg_doc_length: float = 0.0
    doc_freq: Counter = field(default_factory=Counter)

    @property
    def size(self) -> int:
        return len(self.records)

    def idf(self, term: str) -> float:
        df = self.doc_freq.get(term, 0)
        n = len(self.records)
        return max(0.0, math.log((n - df + 0.5) / (df + 0.5)))

    def score(self, query_tokens: list[str], doc_index: int) -> float:
        counts = self.doc_counts[doc_index]
        dl = self.doc_lengths[doc_index]
        norm = 1 - self.b + self.b * dl / self.avg_doc_length if self.avg_doc_length else 1.0
        total = 0.0
        for term in set(query_tokens):
            tf = counts.get(term, 0)
            if tf == 0:
                continue
            total += self.idf(term) * tf * (self.k1 + 1) / (tf + self.k1 * norm)
        return total

    def score_all(self, query_text: str) -> list[float]:
        query = tokenize(query_text)
        return [self.score(query, i) for i in range(len(self.records))]

    # -- persistence --

    def save(self, path: str | Path) -> None:
        payload = {
            "format": INDEX_FORMAT,
            "version": INDEX_VERSION,
            "k1": self.k1,
            "b": self.b,
            "records": [r.to_dict() for r in self.records],
            "doc_counts": [sorted(c.items()) for c in self.doc_counts],
        }
        Path(path).write_text(json.dumps(payload), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Bm25Index":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        if payload.get("format") != INDEX_FORMAT:
            raise ValueError(f"{path}: not a {INDEX_FORMAT} file")
        if payload.get("version") != INDEX_VERSION:
            raise ValueError(f"{path}: unsupported index version {payload.get('version')}")
        records = [ExampleRecord.from_dict(r) for r in payload["records"]]
        counts = [Counter(dict((t, n) for t, n in pairs)) for pairs in payload["doc_counts"]]
        return _assemble(records, payload["k1"], payload["b"], counts)


def build_index(
    records: list[ExampleRecord], k1: float = DEFAULT_K1, b: float = DEFAULT_B
) -> Bm25Index:
    """Index every record's slice text; records must be non-empty."""
    if not records:
        raise ValueError("cannot build an index over zero records")
    counts = [Counter(tokenize(r.slice_text)) for r in records]
    return _assemble(records, k1, b, counts)


def _assemble(
    records: list[ExampleRecord], k1: float, b: float, counts: list[Counter]
) -> Bm25Index:
    lengths = [sum(c.values()) for c in counts]
    avg = sum(lengths) / len(lengths) if lengths else 0.0
    df = Counter()
    for c in counts:
        df.update(c.keys())
    return Bm25Index(
        records=records,
        k1=k1,
        b=b,
        doc_counts=counts,
        doc_lengths=lengths,
        avg_doc_length=avg,
        doc_freq=df,
    )


def select_examples(
    idx: Bm25Index, target_slice: str, k: int = DEFAULT_SHOTS
) -> list[ExampleRecord]:
    """The k highest-scoring examples, least similar first.

    Ascending order puts the most similar example adjacent to the target
    prompt.  Ties break by record id ascending; a corpus smaller than k is
    returned whole.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    scores = idx.score_all(target_slice)
    ranked = sorted(
        range(len(scores)), key=lambda i: (-scores[i], idx.records[i].id)
    )[:k]
    ranked.sort(key=lambda i: (scores[i], idx.records[i].id))
    return [idx.records[i] for i in ranked]


def select_fixed(idx: Bm25Index, ids: list[str]) -> list[ExampleRecord]:
    """Fixed-example mode: the named records, in the order given."""
    by_id = {r.id: r for r in idx.records}
    missing = [i for i in ids if i not in by_id]
    if missing:
        raise KeyError(f"fixed example ids not in index: {missing}")
    return [by_id[i] for i in ids]
