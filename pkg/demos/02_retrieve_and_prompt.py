"""
Example retrieval and few-shot prompt assembly
==============================================

Turn a small annotated corpus into solved examples, index their code
slices with BM25, and assemble the complete few-shot input prompt for a
new target. The most similar example lands immediately before the target
section, which is the ordering the in-context method relies on.

Run from the repository root:  python demos/02_retrieve_and_prompt.py
"""

from pathlib import Path

from typeflow import build_index, read_dataset, select_examples
from typeflow.frontend import TargetKind, TargetVariable
from typeflow.pipeline import PipelineConfig, build_examples, load_module, prepare_target
from typeflow.prompting import assemble_prompt

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "tests/fixtures/minicorpus/dataset.jsonl"
FIXTURE = ROOT / "tests/fixtures/webapp_settings.py"

# Each training record becomes slice + hints + chain-of-thought; the index
# scores slices by sub-word token similarity (Okapi BM25, k1=1.2, b=0.75).
dataset = read_dataset(CORPUS)
examples = build_examples(dataset, PipelineConfig())
index = build_index(examples)
print(f"indexed {index.size} solved examples")

# Prepare the target the same way the examples were prepared.
module = load_module(FIXTURE)
target = TargetVariable(TargetKind.GLOBAL_VARIABLE, "DATABASES", None, 71, 0)
context = prepare_target(module, target, PipelineConfig())

# Five most similar examples, least similar first.
picked = select_examples(index, context.slice_text, k=5)
scores = dict(zip([r.id for r in index.records], index.score_all(context.slice_text)))
print("\nselected examples (ascending similarity):")
for record in picked:
    print(f"  {scores[record.id]:7.3f}  {record.id}")

prompt = assemble_prompt(picked, context.slice_text, context.hint_text, target)
print(f"\nprompt: {prompt.shots} shots, ~{prompt.token_estimate} tokens")
print("\n--- full input prompt ---")
print(prompt.rendered)
