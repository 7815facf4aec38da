"""
Hermetic inference and metric scoring
=====================================

Run the whole pipeline end to end without a model or network: the echo
mock answers every prompt with a conclusion quoting the ground-truth
type, so a correct pipeline scores 100% everywhere. Swap the backend
config for an HTTP endpoint to run the same loop against a real model.

Run from the repository root:  python demos/03_mock_inference_and_scoring.py
"""

from pathlib import Path

from typeflow import build_index, evaluate, read_dataset
from typeflow.llm import BackendConfig, BackendKind, make_backend
from typeflow.pipeline import PipelineConfig, build_examples, infer_targets

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "tests/fixtures/minicorpus/dataset.jsonl"

dataset = read_dataset(CORPUS)
cfg = PipelineConfig()
index = build_index(build_examples(dataset, cfg))

# The echo backend reads the dataset as its answer sheet. A real run uses
# BackendKind.HTTP_CHAT with base_url/model and an API key in OPENAI_API_KEY,
# sampling 50 completions per target at temperature 1.0.
backend = make_backend(
    BackendConfig(kind=BackendKind.MOCK, mock_mode="echo", mock_sidecar=str(CORPUS))
)

predictions = infer_targets(
    dataset, index, backend, cfg,
    shots=5, n_samples=50, temperature=1.0, top_k=5, workers=4,
)
print(f"predicted {len(predictions)} targets")
sample_id = dataset[0].id
print(f"example ranked prediction for {sample_id}: {predictions[sample_id]}")

# Exact Match demands structural equality after normalization; Match to
# Parametric only compares the outermost constructor.
report = evaluate(dataset, predictions)
print()
print(report.to_text())
