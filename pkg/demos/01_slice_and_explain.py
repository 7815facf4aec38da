"""
Slicing a target variable and explaining its type
==================================================

Walk the first half of the pipeline on a single file: build the type
dependency graph around one global variable, cut it down to the
statements that shape the variable's type, and render the numbered
reasoning steps a model would be shown.

Run from the repository root:  python demos/01_slice_and_explain.py
"""

from pathlib import Path

from typeflow import build_tdg, generate_cot, parse_module, slice_code
from typeflow.frontend import TargetKind, TargetVariable
from typeflow.tdg import merge_symbols, prune, slice_tdg

FIXTURE = Path(__file__).resolve().parent.parent / "tests/fixtures/webapp_settings.py"

# Parse the file. The module keeps byte-exact statement spans, which is what
# makes the slices below reproduce the original lines verbatim.
module = parse_module(FIXTURE.read_text(), str(FIXTURE))

# DATABASES is a module-level dict assembled from nearby constants.
target = TargetVariable(
    TargetKind.GLOBAL_VARIABLE, "DATABASES", None, 71, 0,
    annotation="dict[str, dict[str, str]]",
)

# Build the graph over all module-level statements, drop everything without
# a dependency path to the target, and collapse repeated occurrences of the
# same variable.
graph = merge_symbols(prune(build_tdg(module), target))
print(f"refined graph: {len(graph.nodes)} nodes, {len(graph.edges)} edges")

# Keep only nodes within 3 hops of the target, then map the survivors back
# to source statements.
sliced = slice_tdg(graph, target, max_hop=3)
for hop in range(sliced.max_hop + 1):
    labels = ", ".join(n.label() for n in sliced.nodes_at(hop))
    print(f"  hop {hop}: {labels}")

code = slice_code(sliced, module, target=target)
print("\n--- code slice ---")
print(code.rendered)

# The chain of thought translates each graph edge into one numbered sentence
# and closes with the annotated type in backquotes.
cot = generate_cot(sliced, target, target.annotation)
print("\n--- chain of thought ---")
for sentence in cot.sentences:
    print(sentence)
