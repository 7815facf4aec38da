"""Type parsing/normalization and the EM/MTP scorer against a naive oracle."""

from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from typeflow.datasets import DatasetRecord
from typeflow.evaluation import (
    TOP_KS,
    TypeExpr,
    UnknownTargetId,
    categorize_type,
    evaluate,
    exact_match,
    match_to_parametric,
    parse_type,
)

# -- parsing -------------------------------------------------------------------


def test_nested_dict_structure():
    t = parse_type("dict[str, dict[str, str]]")
    assert t.constructor == "dict"
    assert len(t.args) == 2
    assert t.args[1].constructor == "dict"


def test_typing_prefix_and_alias_lowering():
    assert parse_type("typing.List[int]") == parse_type("list[int]")
    assert parse_type("List[int]") == parse_type("list[int]")
    assert parse_type("FrozenSet[str]") == parse_type("frozenset[str]")


def test_optional_expands_to_union_with_none():
    assert parse_type("Optional[str]") == parse_type("Union[str, None]")
    assert parse_type("Optional[str]") == parse_type("Union[None, str]")


def test_union_order_insensitive():
    assert parse_type("Union[int, str]") == parse_type("Union[str, int]")
    assert parse_type("int | str") == parse_type("Union[str, int]")


def test_union_flattening_and_dedup():
    assert parse_type("Union[int, Union[str, int]]") == parse_type("Union[int, str]")
    assert parse_type("Union[int, int]") == parse_type("int")


def test_whitespace_insensitive():
    assert parse_type(" dict[ str ,  int ] ") == parse_type("dict[str,int]")


def test_unparseable_becomes_opaque_atom():
    t = parse_type("dict[str,")
    assert t.constructor == "dict[str,"
    assert t.args == ()
    assert exact_match(t, parse_type("dict[str,"))


def test_canonical_roundtrip_fixed_cases():
    for text in (
        "dict[str, dict[str, str]]",
        "Union[None, int]",
        "list[tuple[int, str]]",
        "Callable[[int, str], bool]",
        "Literal['a', 'b']",
    ):
        t = parse_type(text)
        assert parse_type(t.canonical_text) == t


def test_strict_mode_skips_normalization():
    assert parse_type("List[int]", normalize=False) != parse_type(
        "list[int]", normalize=False
    )
    assert parse_type("List[int]", normalize=False).constructor == "List"


def test_nonetype_alias():
    assert parse_type("NoneType") == parse_type("None")


# -- matching ------------------------------------------------------------------


def test_exact_match_reflexive():
    t = parse_type("int")
    assert exact_match(t, t)


def test_exact_match_rejects_different_args():
    assert not exact_match(parse_type("List[int]"), parse_type("List[str]"))


def test_exact_match_accepts_normalized_spellings():
    assert exact_match(parse_type("list[int]"), parse_type("typing.List[int]"))


def test_mtp_same_outermost():
    assert match_to_parametric(parse_type("List[int]"), parse_type("List[str]"))


def test_mtp_different_constructors():
    assert not match_to_parametric(parse_type("dict[str,int]"), parse_type("list[int]"))


# -- categorization ---------------------------------------------------------------


def test_categorize_elementary():
    assert categorize_type(parse_type("int")) == "Ele"
    assert categorize_type(parse_type("None")) == "Ele"


def test_categorize_generic():
    assert categorize_type(parse_type("dict[str, str]")) == "Gen"
    assert categorize_type(parse_type("list")) == "Gen"
    assert categorize_type(parse_type("Optional[int]")) == "Gen"


def test_categorize_user():
    assert categorize_type(parse_type("Foo")) == "Usr"
    assert categorize_type(parse_type("requests.Session")) == "Usr"


def test_parameterized_user_type_counts_as_generic():
    assert categorize_type(parse_type("Foo[int]")) == "Gen"


# -- properties -------------------------------------------------------------------

_type_atoms = st.sampled_from(
    ["int", "str", "float", "bool", "None", "bytes", "Foo", "Bar", "requests.Session"]
)


def _types(depth: int = 2):
    if depth == 0:
        return _type_atoms
    inner = _types(depth - 1)
    generic = st.builds(
        lambda ctor, args: f"{ctor}[{', '.join(args)}]",
        st.sampled_from(["list", "dict", "set", "tuple", "Optional", "Union"]),
        st.lists(inner, min_size=1, max_size=3),
    )
    return st.one_of(_type_atoms, generic)


@given(_types(), _types())
def test_em_implies_mtp(a, b):
    ta, tb = parse_type(a), parse_type(b)
    if exact_match(ta, tb):
        assert match_to_parametric(ta, tb)


@given(_types())
def test_exact_match_reflexive_on_generated(a):
    t = parse_type(a)
    assert exact_match(t, t)


@given(_types())
def test_canonical_roundtrip_on_generated(a):
    t = parse_type(a)
    assert parse_type(t.canonical_text) == t


@given(_types(), _types())
def test_exact_match_symmetric(a, b):
    ta, tb = parse_type(a), parse_type(b)
    assert exact_match(ta, tb) == exact_match(tb, ta)


@given(_types(), _types(), _types())
def test_exact_match_transitive(a, b, c):
    ta, tb, tc = (parse_type(x) for x in (a, b, c))
    if exact_match(ta, tb) and exact_match(tb, tc):
        assert exact_match(ta, tc)


# -- evaluate ---------------------------------------------------------------------


def _rec(rid: str, kind: str, annotation: str) -> DatasetRecord:
    return DatasetRecord(
        id=rid, file="f.py", kind=kind, name=rid, function=None,
        line=1, annotation=annotation,
    )


def test_rank_cutoffs():
    dataset = [_rec("t1", "var", "int")]
    report = evaluate(dataset, {"t1": ["str", "int"]})
    cell = report.cell("All", "All")
    assert cell.em[1] == 0
    assert cell.em[3] == 1
    assert cell.em[5] == 1


def test_all_correct_scores_hundred_everywhere():
    dataset = [
        _rec("a", "arg", "int"),
        _rec("b", "ret", "list[str]"),
        _rec("c", "var", "Foo"),
    ]
    preds = {r.id: [r.annotation] for r in dataset}
    report = evaluate(dataset, preds)
    for (vc, tc), cell in report.cells.items():
        if cell.total:
            for k in TOP_KS:
                assert cell.pct("em", k) == 100.0
                assert cell.pct("mtp", k) == 100.0


def test_missing_predictions_count_as_misses():
    dataset = [_rec("t1", "var", "int"), _rec("t2", "var", "int")]
    report = evaluate(dataset, {"t1": ["int"]})
    cell = report.cell("All", "All")
    assert cell.total == 2
    assert cell.em[5] == 1


def test_unknown_prediction_id_raises():
    dataset = [_rec("t1", "var", "int")]
    with pytest.raises(UnknownTargetId):
        evaluate(dataset, {"ghost": ["int"]})


def test_list_int_vs_list_str_is_mtp_only():
    dataset = [_rec("t1", "var", "List[str]")]
    report = evaluate(dataset, {"t1": ["List[int]"]})
    cell = report.cell("All", "All")
    assert cell.em[1] == 0
    assert cell.mtp[1] == 1


def _naive_scorer(dataset, predictions):
    """Independent recomputation: no shared code with EvalReport.record."""
    cells = {}
    for record in dataset:
        gt = parse_type(record.annotation)
        ranked = [parse_type(p) for p in predictions.get(record.id, [])]
        vc = {"arg": "Arg", "ret": "Ret", "var": "Var"}[record.kind]
        tc = categorize_type(gt)
        for v in (vc, "All"):
            for t in (tc, "All"):
                cell = cells.setdefault((v, t), {"total": 0, "em": {}, "mtp": {}})
                cell["total"] += 1
                for k in TOP_KS:
                    head = ranked[:k]
                    cell["em"][k] = cell["em"].get(k, 0) + any(
                        exact_match(p, gt) for p in head
                    )
                    cell["mtp"][k] = cell["mtp"].get(k, 0) + any(
                        match_to_parametric(p, gt) for p in head
                    )
    return cells


_POOL = ["int", "str", "float", "list[int]", "dict[str, int]", "Foo", "None",
         "Optional[str]", "tuple[int, str]", "Bar"]


def _random_eval_case(rng: random.Random, n: int = 100):
    dataset = [
        _rec(f"t{i}", rng.choice(["arg", "ret", "var"]), rng.choice(_POOL))
        for i in range(n)
    ]
    predictions = {}
    for record in dataset:
        if rng.random() < 0.1:
            continue  # leave some targets without predictions
        k = rng.randrange(0, 6)
        predictions[record.id] = rng.sample(_POOL, k) if k else []
    return dataset, predictions


@pytest.mark.parametrize("seed", range(10))
def test_evaluate_matches_naive_recomputation(seed):
    rng = random.Random(seed)
    dataset, predictions = _random_eval_case(rng)
    report = evaluate(dataset, predictions)
    oracle = _naive_scorer(dataset, predictions)
    for (vc, tc), cell in report.cells.items():
        expected = oracle.get((vc, tc), {"total": 0, "em": {}, "mtp": {}})
        assert cell.total == expected["total"], (vc, tc)
        for k in TOP_KS:
            assert cell.em[k] == expected["em"].get(k, 0), (vc, tc, k)
            assert cell.mtp[k] == expected["mtp"].get(k, 0), (vc, tc, k)


def test_report_invariants_on_random_cases():
    rng = random.Random(321)
    dataset, predictions = _random_eval_case(rng, 60)
    report = evaluate(dataset, predictions)
    for cell in report.cells.values():
        for k in TOP_KS:
            assert cell.em[k] <= cell.mtp[k] <= cell.total
        assert cell.em[1] <= cell.em[3] <= cell.em[5]
        assert cell.mtp[1] <= cell.mtp[3] <= cell.mtp[5]


def test_report_renders_text_and_json():
    dataset = [_rec("t1", "arg", "int")]
    report = evaluate(dataset, {"t1": ["int"]})
    text = report.to_text()
    assert "Exact Match (%)" in text and "Match to Parametric (%)" in text
    import json

    payload = json.loads(report.to_json())
    assert payload["exact_match"]["Arg"]["Ele"]["top1"] == 100.0
    assert payload["totals"]["All"]["All"] == 1
