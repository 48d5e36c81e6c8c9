import json

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import bundles_over_p1
from qbundle.bundle import bundle_validate, load_bundle
from qbundle.certify import (
    SearchBudget,
    certify,
    find_point,
    is_smooth_point,
    quadratic_extension,
    real_delta_sampling,
    smooth_point_search,
)
from qbundle.enumerate import ProductPoint
from qbundle.errors import DegenerateTail, ValidationError
from qbundle.fields import QQ, make_field
from qbundle.io import load
from qbundle.transform import BidegreeDivisor, QuadricSystem, polys_and_layout

POT_D = {"base_dim": 1, "fiber_dim": 1, "field": "Q", "weights": [1, 0, 0],
         "sigma": {"0,0": "x0^2+x1^2", "1,1": "1", "2,2": "-3"}}
POT_D_SQUARE = dict(POT_D, sigma={"0,0": "x0^2+x1^2", "1,1": "1", "2,2": "-4"})
OVER_P2 = {"base_dim": 2, "fiber_dim": 1, "field": "Q", "weights": [1, 0, 0],
           "sigma": {"0,0": "x0^3+x1^3+x2^3", "1,1": "x0", "2,2": "-x1"}}


def cert(name_or_raw, height=2):
    obj = load(f"examples/{name_or_raw}.json") if isinstance(name_or_raw, str) else load_bundle(name_or_raw)
    return certify(obj, SearchBudget(height=height)).to_json()


def kinds(c):
    return [w["kind"] for w in c["witness_chain"]]


# --- verdicts -----------------------------------------------------------------------

def test_ex_in_unirational_via_slice():
    c = cert("ex_in_Q4")
    assert c["verdict"] == "Unirational"
    assert c["theorem_path"][0] == "slice j=0"
    assert "Prop Ott_G" in c["theorem_path"] and "Prop Enr" in c["theorem_path"]
    X = next(w for w in c["witness_chain"] if w["kind"] == "X")
    assert X["zbar"] == ["1", "1", "1"]
    on_x = next(w for w in c["witness_chain"] if w["kind"] == "point" and w["on"] == "X")
    assert on_x["coords"] == [["0", "1", "1", "1", "0"]]
    assert "projection" in kinds(c)


def test_bidegree_12_rational():
    c = cert("bideg12")
    assert c["verdict"] == "Rational" and c["theorem_path"] == ["Remark 12-22"]


def test_general_22_without_point_is_unknown():
    c = cert("op_ball")
    assert c["verdict"] == "Unknown" and c["failed"] == "point search"
    assert c["witness_chain"] == []


def test_ex1_uses_333_route():
    c = cert("ex1")
    assert c["verdict"] == "Unirational" and "Prop 333P1" in c["theorem_path"]
    assert "psi" in kinds(c)


def test_zero_diagonal_is_rational():
    c = cert("not0")
    assert c["verdict"] == "Rational" and kinds(c) == ["section"]


def test_non_square_tail_gives_quadratic_extension():
    c = cert(POT_D)
    assert c["verdict"] == "UnirationalOverQuadExt"
    assert c["extension"] == {"disc": "12"}


def test_square_tail_stays_over_base_field():
    c = cert(POT_D_SQUARE)
    assert c["verdict"] == "Unirational" and c["extension"] is None


def test_odd_delta_over_p2_uses_lines():
    c = cert(OVER_P2)
    assert c["verdict"] == "Unirational" and kinds(c) == ["line"]
    assert c["theorem_path"][0] == "Cor corEn(i)"


def test_singular_only_points_do_not_certify():
    assert cert("smoothpt")["verdict"] == "Unknown"


def test_ptsff_finds_smooth_point():
    c = cert("ptsff")
    assert c["verdict"] == "Unirational"
    pt = next(w for w in c["witness_chain"] if w["kind"] == "point")
    assert pt["smooth"] and pt["coords"][0] == ["1", "1"]


def test_certificate_top_level_keys():
    c = cert("ex1")
    assert set(c) == {"schema", "verdict", "field", "theorem_path", "checklist", "witness_chain",
                      "failed", "input", "budget", "extension"}
    for entry in c["checklist"]:
        assert entry["status"] in ("pass", "fail", "n/a")
        assert entry["hypothesis"] and entry["anchor"]


# --- point search -------------------------------------------------------------------

def test_find_point_ex1_height_one():
    pt = find_point(load("examples/ex1.json"), budget=SearchBudget(height=1))
    assert pt.to_json() == [["0", "1"], ["0", "0", "0", "0", "1"]]


@pytest.mark.parametrize("height", [1, 2, 3])
def test_sum_of_squares_has_no_rational_point(height):
    sys = QuadricSystem.from_json({"n": 2, "quadrics": ["y0^2 + y1^2 + y2^2"]})
    assert find_point(sys, budget=SearchBudget(height=height)) is None


def test_sum_of_squares_over_f3():
    F = make_field("F:3")
    sys = QuadricSystem.from_json({"n": 2, "quadrics": ["y0^2 + y1^2 + y2^2"]}, F)
    pt = find_point(sys)
    assert sys.contains(pt.blocks[0])


def test_smooth_point_on_smoothpt_over_f3():
    F = make_field("F:3")
    S = load("examples/smoothpt.json", F)
    pt = smooth_point_search(S)
    assert pt.blocks[0] == (F.one, F.one)
    polys, layout = polys_and_layout(S)
    assert is_smooth_point(polys, layout, pt, F)


def test_double_plane_has_no_smooth_point():
    F = make_field("F:5")
    sys = QuadricSystem.from_json({"n": 2, "quadrics": ["y0^2"]}, F)
    assert find_point(sys) is not None
    assert smooth_point_search(sys) is None


def test_smoothpt_singular_line_rejected():
    S = load("examples/smoothpt.json")
    polys, layout = polys_and_layout(S)
    pt = ProductPoint.make(QQ, [0, 1], [1, 0, 0])
    assert not any(p.evaluate(pt.flat()) for p in polys)
    assert not is_smooth_point(polys, layout, pt)


# --- quadratic extension ------------------------------------------------------------

def _tail(sigma):
    return load_bundle({"base_dim": 1, "fiber_dim": 1, "field": "Q", "weights": [0, 0, 0], "sigma": sigma})


def test_tail_sum_of_squares():
    ext = quadratic_extension(_tail({"0,0": "x0^2", "1,1": "x1^2", "2,2": "x1^2"}))
    assert ext.disc == -4 and not ext.is_square


def test_tail_split_product():
    ext = quadratic_extension(_tail({"0,0": "x0^2 + x1^2", "1,1": "x0^2", "2,2": "x0^2", "1,2": "x1^2"}))
    assert ext.disc == 1 and ext.is_square


def test_tail_double_root():
    with pytest.raises(DegenerateTail):
        quadratic_extension(_tail({"0,0": "x0^2 + x1^2", "1,1": "x0^2", "2,2": "x1^2"}))


# --- real discriminant sampling -----------------------------------------------------

def _div22(f0, f1, f2, n=2):
    return BidegreeDivisor.from_json({"d": 2, "n": n, "f": [f0, f1, f2]})


SQ = "y0^2 + y1^2 + y2^2"


def test_sampling_negative_everywhere():
    ev = real_delta_sampling(_div22(SQ, SQ, SQ))
    assert not ev["found_nonneg"]


def test_sampling_opposite_signs():
    ev = real_delta_sampling(_div22(SQ, "0", f"-({SQ})"))
    assert ev["found_nonneg"]


def test_sampling_middle_only():
    ev = real_delta_sampling(_div22("0", "y0^2 - y1*y2", "0"))
    assert ev["found_nonneg"]


def test_sampling_formula_uses_outer_forms():
    # f1^2 - 4 f0 f2: with f1 = 0 and f0 = f2 = sum of squares this is negative
    ev = real_delta_sampling(_div22(SQ, "0", SQ))
    assert not ev["found_nonneg"]


# --- properties ---------------------------------------------------------------------

@pytest.mark.parametrize("name", ["ex1", "not0", "bideg12", "op_ball", "ex2"])
def test_deterministic(name):
    a = json.dumps(cert(name), sort_keys=True)
    b = json.dumps(cert(name), sort_keys=True)
    assert a == b


@pytest.mark.parametrize("name", ["ex1", "not0", "bideg12", "ptsff", "ex2"])
def test_budget_monotone_on_examples(name):
    verdicts = [cert(name, h)["verdict"] for h in (1, 2, 3)]
    first = next((i for i, v in enumerate(verdicts) if v != "Unknown"), len(verdicts))
    assert all(v != "Unknown" for v in verdicts[first:])


def _valid_raw(raw):
    try:
        b, md = bundle_validate(load_bundle(raw))
    except ValidationError:
        return None
    return b, md


@settings(max_examples=15)
@given(bundles_over_p1(max_h=2, max_c=2))
def test_parity_gate(raw):
    res = _valid_raw(raw)
    assume(res is not None)
    b, md = res
    assume(md.delta % 2 == 0)
    c = certify(b, SearchBudget(height=1)).to_json()
    assert not any(a.startswith("Thm main1") for a in c["theorem_path"])
    hyps = [e["hypothesis"] for e in c["checklist"]]
    if "delta odd" in hyps:
        entry = c["checklist"][hyps.index("delta odd")]
        assert entry["status"] == "fail"
        if "tail form non-degenerate" in hyps:
            assert hyps.index("delta odd") < hyps.index("tail form non-degenerate")


@settings(max_examples=20)
@given(bundles_over_p1(max_h=3), st.data())
def test_zero_diagonal_short_circuit(raw, data):
    size = len(raw["weights"])
    i = data.draw(st.integers(0, size - 1))
    sigma = {k: v for k, v in raw["sigma"].items() if k != f"{i},{i}"}
    raw = dict(raw, sigma=sigma)
    res = _valid_raw(raw)
    assume(res is not None)
    c = certify(res[0], SearchBudget(height=1)).to_json()
    assert c["verdict"] == "Rational" and c["theorem_path"] == ["Remark not0"]


@settings(max_examples=10)
@given(bundles_over_p1(max_h=1, max_c=2, max_weight=1), st.sampled_from([3, 5]))
def test_budget_monotone_over_finite_fields(raw, p):
    res = _valid_raw(dict(raw, field=f"F:{p}"))
    assume(res is not None)
    small = certify(res[0], SearchBudget(height=1)).to_json()["verdict"]
    large = certify(res[0], SearchBudget(height=3)).to_json()["verdict"]
    if small != "Unknown":
        assert large != "Unknown"

