from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import binary_form, bundles_over_p1
from qbundle.bundle import (
    anticanonical,
    anticanonical_coefficients,
    bundle_validate,
    discriminant,
    load_bundle,
    multidegree,
    restrict_to_line,
    slice_bundle,
    split_form_checks,
    volume,
    zero_diagonal_section,
)
from qbundle.errors import (
    DegenerateForm,
    DegenerateLine,
    DegreeIncompatible,
    NotHomogeneous,
    SliceTooDeep,
    ValidationError,
    WeightsUnsorted,
)
from qbundle.io import as_bundle, load
from qbundle.parser import parse_poly
from qbundle.poly import poly_det


def bundle(weights, sigma, base_dim=1, field="Q"):
    return load_bundle({"base_dim": base_dim, "fiber_dim": len(weights) - 2, "field": field,
                        "weights": weights, "sigma": sigma})


def valid(raw):
    try:
        return bundle_validate(load_bundle(raw))
    except ValidationError:
        return None


EX_IN = as_bundle(load("examples/ex_in_Q4.json"))


def test_ex_in_multidegree():
    b, md = bundle_validate(EX_IN)
    assert md.diagonal == (17, 3, 3, 3, 3, 3)
    assert md.common == 3
    assert md.delta == 32
    assert md.c1 == 7


def test_bidegree_32_delta():
    b = as_bundle(load("examples/ex1.json"))
    assert bundle_validate(b)[1].delta == 15


def test_degree_incompatible():
    with pytest.raises(DegreeIncompatible):
        bundle_validate(as_bundle(load("examples/bad_degrees.json")))


def test_not_homogeneous():
    with pytest.raises(NotHomogeneous):
        bundle_validate(bundle([0, 0, 0], {"0,0": "x0^2 + x1", "1,1": "x0^2", "2,2": "x1^2"}))


def test_weights_unsorted():
    with pytest.raises(WeightsUnsorted):
        bundle_validate(bundle([0, 1, 0], {"0,0": "x0^2", "1,1": "x0^4", "2,2": "x1^2"}))


def test_degenerate_form():
    with pytest.raises(DegenerateForm):
        bundle_validate(bundle([0, 0, 0], {"0,0": "x0^2", "0,1": "2*x0^2", "1,1": "x0^2", "2,2": "x1^2"}))


def test_ex_in_discriminant():
    det, delta = discriminant(EX_IN)
    ref = parse_poly("-x0^24*x1^7*(x1 - x0)", det.vs, det.field).monic()
    assert det == ref and delta == 32


def test_diagonal_monomial_discriminant():
    b = bundle([2, 1, 0], {"0,0": "x0^6", "1,1": "x0^4", "2,2": "x0^2"})
    det, delta = discriminant(b)
    assert det.to_text() == "x0^12" and delta == 12


@pytest.mark.parametrize("n", [2, 3, 4])
def test_22_divisor_delta(n):
    sigma = {f"{i},{i}": "x0^2 + x1^2" if i % 2 else "x0^2 - 3*x1^2" for i in range(n + 1)}
    b = bundle([0] * (n + 1), sigma)
    assert discriminant(b)[1] == 2 * (n + 1)


def test_anticanonical_coefficients_from_data():
    assert anticanonical_coefficients(2, 1, 0, 5) == (Fraction(1, 3), 1)
    assert anticanonical_coefficients(5, 4, 7, 32) == (-8, 4)


def test_anticanonical_conic_bundle():
    # weights (1,0,0), c = 1: c1 = 1 and delta = 5
    b = bundle([1, 0, 0], {"0,0": "x0^3", "1,1": "x1", "2,2": "x0+x1"})
    data = anticanonical(b)
    assert multidegree(b).delta == 5
    assert data.coeff_H1 == 0 and data.coeff_H2 == 1


def test_anticanonical_ex_in():
    data = anticanonical(EX_IN)
    assert data.coeff_H1 == -8 and data.coeff_H2 == 4
    assert data.class_Q_H1 == Fraction(32 - 14, 6) and data.class_Q_H2 == 2


def test_volume_ex_in():
    assert volume(EX_IN) == -3072


@settings(max_examples=200)
@given(bundles_over_p1(max_h=4))
def test_volume_closed_form_over_p1(raw):
    res = valid(raw)
    assume(res is not None)
    b, md = res
    n = b.n
    assert volume(b) == (n - 1) ** (n - 1) * (4 * n - md.delta)
    assert anticanonical(b).coeff_H2 == b.fiber_dim


@given(bundles_over_p1(max_h=1))
def test_conic_bundle_volume(raw):
    res = valid(raw)
    assume(res is not None)
    b, md = res
    assert volume(b) == 8 - md.delta


@given(bundles_over_p1(off_diagonal=False))
def test_discriminant_degree_on_diagonal_bundles(raw):
    b, md = bundle_validate(load_bundle(raw))
    det, delta = discriminant(b)
    assert det.degree() == delta == sum(md.diagonal)


@given(bundles_over_p1(max_h=4), st.data())
def test_slice_discriminant_is_principal_minor(raw, data):
    res = valid(raw)
    assume(res is not None)
    b, _ = res
    assume(b.fiber_dim >= 2)
    j = data.draw(st.integers(0, b.fiber_dim - 2))
    sub = slice_bundle(b, j)
    g = b.gram()
    keep = list(range(j + 1, b.size))
    minor = poly_det(g.submatrix(keep, keep))
    assert poly_det(sub.gram()).to_text() == minor.to_text()


def test_slice_ex_in():
    sub = slice_bundle(EX_IN, 0)
    assert multidegree(sub).delta == 15
    shown = as_bundle(load("examples/ex_in_Q3.json"))
    assert sub.equation().to_text() == shown.equation().to_text()


def test_conic_slice_delta_is_tail():
    sub = slice_bundle(EX_IN, EX_IN.fiber_dim - 2)
    assert sub.fiber_dim == 1 and multidegree(sub).delta == 9


def test_slice_too_deep():
    with pytest.raises(SliceTooDeep):
        slice_bundle(EX_IN, EX_IN.fiber_dim - 1)


def test_slice_of_diagonal_drops_entries():
    b = bundle([0] * 5, {"0,0": "x0", "1,1": "x1", "0,1": "x0", "2,2": "x0+x1", "3,3": "x0-x1", "4,4": "x1"})
    sub = slice_bundle(b, 1)
    assert {k: p.to_text() for k, p in sub.sigma.items()} == {(0, 0): "x0 + x1", (1, 1): "x0 - x1", (2, 2): "x1"}


P2 = {"base_dim": 2, "fiber_dim": 1, "field": "Q", "weights": [0, 0, 0],
      "sigma": {"0,0": "x0 + x2", "1,1": "x1 - x2", "2,2": "x0 + x1 + 3*x2", "0,1": "x2"}}


def test_restrict_to_coordinate_line():
    b = load_bundle(P2)
    line = restrict_to_line(b, [1, 0, 0], [0, 1, 0])
    assert line.base_dim == 1
    assert line.entry(0, 0).to_text() == "x0" and line.entry(1, 1).to_text() == "x1"
    assert multidegree(line).delta == multidegree(b).delta


def test_restrict_to_line_inside_discriminant():
    b = load_bundle({"base_dim": 2, "fiber_dim": 1, "field": "Q", "weights": [0, 0, 0],
                     "sigma": {"0,0": "x2", "1,1": "x1", "2,2": "x0"}})
    with pytest.raises(DegenerateLine):
        restrict_to_line(b, [1, 0, 0], [0, 1, 0])


@given(st.lists(st.integers(-3, 3), min_size=3, max_size=3), st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_restrict_commutes_with_slice(alpha, beta):
    raw = {"base_dim": 2, "fiber_dim": 2, "field": "Q", "weights": [0, 0, 0, 0],
           "sigma": {"0,0": "x0 + x2", "1,1": "x1 - x2", "2,2": "x0 + x1 + 3*x2", "3,3": "x0 - 2*x1",
                     "0,1": "x2", "2,3": "x1"}}
    b = load_bundle(raw)
    try:
        a = slice_bundle(restrict_to_line(b, alpha, beta), 0)
        c = restrict_to_line(slice_bundle(b, 0), alpha, beta)
    except (DegenerateLine, ValidationError):
        assume(False)
    assert a.equation().to_text() == c.equation().to_text()


def test_zero_diagonal_section():
    b = as_bundle(load("examples/not0.json"))
    sec = zero_diagonal_section(b)
    assert sec.index == 0 and sec.to_json()["locus"] == ["y1 = 0", "y2 = 0", "y3 = 0"]
    assert zero_diagonal_section(EX_IN) is None


def test_negative_degree_forces_zero_diagonal():
    # weights (2,0,0) with c = -2 force the degrees of sigma_11 and sigma_22 to be -2
    b = bundle([2, 0, 0], {"0,0": "x0^2", "0,1": "1"})
    sec = zero_diagonal_section(b)
    assert sec is not None and sec.index == 1


def test_split_form_checks():
    b = bundle([0, 0, 0], {"0,0": "x0", "1,1": "x0", "2,2": "x0"})
    assert split_form_checks(b).has_x_factor
    rank2 = bundle([0, 0, 0], {"0,1": "1", "2,2": "0*x0"})
    assert split_form_checks(rank2).rank_le_2
    conic = slice_bundle(EX_IN, EX_IN.fiber_dim - 2)
    flags = split_form_checks(conic)
    # the tail x0*x1*(x1 - x0), -x0*x1^2, x1^3 shares the factor x1
    assert flags.rho_nonzero and flags.has_x_factor


@given(bundles_over_p1(max_h=2), st.randoms(use_true_random=False))
def test_validation_invariant_under_tied_permutations(raw, rnd):
    weights = raw["weights"]
    size = len(weights)
    perm = list(range(size))
    # shuffle inside blocks of equal weight so the weights stay sorted
    start = 0
    while start < size:
        end = start
        while end < size and weights[end] == weights[start]:
            end += 1
        block = perm[start:end]
        rnd.shuffle(block)
        perm[start:end] = block
        start = end
    inv = {old: new for new, old in enumerate(perm)}
    sigma = {}
    for key, text in raw["sigma"].items():
        i, j = map(int, key.split(","))
        a, b = sorted((inv[i], inv[j]))
        sigma[f"{a},{b}"] = text
    permuted = dict(raw, sigma=sigma)
    r1, r2 = valid(raw), valid(permuted)
    assert (r1 is None) == (r2 is None)
    if r1:
        assert r1[1].delta == r2[1].delta
        assert discriminant(r1[0])[0] == discriminant(r2[0])[0]


def test_binary_form_helper_is_homogeneous():
    import random

    class _Draw:
        def __call__(self, strat):
            return random.Random(1).randint(-3, 3)

    assert "x0" in binary_form(_Draw(), 2) or "x1" in binary_form(_Draw(), 2)
