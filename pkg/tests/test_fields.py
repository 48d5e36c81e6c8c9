from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qbundle.errors import CharTwo, FieldSpecError, InfiniteField, NotPrime, ReducibleModulus
from qbundle.fields import QQ, FiniteField, QuadraticField, is_prime, make_field, parse_field


def test_prime_field_size():
    assert make_field("F:5").q == 5


def test_explicit_extension_modulus():
    F = parse_field("F:3^2:[1,0,1]")
    assert F.q == 9
    assert F.spec == "F:3^2:[1,0,1]"


def test_char_two_rejected():
    with pytest.raises(CharTwo):
        parse_field("F:2")


def test_not_prime_rejected():
    with pytest.raises(NotPrime):
        parse_field("F:9")


def test_reducible_modulus_rejected():
    # t^2 + 2 = (t - 1)(t + 1) over F_3
    with pytest.raises(ReducibleModulus):
        parse_field("F:3^2:[2,0,1]")


def test_bad_spec():
    with pytest.raises(FieldSpecError):
        parse_field("GF(5)")
    with pytest.raises(FieldSpecError):
        parse_field("F:3^2:[1,1]")


def test_auto_modulus_is_first_irreducible():
    # t^2 + 1 is the lexicographically first monic irreducible quadratic over F_3
    assert parse_field("F:3^2").modulus == (1, 0, 1)


def test_enumerate_f3():
    assert [int(e.v) for e in make_field("F:3").elements()] == [0, 1, 2]


def test_enumerate_f9():
    els = make_field("F:3^2").elements()
    assert len(els) == 9
    assert els[0] == 0 and els[1] == 1
    assert len({e.v for e in els}) == 9


def test_rationals_not_enumerable():
    with pytest.raises(InfiniteField):
        QQ.elements()


SMALL_Q = [q for q in range(3, 50) if any(q == p**a for p in range(3, 50) if is_prime(p) for a in range(1, 5))]


@pytest.mark.parametrize("q", SMALL_Q)
def test_inverse_and_fermat_exhaustive(q):
    p = next(p for p in range(3, 50) if is_prime(p) and any(q == p**a for a in range(1, 5)))
    a = next(a for a in range(1, 5) if p**a == q)
    F = make_field(f"F:{p}^{a}" if a > 1 else f"F:{p}")
    els = F.elements()
    assert len(els) == q and len({e.v for e in els}) == q
    for x in els[1:]:
        assert x * x.inverse() == F.one
        assert x ** (q - 1) == F.one


def _oracle_mul(a, b, p, mod):
    """Schoolbook product of coefficient lists reduced by a monic modulus."""
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    deg = len(mod) - 1
    for k in range(len(out) - 1, deg - 1, -1):
        c = out[k] % p
        for i in range(deg + 1):
            out[k - deg + i] -= c * mod[i]
    return [c % p for c in out[:deg]]


@pytest.mark.parametrize("spec", ["F:3^3", "F:5^2", "F:7^2"])
@given(data=st.data())
def test_extension_multiplication_matches_oracle(spec, data):
    F = parse_field(spec)
    a = data.draw(st.lists(st.integers(0, F.p - 1), min_size=F.a, max_size=F.a))
    b = data.draw(st.lists(st.integers(0, F.p - 1), min_size=F.a, max_size=F.a))
    assert F.digits((F(a) * F(b)).v) == _oracle_mul(a, b, F.p, F.modulus)


@given(st.integers(-(10**30), 10**30), st.integers(1, 10**30), st.integers(-(10**30), 10**30), st.integers(1, 10**30))
def test_rational_exactness(a, b, c, d):
    s = QQ(Fraction(a, b)) + QQ(Fraction(c, d))
    assert s * (b * d) == a * d + c * b


@given(st.integers(0, 48), st.integers(0, 48), st.integers(0, 48))
def test_prime_field_distributive(x, y, z):
    F = make_field("F:7")
    X, Y, Z = F(x), F(y), F(z)
    assert (X + Y) * Z == X * Z + Y * Z


def test_quadratic_field_arithmetic():
    K = QuadraticField(Fraction(12))
    r = K.root
    assert r * r == K(12)
    x = K(3) + r * Fraction(1, 2)
    assert x * x.inverse() == K.one
    assert str(r * Fraction(-1, 6)) == "-1/6*sqrt(12)"


def test_quadratic_field_rejects_square():
    with pytest.raises(ValueError):
        QuadraticField(Fraction(16))


def test_cross_field_embedding():
    F3, F9 = make_field("F:3"), make_field("F:3^2")
    assert F9(F3(2)) == F9(2)
    with pytest.raises(TypeError):
        make_field("F:5")(F9.elements()[4])


def test_finite_field_repr_roundtrip():
    F = make_field("F:5^2")
    for e in F.elements():
        assert F(F.format(e)) == e
    assert isinstance(FiniteField(5), FiniteField)
