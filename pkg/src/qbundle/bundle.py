"""Splitting quadric bundles ``sum sigma_ij(x) y_i y_j = 0`` over a projective base.

A bundle lives in the projectivization of ``O(a_0) + ... + O(a_{h+1})`` over
``P^{base_dim}``; the coefficient ``sigma_ij`` is a form in the base variables
of degree ``c + a_i + a_j`` for one common constant ``c``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

from .errors import (
    BadShape,
    DegenerateForm,
    DegenerateLine,
    DegreeIncompatible,
    NotHomogeneous,
    NotXOnly,
    SliceTooDeep,
    ValidationError,
    WeightsUnsorted,
)
from .fields import make_field
from .parser import parse_poly
from .poly import MultiPoly, PolyMatrix, VarSpec, poly_det, poly_gcd_xonly


class QuadricBundle:
    """Structural container; :func:`bundle_validate` checks the invariants."""

    def __init__(self, base_dim, fiber_dim, weights, sigma, field, assumptions=None, name=None):
        self.base_dim = int(base_dim)
        self.fiber_dim = int(fiber_dim)
        self.weights = tuple(int(a) for a in weights)
        self.field = field
        self.vs = VarSpec(self.base_dim + 1, len(self.weights))
        self.sigma = {}
        for (i, j), p in sigma.items():
            i, j = min(i, j), max(i, j)
            if p:
                self.sigma[(i, j)] = p
        self.assumptions = dict(assumptions or {})
        self.name = name

    @property
    def size(self) -> int:
        """Number of fiber variables, h + 2."""
        return len(self.weights)

    @property
    def n(self) -> int:
        return self.base_dim + self.fiber_dim

    def entry(self, i, j) -> MultiPoly:
        key = (min(i, j), max(i, j))
        return self.sigma.get(key) or MultiPoly.zero(self.vs, self.field)

    def gram(self) -> PolyMatrix:
        half = self.field.one / 2
        rows = []
        for i in range(self.size):
            row = []
            for j in range(self.size):
                e = self.entry(i, j)
                row.append(e if i == j else e * half)
            rows.append(row)
        return PolyMatrix(rows)

    def equation(self) -> MultiPoly:
        """The defining form sum_{i<=j} sigma_ij y_i y_j."""
        out = MultiPoly.zero(self.vs, self.field)
        ys = [MultiPoly.var(self.vs, self.field, f"y{i}") for i in range(self.size)]
        for (i, j), p in sorted(self.sigma.items()):
            out = out + p * ys[i] * ys[j]
        return out

    def change_field(self, field) -> "QuadricBundle":
        sigma = {k: p.change_field(field) for k, p in self.sigma.items()}
        return QuadricBundle(self.base_dim, self.fiber_dim, self.weights, sigma, field, self.assumptions, self.name)

    def with_sigma(self, sigma, weights=None, base_dim=None, fiber_dim=None):
        return QuadricBundle(
            self.base_dim if base_dim is None else base_dim,
            self.fiber_dim if fiber_dim is None else fiber_dim,
            self.weights if weights is None else weights,
            sigma,
            self.field,
            self.assumptions,
            None,
        )

    def __eq__(self, other):
        return (
            isinstance(other, QuadricBundle)
            and (self.base_dim, self.fiber_dim, self.weights, self.field)
            == (other.base_dim, other.fiber_dim, other.weights, other.field)
            and self.sigma == other.sigma
        )

    def to_json(self) -> dict:
        out = {
            "base_dim": self.base_dim,
            "fiber_dim": self.fiber_dim,
            "field": self.field.spec,
            "weights": list(self.weights),
            "sigma": {f"{i},{j}": p.to_text() for (i, j), p in sorted(self.sigma.items())},
        }
        if self.assumptions:
            out["assumptions"] = self.assumptions
        return out

    def __repr__(self):
        return f"QuadricBundle({self.to_json()!r})"


def load_bundle(raw: dict, field=None) -> QuadricBundle:
    """Parse the bundle JSON shape without checking invariants."""
    try:
        fld = make_field(field if field is not None else raw.get("field", "Q"))
        base_dim = int(raw["base_dim"])
        fiber_dim = int(raw["fiber_dim"])
        weights = [int(a) for a in raw["weights"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise BadShape(f"malformed bundle input: {exc}") from None
    if base_dim < 1:
        raise BadShape("base_dim must be at least 1")
    if len(weights) != fiber_dim + 2:
        raise BadShape(f"expected {fiber_dim + 2} weights, got {len(weights)}")
    vs = VarSpec(base_dim + 1, len(weights))
    sigma = {}
    for key, text in raw.get("sigma", {}).items():
        try:
            i, j = (int(t) for t in key.split(","))
        except ValueError:
            raise BadShape(f"bad sigma key {key!r}") from None
        if not (0 <= i < len(weights) and 0 <= j < len(weights)):
            raise BadShape(f"sigma index {key!r} out of range")
        p = parse_poly(text, vs, fld) if isinstance(text, str) else MultiPoly.from_json(text, vs, fld)
        k = (min(i, j), max(i, j))
        sigma[k] = sigma[k] + p if k in sigma else p
    return QuadricBundle(base_dim, fiber_dim, weights, sigma, fld, raw.get("assumptions"), raw.get("name"))


@dataclass(frozen=True)
class Multidegree:
    weights: tuple
    degrees: dict  # (i, j) -> degree, None for sigma_ij = 0
    common: int  # c with deg sigma_ij = c + a_i + a_j
    delta: int
    c1: int

    @property
    def diagonal(self) -> tuple:
        """Expected diagonal degrees c + 2 a_i (also for vanishing entries)."""
        return tuple(self.common + 2 * a for a in self.weights)

    def to_json(self):
        return {
            "degrees": {f"{i},{j}": d for (i, j), d in sorted(self.degrees.items())},
            "common": self.common,
            "diagonal": list(self.diagonal),
            "delta": self.delta,
            "c1": self.c1,
        }


def _multidegree(b: QuadricBundle, common: int) -> Multidegree:
    degrees = {}
    for i in range(b.size):
        for j in range(i, b.size):
            p = b.sigma.get((i, j))
            degrees[(i, j)] = p.degree() if p else None
    delta = sum(common + 2 * a for a in b.weights)
    return Multidegree(b.weights, degrees, common, delta, sum(b.weights))


def common_constant(b: QuadricBundle) -> int:
    """Check homogeneity and degree compatibility; return the common constant c."""
    common = None
    for (i, j), p in sorted(b.sigma.items()):
        if not p.is_x_only():
            raise NotXOnly(f"sigma[{i},{j}] depends on fiber variables", i=i, j=j)
        d = p.homogeneous_degree("x")
        if d is None:
            raise NotHomogeneous(f"sigma[{i},{j}] is not homogeneous", i=i, j=j)
        value = d - b.weights[i] - b.weights[j]
        if common is None:
            common = value
        elif value != common:
            raise DegreeIncompatible(
                f"deg sigma[{i},{j}] - a_{i} - a_{j} = {value} differs from {common}", i=i, j=j
            )
    if common is None:
        raise DegenerateForm("all coefficients vanish")
    return common


def bundle_validate(raw) -> tuple:
    """Return ``(bundle, multidegree)`` or raise a validation error."""
    b = raw if isinstance(raw, QuadricBundle) else load_bundle(raw)
    if any(a < 0 for a in b.weights):
        raise BadShape("weights must be non-negative")
    if any(b.weights[k] < b.weights[k + 1] for k in range(len(b.weights) - 1)):
        raise WeightsUnsorted("weights must be sorted in descending order", weights=list(b.weights))
    common = common_constant(b)
    if b.fiber_dim < 1:
        raise BadShape("fiber_dim must be at least 1")
    md = _multidegree(b, common)
    parities = {d % 2 for (i, j), d in md.degrees.items() if i == j and d is not None}
    assert len(parities) <= 1, "diagonal degrees of one parity follow from compatibility"
    det = poly_det(b.gram())
    if det.is_zero():
        raise DegenerateForm("the quadratic form is degenerate at every base point")
    return b, md


def multidegree(b: QuadricBundle) -> Multidegree:
    return _multidegree(b, common_constant(b))


def discriminant(b: QuadricBundle):
    """Monic determinant of the Gram matrix and delta = sum of diagonal degrees."""
    md = multidegree(b)
    det = poly_det(b.gram())
    if det:
        assert det.degree() == md.delta, (det.degree(), md.delta)
    return det.monic(), md.delta


@dataclass(frozen=True)
class AntiCanonicalData:
    coeff_H1: Fraction
    coeff_H2: int
    class_Q_H1: Fraction
    class_Q_H2: int
    volume: Fraction

    def to_json(self):
        return {
            "coeff_H1": str(self.coeff_H1),
            "coeff_H2": self.coeff_H2,
            "class_Q_H1": str(self.class_Q_H1),
            "class_Q_H2": self.class_Q_H2,
            "volume": str(self.volume),
        }


def chern_classes(weights, base_dim):
    """Elementary symmetric functions of the weights, zero above the base dimension."""
    e = [1] + [0] * len(weights)
    for a in weights:
        for k in range(len(weights), 0, -1):
            e[k] += a * e[k - 1]
    return [e[k] if k <= base_dim else 0 for k in range(len(e))]


def volume_from_data(n, h, c1, delta, weights, base_dim) -> Fraction:
    """(-K)^n from the top intersection numbers g_i of the two hyperplane classes."""
    c = chern_classes(weights, base_dim)
    top = n - h
    g = [Fraction(1)]
    for i in range(1, top + 1):
        s = Fraction(0)
        for k in range(1, i + 1):
            ck = c[k] if k < len(c) else 0
            s += (-1) ** (k - 1) * ck * g[i - k]
        g.append(s)
    alpha = Fraction((n - h + 1) * (h + 2) - h * c1 - delta, h + 2)
    q1 = Fraction(delta - 2 * c1, h + 2)
    total = Fraction(0)
    for i in range(top + 1):
        g_prev = g[i - 1] if i >= 1 else Fraction(0)
        total += comb(n, top - i) * (q1 * g_prev + 2 * g[i]) * alpha ** (top - i) * Fraction(h) ** (h + i)
    return total


def anticanonical_coefficients(n: int, h: int, c1: int, delta: int) -> tuple:
    """(coeff_H1, coeff_H2) of the anticanonical class from numerical data."""
    return Fraction((n - h + 1) * (h + 2) - h * c1 - delta, h + 2), h


def anticanonical(b: QuadricBundle) -> AntiCanonicalData:
    md = multidegree(b)
    n, h = b.n, b.fiber_dim
    alpha, _ = anticanonical_coefficients(n, h, md.c1, md.delta)
    vol = volume_from_data(n, h, md.c1, md.delta, b.weights, b.base_dim)
    return AntiCanonicalData(alpha, h, Fraction(md.delta - 2 * md.c1, h + 2), 2, vol)


def volume(b: QuadricBundle) -> Fraction:
    return anticanonical(b).volume


def slice_bundle(b: QuadricBundle, j: int) -> QuadricBundle:
    """Intersect with {y_0 = ... = y_j = 0}: drop rows/columns 0..j."""
    if j < 0 or j > b.fiber_dim - 2:
        raise SliceTooDeep(f"slice index {j} leaves fiber dimension {b.fiber_dim - j - 1} < 1", j=j)
    k = j + 1
    new_weights = b.weights[k:]
    vs = VarSpec(b.vs.n_x, len(new_weights))
    xmap = {i: i for i in range(b.vs.n_x)}
    sigma = {}
    for (r, s), p in b.sigma.items():
        if r >= k:
            sigma[(r - k, s - k)] = p.reindex(vs, xmap)
    return QuadricBundle(b.base_dim, b.fiber_dim - k, new_weights, sigma, b.field, b.assumptions)


def conic_slice(b: QuadricBundle) -> QuadricBundle:
    """The conic bundle cut by the last three fiber coordinates."""
    return b if b.fiber_dim == 1 else slice_bundle(b, b.fiber_dim - 2)


def restrict_to_line(b: QuadricBundle, alpha, beta) -> QuadricBundle:
    """Pull back along x_i = alpha_i*s + beta_i*t; the new base variables are (s, t) = (x0, x1)."""
    if b.base_dim < 2:
        raise BadShape("line restriction needs a base of dimension at least 2")
    f = b.field
    alpha = [f(a) for a in alpha]
    beta = [f(c) for c in beta]
    if len(alpha) != b.vs.n_x or len(beta) != b.vs.n_x:
        raise BadShape("line points must have one coordinate per base variable")
    from .linalg import rank

    if rank([alpha, beta], f) < 2:
        raise DegenerateLine("the two points do not span a line")
    vs = VarSpec(2, b.size)
    s = MultiPoly.var(vs, f, "x0")
    t = MultiPoly.var(vs, f, "x1")
    assignment = {i: s * alpha[i] + t * beta[i] for i in range(b.vs.n_x)}
    assignment.update({f"y{k}": MultiPoly.var(vs, f, f"y{k}") for k in range(b.size)})
    sigma = {}
    for key, p in b.sigma.items():
        sigma[key] = p.substitute(assignment, vs)
    out = QuadricBundle(1, b.fiber_dim, b.weights, sigma, f, b.assumptions)
    if poly_det(out.gram()).is_zero():
        raise DegenerateLine("the discriminant vanishes identically on this line")
    return out


@dataclass(frozen=True)
class SectionWitness:
    index: int
    vanishing: tuple  # fiber coordinates set to zero

    def to_json(self):
        return {"index": self.index, "locus": [f"y{j} = 0" for j in self.vanishing]}


def zero_diagonal_section(b: QuadricBundle):
    """A section {y_j = 0, j != i} when some diagonal coefficient vanishes."""
    for i in range(b.size):
        if not b.entry(i, i):
            return SectionWitness(i, tuple(j for j in range(b.size) if j != i))
    return None


@dataclass(frozen=True)
class SplitFlags:
    has_x_factor: bool
    rank_le_2: bool
    rho_nonzero: bool

    def to_json(self):
        return {
            "has_x_factor": self.has_x_factor,
            "rank_le_2_over_function_field": self.rank_le_2,
            "rho_nonzero": self.rho_nonzero,
        }


def split_form_checks(b: QuadricBundle) -> SplitFlags:
    if b.base_dim != 1:
        raise BadShape("split-form checks are defined over P^1")
    entries = list(b.sigma.values())
    has_factor = bool(entries) and poly_gcd_xonly(entries).degree() > 0
    g = b.gram()
    rank_le_2 = True
    for rows in combinations(range(b.size), 3):
        for cols in combinations(range(b.size), 3):
            if poly_det(g.submatrix(rows, cols)):
                rank_le_2 = False
                break
        if not rank_le_2:
            break
    if b.size >= 3:
        tail = range(b.size - 3, b.size)
        rho = poly_det(g.submatrix(tail, tail))
    else:
        rho = MultiPoly.zero(b.vs, b.field)
    return SplitFlags(has_factor, rank_le_2, bool(rho))


def rho(b: QuadricBundle) -> MultiPoly:
    """Discriminant polynomial of the conic slice."""
    return poly_det(conic_slice(b).gram())


__all__ = [
    "QuadricBundle",
    "Multidegree",
    "AntiCanonicalData",
    "SectionWitness",
    "SplitFlags",
    "ValidationError",
    "load_bundle",
    "bundle_validate",
    "multidegree",
    "discriminant",
    "anticanonical",
    "volume",
    "volume_from_data",
    "chern_classes",
    "slice_bundle",
    "conic_slice",
    "restrict_to_line",
    "zero_diagonal_section",
    "split_form_checks",
    "rho",
]
