"""Bidegree (d,2) divisors in P^1 x P^n and their degree-d transformation.

A divisor ``sum_i x0^(d-i) x1^i f_i(y) = 0`` is rewritten through the
(d+1) x 3 matrix ``M(z)`` with rows ``(0, z0, f0), (-z0, z1, f1), ...,
(-z_{d-1}, 0, f_d)``.  Rank of ``M(z)`` below 3 cuts out, for a fixed ``z``, an
intersection of quadrics ``X(z)`` in P^n; the map ``psi`` sends a point of the
divisor to ``(t(p), y)`` where ``t_i = sum_{j<=i} x0^(i-j) x1^(d-1-i+j) f_j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .count import brute_count, bundle_layout, fiber_layout, iter_points
from .enumerate import ProductPoint, normalize
from .errors import (
    BadShape,
    BudgetExceeded,
    DegreeTooSmall,
    FirstCoordinateZero,
    IndeterminacyLocus,
    NotOnVariety,
    SingularCenter,
    ZeroVector,
)
from .fields import extension_of_degree, make_field
from .linalg import nullspace, rank
from .parser import parse_poly
from .poly import MultiPoly, PolyMatrix, VarSpec, jacobian, poly_det


def _y_vs(n):
    return VarSpec(2, n + 1)


def quadric_gram(q: MultiPoly, nvars: int, offset: int):
    """Symmetric Gram matrix of a quadratic form in variables offset..offset+nvars-1."""
    f = q.field
    half = f.one / 2
    g = [[f.zero] * nvars for _ in range(nvars)]
    for e, c in q.terms.items():
        idx = [i - offset for i, k in enumerate(e) for _ in range(k)]
        if len(idx) != 2 or not all(0 <= i < nvars for i in idx):
            raise BadShape("not a quadratic form in the fiber variables")
        i, j = idx
        if i == j:
            g[i][i] = g[i][i] + c
        else:
            g[i][j] = g[i][j] + c * half
            g[j][i] = g[j][i] + c * half
    return g


class QuadricSystem:
    """Quadratic forms in y0..yn (the x-block of the VarSpec is unused)."""

    def __init__(self, n, quadrics, field):
        self.n = int(n)
        self.field = field
        self.vs = _y_vs(self.n)
        self.quadrics = tuple(quadrics)
        for q in self.quadrics:
            if q.vs != self.vs:
                raise BadShape("quadric lives in a different ring")
            if q and q.homogeneous_degree("y") != 2 or not q.uses_only("y"):
                raise BadShape(f"{q} is not a quadratic form in y")

    def grams(self):
        return [quadric_gram(q, self.n + 1, self.vs.n_x) for q in self.quadrics]

    def contains(self, y) -> bool:
        vals = [self.field.zero] * self.vs.n_x + [self.field(c) for c in y]
        return all(not q.evaluate(vals) for q in self.quadrics)

    def to_json(self):
        return {"n": self.n, "field": self.field.spec, "quadrics": [q.to_text() for q in self.quadrics]}

    @classmethod
    def from_json(cls, raw, field=None):
        fld = make_field(field if field is not None else raw.get("field", "Q"))
        n = int(raw["n"])
        qs = [parse_poly(t, _y_vs(n), fld) for t in raw["quadrics"]]
        return cls(n, qs, fld)

    def change_field(self, field):
        return QuadricSystem(self.n, [q.change_field(field) for q in self.quadrics], field)

    def __repr__(self):
        return f"QuadricSystem(n={self.n}, {[str(q) for q in self.quadrics]})"


class BidegreeDivisor:
    def __init__(self, d, n, f, field):
        self.d = int(d)
        self.n = int(n)
        self.field = field
        self.vs = _y_vs(self.n)
        self.f = tuple(f)
        if len(self.f) != self.d + 1:
            raise BadShape(f"expected {self.d + 1} forms f_0..f_d")
        for q in self.f:
            if q and (not q.uses_only("y") or q.homogeneous_degree("y") != 2):
                raise BadShape(f"{q} is not a quadratic form in y")
        if not any(self.f):
            raise BadShape("all f_i vanish")

    def x_monomial(self, i):
        exp = [0] * self.vs.nvars
        exp[0], exp[1] = self.d - i, i
        return MultiPoly(self.vs, self.field, {tuple(exp): self.field.one}, _trusted=True)

    def equation(self) -> MultiPoly:
        out = MultiPoly.zero(self.vs, self.field)
        for i, fi in enumerate(self.f):
            out = out + self.x_monomial(i) * fi
        return out

    def to_bundle(self):
        from .bundle import QuadricBundle

        sigma = {}
        for i, fi in enumerate(self.f):
            xm = self.x_monomial(i)
            for e, c in fi.terms.items():
                ys = [k - 2 for k, m in enumerate(e) for _ in range(m)]
                key = (min(ys), max(ys))
                term = xm.scale(c)
                sigma[key] = sigma[key] + term if key in sigma else term
        return QuadricBundle(1, self.n - 1, [0] * (self.n + 1), sigma, self.field)

    @classmethod
    def from_bundle(cls, b):
        """Divisor view of a bundle over P^1 whose weights are all equal."""
        if b.base_dim != 1 or len(set(b.weights)) != 1:
            raise BadShape("only bundles over P^1 with equal weights are (d,2) divisors")
        d = next(iter(b.sigma.values())).degree()
        f = [MultiPoly.zero(b.vs, b.field) for _ in range(d + 1)]
        ys = [MultiPoly.var(b.vs, b.field, f"y{k}") for k in range(b.size)]
        for (j, k), p in b.sigma.items():
            for e, c in p.terms.items():
                f[e[1]] = f[e[1]] + (ys[j] * ys[k]).scale(c)
        return cls(d, b.size - 1, f, b.field)

    def to_json(self):
        return {"d": self.d, "n": self.n, "field": self.field.spec, "f": [q.to_text() for q in self.f]}

    @classmethod
    def from_json(cls, raw, field=None):
        fld = make_field(field if field is not None else raw.get("field", "Q"))
        n = int(raw["n"])
        f = [parse_poly(t, _y_vs(n), fld) for t in raw["f"]]
        return cls(int(raw["d"]), n, f, fld)

    def change_field(self, field):
        return BidegreeDivisor(self.d, self.n, [q.change_field(field) for q in self.f], field)

    def y_values(self, y):
        return [self.field.zero] * 2 + [self.field(c) for c in y]


def build_M(div: BidegreeDivisor) -> PolyMatrix:
    if div.d < 2:
        raise DegreeTooSmall("the matrix construction needs d >= 2", d=div.d)
    vs = VarSpec(2, div.n + 1, div.d)
    F = div.field
    ident = {i: i for i in range(div.vs.nvars)}
    f = [fi.reindex(vs, ident) for fi in div.f]
    z = [MultiPoly.var(vs, F, f"z{i}") for i in range(div.d)]
    zero = MultiPoly.zero(vs, F)
    rows = [[zero, z[0], f[0]]]
    for i in range(1, div.d):
        rows.append([-z[i - 1], z[i], f[i]])
    rows.append([-z[div.d - 1], zero, f[div.d]])
    return PolyMatrix(rows)


def _independent(polys, field):
    """Keep a linearly independent subfamily, in order."""
    keep, rows = [], []
    monos = sorted({e for p in polys for e in p.terms})
    for p in polys:
        if not p:
            continue
        row = [p.terms.get(e, field.zero) for e in monos]
        if rank(rows + [row], field) > len(rows):
            rows.append(row)
            keep.append(p)
    return keep


def fiber_X(div: BidegreeDivisor, zbar) -> QuadricSystem:
    """Quadrics cutting out {y : rank M(zbar)(y) < 3}."""
    F = div.field
    z = [F(c) for c in zbar]
    if len(z) != div.d:
        raise BadShape(f"z-vector must have {div.d} entries")
    if not any(z):
        raise ZeroVector("z-vector is zero")
    f = div.f
    if z[0]:
        zz = z + [F.zero]
        qs = []
        for i in range(2, div.d + 1):
            q = f[i] * (z[0] * z[0]) - f[1] * (z[0] * zz[i - 1]) + f[0] * (z[1] * zz[i - 1] - z[0] * zz[i])
            if q:
                qs.append(q)
        return QuadricSystem(div.n, qs, F)
    minors = []
    m = all_minors(div, z)
    for q in m:
        minors.append(q)
    return QuadricSystem(div.n, _independent(minors, F), F)


def all_minors(div: BidegreeDivisor, zbar):
    """All 3x3 minors of M(zbar), as quadrics in y, rows in lexicographic order."""
    F = div.field
    z = [F(c) for c in zbar] + [F.zero]
    zeroz = [F.zero]
    a = [F.zero] + [-c for c in z[: div.d]]
    b = list(z[: div.d]) + zeroz
    out = []
    for i, j, k in combinations(range(div.d + 1), 3):
        # expand along the constant columns
        q = (
            div.f[k] * (a[i] * b[j] - a[j] * b[i])
            - div.f[j] * (a[i] * b[k] - a[k] * b[i])
            + div.f[i] * (a[j] * b[k] - a[k] * b[j])
        )
        out.append(q)
    return out


def t_values(div: BidegreeDivisor, x, y):
    F = div.field
    x0, x1 = F(x[0]), F(x[1])
    vals = div.y_values(y)
    fv = [fi.evaluate(vals) for fi in div.f]
    out = []
    for i in range(div.d):
        s = F.zero
        for j in range(i + 1):
            s = s + x0 ** (i - j) * x1 ** (div.d - 1 - i + j) * fv[j]
        out.append(s)
    return out


def psi_apply(div: BidegreeDivisor, p: ProductPoint) -> ProductPoint:
    F = div.field
    x, y = p.blocks
    vals = [F(c) for c in x] + [F(c) for c in y]
    if div.equation().evaluate(vals):
        raise NotOnVariety("point is not on the divisor", point=p.to_json(F))
    t = t_values(div, x, y)
    if not any(t):
        raise IndeterminacyLocus("psi is undefined at this point", point=p.to_json(F))
    return ProductPoint.make(F, t, y)


def strict_transform(div: BidegreeDivisor, zbar):
    """Equations of the strict transform of X(zbar) on the chart x1 != 0."""
    F = div.field
    z = [F(c) for c in zbar]
    if len(z) != div.d:
        raise BadShape(f"z-vector must have {div.d} entries")
    if not z[0]:
        raise FirstCoordinateZero("the first z-coordinate must be nonzero")
    vs = div.vs
    x0 = MultiPoly.var(vs, F, "x0")
    x1 = MultiPoly.var(vs, F, "x1")
    eqs = []
    for i in range(div.d - 1, 0, -1):
        partial = MultiPoly.zero(vs, F)
        for j in range(i + 1):
            partial = partial + x0 ** (i - j) * x1**j * div.f[j]
        eqs.append((x1**i * div.f[0]).scale(z[i]) - partial.scale(z[0]))
    eqs.append(div.equation())
    return eqs


@dataclass(frozen=True)
class ConeResult:
    is_cone: bool
    vertex: tuple  # basis of the common kernel

    def to_json(self, field):
        return {"is_cone": self.is_cone, "vertex_basis": [[field.format(c) for c in v] for v in self.vertex]}


def is_cone(sys: QuadricSystem) -> ConeResult:
    rows = [row for g in sys.grams() for row in g]
    basis = nullspace(rows, sys.field, sys.n + 1) if rows else nullspace([], sys.field, sys.n + 1)
    return ConeResult(bool(basis), tuple(tuple(v) for v in basis))


def jacobian_rank_at(polys, values, field) -> int:
    jac = jacobian(polys)
    return rank(jac.evaluate(values), field)


@dataclass
class Projection:
    cubic: MultiPoly  # in y0..y_{n-1} of VarSpec(2, n)
    change: list  # y = change @ w, last column is the center
    center: tuple
    linear: tuple  # L1, L2 in w
    quadratic: tuple  # A1, A2 in w
    degenerate: bool
    field: object

    def lift(self, w):
        """Point of the input system over a point w of the cubic (None on the base locus)."""
        F = self.field
        vals = [F.zero] * 2 + [F(c) for c in w] + [F.zero]
        for L, A in zip(self.linear, self.quadratic):
            lv = L.evaluate(vals)
            if lv:
                wn = -A.evaluate(vals) / lv
                full = [F(c) for c in w] + [wn]
                y = [sum((r * c for r, c in zip(row, full)), F.zero) for row in self.change]
                return normalize(F, y)
        return None

    def to_json(self):
        F = self.field
        return {
            "cubic": self.cubic.to_text(),
            "change": [[F.format(c) for c in row] for row in self.change],
            "center": [F.format(c) for c in self.center],
            "degenerate": self.degenerate,
        }


def project_from_point(sys: QuadricSystem, p) -> Projection:
    F = sys.field
    if len(sys.quadrics) != 2:
        raise BadShape("projection needs exactly two quadrics")
    p = [F(c) for c in p]
    if not any(p):
        raise ZeroVector("center is zero")
    vals = [F.zero] * 2 + p
    if not sys.contains(p):
        raise NotOnVariety("center is not on both quadrics")
    if jacobian_rank_at(sys.quadrics, vals, F) < 2:
        raise SingularCenter("center is a singular point of the intersection")
    n1 = sys.n + 1
    k = next(i for i, c in enumerate(p) if c)
    others = [j for j in range(n1) if j != k]
    change = [[F.zero] * n1 for _ in range(n1)]
    for col, j in enumerate(others):
        change[j][col] = F.one
    for j in range(n1):
        change[j][n1 - 1] = p[j]
    vs = sys.vs
    w = [MultiPoly.var(vs, F, f"y{i}") for i in range(n1)]
    assignment = {}
    for j in range(n1):
        expr = MultiPoly.zero(vs, F)
        for col in range(n1):
            if change[j][col]:
                expr = expr + w[col] * change[j][col]
        assignment[f"y{j}"] = expr
    last = vs.n_x + n1 - 1
    Ls, As = [], []
    for q in sys.quadrics:
        qt = q.substitute(assignment)
        lin = {}
        quad = {}
        for e, c in qt.terms.items():
            if e[last] == 0:
                quad[e] = c
            elif e[last] == 1:
                lin[e[:last] + (0,) + e[last + 1 :]] = c
            else:  # pragma: no cover - impossible since q(p) = 0
                raise AssertionError("center is not on the quadric")
        Ls.append(MultiPoly(vs, F, lin, _trusted=True))
        As.append(MultiPoly(vs, F, quad, _trusted=True))
    cubic_full = As[0] * Ls[1] - As[1] * Ls[0]
    small = VarSpec(2, sys.n)
    cubic = cubic_full.reindex(small, {i: i for i in range(last)})
    return Projection(cubic, change, tuple(p), tuple(Ls), tuple(As), cubic.is_zero(), F)


# --- smoothness ----------------------------------------------------------------------

@dataclass
class SmoothnessVerdict:
    smooth: bool
    heuristic: bool
    level: int
    field: str
    witness: object = None
    details: dict = None

    def to_json(self):
        out = {"smooth": self.smooth, "heuristic": self.heuristic, "level": self.level, "field": self.field}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.details:
            out["details"] = self.details
        return out


SCAN_LIMIT = 3 * 10**8


def singular_locus_equations(polys, codim):
    """The polynomials together with all codim x codim minors of their Jacobian."""
    jac = jacobian(polys)
    cols = [c for c in range(jac.cols) if any(jac[r, c] for r in range(jac.rows))]
    minors = []
    for cs in combinations(cols, codim):
        m = poly_det(PolyMatrix([[jac[r, c] for c in cs] for r in range(jac.rows)]))
        if m:
            minors.append(m)
    return list(polys) + minors


def polys_and_layout(obj):
    """Defining polynomials and ambient layout of a system, divisor or bundle."""
    from .bundle import QuadricBundle

    if isinstance(obj, tuple):
        return list(obj[0]), list(obj[1])
    if isinstance(obj, QuadricSystem):
        return [q for q in obj.quadrics if q], fiber_layout(obj.vs)
    if isinstance(obj, BidegreeDivisor):
        return [obj.equation()], bundle_layout(obj.vs)
    if isinstance(obj, QuadricBundle):
        return [obj.equation()], bundle_layout(obj.vs)
    raise BadShape("smoothness check needs a quadric system, divisor or bundle")


def _scan(polys, layout, field, threads):
    from .enumerate import projective_count

    size = 1
    for _, n in layout:
        size *= projective_count(n - 1, field.q)
    if size > SCAN_LIMIT:
        raise BudgetExceeded(f"smoothness scan of {size} points exceeds the budget")
    sing = singular_locus_equations(polys, len(polys))
    for _, pt in iter_points(sing, layout, field, threads):
        return pt
    return None


def good_primes(polys, count=3, start=3):
    out = []
    p = start
    from .fields import is_prime

    while len(out) < count:
        if is_prime(p):
            ok = all(
                c.denominator % p and c.numerator % p for q in polys for c in q.terms.values()
            )
            if ok:
                out.append(p)
        p += 2
    return out


def smoothness_check(obj, field=None, level=1, threads=None) -> SmoothnessVerdict:
    polys, layout = polys_and_layout(obj)
    field = make_field(field) if field is not None else polys[0].field
    if field.is_finite:
        if polys[0].field != field:
            polys = [p.change_field(field) for p in polys]
        w = _scan(polys, layout, field, threads)
        if w is not None:
            return SmoothnessVerdict(False, False, level, field.spec, w.to_json(field))
        if level >= 2:
            big = extension_of_degree(field, 2)
            w = _scan([p.change_field(big) for p in polys], layout, big, threads)
            if w is not None:
                return SmoothnessVerdict(False, False, level, big.spec, w.to_json(big))
        return SmoothnessVerdict(True, False, level, field.spec)
    from .fields import FiniteField

    results = {}
    for p in good_primes(polys):
        fp = FiniteField(p)
        try:
            w = _scan([q.change_field(fp) for q in polys], layout, fp, threads)
        except BudgetExceeded:
            results[f"F:{p}"] = "budget"
            continue
        results[f"F:{p}"] = "smooth" if w is None else "singular"
    smooth = "smooth" in results.values()
    return SmoothnessVerdict(smooth, True, level, "Q", None, {"reductions": results})


def count_system(sys: QuadricSystem, field=None, threads=None) -> int:
    field = field or sys.field
    s = sys if sys.field == field else sys.change_field(field)
    return brute_count(list(s.quadrics), fiber_layout(s.vs), field, threads)
