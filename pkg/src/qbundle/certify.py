"""Decision engine: check hypotheses, build witnesses, emit a certificate.

Routes are tried in a fixed order, cheap algebraic short-circuits first:

1. a vanishing diagonal coefficient gives a section (rational);
2. bidegree (1,2) is rational;
3. bidegree (2,2) with a point is unirational;
4. over P^1 and an infinite field, odd delta with positive volume goes
   through the conic slice, or the (3,3,3) tail construction;
5. bases of dimension >= 2 go through a line restriction;
6. even delta with positive volume: unirational over a quadratic extension;
7. finite fields: non-conical / smooth fibers of the degree-d transformation
   and the conic-slice criterion;
8. the degree-d transformation on the bundle and on its slices.

Every conclusion other than ``Unknown`` carries the constructed objects in
``witness_chain``; :mod:`qbundle.audit` re-checks them from the input alone.
Checklist anchors are opaque labels that the audit matches verbatim.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import lcm

from .bundle import (
    QuadricBundle,
    bundle_validate,
    conic_slice as _conic,
    multidegree,
    restrict_to_line,
    rho as rho_poly,
    slice_bundle,
    split_form_checks,
    volume,
    zero_diagonal_section,
)
from .count import iter_points
from .enumerate import ProductPoint, height_stream, points_up_to_height, projective_points
from .errors import (
    BudgetExceeded,
    CertifiedEmpty,
    DegenerateLine,
    DegenerateTail,
    IndeterminacyLocus,
    InfiniteField,
    SingularCenter,
    WrongShape,
)
from .fields import QQ, QuadraticField
from .linalg import nullspace, rank
from .poly import MultiPoly, jacobian
from .transform import (
    BidegreeDivisor,
    QuadricSystem,
    fiber_X,
    is_cone,
    polys_and_layout,
    project_from_point,
    psi_apply,
    smoothness_check,
)

SCHEMA = "qbundle.certificate/1"


@dataclass(frozen=True)
class SearchBudget:
    height: int = 2
    time_cap_ms: int | None = None
    full_enumeration: bool = True
    threads: int | None = None
    check_level: int = 1
    candidates: int = 8  # z-vectors / lines tried over an infinite field

    def __post_init__(self):
        if self.height < 1 or self.candidates < 1:
            raise ValueError("search bounds must be positive")
        if self.time_cap_ms is not None and self.time_cap_ms <= 0:
            raise ValueError("time cap must be positive")

    def to_json(self):
        return {
            "height": self.height,
            "time_cap_ms": self.time_cap_ms,
            "full_enumeration": self.full_enumeration,
            "check_level": self.check_level,
            "candidates": self.candidates,
        }


class _Clock:
    def __init__(self, cap_ms):
        self.deadline = None if cap_ms is None else time.perf_counter() + cap_ms / 1000

    def tick(self):
        if self.deadline is not None and time.perf_counter() > self.deadline:
            raise BudgetExceeded("search time cap reached")


# --- point search -----------------------------------------------------------------------

def _full_values(pt: ProductPoint, layout, nvars, field):
    vals = [field.zero] * nvars
    for (off, n), blk in zip(layout, pt.blocks):
        for k in range(n):
            vals[off + k] = field(blk[k])
    return vals


def _nvars(polys, layout):
    return polys[0].vs.nvars if polys else max(o + n for o, n in layout)


def is_smooth_point(polys, layout, pt: ProductPoint, field=None) -> bool:
    """Jacobian of the system has full row rank at ``pt``."""
    field = field or polys[0].field
    vals = _full_values(pt, layout, _nvars(polys, layout), field)
    jac = jacobian(polys).evaluate(vals)
    return rank(jac, field) == len(polys)


def _chevalley_warning(polys, layout) -> bool:
    """Some block has more variables than the sum of the block degrees."""
    for off, n in layout:
        total = 0
        for p in polys:
            total += max((sum(e[off : off + n]) for e in p.terms), default=0)
        if n > total:
            return True
    return False


class _IntSystem:
    """Polynomials over Q with cleared denominators, evaluated on integer vectors."""

    def __init__(self, polys):
        self.terms = []
        for p in polys:
            den = lcm(*(c.denominator for c in p.terms.values())) if p.terms else 1
            self.terms.append([(int(c * den), e) for e, c in p.terms.items()])

    def vanishes(self, vec) -> bool:
        for terms in self.terms:
            s = 0
            for c, e in terms:
                t = c
                for v, k in zip(vec, e):
                    if k:
                        t *= v**k
                s += t
            if s:
                return False
        return True


def _search(obj, field, budget, smooth):
    budget = budget or SearchBudget()
    polys, layout = polys_and_layout(obj)
    polys = [p for p in polys if p]
    field = field or (polys[0].field if polys else QQ)
    if polys and polys[0].field != field:
        polys = [p.change_field(field) for p in polys]
    nvars = _nvars(polys, layout)
    clock = _Clock(budget.time_cap_ms)
    if field.is_finite:
        seen = False
        for _, pt in iter_points(polys, layout, field, budget.threads):
            seen = True
            if not smooth or is_smooth_point(polys, layout, pt, field):
                return pt
            clock.tick()
        if not seen:
            if _chevalley_warning(polys, layout):
                raise RuntimeError("Chevalley-Warning guarantees a point but the scan found none")
            raise CertifiedEmpty("no point over the finite field", field=field.spec)
        return None
    if field != QQ:
        raise InfiniteField("height search is only available over Q")
    ints = _IntSystem(polys)
    sizes = [n for _, n in layout]
    count = 0
    for _, combo in height_stream(sizes, budget.height):
        vec = [0] * nvars
        for (off, n), blk in zip(layout, combo):
            vec[off : off + n] = blk
        count += 1
        if count % 4096 == 0:
            clock.tick()
        if not ints.vanishes(vec):
            continue
        pt = ProductPoint(tuple(tuple(Fraction(c) for c in blk) for blk in combo))
        if not smooth or is_smooth_point(polys, layout, pt, field):
            return pt
    return None


def find_point(obj, field=None, budget=None):
    """First point in enumeration order (finite fields) or height order (Q), else None."""
    return _search(obj, field, budget, smooth=False)


def smooth_point_search(obj, field=None, budget=None):
    return _search(obj, field, budget, smooth=True)


# --- quadratic extension and sampling ---------------------------------------------------------

@dataclass(frozen=True)
class QuadExtension:
    disc: object
    is_square: bool
    form: tuple  # (A, B, C) of A u^2 + B u v + C v^2

    def to_json(self, field):
        return {
            "disc": field.format(self.disc),
            "is_square": self.is_square,
            "form": [field.format(c) for c in self.form],
        }


def tail_binary_form(b: QuadricBundle):
    """Coefficients of the form in the last two fiber variables over x = [0:1]."""
    if b.base_dim != 1:
        raise WrongShape("the tail form is defined over P^1")
    F = b.field
    at = [F.zero, F.one] + [F.zero] * b.size
    s = b.size
    coeff = lambda i, j: b.entry(i, j).evaluate(at)
    return coeff(s - 2, s - 2), coeff(s - 2, s - 1), coeff(s - 1, s - 1)


def quadratic_extension(b: QuadricBundle) -> QuadExtension:
    A, B, C = tail_binary_form(b)
    if not (A or B or C):
        raise DegenerateTail("the tail form vanishes identically")
    D = B * B - 4 * A * C
    if not D:
        raise DegenerateTail("the tail form has a double root")
    return QuadExtension(D, b.field.is_square(D), (A, B, C))


def extension_point(b: QuadricBundle, ext: QuadExtension):
    """The point x = [0:1], y = (0, ..., 0, 1, r) with f(1, r) = 0, over k or k(sqrt D)."""
    A, B, C = ext.form
    if ext.is_square:
        K = b.field
        root = K.sqrt(ext.disc)
    else:
        K = QuadraticField(ext.disc)
        root = K.root
    if C:
        r = (K(-B) + root) / (2 * K(C))
    else:
        r = K(-A) / K(B)
    y = [K.zero] * (b.size - 2) + [K.one, r]
    return K, ProductPoint(((K.zero, K.one), tuple(y)))


def real_delta_sampling(div: BidegreeDivisor, budget=None) -> dict:
    """Sample the discriminant of the binary form in x at integer y-vectors."""
    budget = budget or SearchBudget()
    if div.d != 2:
        raise WrongShape("sampling needs a bidegree (2,2) divisor")
    if div.field != QQ:
        raise WrongShape("sampling is done over Q")
    f0, f1, f2 = div.f
    delta = f1 * f1 - f0 * f2.scale(4)
    samples = 0
    best = None
    for vec, _ in points_up_to_height(div.n + 1, budget.height):
        samples += 1
        v = delta.evaluate([0, 0] + list(vec))
        best = v if best is None else max(best, v)
        if v >= 0:
            return {"delta": delta.to_text(), "found_nonneg": True, "witness": list(vec), "value": str(v), "samples": samples}
    return {"delta": delta.to_text(), "found_nonneg": False, "samples": samples, "max_value": str(best)}


# --- certificate ------------------------------------------------------------------------------

@dataclass
class Certificate:
    verdict: str
    field: str
    input: dict
    checklist: list = dc_field(default_factory=list)
    witness_chain: list = dc_field(default_factory=list)
    theorem_path: list = dc_field(default_factory=list)
    extension: dict | None = None
    failed: str | None = None
    budget: dict | None = None

    def to_json(self):
        out = {
            "schema": SCHEMA,
            "verdict": self.verdict,
            "field": self.field,
            "theorem_path": self.theorem_path,
            "checklist": self.checklist,
            "witness_chain": self.witness_chain,
            "failed": self.failed,
            "input": self.input,
            "budget": self.budget,
            "extension": self.extension,
        }
        return out


class _Route:
    """Checklist and witnesses of one attempt; committed only on success."""

    def __init__(self, run):
        self.run = run
        self.chain = []

    def check(self, hypothesis, anchor, ok, evidence=None, gate=False):
        return self.run.check(hypothesis, anchor, ok, evidence, gate)

    def add(self, item):
        self.chain.append(item)


class _Run:
    def __init__(self, b, budget):
        self.b = b
        self.F = b.field
        self.budget = budget
        self.checklist = []
        self.failed = None

    def check(self, hypothesis, anchor, ok, evidence=None, gate=False):
        status = "n/a" if ok is None else ("pass" if ok else "fail")
        entry = {"hypothesis": hypothesis, "anchor": anchor, "status": status}
        if evidence is not None:
            entry["evidence"] = evidence
        self.checklist.append(entry)
        if ok is False and not gate and self.failed is None:
            self.failed = hypothesis
        return bool(ok)

    def fmt_point(self, pt, field=None):
        return pt.to_json(field or self.F)

    def search(self, obj, smooth=False, field=None):
        """Point search that turns budget exhaustion and empty scans into None."""
        try:
            if smooth:
                return smooth_point_search(obj, field or self.F, self.budget), None
            return find_point(obj, field or self.F, self.budget), None
        except BudgetExceeded as exc:
            return None, str(exc)
        except CertifiedEmpty as exc:
            return None, str(exc)


def _divisor_shape(b: QuadricBundle):
    """Bidegree d when all weights agree (a (d,2) divisor of a product), else None."""
    if len(set(b.weights)) != 1 or not b.sigma:
        return None
    degs = {p.degree() for p in b.sigma.values()}
    return degs.pop() if len(degs) == 1 else None


def _zbar_candidates(F, d, budget):
    ones = tuple(F.one for _ in range(d))
    yield ones
    if F.is_finite:
        for z in projective_points(F, d):
            if z != ones:
                yield z
    else:
        k = 1
        for vec, _ in points_up_to_height(d, budget.height):
            z = tuple(F(c) for c in vec)
            if z == ones:
                continue
            if k >= budget.candidates:
                return
            k += 1
            yield z


def _fmt(F, vec):
    return [F.format(F(c)) for c in vec]


def _divisor_item(div, source):
    return {"kind": "divisor", "source": source, "d": div.d, "n": div.n, "f": [q.to_text() for q in div.f]}


def _cubic_is_cone(cubic: MultiPoly):
    """A cubic form is a cone iff its partial derivatives are linearly dependent."""
    F = cubic.field
    idx = list(range(cubic.vs.n_x, cubic.vs.nvars))
    parts = [cubic.derivative(i) for i in idx]
    monos = sorted({e for p in parts for e in p.terms})
    rows = [[p.terms.get(e, F.zero) for p in parts] for e in monos]
    basis = nullspace(rows, F, len(parts)) if rows else nullspace([], F, len(parts))
    return bool(basis), basis


def _uni2q_chain(route, sys: QuadricSystem, center, label):
    """Projection of a two-quadric system from a smooth point to a cubic with a smooth point."""
    run = route.run
    F = sys.field
    try:
        proj = project_from_point(sys, center)
    except SingularCenter:
        return route.check("center is a smooth point", "Prop uni2q", False, {"center": _fmt(F, center)})
    route.check("center is a smooth point", "Prop uni2q", True, {"center": _fmt(F, center)})
    route.add({"kind": "point", "on": label, "coords": [_fmt(F, center)], "smooth": True})
    if not route.check("projection is a cubic", "Prop uni2q", not proj.degenerate):
        return False
    route.add({
        "kind": "projection",
        "of": label,
        "center": _fmt(F, center),
        "change": [_fmt(F, row) for row in proj.change],
        "cubic": proj.cubic.to_text(),
    })
    cubic_sys = ([proj.cubic], [(proj.cubic.vs.n_x, proj.cubic.vs.n_y)])
    pt, why = run.search(cubic_sys, smooth=True)
    if not route.check("cubic has a smooth point", "Prop uni2q", pt is not None,
                       {"point": run.fmt_point(pt)} if pt else {"reason": why or "none within budget"}):
        return False
    route.add({"kind": "point", "on": "cubic", "coords": run.fmt_point(pt), "smooth": True})
    cone, _ = _cubic_is_cone(proj.cubic)
    if not route.check("cubic is not a cone", "Prop uni2q", not cone):
        return False
    route.add({"kind": "cone_test", "of": "cubic", "is_cone": False})
    return True


def _ott_route(run, div: BidegreeDivisor, source):
    """Degree-d transformation: look for a fiber X(z) certifying unirationality."""
    F = div.field
    d, n = div.d, div.n
    if d == 1:
        route = _Route(run)
        route.check("bidegree (1,2)", "Remark 12-22", True, {"source": source})
        route.add({"kind": "shape", "source": source, "bidegree": [1, 2]})
        return route, ["Remark 12-22"], "Rational"
    if d == 2:
        route = _Route(run)
        pt, why = run.search(div, smooth=True)
        if not route.check("point search", "Remark 12-22", pt is not None,
                           {"point": run.fmt_point(pt)} if pt else {"reason": why or "none within budget"}):
            return None
        route.add({"kind": "shape", "source": source, "bidegree": [2, 2]})
        route.add({"kind": "point", "on": source, "coords": run.fmt_point(pt), "smooth": True})
        return route, ["Remark 12-22"], "Unirational"
    if not run.check("1 < d < n", "Prop Ott_G", d < n, {"d": d, "n": n}, gate=True):
        return None
    if F.is_finite and d >= 4 and not run.check("n >= d(d-1)", "Thm thm1ff(ii)", n >= d * (d - 1), {"d": d, "n": n}, gate=True):
        return None
    if not F.is_finite:
        if d != 3:
            run.check("degree 3 over an infinite field", "Prop Ott_G", False, {"d": d}, gate=True)
            return None
        if not run.check("n >= 4", "Prop uni2q", n >= 4, {"n": n}, gate=True):
            return None
    for z in _zbar_candidates(F, d, run.budget):
        route = _Route(run)
        route.add(_divisor_item(div, source))
        X = fiber_X(div, z)
        route.add({"kind": "X", "zbar": _fmt(F, z), "quadrics": [q.to_text() for q in X.quadrics]})
        cone = is_cone(X)
        if F.is_finite and d >= 4:
            verdict = smoothness_check(X, F, run.budget.check_level, run.budget.threads)
            if route.check("X(z) is smooth", "Thm thm1ff(ii)", verdict.smooth, {"zbar": _fmt(F, z)}):
                route.add({"kind": "smoothness", "of": "X", "smooth": True, "level": run.budget.check_level})
                return route, ["Prop Ott_G", "Thm thm1ff(ii)"], "Unirational"
            continue
        if not route.check("X(z) is not a cone", "Thm thm1ff(i)" if F.is_finite else "Prop uni2q",
                           not cone.is_cone, {"zbar": _fmt(F, z)}):
            continue
        route.add({"kind": "cone_test", "of": "X", "is_cone": False})
        if F.is_finite:
            return route, ["Prop Ott_G", "Thm thm1ff(i)"], "Unirational"
        pt, why = run.search(X, smooth=True)
        if not route.check("X(z) has a smooth point", "Prop uni2q", pt is not None,
                           {"zbar": _fmt(F, z), "reason": why} if pt is None else {"zbar": _fmt(F, z)}):
            continue
        if _uni2q_chain(route, X, pt.blocks[0], "X"):
            return route, ["Prop Ott_G", "Prop uni2q"], "Unirational"
    return None


def _route_333(run, b: QuadricBundle, md):
    """(3,3,3) tail: a point, its image z = psi(p), the fiber X(z), then a cubic."""
    route = _Route(run)
    n = b.n
    shape = _divisor_shape(b)
    if not route.check("divisor of bidegree (3,2)", "Prop 333P1", shape == 3, {"weights": list(b.weights)}):
        return None
    if not route.check("n >= 4", "Prop 333P1", n >= 4, {"n": n}):
        return None
    if not route.check("n <= 5", "Thm main1(i)", n <= 5, {"n": n}):
        return None
    div = BidegreeDivisor.from_bundle(b)
    pt, why = run.search(div)
    if not route.check("point search", "Thm main1(i)", pt is not None,
                       {"point": run.fmt_point(pt)} if pt else {"reason": why or "none within budget"}):
        return None
    route.add(_divisor_item(div, "bundle"))
    route.add({"kind": "point", "on": "bundle", "coords": run.fmt_point(pt)})
    try:
        q = psi_apply(div, pt)
    except IndeterminacyLocus:
        route.check("psi defined at the point", "Prop 333P1", False)
        return None
    route.check("psi defined at the point", "Prop 333P1", True)
    route.add({"kind": "psi", "point": run.fmt_point(pt), "image": run.fmt_point(q)})
    z = q.blocks[0]
    X = fiber_X(div, z)
    route.add({"kind": "X", "zbar": _fmt(b.field, z), "quadrics": [x.to_text() for x in X.quadrics]})
    if not route.check("X(z) is not a cone", "Prop 333P1", not is_cone(X).is_cone):
        return None
    route.add({"kind": "cone_test", "of": "X", "is_cone": False})
    if not _uni2q_chain(route, X, q.blocks[1], "X"):
        return None
    return route


def _conic_label(b):
    return "bundle" if b.fiber_dim == 1 else f"slice:{b.fiber_dim - 2}"


def _conic_checks(run, b, anchor, n):
    conic = _conic(b)
    flags = split_form_checks(conic)
    ok = (flags.rank_le_2 or not flags.has_x_factor) and (n != 2 or flags.rho_nonzero)
    run.check("conic slice: no x-only factor, rho nonzero when n = 2", anchor, ok, flags.to_json())
    return ok, conic


def _tail_degrees(b, md):
    diag = [md.degrees[(i, i)] for i in range(b.size)]
    return diag[-3:] if len(diag) >= 3 else diag


def _main1(run, b, md, vol):
    n = b.n
    tail = _tail_degrees(b, md)
    t = sum(tail)
    run.check("tail degree", "Thm main1", True, {"tail": tail, "sum": t}, gate=True)
    if tuple(tail) == (3, 3, 3):
        route = _route_333(run, b, md)
        if route:
            return route, ["Thm main1(i)", "Prop 333P1", "Prop Ott_G", "Prop Enr"], "Unirational"
        return None
    route = _Route(run)
    if not route.check("tail sum in {1,3,5,7}", "Prop p1uni(i)", t in (1, 3, 5, 7), {"sum": t}):
        return None
    ok, conic = _conic_checks(run, b, "Prop p1uni", n)
    if not ok:
        return None
    route.add({"kind": "slice", "j": b.fiber_dim - 2, "weights": list(conic.weights), "delta": t})
    sub = "Thm main1(ii)" if md.delta <= 3 * n + 1 else "Thm main1(i)"
    return route, [sub, "Prop p1uni(i)", "Prop Enr"], "Unirational"


def _even_tail(run, route, b, md, smooth_pt_fn, anchor):
    """Tail sums 0 and 2 need a smooth point of the conic slice; 4 and 6 are not constructed."""
    tail = _tail_degrees(b, md)
    t = sum(tail)
    if t in (4, 6):
        run.check("even tail construction", "Lemma L_1-7", False,
                  {"sum": t, "pointer": "Lemma L_1-7: remaining even cases are not constructed"})
        return False
    if t not in (0, 2):
        run.check("tail sum in {0,2,4,6}", anchor, False, {"sum": t})
        return False
    ok, _ = _conic_checks(run, b, anchor, b.n)
    if not ok:
        return False
    return smooth_pt_fn()


def _potD(run, b, md):
    route = _Route(run)
    try:
        ext = quadratic_extension(b)
    except DegenerateTail as exc:
        route.check("tail form non-degenerate", "Cor potD", False, {"reason": str(exc)})
        return None
    route.check("tail form non-degenerate", "Cor potD", True, ext.to_json(b.field))
    K, pt = extension_point(b, ext)
    conic = _conic(b).change_field(K) if K != b.field else _conic(b)
    cpt = ProductPoint((pt.blocks[0], pt.blocks[1][-3:]))

    def smooth_here():
        polys, layout = polys_and_layout(conic)
        ok = is_smooth_point(polys, layout, cpt, K)
        route.check("conic slice smooth at the extension point", "Prop p1uni(ii)", ok,
                    {"point": [[K.format(c) for c in blk] for blk in cpt.blocks]})
        return ok

    if not _even_tail(run, route, b, md, smooth_here, "Prop p1uni(ii)"):
        return None
    item = ext.to_json(b.field)
    item.update({"kind": "extension", "point": [[K.format(c) for c in blk] for blk in pt.blocks]})
    route.add(item)
    verdict = "Unirational" if ext.is_square else "UnirationalOverQuadExt"
    return route, ["Cor potD", "Prop p1uni(ii)", "Prop Enr"], verdict


def _mainff(run, b, md):
    F = b.field
    n = b.n
    route = _Route(run)
    if not run.check("delta <= 4n - 1", "Thm mainff", md.delta <= 4 * n - 1, {"delta": md.delta, "n": n}, gate=True):
        return None
    conic = _conic(b)
    r = rho_poly(b)
    base = projective_points(F, 2)
    nz = [x for x in base if r.evaluate(list(x) + [F.zero] * (r.vs.nvars - 2))]
    if not route.check("rho does not vanish on all of P^1", "Thm mainff", bool(nz),
                       {"nonvanishing_at": _fmt(F, nz[0])} if nz else None):
        return None
    tail = _tail_degrees(b, md)
    if tuple(tail) == (3, 3, 3):
        diag = [md.degrees[(i, i)] for i in range(b.size)]
        if b.size < 5 or any(d != 3 for d in diag[-5:]):
            route.check("last five diagonal degrees equal 3", "Thm mainff", False, {"diagonal": diag})
            return None
        j = b.size - 6
        sub = slice_bundle(b, j) if j >= 0 else b
        res = _ott_route(run, BidegreeDivisor.from_bundle(sub), f"slice:{j}" if j >= 0 else "bundle")
        if not res:
            return None
        r2, path, _ = res
        if j >= 0:
            route.add({"kind": "slice", "j": j, "weights": list(sub.weights), "delta": 15})
        route.chain.extend(r2.chain)
        return route, ["Thm mainff"] + path + ["Prop Enr"], "Unirational"

    def smooth_pt():
        pt, why = run.search(conic, smooth=True)
        ok = route.check("conic slice has a smooth point", "Thm mainff", pt is not None,
                         {"point": run.fmt_point(pt)} if pt else {"reason": why or "none"})
        if ok:
            route.add({"kind": "slice", "j": b.fiber_dim - 2, "weights": list(conic.weights), "delta": sum(tail)})
            route.add({"kind": "point", "on": _conic_label(b), "coords": run.fmt_point(pt), "smooth": True})
        return ok

    t = sum(tail)
    if t in (1, 3, 5, 7):
        ok, _ = _conic_checks(run, b, "Thm mainff", n)
        if not ok or not smooth_pt():
            return None
        return route, ["Thm mainff", "Prop p1uni(i)", "Prop Enr"], "Unirational"
    if not _even_tail(run, route, b, md, smooth_pt, "Thm mainff"):
        return None
    return route, ["Thm mainff", "Prop p1uni(ii)", "Prop Enr"], "Unirational"


def _line_candidates(m, budget):
    for k in range(budget.candidates):
        alpha = [1 + k + i for i in range(m)]
        beta = [(i + 1) ** 2 + 2 * k for i in range(m)]
        alpha[0], beta[0] = 1, 0
        yield alpha, beta


def _corEn(run, b, md):
    h = b.fiber_dim
    delta = md.delta
    flags = b.assumptions or {}
    r = flags.get("C_r")
    via_ii = False
    if delta <= 3 * h + 4:
        run.check("delta <= 3h + 4", "Cor corEn(i)", True, {"delta": delta, "h": h}, gate=True)
    else:
        run.check("delta <= 3h + 4", "Cor corEn(i)", False, {"delta": delta, "h": h}, gate=True)
        cond = r is not None and delta <= 4 * h + 3 and h <= 4 and h + 2 > 2 ** (int(r) + b.n - h - 1)
        if not run.check("declared C_r field with h + 2 > 2^(r+n-h-1)", "Cor corEn(ii)", cond,
                         {"C_r": r, "declared": r is not None}):
            return None
        via_ii = True
    for alpha, beta in _line_candidates(b.vs.n_x, run.budget):
        route = _Route(run)
        try:
            line = restrict_to_line(b, alpha, beta)
        except DegenerateLine:
            continue
        lmd = multidegree(line)
        ok, _ = _conic_checks(run, line, "Cor corEn", line.n)
        if not ok:
            continue
        t = sum(_tail_degrees(line, lmd))
        if not route.check("line tail sum in {1,3,5,7}", "Prop p1uni(i)", t in (1, 3, 5, 7), {"sum": t}):
            continue
        route.add({"kind": "line", "alpha": alpha, "beta": beta, "delta": lmd.delta})
        path = ["Cor corEn(ii)" if via_ii else "Cor corEn(i)", "Thm main1(ii)", "Prop p1uni(i)"]
        return route, path, "Unirational"
    return None


def _slice_routes(run, b, skip_top):
    """The degree-d transformation on the bundle itself and on its slices."""
    if b.base_dim != 1:
        return None
    for j in range(0 if skip_top else -1, b.fiber_dim - 1):
        sub = b if j < 0 else slice_bundle(b, j)
        d = _divisor_shape(sub)
        label = "bundle" if j < 0 else f"slice:{j}"
        if d is None:
            continue
        if j >= 0:
            run.check(f"slice j={j} is a (d,2) divisor", "Prop Enr", True, {"d": d}, gate=True)
        if j < 0 and d <= 2:
            continue  # handled by the shape routes
        res = _ott_route(run, BidegreeDivisor.from_bundle(sub), label)
        if res:
            route, path, verdict = res
            if j >= 0:
                route.chain.insert(0, {"kind": "slice", "j": j, "weights": list(sub.weights),
                                       "delta": multidegree(sub).delta})
                return route, [f"slice j={j}"] + path + ["Prop Enr"], "Unirational"
            return route, path, verdict
    return None


def certify(b, budget: SearchBudget | None = None) -> Certificate:
    budget = budget or SearchBudget()
    if isinstance(b, BidegreeDivisor):
        b = b.to_bundle()
    b, md = bundle_validate(b)
    run = _Run(b, budget)
    F = b.field

    def finish(res):
        route, path, verdict = res
        cert = Certificate(verdict, F.spec, b.to_json(), run.checklist, route.chain, path, None, None, budget.to_json())
        if verdict == "UnirationalOverQuadExt":
            ext = next(w for w in route.chain if w["kind"] == "extension")
            cert.extension = {"disc": ext["disc"]}
        return cert

    # 1. vanishing diagonal coefficient
    sec = zero_diagonal_section(b)
    if run.check("some sigma_ii vanishes", "Remark not0", sec is not None, sec.to_json() if sec else None, gate=True):
        route = _Route(run)
        route.add({"kind": "section", **sec.to_json()})
        return finish((route, ["Remark not0"], "Rational"))

    shape = _divisor_shape(b)
    run.check("divisor of bidegree (d,2)", "Remark 12-22", shape is not None, {"d": shape}, gate=True)
    # 2./3. bidegree (1,2) and (2,2)
    if shape == 1:
        route = _Route(run)
        route.check("bidegree (1,2)", "Remark 12-22", True)
        route.add({"kind": "shape", "source": "bundle", "bidegree": [1, 2]})
        return finish((route, ["Remark 12-22"], "Rational"))
    if shape == 2:
        route = _Route(run)
        pt, why = run.search(b, smooth=True)
        if route.check("point search", "Remark 12-22", pt is not None,
                       {"point": run.fmt_point(pt)} if pt else {"reason": why or "none within budget"}):
            route.add({"kind": "shape", "source": "bundle", "bidegree": [2, 2]})
            route.add({"kind": "point", "on": "bundle", "coords": run.fmt_point(pt), "smooth": True})
            return finish((route, ["Remark 12-22"], "Unirational"))
        if F == QQ and b.base_dim == 1:
            evidence = real_delta_sampling(BidegreeDivisor.from_bundle(b), budget)
            run.check("real discriminant sampling", "Prop op_ball", evidence["found_nonneg"], evidence, gate=True)

    vol = volume(b)
    odd = md.delta % 2 == 1
    if not F.is_finite:
        if b.base_dim == 1:
            run.check("volume > 0", "Thm main1", vol > 0, {"volume": str(vol)}, gate=True)
            run.check("delta odd", "Thm main1", odd, {"delta": md.delta}, gate=True)
            if vol > 0 and odd:
                res = _main1(run, b, md, vol)
                if res:
                    return finish(res)
        else:
            run.check("delta odd", "Cor corEn", odd, {"delta": md.delta}, gate=True)
            if odd:
                res = _corEn(run, b, md)
                if res:
                    return finish(res)
        if b.base_dim == 1 and vol > 0 and not odd:
            res = _potD(run, b, md)
            if res:
                return finish(res)
    else:
        if shape is not None and shape >= 3 and b.base_dim == 1:
            res = _ott_route(run, BidegreeDivisor.from_bundle(b), "bundle")
            if res:
                return finish(res)
        if b.base_dim == 1 and b.fiber_dim >= 1:
            res = _mainff(run, b, md)
            if res:
                return finish(res)
    res = _slice_routes(run, b, skip_top=F.is_finite)
    if res:
        return finish(res)
    failed = run.failed or "no applicable route"
    return Certificate("Unknown", F.spec, b.to_json(), run.checklist, [], [], None, failed, budget.to_json())
