"""Independent re-validation of certificate witness chains.

Nothing here imports the construction code. Polynomials are re-expanded from
their printed form with a small ast walker, and every witness is checked with
arithmetic written from scratch in this module.
"""

from __future__ import annotations

import ast
import random
import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations, product
from math import isqrt

EXHAUSTIVE_LIMIT = 200_000


class AuditError(Exception):
    pass


# fields ----------------------------------------------------------------------


class _Rationals:
    finite = False
    zero, one = Fraction(0), Fraction(1)

    def lit(self, v):
        return Fraction(v)

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        return 1 / a

    def is_zero(self, a):
        return a == 0

    def parse(self, s):
        return Fraction(str(s).strip())

    def rand(self, rng):
        return Fraction(rng.randint(-50, 50), rng.randint(1, 7))

    def elements(self):
        raise AuditError("Q is infinite")


class _PrimeField:
    finite = True

    def __init__(self, p):
        self.p = p
        self.zero, self.one = 0, 1
        self.size = p

    def lit(self, v):
        v = Fraction(v)
        return v.numerator * pow(v.denominator, -1, self.p) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p

    def inv(self, a):
        return pow(a, -1, self.p)

    def is_zero(self, a):
        return a % self.p == 0

    def parse(self, s):
        s = str(s).strip()
        if s.startswith("["):
            raise AuditError(f"{s} is not in the prime field")
        return self.lit(s)

    def rand(self, rng):
        return rng.randrange(self.p)

    def elements(self):
        return list(range(self.p))


class _ExtField:
    """F_p[t]/(m), elements as coefficient tuples, lowest degree first."""

    finite = True

    def __init__(self, p, modulus):
        self.p = p
        self.m = tuple(modulus)
        self.a = len(modulus) - 1
        self.size = p**self.a
        self.zero = (0,) * self.a
        self.one = (1,) + (0,) * (self.a - 1)

    def lit(self, v):
        if isinstance(v, tuple):
            return v
        v = Fraction(v)
        c = v.numerator * pow(v.denominator, -1, self.p) % self.p
        return (c,) + (0,) * (self.a - 1)

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x % self.p for x in a)

    def mul(self, a, b):
        prod_ = [0] * (2 * self.a - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                prod_[i + j] += x * y
        for k in range(len(prod_) - 1, self.a - 1, -1):
            c = prod_[k] % self.p
            if c:
                for i in range(self.a + 1):
                    prod_[k - self.a + i] -= c * self.m[i]
        return tuple(c % self.p for c in prod_[: self.a])

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError
        r = self.one
        e = self.size - 2
        base = a
        while e:
            if e & 1:
                r = self.mul(r, base)
            base = self.mul(base, base)
            e >>= 1
        return r

    def is_zero(self, a):
        return not any(a)

    def parse(self, s):
        s = str(s).strip()
        if s.startswith("["):
            digits = [int(c) % self.p for c in s.strip("[]").split(",")]
            return tuple(digits + [0] * (self.a - len(digits)))
        return self.lit(s)

    def rand(self, rng):
        return tuple(rng.randrange(self.p) for _ in range(self.a))

    def elements(self):
        return [tuple(d) for d in product(range(self.p), repeat=self.a)]


def field_from_spec(spec: str):
    spec = spec.strip()
    if spec == "Q":
        return _Rationals()
    m = re.fullmatch(r"F:(\d+)(?:\^(\d+):\[([-\d, ]+)\])?", spec)
    if not m:
        raise AuditError(f"unknown field spec {spec!r}")
    p = int(m.group(1))
    if m.group(2) is None or int(m.group(2)) == 1:
        return _PrimeField(p)
    return _ExtField(p, [int(c) % p for c in m.group(3).split(",")])


# polynomials as {monomial: coeff}, monomial = sorted tuple of (name, exp) ---


def _mono_mul(m1, m2):
    d = dict(m1)
    for k, e in m2:
        d[k] = d.get(k, 0) + e
    return tuple(sorted(d.items()))


class _Poly:
    __slots__ = ("K", "t")

    def __init__(self, K, terms=None):
        self.K = K
        self.t = {m: c for m, c in (terms or {}).items() if not K.is_zero(c)}

    @classmethod
    def const(cls, K, c):
        return cls(K, {(): c})

    @classmethod
    def var(cls, K, name):
        return cls(K, {((name, 1),): K.one})

    def __add__(self, o):
        K = self.K
        out = dict(self.t)
        for m, c in o.t.items():
            out[m] = K.add(out[m], c) if m in out else c
        return _Poly(K, out)

    def __neg__(self):
        return _Poly(self.K, {m: self.K.neg(c) for m, c in self.t.items()})

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        K = self.K
        out = {}
        for m1, c1 in self.t.items():
            for m2, c2 in o.t.items():
                m = _mono_mul(m1, m2)
                c = K.mul(c1, c2)
                out[m] = K.add(out[m], c) if m in out else c
        return _Poly(K, out)

    def __pow__(self, e):
        r = _Poly.const(self.K, self.K.one)
        for _ in range(e):
            r = r * self
        return r

    def is_zero(self):
        return not self.t

    def variables(self):
        return {k for m in self.t for k, _ in m}

    def degree_in(self, names):
        degs = {sum(e for k, e in m if k in names) for m in self.t}
        return degs

    def evaluate(self, values: dict):
        K = self.K
        total = K.zero
        for m, c in self.t.items():
            v = c
            for k, e in m:
                x = values.get(k, K.zero)
                for _ in range(e):
                    v = K.mul(v, x)
            total = K.add(total, v)
        return total

    def diff(self, name):
        K = self.K
        out = {}
        for m, c in self.t.items():
            d = dict(m)
            e = d.get(name, 0)
            if not e:
                continue
            if e == 1:
                del d[name]
            else:
                d[name] = e - 1
            out[tuple(sorted(d.items()))] = K.mul(c, K.lit(e))
        return _Poly(K, out)

    def substitute(self, values: dict):
        """Replace variables by polynomials; unlisted variables stay."""
        K = self.K
        out = _Poly(K)
        for m, c in self.t.items():
            term = _Poly.const(K, c)
            for k, e in m:
                term = term * ((values[k] if k in values else _Poly.var(K, k)) ** e)
            out = out + term
        return out

    def __eq__(self, o):
        return (self - o).is_zero()


def parse_poly(text: str, K) -> _Poly:
    src = str(text).replace("^", "**").replace("−", "-")
    tree = ast.parse(src, mode="eval")

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                if not isinstance(node.right, ast.Constant) or not isinstance(node.right.value, int):
                    raise AuditError("exponents must be integer literals")
                return walk(node.left) ** node.right.value
            a, b = walk(node.left), walk(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                if set(b.t) - {()}:
                    raise AuditError("division by a non-constant")
                return a * _Poly.const(K, K.inv(b.t[()]))
            raise AuditError(f"unsupported operator in {text!r}")
        if isinstance(node, ast.UnaryOp):
            v = walk(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return _Poly.const(K, K.lit(node.value))
        if isinstance(node, ast.Name):
            return _Poly.var(K, node.id)
        if isinstance(node, ast.List):
            return _Poly.const(K, K.parse("[" + ",".join(str(e.value) for e in node.elts) + "]"))
        raise AuditError(f"unsupported syntax in {text!r}")

    return walk(tree)


# linear algebra --------------------------------------------------------------


def _rank(rows, K):
    m = [list(r) for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(m)) if not K.is_zero(m[r][c])), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = K.inv(m[rank][c])
        m[rank] = [K.mul(x, inv) for x in m[rank]]
        for r in range(len(m)):
            if r != rank and not K.is_zero(m[r][c]):
                f = m[r][c]
                m[r] = [K.add(x, K.neg(K.mul(f, y))) for x, y in zip(m[r], m[rank])]
        rank += 1
    return rank


def _coeff_rows(polys):
    monos = sorted({m for p in polys for m in p.t})
    K = polys[0].K
    return [[p.t.get(m, K.zero) for m in monos] for p in polys]


def _same_span(a, b):
    if not a or not b:
        return not a and not b
    ra = _rank(_coeff_rows(a), a[0].K)
    rb = _rank(_coeff_rows(b), b[0].K)
    rab = _rank(_coeff_rows(a + b), a[0].K)
    return ra == rb == rab


def _det(m):
    """Cofactor expansion over polynomials; sizes here stay small."""
    if len(m) == 1:
        return m[0][0]
    K = m[0][0].K
    out = _Poly(K)
    for j in range(len(m)):
        if m[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1 :] for row in m[1:]]
        term = m[0][j] * _det(minor)
        out = out + term if j % 2 == 0 else out - term
    return out


def _gram_of_quadric(q, names):
    K = q.K
    n = len(names)
    g = [[K.zero] * n for _ in range(n)]
    half = K.inv(K.lit(2))
    idx = {v: i for i, v in enumerate(names)}
    for m, c in q.t.items():
        exps = [(idx[k], e) for k, e in m]
        if len(exps) == 1 and exps[0][1] == 2:
            i = exps[0][0]
            g[i][i] = K.add(g[i][i], c)
        elif len(exps) == 2:
            (i, _), (j, _) = exps
            h = K.mul(c, half)
            g[i][j] = K.add(g[i][j], h)
            g[j][i] = K.add(g[j][i], h)
        else:
            raise AuditError("not a quadratic form")
    return g


def _jacobian_rank(polys, values, names):
    K = polys[0].K
    rows = [[p.diff(v).evaluate(values) for v in names] for p in polys]
    return _rank(rows, K)


def _normalize(vec, K):
    k = next((i for i, c in enumerate(vec) if not K.is_zero(c)), None)
    if k is None:
        raise AuditError("zero vector is not a projective point")
    inv = K.inv(vec[k])
    return [K.mul(c, inv) for c in vec]


# audit state -----------------------------------------------------------------


@dataclass
class AuditItem:
    index: int
    kind: str
    ok: bool
    message: str = ""

    def to_json(self):
        return {"index": self.index, "kind": self.kind, "ok": self.ok, "message": self.message}


@dataclass
class AuditReport:
    ok: bool
    items: list = dc_field(default_factory=list)

    def to_json(self):
        return {"ok": self.ok, "items": [i.to_json() for i in self.items]}


class _Context:
    def __init__(self, cert):
        inp = cert["input"]
        self.K = K = field_from_spec(cert["field"])
        self.base = int(inp["base_dim"])
        self.size = len(inp["weights"])
        self.weights = list(inp["weights"])
        self.sigma = {}
        for key, text in inp["sigma"].items():
            i, j = map(int, key.split(","))
            self.sigma[(min(i, j), max(i, j))] = parse_poly(text, K)
        self.xs = [f"x{i}" for i in range(self.base + 1)]
        # label -> (equations, [block variable names])
        self.varieties = {}
        ys = [f"y{i}" for i in range(self.size)]
        self.varieties["bundle"] = ([self._form(self.sigma, ys)], [self.xs, ys])
        self.divisor = None
        self.X = None
        self.zbar = None
        self.rng = random.Random(20240611)

    def _form(self, sigma, ys):
        K = self.K
        out = _Poly(K)
        for (i, j), p in sigma.items():
            out = out + p * _Poly.var(K, ys[i]) * _Poly.var(K, ys[j])
        return out

    def slice_sigma(self, j):
        k = j + 1
        return {(a - k, b - k): p for (a, b), p in self.sigma.items() if a >= k and not p.is_zero()}

    def common(self):
        for (i, j), p in self.sigma.items():
            if not p.is_zero():
                (deg,) = p.degree_in(set(self.xs)) or {0}
                return deg - self.weights[i] - self.weights[j]
        raise AuditError("all coefficients vanish")

    def point(self, coords, blocks):
        K = self.K
        values = {}
        for names, vals in zip(blocks, coords):
            if len(names) != len(vals):
                raise AuditError(f"point block has {len(vals)} coordinates, expected {len(names)}")
            vec = [K.parse(v) for v in vals]
            _normalize(vec, K)
            values.update(zip(names, vec))
        return values


def _check_section(ctx, w):
    i = int(w["index"])
    p = ctx.sigma.get((i, i))
    if p is not None and not p.is_zero():
        return False, f"sigma_{i}{i} does not vanish"
    want = {f"y{j} = 0" for j in range(ctx.size) if j != i}
    if set(w["locus"]) != want:
        return False, "locus is not the coordinate point"
    eq, _ = ctx.varieties["bundle"]
    ys = {f"y{j}": _Poly.const(ctx.K, ctx.K.zero) for j in range(ctx.size) if j != i}
    ys[f"y{i}"] = _Poly.const(ctx.K, ctx.K.one)
    if not eq[0].substitute(ys).is_zero():
        return False, "the section does not lie on the bundle"
    return True, f"y{i}-axis lies in every fiber"


def _sigma_for(ctx, source):
    if source == "bundle":
        return ctx.sigma, ctx.weights
    if source.startswith("slice:"):
        j = int(source.split(":")[1])
        return ctx.slice_sigma(j), ctx.weights[j + 1 :]
    raise AuditError(f"unknown source {source!r}")


def _check_shape(ctx, w):
    sigma, weights = _sigma_for(ctx, w["source"])
    d, two = w["bidegree"]
    if two != 2 or ctx.base != 1:
        return False, "not a (d,2) divisor over P^1"
    if len(set(weights)) != 1:
        return False, f"weights {weights} are not all equal"
    for p in sigma.values():
        if not p.is_zero() and p.degree_in(set(ctx.xs)) != {d}:
            return False, f"a coefficient is not homogeneous of degree {d}"
    return True, f"bidegree ({d},2)"


def _check_slice(ctx, w):
    j = int(w["j"])
    if not 0 <= j <= ctx.size - 3:
        return False, f"slice index {j} out of range"
    sig = ctx.slice_sigma(j)
    weights = ctx.weights[j + 1 :]
    if list(w["weights"]) != weights:
        return False, f"weights {w['weights']} != {weights}"
    c = ctx.common()
    delta = sum(c + 2 * a for a in weights)
    if int(w["delta"]) != delta:
        return False, f"delta {w['delta']} != {delta}"
    ys = [f"y{i}" for i in range(len(weights))]
    ctx.varieties[f"slice:{j}"] = ([ctx._form(sig, ys)], [ctx.xs, ys])
    return True, f"{len(weights)} fiber variables, delta {delta}"


def _check_divisor(ctx, w):
    K = ctx.K
    source = w["source"]
    if source not in ctx.varieties:
        return False, f"{source} was not established earlier in the chain"
    (eq,), blocks = ctx.varieties[source]
    d, n = int(w["d"]), int(w["n"])
    f = [parse_poly(t, K) for t in w["f"]]
    if len(f) != d + 1:
        return False, f"{len(f)} forms for degree {d}"
    ys = [f"y{i}" for i in range(n + 1)]
    if blocks[1] != ys:
        return False, "fiber variables do not match"
    if any(p.variables() - set(ys) for p in f):
        return False, "a form depends on the base"
    x0, x1 = _Poly.var(K, "x0"), _Poly.var(K, "x1")
    total = _Poly(K)
    for i, fi in enumerate(f):
        total = total + (x0 ** (d - i)) * (x1**i) * fi
    if not total == eq:
        return False, "sum x0^(d-i) x1^i f_i differs from the equation"
    ctx.divisor = (d, n, f)
    return True, f"equation matches with d = {d}"


def _check_point(ctx, w):
    on = w["on"]
    if on not in ctx.varieties:
        return False, f"{on} was not established earlier in the chain"
    eqs, blocks = ctx.varieties[on]
    values = ctx.point(w["coords"], blocks)
    K = ctx.K
    for e in eqs:
        if not K.is_zero(e.evaluate(values)):
            return False, "point does not satisfy the equations"
    if w.get("smooth"):
        names = [v for blk in blocks for v in blk]
        r = _jacobian_rank(eqs, values, names) if len(blocks) == 1 else _product_jacobian_rank(eqs, values, blocks)
        if r < len(eqs):
            return False, f"Jacobian rank {r} < {len(eqs)}"
    return True, "on the variety" + (" and smooth" if w.get("smooth") else "")


def _product_jacobian_rank(eqs, values, blocks):
    # in a product of projective spaces use the affine chart at the first nonzero coordinate of each block
    K = eqs[0].K
    names = []
    for blk in blocks:
        k = next(i for i, v in enumerate(blk) if not K.is_zero(values[v]))
        names.extend(v for i, v in enumerate(blk) if i != k)
    return _jacobian_rank(eqs, values, names)


def _check_psi(ctx, w):
    if ctx.divisor is None:
        return False, "no divisor recorded"
    K = ctx.K
    d, n, f = ctx.divisor
    ys = [f"y{i}" for i in range(n + 1)]
    values = ctx.point(w["point"], [["x0", "x1"], ys])
    x0, x1 = values["x0"], values["x1"]
    fv = [p.evaluate(values) for p in f]
    t = []
    for i in range(d):
        s = K.zero
        for j in range(i + 1):
            term = fv[j]
            for _ in range(i - j):
                term = K.mul(term, x0)
            for _ in range(d - 1 - i + j):
                term = K.mul(term, x1)
            s = K.add(s, term)
        t.append(s)
    if all(K.is_zero(c) for c in t):
        return False, "psi is undefined at the point"
    img_t = [K.parse(c) for c in w["image"][0]]
    img_y = [K.parse(c) for c in w["image"][1]]
    if _normalize(t, K) != _normalize(img_t, K):
        return False, "t-coordinates differ"
    if _normalize([values[y] for y in ys], K) != _normalize(img_y, K):
        return False, "y-coordinates differ"
    ctx.zbar = _normalize(t, K)
    return True, "t_i recomputed"


def _minors(ctx, zbar):
    K = ctx.K
    d, n, f = ctx.divisor
    if len(zbar) != d:
        raise AuditError(f"zbar has {len(zbar)} entries, expected {d}")
    # transposed layout, row i = (f_i, z_{i-1}, z_i); flipping a column sign leaves the span alone
    zs = [_Poly.const(K, z) for z in zbar] + [_Poly.const(K, K.zero)]
    cols = []
    for i in range(d + 1):
        top = zs[i - 1] if i >= 1 else _Poly.const(K, K.zero)
        mid = zs[i] if i < d else _Poly.const(K, K.zero)
        cols.append([f[i], top, mid])
    out = []
    for a, b, c in combinations(range(d + 1), 3):
        m = [[cols[a][r], cols[b][r], cols[c][r]] for r in range(3)]
        out.append(_det(m))
    return [p for p in out if not p.is_zero()]


def _check_X(ctx, w):
    if ctx.divisor is None:
        return False, "no divisor recorded"
    K = ctx.K
    d, n, f = ctx.divisor
    zbar = [K.parse(c) for c in w["zbar"]]
    if all(K.is_zero(c) for c in zbar):
        return False, "zbar is zero"
    if ctx.zbar is not None and _normalize(zbar, K) != ctx.zbar:
        return False, "zbar is not the image of the recorded point"
    quads = [parse_poly(t, K) for t in w["quadrics"]]
    minors = _minors(ctx, zbar)
    if not _same_span(quads, minors):
        return False, "recorded quadrics do not span the 3x3 minors"
    if _rank(_coeff_rows(quads), K) != len(quads):
        return False, "recorded quadrics are dependent"
    ys = [f"y{i}" for i in range(n + 1)]
    ctx.X = (quads, ys)
    ctx.varieties["X"] = (quads, [ys])
    return True, f"{len(quads)} quadrics span the minors"


def _check_cone(ctx, w):
    K = ctx.K
    if w["of"] == "X":
        if ctx.X is None:
            return False, "no X recorded"
        quads, ys = ctx.X
        rows = []
        for q in quads:
            rows.extend(_gram_of_quadric(q, ys))
        r = _rank(rows, K)
        cone = r < len(ys)
    elif w["of"] == "cubic":
        if "cubic" not in ctx.varieties:
            return False, "no cubic recorded"
        (c,), (names,) = ctx.varieties["cubic"]
        partials = [c.diff(v) for v in names]
        nz = [p for p in partials if not p.is_zero()]
        r = _rank(_coeff_rows(nz), K) if nz else 0
        cone = r < len(names)
    else:
        return False, f"unknown cone target {w['of']!r}"
    if cone != bool(w["is_cone"]):
        return False, f"is_cone should be {cone}"
    return True, f"rank {r}"


def _check_projection(ctx, w):
    K = ctx.K
    if ctx.X is None:
        return False, "no X recorded"
    quads, ys = ctx.X
    if len(quads) != 2:
        return False, "projection needs exactly two quadrics"
    n1 = len(ys)
    T = [[K.parse(c) for c in row] for row in w["change"]]
    center = [K.parse(c) for c in w["center"]]
    if len(T) != n1 or _rank(T, K) != n1:
        return False, "change of coordinates is not invertible"
    if [row[-1] for row in T] != center:
        return False, "last column of the change is not the center"
    for q in quads:
        if not K.is_zero(q.evaluate(dict(zip(ys, center)))):
            return False, "center is not on X"
    ws = [f"y{i}" for i in range(n1 - 1)]
    cubic = parse_poly(w["cubic"], K)
    if cubic.variables() - set(ws):
        return False, "cubic uses unexpected variables"

    def image(wv, last):
        full = list(wv) + [last]
        return {ys[r]: _dot(T[r], full, K) for r in range(n1)}

    trials = 12
    for _ in range(trials):
        wv = [K.rand(ctx.rng) for _ in ws]
        A, L = [], []
        for q in quads:
            a = q.evaluate(image(wv, K.zero))
            ql = q.evaluate(image(wv, K.one))
            qc = q.evaluate(dict(zip(ys, center)))
            A.append(a)
            L.append(K.add(K.add(ql, K.neg(a)), K.neg(qc)))
        want = K.add(K.mul(A[0], L[1]), K.neg(K.mul(A[1], L[0])))
        got = cubic.evaluate(dict(zip(ws, wv)))
        if want != got and not K.is_zero(K.add(want, K.neg(got))):
            return False, "cubic differs from A1*L2 - A2*L1"
    if not cubic.degree_in(set(ws)) <= {3}:
        return False, "projection is not a cubic form"
    ctx.varieties["cubic"] = ([cubic], [ws])
    return True, f"cubic identity holds at {trials} random points"


def _dot(row, vec, K):
    s = K.zero
    for a, b in zip(row, vec):
        s = K.add(s, K.mul(a, b))
    return s


def _check_smoothness(ctx, w):
    K = ctx.K
    if w["of"] != "X" or ctx.X is None:
        return False, "no X recorded"
    if not K.finite:
        return False, "smoothness over Q is heuristic and not re-audited"
    quads, ys = ctx.X
    count = (K.size ** len(ys) - 1) // (K.size - 1)
    if count > EXHAUSTIVE_LIMIT:
        return False, f"exhaustive scan of {count} points skipped"
    for vec in _proj_points(K, len(ys)):
        values = dict(zip(ys, vec))
        if all(K.is_zero(q.evaluate(values)) for q in quads):
            if _jacobian_rank(quads, values, ys) < len(quads):
                return False, f"singular point {vec}"
    return True, f"no singular point among {count}"


def _proj_points(K, n):
    els = K.elements()
    for k in range(n):
        for tail in product(els, repeat=n - k - 1):
            yield [K.zero] * k + [K.one] + list(tail)


def _check_extension(ctx, w):
    K = ctx.K
    if ctx.base != 1 or K.finite:
        return False, "extension witnesses are for bundles over P^1 over Q"
    s = ctx.size
    at = {"x0": K.zero, "x1": K.one}

    def coeff(i, j):
        p = ctx.sigma.get((i, j))
        return p.evaluate(at) if p is not None else K.zero

    A, B, C = coeff(s - 2, s - 2), coeff(s - 2, s - 1), coeff(s - 1, s - 1)
    if [A, B, C] != [K.parse(c) for c in w["form"]]:
        return False, "tail form differs"
    D = B * B - 4 * A * C
    if D != K.parse(w["disc"]):
        return False, f"discriminant should be {D}"
    sq = D >= 0 and isqrt(D.numerator) ** 2 == D.numerator and isqrt(D.denominator) ** 2 == D.denominator
    if sq != bool(w["is_square"]):
        return False, "squareness flag is wrong"
    # re-evaluate the bundle equation at the point in Q(sqrt D), pairs (a, b) = a + b sqrt D
    coords = [[_parse_quad(c, D) for c in blk] for blk in w["point"]]
    xs, yv = coords
    (eq,), _ = ctx.varieties["bundle"]
    values = {**{f"x{i}": v for i, v in enumerate(xs)}, **{f"y{i}": v for i, v in enumerate(yv)}}
    if _eval_quad(eq, values, D) != (0, 0):
        return False, "point is not on the bundle"
    return True, f"D = {D}"


def _parse_quad(text, D):
    """Read ``a``, ``b*sqrt(D)`` or ``a+b*sqrt(D)`` into the pair (a, b)."""
    text = str(text).replace(" ", "")
    m = re.fullmatch(r"(?:(-?[\d/]+)(?=[+-]))?([+-]?[\d/]*)\*?sqrt\((-?\d+(?:/\d+)?)\)", text)
    if not m:
        return Fraction(text), Fraction(0)
    if Fraction(m.group(3)) != D:
        raise AuditError("point lives in a different quadratic field")
    a = Fraction(m.group(1)) if m.group(1) else Fraction(0)
    coef = m.group(2)
    b = Fraction(coef + "1") if coef in ("", "+", "-") else Fraction(coef)
    return a, b


def _eval_quad(p, values, D):
    total = (Fraction(0), Fraction(0))
    for m, c in p.t.items():
        v = (Fraction(c), Fraction(0))
        for k, e in m:
            x = values.get(k, (Fraction(0), Fraction(0)))
            for _ in range(e):
                v = (v[0] * x[0] + D * v[1] * x[1], v[0] * x[1] + v[1] * x[0])
        total = (total[0] + v[0], total[1] + v[1])
    return total


def _check_line(ctx, w):
    K = ctx.K
    if ctx.base < 2:
        return False, "line restriction needs base dimension at least 2"
    alpha = [K.lit(a) for a in w["alpha"]]
    beta = [K.lit(b) for b in w["beta"]]
    if _rank([alpha, beta], K) < 2:
        return False, "alpha and beta do not span a line"
    s, t = _Poly.var(K, "s"), _Poly.var(K, "t")
    sub = {x: s * _Poly.const(K, a) + t * _Poly.const(K, b) for x, a, b in zip(ctx.xs, alpha, beta)}
    half = K.inv(K.lit(2))
    size = ctx.size
    g = [[_Poly(K) for _ in range(size)] for _ in range(size)]
    for (i, j), p in ctx.sigma.items():
        q = p.substitute(sub)
        if i == j:
            g[i][i] = q
        else:
            h = q * _Poly.const(K, half)
            g[i][j] = g[j][i] = h
    det = _det(g)
    if det.is_zero():
        return False, "restricted form is degenerate"
    degs = det.degree_in({"s", "t"})
    c = ctx.common()
    delta = sum(c + 2 * a for a in ctx.weights)
    if int(w["delta"]) != delta or degs != {delta}:
        return False, f"restricted discriminant degree {sorted(degs)} vs delta {delta}"
    return True, f"discriminant of degree {delta} on the line"


_CHECKS = {
    "section": _check_section,
    "shape": _check_shape,
    "slice": _check_slice,
    "divisor": _check_divisor,
    "point": _check_point,
    "psi": _check_psi,
    "X": _check_X,
    "cone_test": _check_cone,
    "projection": _check_projection,
    "smoothness": _check_smoothness,
    "extension": _check_extension,
    "line": _check_line,
}


def audit(cert: dict) -> AuditReport:
    """Re-check every witness of a certificate; the report fails on the first bad item or any gap."""
    report = AuditReport(True)
    verdict = cert.get("verdict")
    chain = cert.get("witness_chain") or []
    if verdict != "Unknown" and not chain:
        report.ok = False
        report.items.append(AuditItem(-1, "chain", False, f"verdict {verdict} with an empty witness chain"))
        return report
    if verdict != "Unknown" and not cert.get("theorem_path"):
        report.ok = False
        report.items.append(AuditItem(-1, "path", False, "empty theorem path"))
    try:
        ctx = _Context(cert)
    except (AuditError, KeyError, ValueError, SyntaxError) as exc:
        report.ok = False
        report.items.append(AuditItem(-1, "input", False, str(exc)))
        return report
    for idx, w in enumerate(chain):
        kind = w.get("kind")
        fn = _CHECKS.get(kind)
        if fn is None:
            ok, msg = False, f"unknown witness kind {kind!r}"
        else:
            try:
                ok, msg = fn(ctx, w)
            except (AuditError, KeyError, ValueError, SyntaxError, ZeroDivisionError, StopIteration) as exc:
                ok, msg = False, f"{type(exc).__name__}: {exc}"
        report.items.append(AuditItem(idx, kind, ok, msg))
        report.ok = report.ok and ok
    return report
