"""Sparse multivariate polynomials in named variable blocks.

Variables are ordered ``x0..x{n_x-1}, y0..y{n_y-1}, z0..z{n_z-1}``; a
monomial is its exponent tuple in that order.  Terms are kept in a dict with no
zero coefficients.  Printing and iteration use graded lexicographic order
(higher total degree first, ties broken lexicographically on the exponent
tuple, larger first).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import NonSquare, NotSupported, NotXOnly, VarSpecMismatch
from .fields import FFElem, make_field


@dataclass(frozen=True)
class VarSpec:
    n_x: int
    n_y: int
    n_z: int = 0

    def __post_init__(self):
        if self.n_x < 2 or self.n_y < 2 or self.n_z < 0:
            raise VarSpecMismatch(f"invalid variable blocks {self.n_x}, {self.n_y}, {self.n_z}")

    @property
    def nvars(self) -> int:
        return self.n_x + self.n_y + self.n_z

    @property
    def names(self) -> tuple:
        return (
            tuple(f"x{i}" for i in range(self.n_x))
            + tuple(f"y{i}" for i in range(self.n_y))
            + tuple(f"z{i}" for i in range(self.n_z))
        )

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            from .errors import UnknownVariable

            raise UnknownVariable(f"unknown variable {name!r}", variable=name) from None

    def x_slice(self):
        return slice(0, self.n_x)

    def y_slice(self):
        return slice(self.n_x, self.n_x + self.n_y)

    def z_slice(self):
        return slice(self.n_x + self.n_y, self.nvars)

    def block_of(self, i: int) -> str:
        if i < self.n_x:
            return "x"
        if i < self.n_x + self.n_y:
            return "y"
        return "z"


def _grlex_key(exp):
    return (sum(exp), exp)


class MultiPoly:
    """Immutable sparse polynomial; ``terms`` maps exponent tuples to coefficients."""

    __slots__ = ("vs", "field", "terms", "_hash")

    def __init__(self, vs: VarSpec, field, terms=None, _trusted=False):
        self.vs = vs
        self.field = field
        if _trusted:
            self.terms = terms
        else:
            clean = {}
            for exp, c in (terms or {}).items():
                exp = tuple(exp)
                if len(exp) != vs.nvars:
                    raise VarSpecMismatch("exponent vector length does not match the variable blocks")
                if any(e < 0 for e in exp):
                    from .errors import NegativeExponent

                    raise NegativeExponent("negative exponent")
                c = field(c)
                if c:
                    clean[exp] = c
            self.terms = clean
        self._hash = None

    # constructors ---------------------------------------------------------------
    @classmethod
    def zero(cls, vs, field):
        return cls(vs, field, {}, _trusted=True)

    @classmethod
    def const(cls, vs, field, c):
        c = field(c)
        return cls(vs, field, {(0,) * vs.nvars: c} if c else {}, _trusted=True)

    @classmethod
    def var(cls, vs, field, which):
        i = vs.index(which) if isinstance(which, str) else which
        exp = [0] * vs.nvars
        exp[i] = 1
        return cls(vs, field, {tuple(exp): field.one}, _trusted=True)

    @classmethod
    def monomial(cls, vs, field, exp, c=1):
        return cls(vs, field, {tuple(exp): c})

    # basic predicates -------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self):
        return self.terms.get((0,) * self.vs.nvars, self.field.zero)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def block_degree(self, block: str) -> int:
        sl = getattr(self.vs, f"{block}_slice")()
        return max((sum(e[sl]) for e in self.terms), default=-1)

    def homogeneous_degree(self, block: str | None = None):
        """Common degree of all terms (in ``block`` if given), or None."""
        if block is None:
            degs = {sum(e) for e in self.terms}
        else:
            sl = getattr(self.vs, f"{block}_slice")()
            degs = {sum(e[sl]) for e in self.terms}
        if len(degs) > 1:
            return None
        return degs.pop() if degs else -1

    def is_homogeneous(self, block: str | None = None) -> bool:
        return self.homogeneous_degree(block) is not None

    def uses_only(self, *blocks) -> bool:
        for exp in self.terms:
            for i, e in enumerate(exp):
                if e and self.vs.block_of(i) not in blocks:
                    return False
        return True

    def is_x_only(self) -> bool:
        return self.uses_only("x")

    def variables(self):
        used = set()
        for exp in self.terms:
            used.update(i for i, e in enumerate(exp) if e)
        return sorted(used)

    # ordering ---------------------------------------------------------------
    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def leading_term(self):
        return max(self.terms.items(), key=lambda t: _grlex_key(t[0]))

    def leading_coeff(self):
        return self.leading_term()[1] if self.terms else self.field.zero

    def monic(self) -> "MultiPoly":
        if not self.terms:
            return self
        return self.scale(self.field.one / self.leading_coeff())

    # arithmetic -----------------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, MultiPoly):
            return MultiPoly.const(self.vs, self.field, other)
        if other.vs != self.vs or other.field != self.field:
            raise VarSpecMismatch("polynomials live in different rings")
        return other

    def __add__(self, other):
        other = self._check(other)
        out = dict(self.terms)
        for exp, c in other.terms.items():
            s = out.get(exp)
            if s is None:
                out[exp] = c
            else:
                s = s + c
                if s:
                    out[exp] = s
                else:
                    del out[exp]
        return MultiPoly(self.vs, self.field, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.vs, self.field, {e: -c for e, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def scale(self, c):
        c = self.field(c)
        if not c:
            return MultiPoly.zero(self.vs, self.field)
        return MultiPoly(self.vs, self.field, {e: v * c for e, v in self.terms.items()}, _trusted=True)

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        other = self._check(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e)
                out[e] = c1 * c2 if s is None else s + c1 * c2
        return MultiPoly(self.vs, self.field, {e: c for e, c in out.items() if c}, _trusted=True)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = MultiPoly.const(self.vs, self.field, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __truediv__(self, c):
        if isinstance(c, MultiPoly):
            if not c.is_constant() or c.is_zero():
                raise ZeroDivisionError("division by a non-constant polynomial")
            c = c.constant_value()
        return self.scale(self.field.one / self.field(c))

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.vs == other.vs and self.field == other.field and self.terms == other.terms
        if isinstance(other, (int, Fraction, FFElem)):
            return self == MultiPoly.const(self.vs, self.field, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vs, frozenset(self.terms.items())))
        return self._hash

    # evaluation / substitution -------------------------------------------------------
    def evaluate(self, values):
        """Value at a full assignment (sequence indexed like the variables)."""
        f = self.field
        vals = [f(v) for v in values]
        if len(vals) != self.vs.nvars:
            raise VarSpecMismatch("assignment length does not match the variable blocks")
        total = f.zero
        for exp, c in self.terms.items():
            t = c
            for v, e in zip(vals, exp):
                if e:
                    t = t * v**e
            total = total + t
        return total

    def substitute(self, assignment: dict, target_vs: VarSpec | None = None) -> "MultiPoly":
        """Simultaneous substitution.

        Keys are variable names or indices; values are field elements or
        polynomials over ``target_vs`` (default: same blocks).  Unassigned
        variables are kept and must exist in ``target_vs`` at the same index.
        """
        tvs = target_vs or self.vs
        f = self.field
        table = {}
        for k, v in assignment.items():
            i = self.vs.index(k) if isinstance(k, str) else k
            if isinstance(v, MultiPoly):
                if v.vs != tvs or v.field != f:
                    raise VarSpecMismatch("substituted polynomial lives in a different ring")
                table[i] = v
            else:
                table[i] = MultiPoly.const(tvs, f, v)
        for i in range(self.vs.nvars):
            if i not in table:
                if tvs is not self.vs and i >= tvs.nvars:
                    raise VarSpecMismatch(f"variable {self.vs.names[i]} has no image")
                table[i] = MultiPoly.var(tvs, f, i)
        powers = {}

        def pw(i, e):
            key = (i, e)
            if key not in powers:
                powers[key] = table[i] ** e
            return powers[key]

        out = {}
        one = (0,) * tvs.nvars
        for exp, c in self.terms.items():
            term = MultiPoly(tvs, f, {one: c}, _trusted=True)
            for i, e in enumerate(exp):
                if e:
                    term = term * pw(i, e)
            for e2, c2 in term.terms.items():
                s = out.get(e2)
                out[e2] = c2 if s is None else s + c2
        return MultiPoly(tvs, f, {e: c for e, c in out.items() if c}, _trusted=True)

    def reindex(self, target_vs: VarSpec, index_map) -> "MultiPoly":
        """Move variable ``i`` to ``index_map[i]`` in ``target_vs`` (monomial relabeling)."""
        out = {}
        for exp, c in self.terms.items():
            new = [0] * target_vs.nvars
            for i, e in enumerate(exp):
                if e:
                    j = index_map.get(i) if isinstance(index_map, dict) else index_map[i]
                    if j is None:
                        raise VarSpecMismatch(f"variable {self.vs.names[i]} has no image")
                    new[j] += e
            new = tuple(new)
            out[new] = out[new] + c if new in out else c
        return MultiPoly(target_vs, self.field, {e: c for e, c in out.items() if c}, _trusted=True)

    def change_field(self, field) -> "MultiPoly":
        """Map coefficients into another field (e.g. reduce rationals mod p)."""
        return MultiPoly(self.vs, field, {e: field(c) for e, c in self.terms.items()})

    def derivative(self, which) -> "MultiPoly":
        i = self.vs.index(which) if isinstance(which, str) else which
        out = {}
        for exp, c in self.terms.items():
            e = exp[i]
            if e:
                new = exp[:i] + (e - 1,) + exp[i + 1 :]
                v = c * e
                if v:
                    out[new] = v
        return MultiPoly(self.vs, self.field, out, _trusted=True)

    def split_by(self, block: str) -> dict:
        """Group terms by their exponents in ``block``: {block_exp: poly in the rest}."""
        sl = getattr(self.vs, f"{block}_slice")()
        groups = {}
        for exp, c in self.terms.items():
            key = exp[sl]
            rest = list(exp)
            for i in range(sl.start, sl.stop):
                rest[i] = 0
            groups.setdefault(key, {})[tuple(rest)] = c
        return {k: MultiPoly(self.vs, self.field, v, _trusted=True) for k, v in groups.items()}

    # text / json --------------------------------------------------------------------
    def _coeff_text(self, c):
        return self.field.format(c)

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        names = self.vs.names
        rational = not self.field.is_finite
        parts = []
        for exp, c in self.sorted_terms():
            mono = "*".join(
                (names[i] if e == 1 else f"{names[i]}^{e}") for i, e in enumerate(exp) if e
            )
            neg = rational and c < 0
            mag = -c if neg else c
            ctext = self._coeff_text(mag)
            if not mono:
                body = ctext
            elif mag == 1:
                body = mono
            else:
                body = f"{ctext}*{mono}"
            parts.append((neg, body))
        out = ("-" if parts[0][0] else "") + parts[0][1]
        for neg, body in parts[1:]:
            out += (" - " if neg else " + ") + body
        return out

    __str__ = to_text

    def __repr__(self):
        return f"MultiPoly({self.to_text()!r})"

    def to_json(self) -> dict:
        return {
            "terms": [
                {"exp": list(exp), "coeff": self._coeff_text(c)} for exp, c in self.sorted_terms()
            ]
        }

    @classmethod
    def from_json(cls, data: dict, vs: VarSpec, field) -> "MultiPoly":
        terms = {}
        for t in data["terms"]:
            exp = tuple(t["exp"])
            c = field(t["coeff"])
            terms[exp] = terms[exp] + c if exp in terms else c
        return cls(vs, field, terms)


def poly_from_json(data: dict, vs: VarSpec, field_spec) -> MultiPoly:
    return MultiPoly.from_json(data, vs, make_field(field_spec))


# --- matrices --------------------------------------------------------------------

class PolyMatrix:
    """Rectangular matrix of polynomials sharing one ring."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries):
        entries = tuple(tuple(r) for r in entries)
        if not entries or any(len(r) != len(entries[0]) for r in entries):
            raise VarSpecMismatch("matrix rows have different lengths")
        self.entries = entries
        self.rows = len(entries)
        self.cols = len(entries[0])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        return isinstance(other, PolyMatrix) and self.entries == other.entries

    def evaluate(self, values):
        return [[p.evaluate(values) for p in row] for row in self.entries]

    def substitute(self, assignment, target_vs=None):
        return PolyMatrix([[p.substitute(assignment, target_vs) for p in row] for row in self.entries])

    def submatrix(self, rows, cols):
        return PolyMatrix([[self.entries[i][j] for j in cols] for i in rows])

    def det(self) -> MultiPoly:
        return poly_det(self)

    def to_text(self):
        return [[p.to_text() for p in row] for row in self.entries]


def poly_det(m: PolyMatrix) -> MultiPoly:
    """Determinant: memoized cofactor expansion up to 8x8, Bareiss above."""
    if m.rows != m.cols:
        raise NonSquare(f"{m.rows}x{m.cols} matrix has no determinant")
    if m.rows <= 8:
        return _det_cofactor(m.entries)
    return _det_bareiss(m.entries)


def _det_cofactor(a):
    n = len(a)
    vs, field = a[0][0].vs, a[0][0].field
    one = MultiPoly.const(vs, field, 1)

    @lru_cache(maxsize=None)
    def minor(k, mask):
        if k == n:
            return one
        total = MultiPoly.zero(vs, field)
        sign = 1
        for c in range(n):
            if mask >> c & 1:
                entry = a[k][c]
                if entry:
                    sub = minor(k + 1, mask & ~(1 << c))
                    if sub:
                        term = entry * sub
                        total = total + term if sign > 0 else total - term
                sign = -sign
        return total

    return minor(0, (1 << n) - 1)


def divexact(num: MultiPoly, den: MultiPoly) -> MultiPoly:
    """Exact multivariate division (the quotient must exist)."""
    if den.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    lexp, lc = den.leading_term()
    inv = num.field.one / lc
    quotient = {}
    rem = num
    while rem:
        rexp, rc = rem.leading_term()
        qexp = tuple(a - b for a, b in zip(rexp, lexp))
        if any(e < 0 for e in qexp):
            raise ArithmeticError("division is not exact")
        qc = rc * inv
        quotient[qexp] = qc
        rem = rem - MultiPoly(num.vs, num.field, {qexp: qc}, _trusted=True) * den
    return MultiPoly(num.vs, num.field, quotient, _trusted=True)


def _det_bareiss(a):
    n = len(a)
    m = [list(r) for r in a]
    vs, field = a[0][0].vs, a[0][0].field
    sign = 1
    prev = MultiPoly.const(vs, field, 1)
    for k in range(n - 1):
        if not m[k][k]:
            swap = next((i for i in range(k + 1, n) if m[i][k]), None)
            if swap is None:
                return MultiPoly.zero(vs, field)
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = divexact(m[i][j] * m[k][k] - m[i][k] * m[k][j], prev)
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return det if sign > 0 else -det


def jacobian(ps, vs: VarSpec | None = None) -> PolyMatrix:
    """Rows are the polynomials, columns all variables in declared order."""
    ps = list(ps)
    vs = vs or ps[0].vs
    return PolyMatrix([[p.derivative(i) for i in range(vs.nvars)] for p in ps])


# --- gcd in the x-block -------------------------------------------------------------

def _uni_trim(c, zero):
    c = list(c)
    while c and not c[-1]:
        c.pop()
    return c


def _uni_rem(a, b, field):
    a = list(a)
    inv = field.one / b[-1]
    while len(a) >= len(b):
        if not a[-1]:
            a.pop()
            continue
        f = a[-1] * inv
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] = a[shift + i] - f * c
        a.pop()
    return _uni_trim(a, field.zero)


def _uni_gcd(a, b, field):
    a, b = _uni_trim(a, field.zero), _uni_trim(b, field.zero)
    while b:
        a, b = b, _uni_rem(a, b, field)
    return a


def poly_gcd_xonly(ps) -> MultiPoly:
    """Monic gcd of x-only polynomials (binary x-block; monomial factors otherwise)."""
    ps = [p for p in ps]
    if not ps:
        raise ValueError("empty input")
    vs, field = ps[0].vs, ps[0].field
    for p in ps:
        if not p.is_x_only():
            raise NotXOnly("gcd input depends on non-base variables", poly=p.to_text())
    nz = [p for p in ps if p]
    if not nz:
        return MultiPoly.zero(vs, field)
    if vs.n_x > 2:
        if any(len(p.terms) != 1 for p in nz):
            raise NotSupported("gcd for more than two base variables is limited to monomials")
        exps = [next(iter(p.terms)) for p in nz]
        common = tuple(min(col) for col in zip(*exps))
        return MultiPoly(vs, field, {common: field.one}, _trusted=True)
    # split off x1-power, dehomogenize x1 = 1, then Euclid in x0
    x1_mult = min(min(e[1] for e in p.terms) for p in nz)
    g = None
    homog = all(p.is_homogeneous("x") for p in nz)
    if not homog:
        raise NotSupported("gcd of non-homogeneous base forms")
    for p in nz:
        deg = max(e[0] for e in p.terms)
        coeffs = [field.zero] * (deg + 1)
        for e, c in p.terms.items():
            coeffs[e[0]] = coeffs[e[0]] + c
        g = coeffs if g is None else _uni_gcd(g, coeffs, field)
    g = _uni_trim(g, field.zero)
    inv = field.one / g[-1]
    g = [c * inv for c in g]
    d = len(g) - 1
    terms = {}
    for k, c in enumerate(g):
        if c:
            exp = [0] * vs.nvars
            exp[0], exp[1] = k, d - k + x1_mult
            terms[tuple(exp)] = c
    return MultiPoly(vs, field, terms, _trusted=True).monic()
