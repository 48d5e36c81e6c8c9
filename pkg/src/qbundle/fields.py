"""Exact arithmetic over Q, F_p and F_{p^a}.

Rationals use :class:`fractions.Fraction` directly.  Finite field elements are
:class:`FFElem` values wrapping an integer *code*: for F_p the residue itself,
for F_{p^a} the integer ``c0 + c1*p + ... + c_{a-1}*p^(a-1)`` of the
coefficient vector of the reduced representative modulo the stored monic
irreducible.  Enumeration follows the code order, so ``0, 1, ..., p-1`` come
first and extension elements are ordered lexicographically on
``(c_{a-1}, ..., c0)``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import CharTwo, FieldSpecError, InfiniteField, NotPrime, ReducibleModulus

TABLE_LIMIT = 2200  # largest q for which dense add/mul tables are built


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


# --- univariate helpers over F_p, coefficient lists low -> high -----------------

def _trim(c):
    while c and c[-1] == 0:
        c.pop()
    return c


def _polymod_p(num, den, p):
    num = list(num)
    den = _trim(list(den))
    inv_lead = pow(den[-1], p - 2, p)
    while len(_trim(num)) >= len(den):
        shift = len(num) - len(den)
        factor = num[-1] * inv_lead % p
        for i, c in enumerate(den):
            num[shift + i] = (num[shift + i] - factor * c) % p
    return num


def _monic_polys(p, deg):
    for code in range(p**deg):
        low = []
        for _ in range(deg):
            low.append(code % p)
            code //= p
        yield low + [1]


def is_irreducible_mod_p(modulus, p) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    deg = len(modulus) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for g in _monic_polys(p, d):
            if not _trim(_polymod_p(modulus, g, p)):
                return False
    return True


def first_irreducible(p: int, a: int):
    for f in _monic_polys(p, a):
        if is_irreducible_mod_p(f, p):
            return tuple(f)
    raise AssertionError("no irreducible polynomial found")  # cannot happen


# --- fields -------------------------------------------------------------------

class Rationals:
    """The field Q; elements are ``Fraction``."""

    is_finite = False
    characteristic = 0
    order = None
    zero = Fraction(0)
    one = Fraction(1)

    @property
    def spec(self) -> str:
        return "Q"

    def __call__(self, value):
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, str):
            return Fraction(value.strip())
        if isinstance(value, FFElem):
            raise TypeError("finite field element used over Q")
        return Fraction(value)

    def elements(self):
        raise InfiniteField("Q cannot be enumerated")

    def format(self, e) -> str:
        return str(e)

    def is_square(self, e) -> bool:
        if e < 0:
            return False
        return _isqrt_exact(e.numerator) is not None and _isqrt_exact(e.denominator) is not None

    def sqrt(self, e):
        if not self.is_square(e):
            return None
        return Fraction(_isqrt_exact(e.numerator), _isqrt_exact(e.denominator))

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "Rationals()"


def _isqrt_exact(n: int):
    from math import isqrt

    if n < 0:
        return None
    r = isqrt(n)
    return r if r * r == n else None


class FiniteField:
    """F_p (``modulus=None``) or F_{p^a} given by a monic irreducible modulus."""

    is_finite = True

    def __init__(self, p: int, modulus=None):
        if p == 2:
            raise CharTwo("characteristic 2 is not supported", p=p)
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime", p=p)
        self.p = p
        if modulus is None or len(modulus) == 2:
            self.a = 1
            self.modulus = None
        else:
            mod = tuple(int(c) % p for c in modulus)
            if mod[-1] != 1:
                raise ReducibleModulus("modulus must be monic", modulus=list(modulus))
            if not is_irreducible_mod_p(list(mod), p):
                raise ReducibleModulus("modulus is reducible over F_p", modulus=list(modulus))
            self.a = len(mod) - 1
            self.modulus = mod
        self.q = p**self.a
        self.characteristic = p
        self.order = self.q
        self.zero = FFElem(self, 0)
        self.one = FFElem(self, 1)

    # identity -----------------------------------------------------------------
    @property
    def spec(self) -> str:
        if self.a == 1:
            return f"F:{self.p}"
        return f"F:{self.p}^{self.a}:[{','.join(map(str, self.modulus))}]"

    def __eq__(self, other):
        return isinstance(other, FiniteField) and other.p == self.p and other.modulus == self.modulus

    def __hash__(self):
        return hash((self.p, self.modulus))

    def __repr__(self):
        return f"FiniteField({self.spec!r})"

    # coercion -----------------------------------------------------------------
    def __call__(self, value):
        if isinstance(value, FFElem):
            if value.field == self:
                return value
            if value.field.p == self.p and value.field.a == 1:
                return FFElem(self, value.v)  # prime subfield embeds by its code
            raise TypeError("element of a different field")
        if isinstance(value, bool):
            value = int(value)
        if isinstance(value, int):
            return FFElem(self, value % self.p)
        if isinstance(value, Fraction):
            if value.denominator % self.p == 0:
                raise ZeroDivisionError(f"denominator divisible by {self.p}")
            return FFElem(self, value.numerator * pow(value.denominator, -1, self.p) % self.p)
        if isinstance(value, (list, tuple)):
            return FFElem(self, self.code_from_digits([int(c) % self.p for c in value]))
        if isinstance(value, str):
            s = value.strip()
            if s.startswith("["):
                return self(list(map(int, s.strip("[]").split(","))))
            return self(Fraction(s))
        raise TypeError(f"cannot coerce {value!r}")

    def element(self, code: int) -> "FFElem":
        return FFElem(self, code)

    def elements(self):
        return [FFElem(self, v) for v in range(self.q)]

    def format(self, e) -> str:
        if e.v < self.p:
            return str(e.v)
        return "[" + ",".join(map(str, self.digits(e.v))) + "]"

    # code-level arithmetic ------------------------------------------------------
    def digits(self, code: int):
        out = []
        for _ in range(self.a):
            out.append(code % self.p)
            code //= self.p
        return out

    def code_from_digits(self, digits) -> int:
        digits = list(digits)
        if len(digits) > self.a:
            digits = _polymod_p(digits, self.modulus, self.p) if self.a > 1 else [sum(digits) % self.p]
        code = 0
        for c in reversed(digits[: self.a]):
            code = code * self.p + c
        return code

    def add_code(self, u, v):
        if self.a == 1:
            return (u + v) % self.p
        p = self.p
        du, dv = self.digits(u), self.digits(v)
        return self.code_from_digits([(x + y) % p for x, y in zip(du, dv)])

    def neg_code(self, u):
        if self.a == 1:
            return -u % self.p
        return self.code_from_digits([-x % self.p for x in self.digits(u)])

    def mul_code(self, u, v):
        if self.a == 1:
            return u * v % self.p
        p = self.p
        du, dv = self.digits(u), self.digits(v)
        prod = [0] * (2 * self.a - 1)
        for i, x in enumerate(du):
            if x:
                for j, y in enumerate(dv):
                    prod[i + j] += x * y
        prod = [c % p for c in prod]
        return self.code_from_digits(_polymod_p(prod, self.modulus, p))

    def pow_code(self, u, e):
        if self.a == 1:
            return pow(u, e, self.p)
        result, base = 1, u
        while e:
            if e & 1:
                result = self.mul_code(result, base)
            base = self.mul_code(base, base)
            e >>= 1
        return result

    def inv_code(self, u):
        if u == 0:
            raise ZeroDivisionError("inverse of zero")
        return self.pow_code(u, self.q - 2)

    # extras -----------------------------------------------------------------
    def quadratic_character(self, e) -> int:
        """1 for nonzero squares, -1 for non-squares, 0 for zero."""
        if not e.v:
            return 0
        return 1 if self.pow_code(e.v, (self.q - 1) // 2) == 1 else -1

    def is_square(self, e) -> bool:
        return self.quadratic_character(e) >= 0

    @cached_property
    def tables(self):
        """Dense ``(add, mul)`` tables as int32 arrays, for the counting kernels."""
        q = self.q
        if q > TABLE_LIMIT:
            from .errors import BudgetExceeded

            raise BudgetExceeded(f"q = {q} exceeds the table limit {TABLE_LIMIT}")
        if self.a == 1:
            r = np.arange(q, dtype=np.int64)
            add = (r[:, None] + r[None, :]) % q
            mul = (r[:, None] * r[None, :]) % q
            return add.astype(np.int32), mul.astype(np.int32)
        p, a = self.p, self.a
        codes = np.arange(q, dtype=np.int64)
        dig = np.stack([(codes // p**i) % p for i in range(a)], axis=1)  # q x a
        weights = p ** np.arange(a, dtype=np.int64)
        add = (((dig[:, None, :] + dig[None, :, :]) % p) * weights).sum(axis=2)
        # reduction of t^k, k < 2a-1, as digit vectors
        red = np.zeros((2 * a - 1, a), dtype=np.int64)
        for k in range(2 * a - 1):
            mono = [0] * k + [1]
            r = _polymod_p(mono, self.modulus, p) if k >= a else mono
            r = (r + [0] * a)[:a]
            red[k] = r
        mul = np.empty((q, q), dtype=np.int64)
        step = max(1, 200000 // (q * a))
        for s in range(0, q, step):
            du = dig[s : s + step]
            conv = np.zeros((du.shape[0], q, 2 * a - 1), dtype=np.int64)
            for i in range(a):
                for j in range(a):
                    conv[:, :, i + j] += du[:, None, i] * dig[None, :, j]
            red_d = (conv % p) @ red % p
            mul[s : s + step] = red_d @ weights
        return add.astype(np.int32), mul.astype(np.int32)


class FFElem:
    """Immutable finite field element."""

    __slots__ = ("field", "v")

    def __init__(self, field: FiniteField, v: int):
        self.field = field
        self.v = v

    def _coerce(self, other):
        if isinstance(other, FFElem):
            if other.field is not self.field and other.field != self.field:
                raise TypeError("mixing elements of different fields")
            return other.v
        return self.field(other).v

    def __add__(self, other):
        return FFElem(self.field, self.field.add_code(self.v, self._coerce(other)))

    __radd__ = __add__

    def __neg__(self):
        return FFElem(self.field, self.field.neg_code(self.v))

    def __sub__(self, other):
        f = self.field
        return FFElem(f, f.add_code(self.v, f.neg_code(self._coerce(other))))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        return FFElem(self.field, self.field.mul_code(self.v, self._coerce(other)))

    __rmul__ = __mul__

    def inverse(self):
        return FFElem(self.field, self.field.inv_code(self.v))

    def __truediv__(self, other):
        f = self.field
        return FFElem(f, f.mul_code(self.v, f.inv_code(self._coerce(other))))

    def __rtruediv__(self, other):
        return self.field(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return FFElem(self.field, self.field.pow_code(self.v, e))

    def __bool__(self):
        return self.v != 0

    def __eq__(self, other):
        if isinstance(other, FFElem):
            return self.v == other.v and self.field == other.field
        if isinstance(other, (int, Fraction)):
            try:
                return self.v == self.field(other).v
            except ZeroDivisionError:
                return False
        return NotImplemented

    def __hash__(self):
        return hash((self.v, self.field.q))

    def __repr__(self):
        return self.field.format(self)

    __str__ = __repr__


QQ = Rationals()


class QuadraticField:
    """Q(sqrt(D)) for a non-square rational D; elements are :class:`QuadElem`."""

    is_finite = False
    characteristic = 0
    order = None

    def __init__(self, disc):
        self.disc = Fraction(disc)
        if QQ.is_square(self.disc):
            raise ValueError("discriminant is a square; the extension is trivial")
        self.zero = QuadElem(self, Fraction(0), Fraction(0))
        self.one = QuadElem(self, Fraction(1), Fraction(0))
        self.root = QuadElem(self, Fraction(0), Fraction(1))

    @property
    def spec(self) -> str:
        return f"Q(sqrt({self.disc}))"

    def __call__(self, value):
        if isinstance(value, QuadElem):
            if value.field != self:
                raise TypeError("element of a different quadratic field")
            return value
        return QuadElem(self, QQ(value), Fraction(0))

    def format(self, e) -> str:
        return str(e)

    def __eq__(self, other):
        return isinstance(other, QuadraticField) and other.disc == self.disc

    def __hash__(self):
        return hash(("quad", self.disc))

    def __repr__(self):
        return f"QuadraticField({self.disc})"


class QuadElem:
    """``a + b*sqrt(D)``."""

    __slots__ = ("field", "a", "b")

    def __init__(self, field, a, b):
        self.field, self.a, self.b = field, a, b

    def _c(self, other):
        return other if isinstance(other, QuadElem) else self.field(other)

    def __add__(self, other):
        o = self._c(other)
        return QuadElem(self.field, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadElem(self.field, -self.a, -self.b)

    def __sub__(self, other):
        return self + (-self._c(other))

    def __rsub__(self, other):
        return self._c(other) - self

    def __mul__(self, other):
        o = self._c(other)
        d = self.field.disc
        return QuadElem(self.field, self.a * o.a + d * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def inverse(self):
        norm = self.a * self.a - self.field.disc * self.b * self.b
        if not norm:
            raise ZeroDivisionError("inverse of zero")
        return QuadElem(self.field, self.a / norm, -self.b / norm)

    def __truediv__(self, other):
        return self * self._c(other).inverse()

    def __rtruediv__(self, other):
        return self._c(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out, base = self.field.one, self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __eq__(self, other):
        if isinstance(other, (QuadElem, int, Fraction)):
            o = self._c(other)
            return self.a == o.a and self.b == o.b
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b))

    def __repr__(self):
        if not self.b:
            return str(self.a)
        root = f"{abs(self.b)}*sqrt({self.field.disc})" if abs(self.b) != 1 else f"sqrt({self.field.disc})"
        if not self.a:
            return ("-" if self.b < 0 else "") + root
        return f"{self.a}{'-' if self.b < 0 else '+'}{root}"

    __str__ = __repr__



_SPEC_RE = re.compile(r"^F:(\d+)(?:\^(\d+))?(?::\[([\d,\s-]+)\])?$")


def parse_field(text: str):
    """Parse ``Q``, ``F:p``, ``F:p^a`` or ``F:p^a:[c0,...,1]``."""
    s = text.strip().replace(" ", "")
    if s in ("Q", "QQ"):
        return QQ
    m = _SPEC_RE.match(s)
    if not m:
        raise FieldSpecError(f"malformed field spec {text!r}")
    p = int(m.group(1))
    a = int(m.group(2) or 1)
    if p == 2:
        raise CharTwo("characteristic 2 is not supported", p=p)
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime", p=p)
    if m.group(3):
        mod = [int(c) for c in m.group(3).split(",")]
        if len(mod) - 1 != a:
            raise FieldSpecError(f"modulus degree {len(mod) - 1} does not match exponent {a}")
        return FiniteField(p, mod)
    if a == 1:
        return FiniteField(p)
    return FiniteField(p, first_irreducible(p, a))


def make_field(spec):
    """Accept a spec string or an existing field."""
    if isinstance(spec, (Rationals, FiniteField)):
        return spec
    return parse_field(spec)


def extension_of_degree(field: FiniteField, k: int) -> FiniteField:
    """F_{p^(a*k)} containing the prime field; only used for prime ``field``."""
    if field.a != 1:
        from .errors import NotSupported

        raise NotSupported("field extensions are only built over prime fields")
    return FiniteField(field.p, first_irreducible(field.p, k)) if k > 1 else field
