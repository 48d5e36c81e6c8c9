"""Normalized projective representatives, product points and height order.

Finite fields: a point of P^n(F_q) is stored with its first nonzero coordinate
equal to 1; representatives are listed in lexicographic order of their code
vectors, so [0:...:0:1] comes first.

Rationals: a point is a coprime integer vector whose first nonzero entry is
positive.  Height order sorts by height, then lexicographically with the
integers ordered 0, 1, -1, 2, -2, ...
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd, lcm

import numpy as np


@dataclass(frozen=True)
class ProductPoint:
    """Point of a product of projective spaces, one coordinate tuple per factor."""

    blocks: tuple

    def __post_init__(self):
        for blk in self.blocks:
            if not any(blk):
                raise ValueError("a projective factor has all coordinates zero")

    @classmethod
    def make(cls, field, *blocks):
        return cls(tuple(normalize(field, [field(c) for c in blk]) for blk in blocks))

    def flat(self):
        return [c for blk in self.blocks for c in blk]

    def integral(self):
        """Coprime integer coordinates (rationals only)."""
        return tuple(integral_vector(blk) for blk in self.blocks)

    def to_json(self, field=None):
        fmt = field.format if field is not None else str
        return [[fmt(c) for c in blk] for blk in self.blocks]

    def __str__(self):
        inner = ",".join("[" + ":".join(str(c) for c in blk) + "]" for blk in self.blocks)
        return f"({inner})" if len(self.blocks) > 1 else inner


def normalize(field, vec):
    vec = [field(c) for c in vec]
    lead = next((c for c in vec if c), None)
    if lead is None:
        raise ValueError("zero vector has no projective class")
    inv = field.one / lead
    return tuple(c * inv for c in vec)


def integral_vector(vec):
    vec = [Fraction(c) for c in vec]
    den = lcm(*(c.denominator for c in vec)) if vec else 1
    ints = [int(c * den) for c in vec]
    g = 0
    for v in ints:
        g = gcd(g, v)
    ints = [v // g for v in ints]
    lead = next(v for v in ints if v)
    return tuple(ints if lead > 0 else [-v for v in ints])


# --- finite fields --------------------------------------------------------------------

def projective_count(n: int, q: int) -> int:
    return (q ** (n + 1) - 1) // (q - 1)


def projective_points_array(nvars: int, q: int) -> np.ndarray:
    """All normalized representatives of P^{nvars-1}(F_q) as code rows, lexicographic."""
    rows = []
    for lead in range(nvars - 1, -1, -1):
        tail = nvars - 1 - lead
        if tail:
            grid = np.indices((q,) * tail, dtype=np.int64).reshape(tail, -1).T
        else:
            grid = np.zeros((1, 0), dtype=np.int64)
        block = np.zeros((grid.shape[0], nvars), dtype=np.int64)
        block[:, lead] = 1
        block[:, lead + 1 :] = grid
        rows.append(block)
    return np.concatenate(rows, axis=0)


def projective_points(field, nvars: int):
    """Normalized representatives as tuples of field elements, same order as the array."""
    arr = projective_points_array(nvars, field.q)
    el = field.elements()
    return [tuple(el[c] for c in row) for row in arr]


# --- rationals: height order -------------------------------------------------------------

def coord_key(c: int):
    return (abs(c), c < 0)


def vector_key(vec):
    return tuple(coord_key(c) for c in vec)


def points_of_exact_height(nvars: int, h: int):
    """Coprime integer vectors with max |coord| = h and first nonzero entry positive."""
    out = []
    for vec in product(range(-h, h + 1), repeat=nvars):
        lead = next((v for v in vec if v), 0)
        if lead <= 0:
            continue
        if max(abs(v) for v in vec) != h:
            continue
        g = 0
        for v in vec:
            g = gcd(g, v)
        if g == 1:
            out.append(vec)
    out.sort(key=vector_key)
    return out


def _level_tuples(k, H, product_convention):
    """Tuples of factor heights whose combined height is exactly H."""
    if product_convention:
        def rec(k, rest):
            if k == 1:
                yield (rest,)
                return
            for d in range(1, rest + 1):
                if rest % d == 0:
                    for tail in rec(k - 1, rest // d):
                        yield (d,) + tail
        yield from rec(k, H)
    else:
        for hs in product(range(1, H + 1), repeat=k):
            if max(hs) == H:
                yield hs


def height_stream(nvars_per_block, bound: int, convention: str = "max"):
    """Yield ``(height, ProductPoint-of-ints)`` in height-then-lexicographic order."""
    if bound < 1:
        raise ValueError("height bound must be positive")
    prod_conv = convention == "product"
    cache = {}

    def level(b, h):
        key = (nvars_per_block[b], h)
        if key not in cache:
            cache[key] = points_of_exact_height(nvars_per_block[b], h)
        return cache[key]

    k = len(nvars_per_block)
    for H in range(1, bound + 1):
        batch = []
        for hs in _level_tuples(k, H, prod_conv):
            for combo in product(*(level(b, h) for b, h in enumerate(hs))):
                batch.append(combo)
        batch.sort(key=lambda combo: tuple(vector_key(v) for v in combo))
        for combo in batch:
            yield H, combo


def points_up_to_height(nvars: int, bound: int):
    """(vector, height) pairs for P^{nvars-1}(Q) with height <= bound, height order."""
    out = []
    for h in range(1, bound + 1):
        out.extend((v, h) for v in points_of_exact_height(nvars, h))
    return out
