"""Point counting over finite fields and height-bounded counting over Q.

A *layout* describes the ambient product of projective spaces as a list of
``(first variable index, number of variables)`` blocks inside a
:class:`~qbundle.poly.VarSpec`.  Enumeration runs over the flat index of the
product of normalized representatives, with the first block most significant,
in fixed-size chunks that are farmed out to a thread pool and summed, so
results do not depend on the thread count.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from math import lcm

import numpy as np

from . import kernels
from .enumerate import ProductPoint, points_up_to_height, projective_points_array
from .errors import BudgetExceeded, HybridMismatch, InfiniteField, NotSupported
from .linalg import diagonalize_symmetric

CHUNK = 1 << 16


def default_threads() -> int:
    return os.cpu_count() or 1


@dataclass
class CountReport:
    count: int
    method: str  # BruteForce | FiberwiseFormula | Hybrid
    elapsed_ms: int
    field: str
    details: dict = dc_field(default_factory=dict)

    def to_json(self, timing: bool = True) -> dict:
        out = {"count": self.count, "method": self.method, "field": self.field}
        if timing:
            out["elapsed_ms"] = self.elapsed_ms
        if self.details:
            out["details"] = self.details
        return out


def _ms(start):
    return int((time.perf_counter() - start) * 1000)


def _map(fn, items, threads):
    threads = threads or default_threads()
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# --- finite fields: packing and brute force --------------------------------------------------

def bundle_layout(vs):
    """Base block x and fiber block y of a VarSpec."""
    return [(0, vs.n_x), (vs.n_x, vs.n_y)]


def fiber_layout(vs):
    return [(vs.n_x, vs.n_y)]


class PackedSystem:
    """Polynomials and ambient representatives encoded as integer arrays."""

    def __init__(self, polys, layout, field):
        if not field.is_finite:
            raise InfiniteField("point counts need a finite field")
        self.field = field
        self.layout = list(layout)
        polys = [p.change_field(field) if p.field != field else p for p in polys]
        self.polys = [p for p in polys]
        nvars = polys[0].vs.nvars if polys else max(o + n for o, n in layout)
        q = field.q
        add, mul = field.tables
        coef, exps, starts = [], [], [0]
        maxdeg = 1
        for p in self.polys:
            for e, c in p.sorted_terms():
                coef.append(c.v)
                exps.append(e)
                maxdeg = max(maxdeg, max(e) if e else 0)
            starts.append(len(coef))
        powtab = np.zeros((q, maxdeg + 1), dtype=np.int64)
        powtab[:, 0] = 1
        r = np.arange(q)
        for e in range(1, maxdeg + 1):
            powtab[:, e] = mul[powtab[:, e - 1], r]
        blocks = [projective_points_array(n, q) for _, n in layout]
        width = max(n for _, n in layout)
        reps = np.zeros((sum(b.shape[0] for b in blocks), width), dtype=np.int64)
        offs = []
        o = 0
        for b in blocks:
            reps[o : o + b.shape[0], : b.shape[1]] = b
            offs.append(o)
            o += b.shape[0]
        self.block_reps = blocks
        self.radices = np.array([b.shape[0] for b in blocks], dtype=np.int64)
        self.total = int(np.prod(self.radices)) if len(blocks) else 1
        self.args = (
            self.radices,
            np.array(offs, dtype=np.int64),
            np.array([o for o, _ in layout], dtype=np.int64),
            np.array([n for _, n in layout], dtype=np.int64),
            reps,
            np.array(coef, dtype=np.int64),
            np.array(exps, dtype=np.int64).reshape(len(coef), nvars),
            np.array(starts, dtype=np.int64),
            add.astype(np.int64),
            mul.astype(np.int64),
            powtab,
        )

    def mask(self, start, stop, backend=None):
        return kernels.ff_mask(start, stop, self.args, backend)

    def decode(self, idx: int, nvars: int):
        """Full coordinate vector (field elements) of flat index ``idx``."""
        el = self.field.elements()
        vec = [self.field.zero] * nvars
        for b in range(len(self.layout) - 1, -1, -1):
            d = idx % int(self.radices[b])
            idx //= int(self.radices[b])
            off, n = self.layout[b]
            for k in range(n):
                vec[off + k] = el[int(self.block_reps[b][d, k])]
        return vec

    def point(self, idx: int) -> ProductPoint:
        vec = self.decode(idx, max(o + n for o, n in self.layout))
        return ProductPoint(tuple(tuple(vec[o : o + n]) for o, n in self.layout))


def _chunks(total):
    return [(s, min(total, s + CHUNK)) for s in range(0, total, CHUNK)]


def brute_count(polys, layout, field, threads=None, backend=None) -> int:
    packed = PackedSystem(polys, layout, field)
    return int(sum(_map(lambda c: int(packed.mask(*c, backend).sum()), _chunks(packed.total), threads)))


def iter_points(polys, layout, field, threads=None, backend=None):
    """Yield (flat index, ProductPoint) of all zeros in enumeration order."""
    packed = PackedSystem(polys, layout, field)
    chunks = _chunks(packed.total)
    batch = max(1, threads or default_threads())
    for k in range(0, len(chunks), batch):
        group = chunks[k : k + batch]
        masks = _map(lambda c: packed.mask(*c, backend), group, threads)
        for (s, _), m in zip(group, masks):
            for off in np.nonzero(m)[0]:
                idx = s + int(off)
                yield idx, packed.point(idx)


def first_point(polys, layout, field, threads=None):
    """Minimum-index zero (deterministic regardless of threads), or None."""
    for _, pt in iter_points(polys, layout, field, threads):
        return pt
    return None


def count_points_fq(polys, layout, field, threads=None, backend=None) -> CountReport:
    start = time.perf_counter()
    n = brute_count(polys, layout, field, threads, backend)
    return CountReport(n, "BruteForce", _ms(start), field.spec)


# --- closed-form fiber counts ----------------------------------------------------------------

@lru_cache(maxsize=None)
def closed_form_gate():
    """Check the closed quadric count on every form in <= 4 variables over F_3 and F_5."""
    summary = {}
    for p in (3, 5):
        for nvars in range(1, 5):
            total, bad = kernels.quadric_gate(p, nvars)
            summary[f"F{p}/{nvars}"] = total
            if bad:
                raise RuntimeError(f"closed-form quadric count failed on {bad} forms over F_{p} in {nvars} variables")
    return summary


_closed = getattr(kernels.quadric_count_closed, "py_func", kernels.quadric_count_closed)


def quadric_count(gram, field) -> int:
    """Points in P^{N-1}(F_q) of the quadric with the given Gram matrix."""
    diag = diagonalize_symmetric(gram, field)
    r = len(diag)
    chi = 0
    if r and r % 2 == 0:
        disc = field.one
        for d in diag:
            disc = disc * d
        if (r // 2) % 2:
            disc = -disc
        chi = field.quadratic_character(disc)
    return _closed(len(gram), r, chi, field.q)


def fiberwise_count(bundle, field) -> int:
    closed_form_gate()
    from .enumerate import projective_points

    g = bundle.gram()
    entries = {(i, j): g[i, j] for i in range(bundle.size) for j in range(i, bundle.size)}
    zeros_y = [field.zero] * bundle.vs.n_y
    total = 0
    for x in projective_points(field, bundle.vs.n_x):
        vals = list(x) + zeros_y
        gram = [[None] * bundle.size for _ in range(bundle.size)]
        for (i, j), p in entries.items():
            v = p.evaluate(vals) if p else field.zero
            gram[i][j] = gram[j][i] = v
        total += quadric_count(gram, field)
    return total


def count_bundle(bundle, field=None, method="brute", threads=None, backend=None) -> CountReport:
    """Count F_q-points of a bundle (fiberwise over normalized base representatives)."""
    field = field or bundle.field
    if not field.is_finite:
        raise InfiniteField("point counts need a finite field")
    if bundle.field != field:
        bundle = bundle.change_field(field)
    start = time.perf_counter()
    if method == "brute":
        n = brute_count([bundle.equation()], bundle_layout(bundle.vs), field, threads, backend)
        return CountReport(n, "BruteForce", _ms(start), field.spec)
    if method == "fiberwise":
        n = fiberwise_count(bundle, field)
        return CountReport(n, "FiberwiseFormula", _ms(start), field.spec)
    if method == "hybrid":
        a = fiberwise_count(bundle, field)
        b = brute_count([bundle.equation()], bundle_layout(bundle.vs), field, threads, backend)
        if a != b:
            raise HybridMismatch(f"formula {a} != brute force {b}", formula=a, brute=b)
        return CountReport(a, "Hybrid", _ms(start), field.spec, {"formula": a, "brute_force": b})
    raise NotSupported(f"unknown counting method {method!r}")


# --- height-bounded counting over Q ----------------------------------------------------------

def integral_poly_terms(p):
    """Integer coefficient terms of ``p`` scaled by the lcm of its denominators."""
    den = lcm(*(c.denominator for c in p.terms.values())) if p.terms else 1
    return [(e, int(c * den)) for e, c in p.sorted_terms()]


class PackedHeight:
    def __init__(self, polys, layout, chart, bound, convention):
        if len(layout) > 2:
            raise NotSupported("height counting supports at most two projective factors")
        self.bound = bound
        outer_b = max(range(len(layout)), key=lambda b: (layout[b][1], b))
        inner_b = next((b for b in range(len(layout)) if b != outer_b), None)
        self.outer = layout[outer_b]
        self.inner = layout[inner_b] if inner_b is not None else None
        chart = set(chart)
        o_off, o_n = self.outer
        self.outer_chart = np.array([(o_off + k) in chart for k in range(o_n)], dtype=np.bool_)
        if self.inner is not None:
            i_off, i_n = self.inner
            inner_pts = [
                (v, h)
                for v, h in points_up_to_height(i_n, bound)
                if all(v[k] != 0 for k in range(i_n) if (i_off + k) in chart)
            ]
        else:
            i_off, i_n = 0, 0
            inner_pts = [((), 1)]
        mus = []
        g_mu, g_start, p_start, t_coef, t_exps = [], [0], [0], [], []
        limit = 0
        for p in polys:
            groups = {}
            absum = 0
            for e, c in integral_poly_terms(p):
                mu = tuple(e[i_off : i_off + i_n])
                groups.setdefault(mu, []).append((tuple(e[o_off : o_off + o_n]), c))
                absum += abs(c) * bound ** sum(e)
            limit = max(limit, absum)
            for mu in sorted(groups):
                if mu not in mus:
                    mus.append(mu)
                g_mu.append(mus.index(mu))
                for oe, c in groups[mu]:
                    t_coef.append(c)
                    t_exps.append(oe)
                g_start.append(len(t_coef))
            p_start.append(len(g_mu))
        if limit >= 2**62:
            raise BudgetExceeded("height bound too large for 64-bit evaluation", bound=bound)
        mono = np.zeros((len(inner_pts), max(1, len(mus))), dtype=np.int64)
        for i, (v, _) in enumerate(inner_pts):
            for j, mu in enumerate(mus):
                val = 1
                for c, e in zip(v, mu):
                    val *= c**e
                mono[i, j] = val
        self.inner_count = len(inner_pts)
        self.args = (
            o_n,
            bound,
            self.outer_chart,
            mono,
            np.array([h for _, h in inner_pts], dtype=np.int64),
            np.array(g_mu, dtype=np.int64),
            np.array(g_start, dtype=np.int64),
            np.array(p_start, dtype=np.int64),
            np.array(t_coef, dtype=np.int64),
            np.array(t_exps, dtype=np.int64).reshape(len(t_coef), o_n),
            convention == "product",
        )
        lo = 1 if self.outer_chart[0] else 0
        self.first_values = list(range(lo, bound + 1))


def count_rational_height(polys, layout, chart=(), bound=1, convention="max", threads=None,
                          time_cap_ms=None, backend=None) -> CountReport:
    """Number of Q-points with height <= bound, nonzero on the ``chart`` variables."""
    if convention not in ("max", "product"):
        raise NotSupported(f"unknown height convention {convention!r}")
    start = time.perf_counter()
    packed = PackedHeight(polys, layout, chart, bound, convention)
    deadline = None if time_cap_ms is None else start + time_cap_ms / 1000

    def task(v):
        if deadline is not None and time.perf_counter() > deadline:
            raise BudgetExceeded("time cap exceeded", time_cap_ms=time_cap_ms)
        return kernels.height_count([v], packed.args, backend)

    n = sum(_map(task, packed.first_values, threads))
    return CountReport(n, "BruteForce", _ms(start), "Q", {"bound": bound, "convention": convention})
