"""Hot loops: finite-field system evaluation, height-bounded counting, and the
closed-form quadric gate.

Each kernel exists twice: a numba version (``*_nb``) and a vectorized numpy
version (``*_np``).  The public wrappers pick one according to
:data:`qbundle._jit.JIT_ENABLED`; passing ``backend=`` forces a choice (the
benchmark and the tests use this to compare both).
"""

from __future__ import annotations

import numpy as np

from ._jit import JIT_ENABLED, njit

# --- shared scalar helpers ----------------------------------------------------------


@njit
def quadric_count_closed(nvars, rank, chi, q):
    """Projective zeros in P^{nvars-1}(F_q) of a quadric of the given rank.

    ``chi`` is the quadratic character of (-1)^(rank/2) * disc for even rank
    (ignored for odd rank).
    """
    if rank == 0:
        core = 1
    elif rank % 2 == 1:
        core = q ** (rank - 1)
    else:
        core = q ** (rank - 1) + (q - 1) * q ** (rank // 2 - 1) * chi
    affine = core * q ** (nvars - rank)
    return (affine - 1) // (q - 1)


@njit
def _powmod(a, e, p):
    result = 1
    a %= p
    while e > 0:
        if e & 1:
            result = result * a % p
        a = a * a % p
        e >>= 1
    return result


@njit
def sym_rank_disc_mod_p(g, p):
    """Rank and nondegenerate discriminant of a symmetric matrix over F_p (copied)."""
    n = g.shape[0]
    m = g.copy()
    active = np.ones(n, np.bool_)
    rank = 0
    disc = 1
    for _ in range(n):
        piv = -1
        for i in range(n):
            if active[i] and m[i, i] % p != 0:
                piv = i
                break
        if piv < 0:
            pi = -1
            pj = -1
            for i in range(n):
                for j in range(i + 1, n):
                    if pi < 0 and active[i] and active[j] and m[i, j] % p != 0:
                        pi = i
                        pj = j
            if pi < 0:
                break
            for k in range(n):
                m[pi, k] = (m[pi, k] + m[pj, k]) % p
            for k in range(n):
                m[k, pi] = (m[k, pi] + m[k, pj]) % p
            piv = pi
        d = m[piv, piv] % p
        inv = _powmod(d, p - 2, p)
        rank += 1
        disc = disc * d % p
        active[piv] = False
        for i in range(n):
            if active[i] and m[i, piv] % p != 0:
                f = m[i, piv] * inv % p
                for k in range(n):
                    m[i, k] = (m[i, k] - f * m[piv, k]) % p
                for k in range(n):
                    m[k, i] = (m[k, i] - f * m[k, piv]) % p
    return rank, disc


# --- finite-field zero masks ---------------------------------------------------------


@njit
def _ff_mask_nb(start, stop, radices, rep_off, var_off, var_len, reps, coef, exps, poly_start, add, mul, powtab, out):
    nb = radices.shape[0]
    nvars = exps.shape[1]
    npoly = poly_start.shape[0] - 1
    pt = np.zeros(nvars, np.int64)
    for idx in range(start, stop):
        r = idx
        for b in range(nb - 1, -1, -1):
            d = r % radices[b]
            r //= radices[b]
            row = rep_off[b] + d
            for k in range(var_len[b]):
                pt[var_off[b] + k] = reps[row, k]
        ok = 1
        for pi in range(npoly):
            val = 0
            for t in range(poly_start[pi], poly_start[pi + 1]):
                m = coef[t]
                for v in range(nvars):
                    e = exps[t, v]
                    if e > 0:
                        m = mul[m, powtab[pt[v], e]]
                        if m == 0:
                            break
                val = add[val, m]
            if val != 0:
                ok = 0
                break
        out[idx - start] = ok


def _ff_mask_np(start, stop, radices, rep_off, var_off, var_len, reps, coef, exps, poly_start, add, mul, powtab, out):
    idx = np.arange(start, stop, dtype=np.int64)
    nvars = exps.shape[1]
    pt = np.zeros((idx.shape[0], nvars), dtype=np.int64)
    r = idx.copy()
    for b in range(radices.shape[0] - 1, -1, -1):
        d = r % radices[b]
        r //= radices[b]
        rows = reps[rep_off[b] + d]
        pt[:, var_off[b] : var_off[b] + var_len[b]] = rows[:, : var_len[b]]
    ok = np.ones(idx.shape[0], dtype=bool)
    for pi in range(poly_start.shape[0] - 1):
        val = np.zeros(idx.shape[0], dtype=np.int64)
        for t in range(poly_start[pi], poly_start[pi + 1]):
            m = np.full(idx.shape[0], coef[t], dtype=np.int64)
            for v in np.nonzero(exps[t])[0]:
                m = mul[m, powtab[pt[:, v], exps[t, v]]]
            val = add[val, m]
        ok &= val == 0
    out[:] = ok


def ff_mask(start, stop, packed, backend=None):
    """Zero mask for flat indices ``[start, stop)`` of a packed product enumeration."""
    out = np.zeros(stop - start, dtype=np.uint8)
    use_nb = JIT_ENABLED if backend is None else backend == "numba"
    fn = _ff_mask_nb if use_nb else _ff_mask_np
    fn(start, stop, *packed, out)
    return out


# --- height-bounded counting over Q -------------------------------------------------------


@njit
def _gcd(a, b):
    a = abs(a)
    b = abs(b)
    while b:
        a, b = b, a % b
    return a


@njit
def _height_count_nb(
    first_values, m, bound, chart, inner_mono, inner_h, g_mu, g_start, p_start, t_coef, t_exps, product
):
    count = 0
    G = g_mu.shape[0]
    npoly = p_start.shape[0] - 1
    vals = np.zeros(G, np.int64)
    y = np.zeros(m, np.int64)
    side = 2 * bound + 1
    rest = side ** (m - 1)
    ninner = inner_h.shape[0]
    for fv in first_values:
        y[0] = fv
        for code in range(rest):
            c = code
            for k in range(m - 1, 0, -1):
                y[k] = c % side - bound
                c //= side
            # normalization: first nonzero positive, coprime, chart
            first = 0
            for k in range(m):
                if y[k] != 0:
                    first = y[k]
                    break
            if first <= 0:
                continue
            g = 0
            h = 0
            for k in range(m):
                g = _gcd(g, y[k])
                a = abs(y[k])
                if a > h:
                    h = a
            if g != 1:
                continue
            skip = False
            for k in range(m):
                if chart[k] and y[k] == 0:
                    skip = True
            if skip:
                continue
            for gi in range(G):
                s = 0
                for t in range(g_start[gi], g_start[gi + 1]):
                    term = t_coef[t]
                    for v in range(m):
                        for _ in range(t_exps[t, v]):
                            term *= y[v]
                    s += term
                vals[gi] = s
            for i in range(ninner):
                if product:
                    if h * inner_h[i] > bound:
                        continue
                ok = True
                for pi in range(npoly):
                    s = 0
                    for gi in range(p_start[pi], p_start[pi + 1]):
                        s += inner_mono[i, g_mu[gi]] * vals[gi]
                    if s != 0:
                        ok = False
                        break
                if ok:
                    count += 1
    return count


def _height_count_np(
    first_values, m, bound, chart, inner_mono, inner_h, g_mu, g_start, p_start, t_coef, t_exps, product
):
    side = 2 * bound + 1
    count = 0
    grids = np.indices((side,) * (m - 1), dtype=np.int64).reshape(m - 1, -1).T - bound
    for fv in first_values:
        ys = np.concatenate([np.full((grids.shape[0], 1), fv, dtype=np.int64), grids], axis=1)
        nz = ys != 0
        has = nz.any(axis=1)
        first_idx = np.argmax(nz, axis=1)
        first = ys[np.arange(ys.shape[0]), first_idx]
        keep = has & (first > 0)
        keep &= np.gcd.reduce(np.abs(ys), axis=1) == 1
        for k in range(m):
            if chart[k]:
                keep &= ys[:, k] != 0
        ys = ys[keep]
        if ys.shape[0] == 0:
            continue
        h = np.abs(ys).max(axis=1)
        vals = np.zeros((ys.shape[0], g_mu.shape[0]), dtype=np.int64)
        for gi in range(g_mu.shape[0]):
            s = np.zeros(ys.shape[0], dtype=np.int64)
            for t in range(g_start[gi], g_start[gi + 1]):
                term = np.full(ys.shape[0], t_coef[t], dtype=np.int64)
                for v in np.nonzero(t_exps[t])[0]:
                    term = term * ys[:, v] ** t_exps[t, v]
                s += term
            vals[:, gi] = s
        for i in range(inner_h.shape[0]):
            ok = np.ones(ys.shape[0], dtype=bool)
            if product:
                ok &= h * inner_h[i] <= bound
            for pi in range(p_start.shape[0] - 1):
                sl = slice(p_start[pi], p_start[pi + 1])
                s = vals[:, sl] @ inner_mono[i, g_mu[sl]]
                ok &= s == 0
            count += int(ok.sum())
    return count


def height_count(first_values, packed, backend=None):
    use_nb = JIT_ENABLED if backend is None else backend == "numba"
    fn = _height_count_nb if use_nb else _height_count_np
    return int(fn(np.asarray(first_values, dtype=np.int64), *packed))


# --- closed-form quadric gate ------------------------------------------------------------


@njit
def _gate_nb(p, nvars, monos, pairs):
    """Compare brute-force and closed-form counts for every quadric in ``nvars`` variables."""
    K = pairs.shape[0]
    P = monos.shape[1]
    vals = np.zeros(P, np.int64)
    coeffs = np.zeros(K, np.int64)
    inv2 = (p + 1) // 2
    g = np.zeros((nvars, nvars), np.int64)
    total = p**K
    mismatches = 0
    for _ in range(total):
        zeros = 0
        for t in range(P):
            if vals[t] == 0:
                zeros += 1
        for k in range(K):
            i = pairs[k, 0]
            j = pairs[k, 1]
            if i == j:
                g[i, i] = coeffs[k]
            else:
                g[i, j] = coeffs[k] * inv2 % p
                g[j, i] = g[i, j]
        rank, disc = sym_rank_disc_mod_p(g, p)
        chi = 0
        if rank % 2 == 0 and rank > 0:
            sgn = disc if (rank // 2) % 2 == 0 else (p - disc) % p
            chi = 1 if _powmod(sgn, (p - 1) // 2, p) == 1 else -1
        if quadric_count_closed(nvars, rank, chi, p) != zeros:
            mismatches += 1
        k = 0
        while k < K:
            coeffs[k] += 1
            for t in range(P):
                vals[t] = (vals[t] + monos[k, t]) % p
            if coeffs[k] == p:
                coeffs[k] = 0
                k += 1
            else:
                break
    return total, mismatches


def _batch_det(a, p):
    """Integer determinants of a batch of k x k matrices by cofactor expansion, mod p."""
    k = a.shape[1]
    if k == 1:
        return a[:, 0, 0] % p
    total = np.zeros(a.shape[0], dtype=np.int64)
    for c in range(k):
        minor = np.delete(np.delete(a, 0, axis=1), c, axis=2)
        term = a[:, 0, c] * _batch_det(minor, p) % p
        total = (total + term) % p if c % 2 == 0 else (total - term) % p
    return total


def _gate_np(p, nvars, monos, pairs, chunk=1 << 15):
    from itertools import combinations

    K = pairs.shape[0]
    total = p**K
    inv2 = (p + 1) // 2
    subsets = [s for r in range(nvars, 0, -1) for s in combinations(range(nvars), r)]
    mismatches = 0
    for s0 in range(0, total, chunk):
        idx = np.arange(s0, min(total, s0 + chunk), dtype=np.int64)
        coeffs = np.stack([(idx // p**k) % p for k in range(K)], axis=1)
        zeros = ((coeffs @ monos) % p == 0).sum(axis=1)
        g = np.zeros((idx.shape[0], nvars, nvars), dtype=np.int64)
        for k, (i, j) in enumerate(pairs):
            if i == j:
                g[:, i, i] = coeffs[:, k]
            else:
                g[:, i, j] = coeffs[:, k] * inv2 % p
                g[:, j, i] = g[:, i, j]
        rank = np.zeros(idx.shape[0], dtype=np.int64)
        disc = np.ones(idx.shape[0], dtype=np.int64)
        # a symmetric matrix of rank r has a nonzero principal r-minor, and
        # every such minor has the square class of the nondegenerate part
        for sub in subsets:
            d = _batch_det(g[:, sub][:, :, sub], p)
            take = (rank == 0) & (d != 0)
            rank[take] = len(sub)
            disc[take] = d[take]
        sgn = np.where((rank // 2) % 2 == 0, disc, (p - disc) % p)
        pw = np.ones_like(sgn)
        base = sgn.copy()
        e = (p - 1) // 2
        while e:
            if e & 1:
                pw = pw * base % p
            base = base * base % p
            e >>= 1
        chi = np.where(pw == 1, 1, -1)
        core = np.where(
            rank == 0,
            1,
            np.where(rank % 2 == 1, p ** np.maximum(rank - 1, 0), p ** np.maximum(rank - 1, 0) + (p - 1) * p ** np.maximum(rank // 2 - 1, 0) * chi),
        )
        expected = (core * p ** (nvars - rank) - 1) // (p - 1)
        mismatches += int((expected != zeros).sum())
    return total, mismatches


def quadric_gate(p, nvars, backend=None):
    """(forms checked, mismatches) for all quadratic forms in ``nvars`` variables over F_p."""
    from .enumerate import projective_points_array

    pts = projective_points_array(nvars, p)  # P x nvars residues
    pairs = np.array([(i, j) for i in range(nvars) for j in range(i, nvars)], dtype=np.int64)
    monos = np.array([(pts[:, i] * pts[:, j]) % p for i, j in pairs], dtype=np.int64)
    use_nb = JIT_ENABLED if backend is None else backend == "numba"
    fn = _gate_nb if use_nb else _gate_np
    total, bad = fn(p, nvars, monos, pairs)
    return int(total), int(bad)
