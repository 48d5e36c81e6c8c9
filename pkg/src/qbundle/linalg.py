"""Exact dense linear algebra over a field (lists of field elements)."""

from __future__ import annotations


def _copy(rows):
    return [list(r) for r in rows]


def row_echelon(rows, field):
    """Reduced row echelon form; returns (matrix, pivot columns)."""
    m = _copy(rows)
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = field.one / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows, field) -> int:
    return len(row_echelon(rows, field)[1]) if rows else 0


def nullspace(rows, field, ncols=None):
    """Basis of {v : rows @ v = 0}, deterministic (one vector per free column)."""
    if not rows:
        n = ncols or 0
        return [[field.one if i == j else field.zero for i in range(n)] for j in range(n)]
    ncols = len(rows[0])
    m, pivots = row_echelon(rows, field)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [field.zero] * ncols
        v[fc] = field.one
        for r, pc in enumerate(pivots):
            v[pc] = -m[r][fc]
        basis.append(v)
    return basis


def det(rows, field):
    m = _copy(rows)
    n = len(m)
    result = field.one
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c]), None)
        if piv is None:
            return field.zero
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            result = -result
        result = result * m[c][c]
        inv = field.one / m[c][c]
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] * inv
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return result


def inverse(rows, field):
    n = len(rows)
    aug = [list(r) + [field.one if i == j else field.zero for j in range(n)] for i, r in enumerate(rows)]
    m, pivots = row_echelon(aug, field)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [r[n:] for r in m]


def matvec(m, v, field):
    out = []
    for row in m:
        s = field.zero
        for a, b in zip(row, v):
            if a and b:
                s = s + a * b
        out.append(s)
    return out


def diagonalize_symmetric(gram, field):
    """Congruence-diagonalize a symmetric matrix (char != 2).

    Returns the list of nonzero diagonal entries; their count is the rank and
    their product is the discriminant of the nondegenerate part (up to squares).
    """
    m = _copy(gram)
    n = len(m)
    diag = []
    active = list(range(n))
    while active:
        piv = next((i for i in active if m[i][i]), None)
        if piv is None:
            pair = next(((i, j) for i in active for j in active if i < j and m[i][j]), None)
            if pair is None:
                break
            i, j = pair
            # e_i <- e_i + e_j creates a nonzero diagonal entry 2*m[i][j] (+ m[j][j] = 0)
            for k in range(n):
                m[i][k] = m[i][k] + m[j][k]
            for k in range(n):
                m[k][i] = m[k][i] + m[k][j]
            piv = i
        d = m[piv][piv]
        inv = field.one / d
        diag.append(d)
        active.remove(piv)
        for i in active:
            if m[i][piv]:
                f = m[i][piv] * inv
                for k in range(n):
                    m[i][k] = m[i][k] - f * m[piv][k]
                for k in range(n):
                    m[k][i] = m[k][i] - f * m[k][piv]
    return diag
