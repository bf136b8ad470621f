"""Small dense linear algebra kernel.

Two lanes that never mix: exact Gaussian elimination over fractions.Fraction
(no numpy anywhere in that path), and float helpers that defer to numpy with
the package-wide singular value cutoff 1e-8 * sigma_max for rank decisions.
Matrices are lists/tuples of rows; vectors are flat sequences.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import G2KitError

FLOAT_RANK_CUTOFF = 1e-8


def is_exact_values(vals) -> bool:
    """True when no value is a float (ints and Fractions count as exact)."""
    return all(not isinstance(v, float) for v in vals)


def mat_rows(m):
    return [list(row) for row in m]


def identity(n, exact: bool = True):
    one = Fraction(1) if exact else 1.0
    zero = Fraction(0) if exact else 0.0
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def transpose(m):
    return [list(col) for col in zip(*m)]


def matmul(a, b):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def matvec(m, v):
    return [sum(x * y for x, y in zip(row, v)) for row in m]


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a, s):
    return [[s * x for x in row] for row in a]


def mat_eq(a, b) -> bool:
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def mat_max_abs(a):
    return max((abs(x) for row in a for x in row), default=0)


def rref(m):
    """Reduced row echelon form; returns (rows, pivot_columns)."""
    rows = mat_rows(m)
    if not rows:
        return rows, []
    nr, nc = len(rows), len(rows[0])
    pivots = []
    r = 0
    for c in range(nc):
        pivot = None
        for i in range(r, nr):
            if rows[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(nr):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return rows, pivots


def rank_exact(m) -> int:
    return len(rref(m)[1])


def det_exact(m):
    """Determinant by fraction elimination with partial pivoting on != 0."""
    rows = mat_rows(m)
    n = len(rows)
    det = Fraction(1)
    for c in range(n):
        pivot = None
        for i in range(c, n):
            if rows[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            rows[c], rows[pivot] = rows[pivot], rows[c]
            det = -det
        pv = rows[c][c]
        det *= pv
        inv = 1 / Fraction(pv)
        for i in range(c + 1, n):
            if rows[i][c] != 0:
                f = rows[i][c] * inv
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[c])]
    return det


def inv_exact(m):
    n = len(m)
    aug = [list(row) + ident for row, ident in zip(mat_rows(m), identity(n))]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        raise G2KitError("matrix is singular")
    return [row[n:] for row in red]


def solve_exact(a, b):
    """Any exact solution of a x = b (consistent, possibly overdetermined).

    Raises G2KitError when the system is inconsistent.  Free variables are
    set to zero; for injective a the solution is the unique one.
    """
    nr = len(a)
    nc = len(a[0]) if nr else 0
    aug = [list(row) + [bv] for row, bv in zip(mat_rows(a), b)]
    red, pivots = rref(aug)
    if nc in pivots:
        raise G2KitError("inconsistent linear system")
    x = [Fraction(0)] * nc
    for r, c in enumerate(pivots):
        x[c] = red[r][nc]
    return x


def nullspace_exact(m):
    """Basis of the exact kernel, one vector per free column."""
    nr = len(m)
    nc = len(m[0]) if nr else 0
    red, pivots = rref(m)
    free = [c for c in range(nc) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * nc
        v[fc] = Fraction(1)
        for r, c in enumerate(pivots):
            v[c] = -red[r][fc]
        basis.append(v)
    return basis


def _np(m):
    return np.asarray(m, dtype=float)


def rank_float(m, cutoff_ratio: float = FLOAT_RANK_CUTOFF) -> int:
    arr = _np(m)
    if arr.size == 0:
        return 0
    sv = np.linalg.svd(arr, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > cutoff_ratio * sv[0]))


def nullspace_float(m, cutoff_ratio: float = FLOAT_RANK_CUTOFF):
    """Orthonormal kernel basis (list of vectors) via SVD."""
    arr = _np(m)
    if arr.size == 0:
        return []
    u, sv, vt = np.linalg.svd(arr)
    nc = arr.shape[1]
    smax = sv[0] if sv.size else 0.0
    r = int(np.sum(sv > cutoff_ratio * smax)) if smax > 0 else 0
    return [vt[i].tolist() for i in range(r, nc)]


def solve_float(a, b):
    """Least squares solution and residual norm."""
    arr = _np(a)
    rhs = np.asarray(b, dtype=float)
    x, *_ = np.linalg.lstsq(arr, rhs, rcond=None)
    resid = float(np.linalg.norm(arr @ x - rhs, ord=np.inf)) if arr.size else 0.0
    return x.tolist(), resid


def matrix_rank(m, exact: bool, cutoff_ratio: float = FLOAT_RANK_CUTOFF) -> int:
    return rank_exact(m) if exact else rank_float(m, cutoff_ratio)


def nullspace(m, exact: bool, cutoff_ratio: float = FLOAT_RANK_CUTOFF):
    return nullspace_exact(m) if exact else nullspace_float(m, cutoff_ratio)
