"""Exterior algebra over a fixed oriented 7-dimensional inner-product space.

A k-form is stored dense: one coefficient per strictly increasing index tuple
of length k (indices run 1..7), ordered lexicographically.  Degree-0 forms
are scalars, degree-7 forms are multiples of dx1^...^dx7.  The convention
throughout is the determinant evaluation without factorial weights, so
dx1^dx2 applied to (e1, e2) is +1 and interior contraction is an
antiderivation acting on the first slot.

Coefficients are fractions.Fraction in exact computations and float
otherwise; a single form never mixes the two (construction normalizes ints
to Fraction unless a float is present).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Sequence, Tuple

import numpy as np

from . import ratlin
from .context import Context, Scalar, scalar_sqrt
from .errors import DegreeError, MetricError

DIM = 7

BASIS = {k: tuple(combinations(range(1, DIM + 1), k)) for k in range(DIM + 1)}
POS = {k: {idx: p for p, idx in enumerate(BASIS[k])} for k in range(DIM + 1)}
NK = {k: len(BASIS[k]) for k in range(DIM + 1)}
TOP_INDEX = BASIS[DIM][0]


def merge_sign(i_tuple: Tuple[int, ...], j_tuple: Tuple[int, ...]):
    """Shuffle sign for concatenating two increasing tuples.

    Returns (sign, merged_tuple); sign is 0 (and merged None) when the
    tuples share an index.  The sign counts the transpositions needed to
    sort the concatenation, so dx_I ^ dx_J = sign * dx_merged.
    """
    merged = []
    inversions = 0
    a, b = 0, 0
    while a < len(i_tuple) and b < len(j_tuple):
        x, y = i_tuple[a], j_tuple[b]
        if x == y:
            return 0, None
        if x < y:
            merged.append(x)
            a += 1
        else:
            merged.append(y)
            b += 1
            inversions += len(i_tuple) - a
    merged.extend(i_tuple[a:])
    merged.extend(j_tuple[b:])
    return (-1) ** inversions, tuple(merged)


@lru_cache(maxsize=None)
def _wedge_table(k: int, l: int):
    """Nonzero structure constants of the wedge: (pos_a, pos_b, sign, pos_out)."""
    table = []
    for pa, I in enumerate(BASIS[k]):
        for pb, J in enumerate(BASIS[l]):
            s, merged = merge_sign(I, J)
            if s:
                table.append((pa, pb, s, POS[k + l][merged]))
    return tuple(table)


@lru_cache(maxsize=None)
def _comp_table(k: int):
    """Per k-index: (position of the complement, permutation sign)."""
    table = []
    full = set(range(1, DIM + 1))
    for I in BASIS[k]:
        J = tuple(sorted(full - set(I)))
        s, _ = merge_sign(I, J)
        table.append((POS[DIM - k][J], s))
    return tuple(table)


def _normalize(values) -> tuple:
    vals = tuple(values)
    if any(isinstance(v, float) for v in vals):
        return tuple(float(v) for v in vals)
    return tuple(v if isinstance(v, Fraction) else Fraction(v) for v in vals)


@dataclass(frozen=True)
class KForm:
    """Dense k-form; immutable and hashable."""

    degree: int
    coeffs: tuple

    def __post_init__(self):
        if not isinstance(self.degree, int) or not 0 <= self.degree <= DIM:
            raise DegreeError(f"degree must be 0..{DIM}, got {self.degree!r}")
        vals = _normalize(self.coeffs)
        if len(vals) != NK[self.degree]:
            raise DegreeError(
                f"degree {self.degree} needs {NK[self.degree]} coefficients, got {len(vals)}"
            )
        object.__setattr__(self, "coeffs", vals)

    @classmethod
    def zero(cls, degree: int, exact: bool = True) -> "KForm":
        fill = Fraction(0) if exact else 0.0
        return cls(degree, (fill,) * NK[degree])

    @classmethod
    def basis(cls, index: Sequence[int]) -> "KForm":
        idx = tuple(index)
        k = len(idx)
        if k > DIM or idx not in POS[k]:
            raise DegreeError(f"not a strictly increasing index tuple: {idx!r}")
        coeffs = [Fraction(0)] * NK[k]
        coeffs[POS[k][idx]] = Fraction(1)
        return cls(k, tuple(coeffs))

    @classmethod
    def from_entries(cls, degree: int, entries, exact: bool = True) -> "KForm":
        coeffs = [Fraction(0) if exact else 0.0] * NK[degree]
        for idx, c in dict(entries).items():
            idx = tuple(idx)
            if idx not in POS[degree]:
                raise DegreeError(f"bad index {idx!r} for degree {degree}")
            coeffs[POS[degree][idx]] = c
        return cls(degree, tuple(coeffs))

    @property
    def is_exact(self) -> bool:
        return not any(isinstance(c, float) for c in self.coeffs)

    def coeff(self, *index: int):
        """Signed coefficient lookup; repeated indices give 0."""
        if len(index) == 1 and isinstance(index[0], (tuple, list)):
            index = tuple(index[0])
        order = tuple(sorted(index))
        if len(set(order)) != len(order):
            return Fraction(0) if self.is_exact else 0.0
        sign = _permutation_sign(index)
        return sign * self.coeffs[POS[self.degree][order]]

    def entries(self) -> Iterator[tuple]:
        for p, I in enumerate(BASIS[self.degree]):
            c = self.coeffs[p]
            if c:
                yield I, c

    def __add__(self, other: "KForm") -> "KForm":
        if self.degree != other.degree:
            raise DegreeError("cannot add forms of different degree")
        return KForm(self.degree, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "KForm") -> "KForm":
        if self.degree != other.degree:
            raise DegreeError("cannot subtract forms of different degree")
        return KForm(self.degree, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "KForm":
        return KForm(self.degree, tuple(-a for a in self.coeffs))

    def __mul__(self, s) -> "KForm":
        return KForm(self.degree, tuple(a * s for a in self.coeffs))

    __rmul__ = __mul__

    def __truediv__(self, s) -> "KForm":
        if isinstance(s, int):
            s = Fraction(s)
        return KForm(self.degree, tuple(a / s for a in self.coeffs))

    def max_abs(self):
        return max((abs(c) for c in self.coeffs), default=0)

    def isclose(self, other: "KForm", tol: float = 0.0) -> bool:
        """Coefficientwise comparison; tol=0 means literal equality."""
        if self.degree != other.degree:
            return False
        if tol == 0.0:
            return all(a == b for a, b in zip(self.coeffs, other.coeffs))
        return all(abs(a - b) <= tol for a, b in zip(self.coeffs, other.coeffs))

    def as_float(self) -> "KForm":
        return KForm(self.degree, tuple(float(c) for c in self.coeffs))


def _permutation_sign(seq: Sequence[int]) -> int:
    inv = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inv += 1
    return (-1) ** inv


def coerce_form(a: KForm, ctx: Context) -> KForm:
    """Re-express a form in the context's arithmetic (may raise on floats in exact mode)."""
    return KForm(a.degree, tuple(ctx.scalar(c) for c in a.coeffs))


def basis_vector(i: int, exact: bool = True) -> tuple:
    one = Fraction(1) if exact else 1.0
    zero = Fraction(0) if exact else 0.0
    return tuple(one if j == i else zero for j in range(1, DIM + 1))


def wedge(a: KForm, b: KForm) -> KForm:
    if a.degree + b.degree > DIM:
        raise DegreeError(f"wedge degree {a.degree}+{b.degree} exceeds {DIM}")
    out_deg = a.degree + b.degree
    exact = a.is_exact and b.is_exact
    out = [Fraction(0) if exact else 0.0] * NK[out_deg]
    ac, bc = a.coeffs, b.coeffs
    for pa, pb, s, po in _wedge_table(a.degree, b.degree):
        ca = ac[pa]
        if not ca:
            continue
        cb = bc[pb]
        if not cb:
            continue
        out[po] += ca * cb if s > 0 else -(ca * cb)
    return KForm(out_deg, tuple(out))


def interior(v: Sequence, a: KForm) -> KForm:
    """Contraction of a k-form with a vector in the first slot."""
    if a.degree == 0:
        raise DegreeError("cannot contract a 0-form")
    k = a.degree
    exact = a.is_exact and ratlin.is_exact_values(v)
    out = [Fraction(0) if exact else 0.0] * NK[k - 1]
    for p, I in enumerate(BASIS[k]):
        c = a.coeffs[p]
        if not c:
            continue
        for t, i in enumerate(I):
            vi = v[i - 1]
            if not vi:
                continue
            rest = I[:t] + I[t + 1:]
            term = vi * c
            out[POS[k - 1][rest]] += term if t % 2 == 0 else -term
    return KForm(k - 1, tuple(out))


@dataclass(frozen=True)
class Orientation:
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("orientation sign must be +1 or -1")

    def reversed(self) -> "Orientation":
        return Orientation(-self.sign)


POSITIVE = Orientation(1)
NEGATIVE = Orientation(-1)

_SPD_EIG_TOL = 1e-12


@dataclass(frozen=True)
class Metric:
    """Symmetric positive definite 7x7 matrix (rows of rows)."""

    rows: tuple

    def __post_init__(self):
        if len(self.rows) != DIM or any(len(r) != DIM for r in self.rows):
            raise MetricError("metric must be 7x7")
        flat_vals = _normalize(x for r in self.rows for x in r)
        rows = tuple(flat_vals[i * DIM:(i + 1) * DIM] for i in range(DIM))
        for i in range(DIM):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise MetricError("metric must be symmetric")
        object.__setattr__(self, "rows", rows)
        if self.is_exact:
            for n in range(1, DIM + 1):
                minor = [r[:n] for r in rows[:n]]
                if ratlin.det_exact(minor) <= 0:
                    raise MetricError("metric is not positive definite")
        else:
            eig = np.linalg.eigvalsh(np.asarray(rows, dtype=float))
            scale = max(1.0, float(np.max(np.abs(eig))))
            if eig[0] <= _SPD_EIG_TOL * scale:
                raise MetricError("metric is not positive definite")

    @property
    def is_exact(self) -> bool:
        return not isinstance(self.rows[0][0], float)

    @property
    def is_euclidean(self) -> bool:
        return _metric_is_euclidean(self)

    def is_euclidean_within(self, tol: float) -> bool:
        """Euclidean up to entrywise tol; float metrics carry roundoff."""
        if self.is_exact:
            return self.is_euclidean
        return all(abs(self.rows[i][j] - (1 if i == j else 0)) <= tol
                   for i in range(DIM) for j in range(DIM))

    def entry(self, i: int, j: int):
        return self.rows[i - 1][j - 1]


EUCLIDEAN = Metric(tuple(tuple(Fraction(1) if i == j else Fraction(0) for j in range(DIM)) for i in range(DIM)))


@lru_cache(maxsize=None)
def _metric_is_euclidean(m: Metric) -> bool:
    return all(m.rows[i][j] == (1 if i == j else 0) for i in range(DIM) for j in range(DIM))


@lru_cache(maxsize=None)
def _metric_inverse(m: Metric):
    if m.is_exact:
        return tuple(tuple(r) for r in ratlin.inv_exact(m.rows))
    inv = np.linalg.inv(np.asarray(m.rows, dtype=float))
    return tuple(tuple(float(x) for x in row) for row in inv)


@lru_cache(maxsize=None)
def _metric_det(m: Metric):
    if m.is_exact:
        return ratlin.det_exact(m.rows)
    return float(np.linalg.det(np.asarray(m.rows, dtype=float)))


def _sqrt_det(m: Metric):
    return scalar_sqrt(_metric_det(m), m.is_exact)


def _det_small(mat, exact: bool):
    k = len(mat)
    if k == 0:
        return Fraction(1) if exact else 1.0
    if k == 1:
        return mat[0][0]
    if k == 2:
        return mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0]
    if k == 3:
        a, b, c = mat[0]
        d, e, f = mat[1]
        g, h, i = mat[2]
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    if exact:
        return ratlin.det_exact(mat)
    return float(np.linalg.det(np.asarray(mat, dtype=float)))


@lru_cache(maxsize=None)
def _lambda_gram(m: Metric, k: int):
    """Gram matrix of the basis k-forms: det of inverse-metric minors."""
    inv = _metric_inverse(m)
    exact = m.is_exact
    gram = []
    for I in BASIS[k]:
        row = []
        for J in BASIS[k]:
            minor = [[inv[a - 1][b - 1] for b in J] for a in I]
            row.append(_det_small(minor, exact))
        gram.append(tuple(row))
    return tuple(gram)


def form_inner(a: KForm, b: KForm, m: Metric = EUCLIDEAN):
    """Inner product of two k-forms induced by the metric."""
    if a.degree != b.degree:
        raise DegreeError("inner product needs equal degrees")
    if m.is_euclidean:
        return sum(x * y for x, y in zip(a.coeffs, b.coeffs))
    gram = _lambda_gram(m, a.degree)
    tot = 0
    for p, ca in enumerate(a.coeffs):
        if not ca:
            continue
        row = gram[p]
        for q, cb in enumerate(b.coeffs):
            if cb:
                tot += ca * row[q] * cb
    return tot


def volume_form(m: Metric = EUCLIDEAN, o: Orientation = POSITIVE) -> KForm:
    """Riemannian volume form: o.sign * sqrt(det g) dx1..7."""
    return KForm(DIM, (o.sign * _sqrt_det(m),))


def hodge_star(a: KForm, m: Metric = EUCLIDEAN, o: Orientation = POSITIVE) -> KForm:
    """Hodge star, defined by b ^ *a = <b, a> vol for all b."""
    k = a.degree
    out_deg = DIM - k
    comp = _comp_table(k)
    if m.is_euclidean:
        vol = Fraction(o.sign) if a.is_exact else float(o.sign)
        out = [None] * NK[out_deg]
        for p in range(NK[k]):
            po, s = comp[p]
            out[po] = (a.coeffs[p] * vol) if s > 0 else -(a.coeffs[p] * vol)
        return KForm(out_deg, tuple(out))
    vol = _sqrt_det(m) * o.sign
    gram = _lambda_gram(m, k)
    exact = a.is_exact and m.is_exact
    out = [Fraction(0) if exact else 0.0] * NK[out_deg]
    for p in range(NK[k]):
        row = gram[p]
        inner = 0
        for q, cq in enumerate(a.coeffs):
            if cq:
                inner += row[q] * cq
        if inner:
            po, s = comp[p]
            out[po] = s * inner * vol
    return KForm(out_deg, tuple(out))


def flat(v: Sequence, m: Metric = EUCLIDEAN) -> KForm:
    """Lower an index: the 1-form g(v, .)."""
    return KForm(1, tuple(sum(m.rows[i][j] * v[j] for j in range(DIM)) for i in range(DIM)))


def sharp(a: KForm, m: Metric = EUCLIDEAN) -> tuple:
    """Raise an index: the vector dual to a 1-form."""
    if a.degree != 1:
        raise DegreeError("sharp expects a 1-form")
    inv = _metric_inverse(m)
    return tuple(sum(inv[i][j] * a.coeffs[j] for j in range(DIM)) for i in range(DIM))


def pullback(a: KForm, mat) -> KForm:
    """Pullback of a k-form by the linear map with matrix mat (7x7 rows).

    Coefficientwise: (F*a)_I = sum_J a_J det(mat[J rows, I cols]).
    """
    k = a.degree
    if k == 0:
        return a
    rows = [list(r) for r in mat]
    if len(rows) != DIM or any(len(r) != DIM for r in rows):
        raise ValueError("pullback needs a 7x7 matrix")
    exact = a.is_exact and ratlin.is_exact_values([x for r in rows for x in r])
    nonzero = list(a.entries())
    out = []
    for I in BASIS[k]:
        tot = Fraction(0) if exact else 0.0
        for J, c in nonzero:
            minor = [[rows[j - 1][i - 1] for i in I] for j in J]
            tot += c * _det_small(minor, exact)
        out.append(tot)
    return KForm(k, tuple(out))


def top_coeff(a: KForm):
    """Coefficient of dx1^...^dx7 (the form must be degree 7)."""
    if a.degree != DIM:
        raise DegreeError("top_coeff expects a 7-form")
    return a.coeffs[0]
