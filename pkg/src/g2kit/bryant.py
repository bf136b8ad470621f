"""The metric-preserving family of 3-forms through a structure.

A parameter point is a pair (c, omega) with c^2 + |omega|^2 = 1; twisting a
structure by it produces another 3-form with the same induced metric and
orientation, and (c, omega), (-c, -omega) give the same form.  This module
implements the twist, its closed-form type decomposition, exact/float
recovery of the canonical parameters from a twisted form, and the derivative
of the twist map with its rank on an ambient parameter subspace.

Tolerances follow one ladder: constraint checks at 1e-12, recovery residuals
at 1e-9, float rank decisions at 1e-8 times the largest singular value.
Exact mode replaces all three with literal equality.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import ratlin
from .context import scalar_sqrt
from .errors import (
    ConstraintError,
    DecompositionError,
    DegreeError,
    G2KitError,
    MetricMismatchError,
    RecoveryError,
    TangencyError,
)
from .exterior import DIM, KForm, coerce_form, form_inner, hodge_star, wedge
from .g2core import (
    Decomposition3,
    G2Structure,
    decompose3,
    metric_from_phi,
    odot_inverse,
)
from .sampling import rational_unit_tuple

CONSTRAINT_TOL = 1e-12
RECOVERY_TOL = 1e-9
C_ZERO_SWITCH = 1e-7


@dataclass(frozen=True)
class TwistParams:
    """A point (c, omega) on the parameter sphere; omega is a 1-form."""

    c: object
    omega: KForm

    def __post_init__(self):
        if self.omega.degree != 1:
            raise DegreeError("twist parameter omega must be a 1-form")
        if isinstance(self.c, int):
            object.__setattr__(self, "c", Fraction(self.c))

    def constraint_residual(self, s: G2Structure):
        return self.c * self.c + form_inner(self.omega, self.omega, s.metric) - 1

    def antipode(self) -> "TwistParams":
        return TwistParams(-self.c, -self.omega)

    def canonical(self) -> "TwistParams":
        """The antipodal representative with c > 0, or with the first
        nonzero omega coefficient positive when c = 0."""
        if self.c > 0:
            return self
        if self.c < 0:
            return self.antipode()
        for x in self.omega.coeffs:
            if x:
                return self if x > 0 else self.antipode()
        return self

    def equivalent_to(self, other: "TwistParams", tol: float = 0.0) -> bool:
        """Equality modulo the antipodal identification."""
        def close(p, q):
            if tol == 0.0:
                return p.c == q.c and p.omega.isclose(q.omega)
            return abs(p.c - q.c) <= tol and p.omega.isclose(q.omega, tol)

        return close(self, other) or close(self.antipode(), other)


@dataclass(frozen=True)
class TwistTangent:
    """A tangent vector (c_dot, omega_dot) to the parameter sphere."""

    c_dot: object
    omega_dot: KForm

    def __post_init__(self):
        if self.omega_dot.degree != 1:
            raise DegreeError("tangent omega_dot must be a 1-form")
        if isinstance(self.c_dot, int):
            object.__setattr__(self, "c_dot", Fraction(self.c_dot))

    def tangency_residual(self, p: TwistParams, s: G2Structure):
        return p.c * self.c_dot + form_inner(p.omega, self.omega_dot, s.metric)


def _coerce_params(s: G2Structure, p: TwistParams) -> TwistParams:
    return TwistParams(s.ctx.scalar(p.c), coerce_form(p.omega, s.ctx))


def _check_constraint(s: G2Structure, p: TwistParams):
    res = p.constraint_residual(s)
    if s.ctx.is_exact:
        if res != 0:
            raise ConstraintError(f"c^2 + |omega|^2 - 1 = {res}, want exactly 0")
    elif abs(res) > CONSTRAINT_TOL:
        raise ConstraintError(f"c^2 + |omega|^2 - 1 = {res}, beyond {CONSTRAINT_TOL}")


def twist(s: G2Structure, p: TwistParams) -> KForm:
    """The twisted 3-form (c^2 - |w|^2) phi + 2c *(w ^ phi) + 2 w ^ *(w ^ *phi)."""
    p = _coerce_params(s, p)
    _check_constraint(s, p)
    c, w = p.c, p.omega
    m, o = s.metric, s.orientation
    w2 = form_inner(w, w, m)
    out = (c * c - w2) * s.phi
    out = out + (2 * c) * hodge_star(wedge(w, s.phi), m, o)
    out = out + 2 * wedge(w, hodge_star(wedge(w, s.star_phi), m, o))
    return out


def twist_decomposed(s: G2Structure, p: TwistParams) -> Decomposition3:
    """Type components of the twist without going through projections.

    p1 = (8c^2 - 1)/7 phi,  p7 = 2c *(w ^ phi),
    p27 = 2 w ^ *(w ^ *phi) - (6/7) |w|^2 phi.
    """
    p = _coerce_params(s, p)
    _check_constraint(s, p)
    c, w = p.c, p.omega
    m, o = s.metric, s.orientation
    w2 = form_inner(w, w, m)
    seven = Fraction(7) if s.ctx.is_exact else 7.0
    p1 = ((8 * c * c - 1) / seven) * s.phi
    p7 = (2 * c) * hodge_star(wedge(w, s.phi), m, o)
    p27 = 2 * wedge(w, hodge_star(wedge(w, s.star_phi), m, o)) - (6 * w2 / seven) * s.phi
    return Decomposition3(p1=p1, p7=p7, p27=p27)


def twist_derivative(s: G2Structure, p: TwistParams, t: TwistTangent) -> KForm:
    """Directional derivative of the twist map at p along a sphere tangent t."""
    p = _coerce_params(s, p)
    _check_constraint(s, p)
    t = TwistTangent(s.ctx.scalar(t.c_dot), coerce_form(t.omega_dot, s.ctx))
    res = t.tangency_residual(p, s)
    if s.ctx.is_exact:
        if res != 0:
            raise TangencyError(f"tangency c c_dot + <w, w_dot> = {res}, want exactly 0")
    elif abs(res) > CONSTRAINT_TOL:
        raise TangencyError(f"tangency c c_dot + <w, w_dot> = {res}, beyond {CONSTRAINT_TOL}")
    c, w = p.c, p.omega
    cd, wd = t.c_dot, t.omega_dot
    m, o = s.metric, s.orientation
    out = (4 * c * cd) * s.phi
    out = out + (2 * cd) * hodge_star(wedge(w, s.phi), m, o)
    out = out + (2 * c) * hodge_star(wedge(wd, s.phi), m, o)
    out = out + 2 * wedge(wd, hodge_star(wedge(w, s.star_phi), m, o))
    out = out + 2 * wedge(w, hodge_star(wedge(wd, s.star_phi), m, o))
    return out


@dataclass(frozen=True)
class Recovery:
    params: TwistParams
    residual: float


def _metric_matches(s: G2Structure, metric, orientation) -> bool:
    if orientation.sign != s.orientation.sign:
        return False
    if s.ctx.is_exact:
        return ratlin.mat_eq(metric.rows, s.metric.rows)
    diff = max(
        abs(metric.rows[i][j] - s.metric.rows[i][j]) for i in range(DIM) for j in range(DIM)
    )
    return diff <= RECOVERY_TOL


def _recover_c_positive(s: G2Structure, phit: KForm, c) -> TwistParams:
    target = decompose3(phit, s).p7
    cols = [
        ((2 * c) * hodge_star(wedge(KForm.basis((i,)), s.phi), s.metric, s.orientation)).coeffs
        for i in range(1, DIM + 1)
    ]
    amat = [[cols[j][i] for j in range(DIM)] for i in range(len(target.coeffs))]
    if s.ctx.is_exact:
        try:
            x = ratlin.solve_exact(amat, list(target.coeffs))
        except G2KitError as exc:
            raise RecoveryError(f"direction solve failed: {exc}") from exc
    else:
        x, _resid = ratlin.solve_float(amat, list(target.coeffs))
    return TwistParams(c, KForm(1, tuple(x)))


def _recover_c_zero(s: G2Structure, phit: KForm) -> TwistParams:
    try:
        b = odot_inverse(phit + s.phi, s)
    except DecompositionError as exc:
        raise RecoveryError(f"c=0 branch inversion failed: {exc}") from exc
    rows = b.rows
    if s.ctx.is_exact:
        k = max(range(DIM), key=lambda i: rows[i][i])
        if rows[k][k] <= 0:
            raise RecoveryError("c=0 branch needs a positive rank-one symmetric part")
        wk = scalar_sqrt(rows[k][k] / 2, True)
        w = [rows[i][k] / (2 * wk) for i in range(DIM)]
        for i in range(DIM):
            for j in range(DIM):
                if rows[i][j] != 2 * w[i] * w[j]:
                    raise RecoveryError("c=0 branch data is not rank one")
        return TwistParams(Fraction(0), KForm(1, tuple(w)))
    arr = np.asarray(rows, dtype=float)
    vals, vecs = np.linalg.eigh(arr)
    lam = vals[-1]
    if lam <= 0:
        raise RecoveryError("c=0 branch needs a positive rank-one symmetric part")
    if np.max(np.abs(vals[:-1])) > ratlin.FLOAT_RANK_CUTOFF * lam:
        raise RecoveryError("c=0 branch data is not rank one")
    w = np.sqrt(lam / 2.0) * vecs[:, -1]
    return TwistParams(0.0, KForm(1, tuple(float(x) for x in w)))


def recover(s: G2Structure, phit: KForm, tol: float = RECOVERY_TOL) -> Recovery:
    """Canonical parameters of a form in the structure's metric family.

    Checks the induced metric and orientation first (MetricMismatchError),
    then branches on c^2 = (7 <phit, phi>/7 + 1)/8: the generic branch solves
    the vector part linearly in omega, the c = 0 branch inverts the
    symmetric action and extracts a rank-one square root.  The reported
    residual is the max-abs difference between re-twisting the recovered
    parameters and the input; exact mode demands literal zero.
    """
    phit = coerce_form(phit, s.ctx)
    if phit.degree != 3:
        raise DegreeError("recover expects a 3-form")
    metric, orient = metric_from_phi(phit, s.ctx)
    if not _metric_matches(s, metric, orient):
        raise MetricMismatchError("form does not induce this structure's metric/orientation")
    alpha = form_inner(phit, s.phi, s.metric) / 7
    c_sq = (7 * alpha + 1) / (Fraction(8) if s.ctx.is_exact else 8.0)
    if s.ctx.is_exact:
        if c_sq < 0 or c_sq > 1:
            raise RecoveryError(f"implied c^2 = {c_sq} outside [0, 1]")
        if c_sq == 0:
            params = _recover_c_zero(s, phit)
        else:
            params = _recover_c_positive(s, phit, scalar_sqrt(c_sq, True))
    else:
        if c_sq < -CONSTRAINT_TOL or c_sq > 1 + CONSTRAINT_TOL:
            raise RecoveryError(f"implied c^2 = {c_sq} outside [0, 1]")
        c = float(np.sqrt(min(max(c_sq, 0.0), 1.0)))
        params = _recover_c_zero(s, phit) if c < C_ZERO_SWITCH else _recover_c_positive(s, phit, c)
    params = params.canonical()
    diff = twist(s, params) - phit
    residual = float(diff.max_abs())
    if s.ctx.is_exact:
        if diff.max_abs() != 0:
            raise RecoveryError(f"exact recovery left residual {residual}")
    elif residual > tol * max(1.0, float(phit.max_abs())):
        raise RecoveryError(f"recovery residual {residual} above {tol}")
    return Recovery(params=params, residual=residual)


def tangent_basis(s: G2Structure, p: TwistParams, ambient_dim: int):
    """A basis of the tangent space at p inside the ambient parameter sphere
    spanned by c and the first ambient_dim coordinate 1-forms."""
    if not 1 <= ambient_dim <= DIM:
        raise ValueError("ambient_dim must be 1..7")
    p = _coerce_params(s, p)
    if any(p.omega.coeffs[i] for i in range(ambient_dim, DIM)):
        raise ConstraintError("omega leaves the ambient coordinate subspace")
    row = [p.c] + [p.omega.coeffs[i] for i in range(ambient_dim)]
    if s.ctx.is_exact:
        null = ratlin.nullspace_exact([row])
    else:
        null = ratlin.nullspace_float([row])
    zero = Fraction(0) if s.ctx.is_exact else 0.0
    basis = []
    for v in null:
        coeffs = list(v[1:]) + [zero] * (DIM - ambient_dim)
        basis.append(TwistTangent(v[0], KForm(1, tuple(coeffs))))
    return basis


def derivative_matrix(s: G2Structure, p: TwistParams, ambient_dim: int):
    """Columns are twist derivatives along a tangent basis (35 x ambient_dim)."""
    cols = [twist_derivative(s, p, t).coeffs for t in tangent_basis(s, p, ambient_dim)]
    return [[col[i] for col in cols] for i in range(len(cols[0]))] if cols else []


def derivative_rank(s: G2Structure, p: TwistParams, ambient_dim: int) -> int:
    """Rank of the twist derivative on the ambient tangent space at p."""
    mat = derivative_matrix(s, p, ambient_dim)
    if not mat:
        return 0
    return ratlin.matrix_rank(mat, s.ctx.is_exact)


def derivative_margin(s: G2Structure, p: TwistParams, ambient_dim: int):
    """(sigma_min, sigma_max) of the float derivative matrix, for margin reports."""
    mat = derivative_matrix(s, p, ambient_dim)
    arr = np.asarray([[float(x) for x in row] for row in mat], dtype=float)
    sv = np.linalg.svd(arr, compute_uv=False)
    return float(sv[-1]), float(sv[0])


def sample_params(rng: random.Random, subspace_dim: int = DIM, force_c_zero: bool = False) -> TwistParams:
    """Exact rational parameter point; omega confined to the first subspace_dim coords."""
    if not 1 <= subspace_dim <= DIM:
        raise ValueError("subspace_dim must be 1..7")
    if force_c_zero:
        unit = rational_unit_tuple(rng, subspace_dim)
        c = Fraction(0)
        w = list(unit)
    else:
        pt = rational_unit_tuple(rng, subspace_dim + 1)
        c = pt[0]
        w = list(pt[1:])
    w = w + [Fraction(0)] * (DIM - len(w))
    return TwistParams(c, KForm(1, tuple(w)))
