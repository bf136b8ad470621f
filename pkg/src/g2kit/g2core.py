"""Core pointwise G2 linear algebra.

Contents: the standard associative 3-form, recovery of the induced metric
and orientation from a nondegenerate 3-form, the irreducible type
decompositions of 2-forms (7 + 14) and 3-forms (1 + 7 + 27), and the action
of bilinear forms on the 3-form together with its inverse on the symmetric
side.

The eigenvalues of beta -> *(phi ^ beta) on 2-forms are discovered at
construction time and stored on the structure, never hard-coded: their signs
depend on the star and orientation conventions, and the contract is only
that the eigenspaces have dimensions 7 and 14.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import ratlin
from .context import EXACT, FLOAT, Context, rational_nth_root
from .errors import (
    DecompositionError,
    DegreeError,
    ExactModeError,
    FrameError,
    MetricError,
    NotG2FormError,
)
from .exterior import (
    BASIS,
    DIM,
    NK,
    KForm,
    Metric,
    NEGATIVE,
    POSITIVE,
    _metric_inverse,
    basis_vector,
    coerce_form,
    flat,
    form_inner,
    hodge_star,
    interior,
    top_coeff,
    volume_form,
    wedge,
)

PHI0_ENTRIES = {
    (1, 2, 3): 1,
    (1, 4, 5): 1,
    (1, 6, 7): 1,
    (2, 4, 6): 1,
    (2, 5, 7): -1,
    (3, 4, 7): -1,
    (3, 5, 6): -1,
}

_SIX_POW_7 = 6 ** 7


def phi0(exact: bool = True) -> KForm:
    """The standard associative 3-form on R^7."""
    entries = {idx: (Fraction(v) if exact else float(v)) for idx, v in PHI0_ENTRIES.items()}
    return KForm.from_entries(3, entries, exact=exact)


def _contraction_matrix(phi: KForm):
    """B with B_ij = coefficient of (e_i . phi) ^ (e_j . phi) ^ phi on the top form."""
    exact = phi.is_exact
    contr = [interior(basis_vector(i, exact), phi) for i in range(1, DIM + 1)]
    zero = Fraction(0) if exact else 0.0
    B = [[zero] * DIM for _ in range(DIM)]
    for i in range(DIM):
        for j in range(i, DIM):
            val = top_coeff(wedge(wedge(contr[i], contr[j]), phi))
            B[i][j] = val
            B[j][i] = val
    return B


def metric_from_phi(phi: KForm, ctx: Context = EXACT):
    """Metric and orientation induced by a nondegenerate 3-form.

    The contraction matrix B is normalized so that the standard form maps to
    the identity metric: g = B / (6^(2/9) det(B)^(1/9)) after flipping the
    sign of B (and recording orientation -1) when det(B) < 0.  Exact mode
    requires det(B) = 6^7 * c^9 for a rational c and raises ExactModeError
    otherwise; degenerate or indefinite B raises NotG2FormError.
    """
    if phi.degree != 3:
        raise DegreeError("metric recovery expects a 3-form")
    phi = coerce_form(phi, ctx)
    B = _contraction_matrix(phi)
    if ctx.is_exact:
        det_b = ratlin.det_exact(B)
        if det_b == 0:
            raise NotG2FormError("degenerate 3-form: det of contraction matrix is 0")
        orient = POSITIVE if det_b > 0 else NEGATIVE
        if det_b < 0:
            B = [[-x for x in row] for row in B]
            det_b = -det_b
        ratio = det_b / Fraction(_SIX_POW_7)
        ninth = rational_nth_root(ratio, 9)
        if ninth is None:
            raise ExactModeError(
                "exact metric normalization needs det(B)/6^7 to be a rational ninth power"
            )
        scale = 6 * ninth
        g = [[x / scale for x in row] for row in B]
    else:
        det_b = float(np.linalg.det(np.asarray(B, dtype=float)))
        if det_b == 0.0 or not np.isfinite(det_b):
            raise NotG2FormError("degenerate 3-form: det of contraction matrix is 0")
        orient = POSITIVE if det_b > 0 else NEGATIVE
        if det_b < 0:
            B = [[-x for x in row] for row in B]
            det_b = -det_b
        scale = 6.0 ** (2.0 / 9.0) * det_b ** (1.0 / 9.0)
        g = [[x / scale for x in row] for row in B]
    try:
        metric = Metric(tuple(tuple(row) for row in g))
    except MetricError as exc:
        raise NotG2FormError(f"3-form does not induce a positive metric: {exc}") from exc
    return metric, orient


def is_g2_form(phi: KForm, ctx: Context = EXACT) -> bool:
    """True when the 3-form induces a positive definite metric (either orientation)."""
    try:
        metric_from_phi(phi, ctx)
    except NotG2FormError:
        return False
    return True


def _full_tensor(phi: KForm):
    """phi as a totally antisymmetric 3-tensor lookup t[a][b][c] (0-based)."""
    exact = phi.is_exact
    zero = Fraction(0) if exact else 0.0
    t = [[[zero] * DIM for _ in range(DIM)] for _ in range(DIM)]
    for (i, j, k), c in phi.entries():
        for (a, b, d), sign in (
            ((i, j, k), 1), ((j, k, i), 1), ((k, i, j), 1),
            ((j, i, k), -1), ((i, k, j), -1), ((k, j, i), -1),
        ):
            t[a - 1][b - 1][d - 1] = c if sign > 0 else -c
    return t


def _cluster_eigenvalues(vals):
    """Group a real spectrum into clusters with gap 1e-6 (relative)."""
    vals = sorted(float(v) for v in vals)
    scale = max(1.0, max(abs(v) for v in vals))
    clusters = [[vals[0]]]
    for v in vals[1:]:
        if v - clusters[-1][-1] <= 1e-6 * scale:
            clusters[-1].append(v)
        else:
            clusters.append([v])
    return clusters


class G2Structure:
    """A nondegenerate 3-form bundled with everything derived from it.

    Construction computes (eagerly): the induced metric and orientation, the
    volume form, the star of phi, the spectrum of beta -> *(phi ^ beta) on
    2-forms with its two eigenspace bases, and the Gram data of the
    contraction frame spanning the 7-dimensional piece of the 3-forms.
    All of it is in the context's arithmetic; exact mode never touches a
    float beyond the eigenvalue discovery step, whose output is re-verified
    exactly before being trusted.
    """

    def __init__(self, phi: KForm, ctx: Context = EXACT):
        self.ctx = ctx
        self.phi = coerce_form(phi, ctx)
        self.metric, self.orientation = metric_from_phi(self.phi, ctx)
        self.vol = volume_form(self.metric, self.orientation)
        self.star_phi = hodge_star(self.phi, self.metric, self.orientation)
        norm = form_inner(self.phi, self.phi, self.metric)
        if ctx.is_exact:
            if norm != 7:
                raise NotG2FormError(f"normalized 3-form should have |phi|^2 = 7, got {norm}")
        elif abs(norm - 7.0) > 1e-6:
            raise NotG2FormError(f"normalized 3-form should have |phi|^2 = 7, got {norm}")
        self._tensor = _full_tensor(self.phi)
        self._init_two_form_spectrum()
        self._init_three_form_frame()
        self._odot_matrix_cache = None

    # -- spectral data on 2-forms ------------------------------------

    def two_form_operator(self, beta: KForm) -> KForm:
        """The map beta -> *(phi ^ beta) whose eigenspaces split the 2-forms."""
        if beta.degree != 2:
            raise DegreeError("operator expects a 2-form")
        return hodge_star(wedge(self.phi, beta), self.metric, self.orientation)

    def _init_two_form_spectrum(self):
        n2 = NK[2]
        cols = []
        for idx in BASIS[2]:
            image = self.two_form_operator(KForm.basis(idx))
            cols.append(image.coeffs)
        tmat = [[cols[j][i] for j in range(n2)] for i in range(n2)]
        self._tmat = tmat
        tf = np.asarray(tmat, dtype=float)
        clusters = _cluster_eigenvalues(np.real(np.linalg.eigvals(tf)))
        sizes = sorted(len(c) for c in clusters)
        if len(clusters) != 2 or sizes != [7, 14]:
            raise DecompositionError(
                f"2-form operator spectrum should have multiplicities 7 and 14, got {sizes}"
            )
        by_size = {len(c): sum(c) / len(c) for c in clusters}
        lam7f, lam14f = by_size[7], by_size[14]
        if self.ctx.is_exact:
            lam7 = Fraction(lam7f).limit_denominator(10 ** 6)
            lam14 = Fraction(lam14f).limit_denominator(10 ** 6)
            eig7 = ratlin.nullspace_exact(
                [[tmat[i][j] - (lam7 if i == j else 0) for j in range(n2)] for i in range(n2)]
            )
            eig14 = ratlin.nullspace_exact(
                [[tmat[i][j] - (lam14 if i == j else 0) for j in range(n2)] for i in range(n2)]
            )
            if len(eig7) != 7 or len(eig14) != 14:
                raise DecompositionError("rationalized eigenvalues failed exact verification")
            self.lambda7, self.lambda14 = lam7, lam14
        else:
            eig7 = ratlin.nullspace_float(tf - lam7f * np.eye(n2))
            eig14 = ratlin.nullspace_float(tf - lam14f * np.eye(n2))
            if len(eig7) != 7 or len(eig14) != 14:
                raise DecompositionError("eigenspace dimensions drifted from (7, 14)")
            self.lambda7, self.lambda14 = lam7f, lam14f
        self.basis2_7 = tuple(KForm(2, tuple(v)) for v in eig7)
        self.basis2_14 = tuple(KForm(2, tuple(v)) for v in eig14)

    # -- frame data on 3-forms ---------------------------------------

    def _init_three_form_frame(self):
        exact = self.ctx.is_exact
        self.frame3_7 = tuple(
            interior(basis_vector(i, exact), self.star_phi) for i in range(1, DIM + 1)
        )
        gram = [
            [form_inner(a, b, self.metric) for b in self.frame3_7] for a in self.frame3_7
        ]
        if exact:
            self._gram7_inv = ratlin.inv_exact(gram)
        else:
            self._gram7_inv = np.linalg.inv(np.asarray(gram, dtype=float)).tolist()

    def phi_eval(self, i: int, j: int, k: int):
        """phi on basis vectors e_i, e_j, e_k (1-based, any order)."""
        return self._tensor[i - 1][j - 1][k - 1]

    def star(self, a: KForm) -> KForm:
        return hodge_star(a, self.metric, self.orientation)

    def inner(self, a: KForm, b: KForm):
        return form_inner(a, b, self.metric)

    def __repr__(self):
        return f"G2Structure(mode={self.ctx.mode}, orientation={self.orientation.sign:+d})"


@lru_cache(maxsize=None)
def standard_structure(mode: str = "exact") -> G2Structure:
    """The structure of the standard form, cached per mode."""
    ctx = EXACT if mode == "exact" else FLOAT
    return G2Structure(phi0(ctx.is_exact), ctx)


@lru_cache(maxsize=None)
def triple_star_sign() -> int:
    """Global sign sigma in  *phi ^ *( *phi ^ alpha ) = 3 sigma *alpha.

    The identity holds with a single sign fixed by the star convention;
    it is computed once on the standard structure and then asserted
    everywhere with this stored value.
    """
    s = standard_structure("exact")
    alpha = KForm.basis((1,))
    lhs = wedge(s.star_phi, s.star(wedge(s.star_phi, alpha)))
    rhs = 3 * s.star(alpha)
    if lhs.isclose(rhs):
        return 1
    if lhs.isclose(-rhs):
        return -1
    raise DecompositionError("coassociative contraction identity failed for both signs")


# -- type decompositions ----------------------------------------------


@dataclass(frozen=True)
class Decomposition2:
    p7: KForm
    p14: KForm

    def total(self) -> KForm:
        return self.p7 + self.p14


@dataclass(frozen=True)
class Decomposition3:
    p1: KForm
    p7: KForm
    p27: KForm

    def total(self) -> KForm:
        return self.p1 + self.p7 + self.p27


def decompose2(beta: KForm, s: G2Structure) -> Decomposition2:
    """Split a 2-form into its 7- and 14-dimensional eigenspace parts.

    Spectral projection: p7 = (T(beta) - lam14 beta) / (lam7 - lam14) with
    the structure's stored eigenvalues, p14 the remainder.
    """
    if beta.degree != 2:
        raise DegreeError("decompose2 expects a 2-form")
    beta = coerce_form(beta, s.ctx)
    t_beta = s.two_form_operator(beta)
    denom = s.lambda7 - s.lambda14
    p7 = (t_beta - s.lambda14 * beta) * (1 / denom if s.ctx.is_exact else 1.0 / denom)
    return Decomposition2(p7=p7, p14=beta - p7)


def decompose3(eta: KForm, s: G2Structure) -> Decomposition3:
    """Split a 3-form into scalar, vector and symmetric-traceless parts.

    p1 is the phi-component <eta, phi>/7 * phi; p7 is the Gram projection
    onto the span of the contractions e_i . *phi; p27 is the remainder.
    """
    if eta.degree != 3:
        raise DegreeError("decompose3 expects a 3-form")
    eta = coerce_form(eta, s.ctx)
    coeff = form_inner(eta, s.phi, s.metric) / 7
    p1 = s.phi * coeff
    rhs = [form_inner(eta, w, s.metric) for w in s.frame3_7]
    coords = ratlin.matvec(s._gram7_inv, rhs)
    p7 = KForm.zero(3, s.ctx.is_exact)
    for x, w in zip(coords, s.frame3_7):
        if x:
            p7 = p7 + w * x
    return Decomposition3(p1=p1, p7=p7, p27=eta - p1 - p7)


# -- the action of bilinear forms on phi ------------------------------


@dataclass(frozen=True)
class SymTensor:
    """Symmetric bilinear form on R^7 (rows of rows)."""

    rows: tuple
    traceless: bool = False

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.rows)
        if len(rows) != DIM or any(len(r) != DIM for r in rows):
            raise ValueError("SymTensor must be 7x7")
        for i in range(DIM):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise ValueError("SymTensor must be symmetric")
        object.__setattr__(self, "rows", rows)
        if self.traceless:
            tr = sum(rows[i][i] for i in range(DIM))
            if isinstance(tr, float):
                if abs(tr) > 1e-9:
                    raise ValueError("SymTensor flagged traceless has nonzero trace")
            elif tr != 0:
                raise ValueError("SymTensor flagged traceless has nonzero trace")

    def trace(self):
        return sum(self.rows[i][i] for i in range(DIM))


def _as_rows(b):
    if isinstance(b, SymTensor):
        return [list(r) for r in b.rows]
    rows = [list(r) for r in b]
    if len(rows) != DIM or any(len(r) != DIM for r in rows):
        raise ValueError("expected a 7x7 matrix")
    return rows


def odot_endo(E, s: G2Structure) -> KForm:
    """(E . phi)(u,v,w) = phi(Eu,v,w) + phi(u,Ev,w) + phi(u,v,Ew) for an endomorphism E."""
    rows = _as_rows(E)
    t = s._tensor
    out = []
    for (i, j, k) in BASIS[3]:
        a, b, c = i - 1, j - 1, k - 1
        acc = 0
        for m in range(DIM):
            e_ma = rows[m][a]
            if e_ma:
                acc += e_ma * t[m][b][c]
            e_mb = rows[m][b]
            if e_mb:
                acc += e_mb * t[a][m][c]
            e_mc = rows[m][c]
            if e_mc:
                acc += e_mc * t[a][b][m]
        out.append(acc)
    return KForm(3, tuple(out))


def odot(b, s: G2Structure) -> KForm:
    """Action of a bilinear form on phi: raise the first index, then act slotwise."""
    rows = _as_rows(b)
    endo = ratlin.matmul([list(r) for r in _metric_inverse(s.metric)], rows)
    return odot_endo(endo, s)


def odot_local(b, s: G2Structure, frame=None) -> KForm:
    """Frame expression of the same action: sum_ij b_ij (f_i)^flat ^ (f_j . phi).

    Valid in a g-orthonormal frame; with no frame given the metric must be
    Euclidean so the standard basis qualifies, otherwise FrameError.
    """
    rows = _as_rows(b)
    exact = s.ctx.is_exact
    if frame is None:
        if not s.metric.is_euclidean_within(1e-12):
            raise FrameError("standard basis is not orthonormal for this metric; pass a frame")
        frame = [basis_vector(i, exact) for i in range(1, DIM + 1)]
    else:
        frame = [tuple(v) for v in frame]
        if len(frame) != DIM:
            raise FrameError("frame needs 7 vectors")
        for i in range(DIM):
            fi = flat(frame[i], s.metric)
            for j in range(DIM):
                val = sum(x * y for x, y in zip(fi.coeffs, frame[j]))
                want = 1 if i == j else 0
                if exact:
                    if val != want:
                        raise FrameError("frame is not orthonormal for the metric")
                elif abs(val - want) > 1e-9:
                    raise FrameError("frame is not orthonormal for the metric")
    out = KForm.zero(3, exact)
    contr = [interior(f, s.phi) for f in frame]
    flats = [flat(f, s.metric) for f in frame]
    for i in range(DIM):
        for j in range(DIM):
            bij = rows[i][j]
            if bij:
                out = out + wedge(flats[i], contr[j]) * bij
    return out


def infinitesimal_action(A, s: G2Structure) -> KForm:
    """Derivative at t=0 of the frame action of exp(tA) on phi; equals (-A) acting slotwise."""
    rows = _as_rows(A)
    return odot_endo([[-x for x in row] for row in rows], s)


def symmetric_basis(exact: bool = True):
    """The 28 symmetric unit matrices: 7 diagonal then the 21 pair sums."""
    one = Fraction(1) if exact else 1.0
    zero = Fraction(0) if exact else 0.0
    basis = []
    for i in range(DIM):
        m = [[zero] * DIM for _ in range(DIM)]
        m[i][i] = one
        basis.append(m)
    for i in range(DIM):
        for j in range(i + 1, DIM):
            m = [[zero] * DIM for _ in range(DIM)]
            m[i][j] = one
            m[j][i] = one
            basis.append(m)
    return basis


def _odot_symmetric_matrix(s: G2Structure):
    """35x28 matrix of the action restricted to symmetric tensors (cached)."""
    if s._odot_matrix_cache is None:
        cols = [odot(b, s).coeffs for b in symmetric_basis(s.ctx.is_exact)]
        s._odot_matrix_cache = [[cols[j][i] for j in range(len(cols))] for i in range(NK[3])]
    return s._odot_matrix_cache


def odot_inverse(eta: KForm, s: G2Structure, tol: float | None = None) -> SymTensor:
    """The unique symmetric b with b acting on phi giving eta.

    Preconditions: eta is a 3-form with no 7-part (the action of symmetric
    tensors only reaches the 1- and 27-parts); violations raise
    DecompositionError.
    """
    if eta.degree != 3:
        raise DegreeError("odot_inverse expects a 3-form")
    eta = coerce_form(eta, s.ctx)
    parts = decompose3(eta, s)
    tol = s.ctx.tol if tol is None else tol
    if s.ctx.is_exact:
        if parts.p7.max_abs() != 0:
            raise DecompositionError("3-form has a nonzero 7-part; not in the symmetric image")
        target = list(eta.coeffs)
    else:
        if float(parts.p7.max_abs()) > tol:
            raise DecompositionError("3-form has a nonzero 7-part; not in the symmetric image")
        target = [a + b for a, b in zip(parts.p1.coeffs, parts.p27.coeffs)]
    amat = _odot_symmetric_matrix(s)
    if s.ctx.is_exact:
        try:
            x = ratlin.solve_exact(amat, target)
        except Exception as exc:
            raise DecompositionError(f"exact inversion failed: {exc}") from exc
    else:
        x, resid = ratlin.solve_float(amat, target)
        scale = max(1.0, float(eta.max_abs()))
        if resid > tol * scale:
            raise DecompositionError(f"float inversion residual {resid} above tolerance")
    zero = Fraction(0) if s.ctx.is_exact else 0.0
    rows = [[zero] * DIM for _ in range(DIM)]
    pos = 0
    for i in range(DIM):
        rows[i][i] = x[pos]
        pos += 1
    for i in range(DIM):
        for j in range(i + 1, DIM):
            rows[i][j] = x[pos]
            rows[j][i] = x[pos]
            pos += 1
    return SymTensor(tuple(tuple(r) for r in rows))
