"""The standard 3-form: induced metric, spectra, decompositions, tensor action."""
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from g2kit import ratlin
from g2kit.errors import (
    DecompositionError,
    DegreeError,
    ExactModeError,
    FrameError,
    NotG2FormError,
)
from g2kit.exterior import (
    BASIS,
    DIM,
    NK,
    KForm,
    basis_vector,
    form_inner,
    interior,
    pullback,
    wedge,
)
from g2kit.g2core import (
    G2Structure,
    SymTensor,
    decompose2,
    decompose3,
    infinitesimal_action,
    is_g2_form,
    metric_from_phi,
    odot,
    odot_endo,
    odot_inverse,
    odot_local,
    phi0,
    standard_structure,
    symmetric_basis,
    triple_star_sign,
)
from g2kit.liegroup import matrix_exp, act_on_form, two_form_to_matrix
from g2kit.sampling import rational_kform, rational_symmetric

PHI_INDICES = {(1, 2, 3): 1, (1, 4, 5): 1, (1, 6, 7): 1, (2, 4, 6): 1,
               (2, 5, 7): -1, (3, 4, 7): -1, (3, 5, 6): -1}
STAR_PHI_INDICES = {(4, 5, 6, 7): 1, (2, 3, 6, 7): 1, (2, 3, 4, 5): 1, (1, 3, 5, 7): 1,
                    (1, 3, 4, 6): -1, (1, 2, 5, 6): -1, (1, 2, 4, 7): -1}


def forms3():
    coeff = st.integers(min_value=-6, max_value=6).map(lambda p: Fraction(p, 2))
    return st.lists(coeff, min_size=NK[3], max_size=NK[3]).map(
        lambda v: KForm(3, tuple(v)))


def forms2():
    coeff = st.integers(min_value=-6, max_value=6).map(lambda p: Fraction(p, 2))
    return st.lists(coeff, min_size=NK[2], max_size=NK[2]).map(
        lambda v: KForm(2, tuple(v)))


# -- phi0 and the induced metric --------------------------------------------


def test_phi0_entries_frozen():
    p = phi0()
    for idx, val in PHI_INDICES.items():
        assert p.coeff(idx) == val
    assert sum(1 for c in p.coeffs if c != 0) == 7


def test_star_phi_frozen(s):
    for idx, val in STAR_PHI_INDICES.items():
        assert s.star_phi.coeff(idx) == val
    assert sum(1 for c in s.star_phi.coeffs if c != 0) == 7


def test_metric_from_phi0_is_euclidean(s):
    g, o = metric_from_phi(phi0())
    assert o.sign == 1
    assert all(g.rows[i][j] == (1 if i == j else 0) for i in range(DIM) for j in range(DIM))
    assert form_inner(s.phi, s.phi, s.metric) == 7


def test_metric_from_negated_phi_flips_orientation():
    g, o = metric_from_phi(phi0() * -1)
    assert o.sign == -1
    assert all(g.rows[i][i] == 1 for i in range(DIM))


def test_metric_from_stretched_phi():
    # pulling back by diag(2,1,...,1) rescales the metric in the dx1 slot
    d = [[Fraction(2 if i == j == 0 else (1 if i == j else 0)) for j in range(DIM)]
         for i in range(DIM)]
    g, o = metric_from_phi(pullback(phi0(), d))
    assert o.sign == 1
    assert g.rows[0][0] == 4
    assert all(g.rows[i][i] == 1 for i in range(1, DIM))
    assert all(g.rows[i][j] == 0 for i in range(DIM) for j in range(DIM) if i != j)


def test_is_g2_form_cases():
    assert is_g2_form(phi0())
    assert is_g2_form(phi0() * -1)
    assert not is_g2_form(KForm.zero(3))
    assert not is_g2_form(KForm.basis((1, 2, 3)))  # degenerate
    with pytest.raises(DegreeError):
        is_g2_form(KForm.zero(2))


def test_structure_rejects_unnormalized():
    with pytest.raises(NotG2FormError):
        G2Structure(KForm.basis((1, 2, 3)))


def test_float_structure_matches_exact(s, sf):
    assert sf.lambda7 == pytest.approx(2.0)
    assert sf.lambda14 == pytest.approx(-1.0)
    gap = max(abs(float(a) - b) for ra, rb in zip(s.metric.rows, sf.metric.rows)
              for a, b in zip(ra, rb))
    assert gap < 1e-12


# -- spectrum of the 2-form operator ----------------------------------------


def test_eigenvalues_and_dimensions(s):
    assert (s.lambda7, s.lambda14) == (2, -1)
    assert len(s.basis2_7) == 7
    assert len(s.basis2_14) == 14


def test_contraction_two_forms_are_eigenvectors(s):
    for i in range(1, DIM + 1):
        b = interior(basis_vector(i), s.phi)
        assert (s.two_form_operator(b) - b * 2).max_abs() == 0


def test_minimal_polynomial(s):
    cols = [list(s.two_form_operator(KForm.basis(idx)).coeffs) for idx in BASIS[2]]
    T = ratlin.transpose(cols)
    m7 = [[T[i][j] - (2 if i == j else 0) for j in range(21)] for i in range(21)]
    m14 = [[T[i][j] + (1 if i == j else 0) for j in range(21)] for i in range(21)]
    assert ratlin.mat_max_abs(ratlin.matmul(m7, m14)) == 0


# -- decompositions ----------------------------------------------------------


def test_decompose2_contraction_is_pure(s):
    b = interior(basis_vector(1), s.phi)
    d = decompose2(b, s)
    assert (d.p7 - b).max_abs() == 0
    assert d.p14.max_abs() == 0


def test_decompose2_frozen_example(s):
    d = decompose2(KForm.basis((2, 3)), s)
    third = Fraction(1, 3)
    expect7 = KForm.from_entries(2, {(2, 3): third, (4, 5): third, (6, 7): third})
    assert (d.p7 - expect7).max_abs() == 0
    assert (d.p14 - (KForm.basis((2, 3)) - expect7)).max_abs() == 0


def test_decompose2_matches_basis_solve(s, rng):
    # independent oracle: coordinates in the stacked eigenbasis, exact solve
    cols = [list(b.coeffs) for b in s.basis2_7 + s.basis2_14]
    for _ in range(5):
        beta = rational_kform(rng, 2)
        coords = ratlin.solve_exact(ratlin.transpose(cols), list(beta.coeffs))
        p7 = KForm.zero(2)
        for x, b in zip(coords[:7], s.basis2_7):
            p7 = p7 + b * x
        d = decompose2(beta, s)
        assert (d.p7 - p7).max_abs() == 0


@given(forms2())
@settings(max_examples=30, deadline=None)
def test_decompose2_properties(beta):
    s = standard_structure()
    d = decompose2(beta, s)
    assert (d.total() - beta).max_abs() == 0
    assert (s.two_form_operator(d.p7) - d.p7 * 2).max_abs() == 0
    assert (s.two_form_operator(d.p14) + d.p14).max_abs() == 0
    assert form_inner(d.p7, d.p14, s.metric) == 0
    assert wedge(d.p14, s.star_phi).max_abs() == 0


def test_decompose3_phi_is_pure(s):
    d = decompose3(s.phi, s)
    assert (d.p1 - s.phi).max_abs() == 0
    assert d.p7.max_abs() == 0 and d.p27.max_abs() == 0


def test_decompose3_frame_is_pure(s):
    d = decompose3(s.frame3_7[0], s)
    assert d.p1.max_abs() == 0 and d.p27.max_abs() == 0
    assert (d.p7 - s.frame3_7[0]).max_abs() == 0


@given(forms3())
@settings(max_examples=30, deadline=None)
def test_decompose3_properties(eta):
    s = standard_structure()
    d = decompose3(eta, s)
    assert (d.total() - eta).max_abs() == 0
    assert form_inner(d.p1, d.p7, s.metric) == 0
    assert form_inner(d.p1, d.p27, s.metric) == 0
    assert form_inner(d.p7, d.p27, s.metric) == 0
    assert (d.p1 - s.phi * (form_inner(eta, s.phi, s.metric) * Fraction(1, 7))).max_abs() == 0


def test_projector_ranks(s):
    rows = {1: [], 7: [], 27: []}
    for idx in BASIS[3]:
        d = decompose3(KForm.basis(idx), s)
        rows[1].append(list(d.p1.coeffs))
        rows[7].append(list(d.p7.coeffs))
        rows[27].append(list(d.p27.coeffs))
    assert [ratlin.matrix_rank(rows[k], exact=True) for k in (1, 7, 27)] == [1, 7, 27]


def test_decompose_degree_guards(s):
    with pytest.raises(DegreeError):
        decompose2(KForm.zero(3), s)
    with pytest.raises(DegreeError):
        decompose3(KForm.zero(2), s)


# -- tensor action ------------------------------------------------------------


def test_identity_acts_as_three_phi(s):
    eye = [[Fraction(1 if i == j else 0) for j in range(DIM)] for i in range(DIM)]
    assert (odot(eye, s) - s.phi * 3).max_abs() == 0
    assert (odot_endo(eye, s) - s.phi * 3).max_abs() == 0


def test_action_matches_group_derivative(sf):
    # independent check: (d/dt) pullback by exp(-tA) at t = 0
    A = [[0.0] * DIM for _ in range(DIM)]
    A[0][1], A[1][0] = 1.0, -1.0
    A[2][4], A[4][2] = -0.7, 0.7
    h = 1e-6
    plus = act_on_form(matrix_exp([[h * x for x in r] for r in A]), sf.phi)
    minus = act_on_form(matrix_exp([[-h * x for x in r] for r in A]), sf.phi)
    fd = (plus - minus) * (1.0 / (2 * h))
    an = infinitesimal_action(A, sf)
    assert (fd - an).max_abs() < 1e-9


def test_stabilizer_matrices_act_trivially(s):
    for b in s.basis2_14:
        assert infinitesimal_action(two_form_to_matrix(b), s).max_abs() == 0


def test_seven_part_matrices_hit_seven_part(s):
    rows = []
    for b in s.basis2_7:
        out = infinitesimal_action(two_form_to_matrix(b), s)
        d = decompose3(out, s)
        assert d.p1.max_abs() == 0 and d.p27.max_abs() == 0
        rows.append(list(out.coeffs))
    assert ratlin.matrix_rank(rows, exact=True) == 7


def test_symmetric_action_injective(s):
    cols = [list(odot(b, s).coeffs) for b in symmetric_basis()]
    assert len(cols) == 28
    assert ratlin.matrix_rank(cols, exact=True) == 28


def test_odot_inverse_roundtrip(s, rng):
    for _ in range(10):
        b = SymTensor(rational_symmetric(rng))
        back = odot_inverse(odot(b, s), s)
        assert all(x == y for rb, rc in zip(back.rows, b.rows) for x, y in zip(rb, rc))


def test_odot_inverse_rejects_seven_part(s):
    with pytest.raises(DecompositionError):
        odot_inverse(s.frame3_7[2], s)


def test_odot_local_standard_frame(s, rng):
    b = rational_symmetric(rng)
    assert (odot_local(b, s) - odot(b, s)).max_abs() == 0


def test_odot_local_needs_frame_off_euclidean():
    d = [[Fraction(2 if i == j == 0 else (1 if i == j else 0)) for j in range(DIM)]
         for i in range(DIM)]
    s2 = G2Structure(pullback(phi0(), d))
    b = [[Fraction(1 if i == j else 0) for j in range(DIM)] for i in range(DIM)]
    with pytest.raises(FrameError):
        odot_local(b, s2)
    half = Fraction(1, 2)
    frame = [tuple((half if k == 0 else Fraction(1)) * x for x in basis_vector(k + 1))
             for k in range(DIM)]
    out = odot_local(b, s2, frame=frame)
    # frame components of the metric itself: identity, so the action is 3 phi
    assert (out - s2.phi * 3).max_abs() == 0


def test_odot_local_rejects_bad_frame(s):
    frame = [basis_vector(1)] * DIM
    with pytest.raises(FrameError):
        odot_local([[Fraction(0)] * DIM for _ in range(DIM)], s, frame=frame)


def test_sym_tensor_validation():
    bad = [[Fraction(0)] * DIM for _ in range(DIM)]
    bad[0][1] = Fraction(1)
    with pytest.raises(ValueError):
        SymTensor(tuple(tuple(r) for r in bad))
    eye = [[Fraction(1 if i == j else 0) for j in range(DIM)] for i in range(DIM)]
    with pytest.raises(ValueError):
        SymTensor(tuple(tuple(r) for r in eye), traceless=True)


# -- contraction identities ----------------------------------------------------


def test_triple_star_sign_value():
    assert triple_star_sign() == 1


@given(st.lists(st.integers(-5, 5), min_size=7, max_size=7))
@settings(max_examples=40)
def test_triple_star_identity(coeffs):
    s = standard_structure()
    alpha = KForm(1, tuple(Fraction(c) for c in coeffs))
    lhs = wedge(s.star_phi, s.star(wedge(s.star_phi, alpha)))
    assert (lhs - s.star(alpha) * 3).max_abs() == 0


@given(st.lists(st.integers(-5, 5), min_size=7, max_size=7))
@settings(max_examples=40)
def test_quadratic_term_phi_component(coeffs):
    s = standard_structure()
    w = KForm(1, tuple(Fraction(c) for c in coeffs))
    q = wedge(w, s.star(wedge(w, s.star_phi)))
    d = decompose3(q, s)
    n2 = form_inner(w, w, s.metric)
    assert (d.p1 - s.phi * (n2 * Fraction(3, 7))).max_abs() == 0
    assert d.p7.max_abs() == 0


def test_exact_structure_rejects_float_phi():
    with pytest.raises(ExactModeError):
        G2Structure(phi0(exact=False))
