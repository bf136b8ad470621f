"""The metric-preserving family: twisting, recovery, derivatives."""
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from g2kit.bryant import (
    TwistParams,
    TwistTangent,
    derivative_margin,
    derivative_matrix,
    derivative_rank,
    recover,
    sample_params,
    tangent_basis,
    twist,
    twist_decomposed,
    twist_derivative,
)
from g2kit.errors import (
    ConstraintError,
    DegreeError,
    MetricMismatchError,
    RecoveryError,
    TangencyError,
)
from g2kit.exterior import DIM, KForm, form_inner, pullback
from g2kit.g2core import G2Structure, decompose3, metric_from_phi, odot, phi0, standard_structure
from g2kit.sampling import rational_kform


def sphere_points():
    # stereographic image of an integer vector is exactly on the unit sphere
    vec = st.lists(st.integers(-5, 5), min_size=7, max_size=7)

    def build(u):
        n = sum(x * x for x in u)
        c = Fraction(1 - n, 1 + n)
        w = tuple(Fraction(2 * x, 1 + n) for x in u)
        return TwistParams(c, KForm(1, w))

    return vec.map(build)


ZERO1 = KForm.zero(1)


def test_identity_points(s):
    assert (twist(s, TwistParams(1, ZERO1)) - s.phi).max_abs() == 0
    assert (twist(s, TwistParams(-1, ZERO1)) - s.phi).max_abs() == 0


def test_equator_twist_frozen(s):
    # direction dx1: flips the block away from dx1 and doubles into it
    p = TwistParams(0, KForm.from_entries(1, {(1,): 1}))
    expect = KForm.from_entries(3, {
        (1, 2, 3): 1, (1, 4, 5): 1, (1, 6, 7): 1,
        (2, 4, 6): -1, (2, 5, 7): 1, (3, 4, 7): 1, (3, 5, 6): 1,
    })
    assert (twist(s, p) - expect).max_abs() == 0


def test_rational_point_twist_frozen(s):
    p = TwistParams(Fraction(3, 5), KForm.from_entries(1, {(1,): Fraction(4, 5)}))
    out = twist(s, p)
    assert out.coeff(1, 2, 3) == 1 and out.coeff(1, 4, 5) == 1 and out.coeff(1, 6, 7) == 1
    assert out.coeff(2, 4, 6) == Fraction(-7, 25)
    assert out.coeff(2, 4, 7) == Fraction(24, 25)
    assert out.coeff(3, 5, 7) == Fraction(-24, 25)
    assert form_inner(out, s.phi, s.metric) == Fraction(47, 25)


def test_constraint_enforced(s):
    with pytest.raises(ConstraintError):
        twist(s, TwistParams(1, KForm.from_entries(1, {(1,): 1})))
    with pytest.raises(DegreeError):
        TwistParams(1, KForm.zero(2))


def test_antipode_and_canonical():
    p = TwistParams(Fraction(-3, 5), KForm.from_entries(1, {(2,): Fraction(4, 5)}))
    q = p.canonical()
    assert q.c == Fraction(3, 5)
    assert q.omega.coeff(2) == Fraction(-4, 5)
    r = TwistParams(0, KForm.from_entries(1, {(3,): -1})).canonical()
    assert r.omega.coeff(3) == 1
    assert p.equivalent_to(q)


@given(sphere_points())
@settings(max_examples=40, deadline=None)
def test_twist_preserves_metric(p):
    s = standard_structure()
    g, o = metric_from_phi(twist(s, p))
    assert o.sign == 1
    assert all(g.rows[i][j] == (1 if i == j else 0)
               for i in range(DIM) for j in range(DIM))


@given(sphere_points())
@settings(max_examples=40, deadline=None)
def test_twist_antipode_equal(p):
    s = standard_structure()
    assert (twist(s, p) - twist(s, p.antipode())).max_abs() == 0


@given(sphere_points())
@settings(max_examples=40, deadline=None)
def test_twist_inner_law(p):
    s = standard_structure()
    assert form_inner(twist(s, p), s.phi, s.metric) == 8 * p.c * p.c - 1


@given(sphere_points())
@settings(max_examples=20, deadline=None)
def test_twist_decomposed_matches(p):
    s = standard_structure()
    phit = twist(s, p)
    dd = twist_decomposed(s, p)
    d = decompose3(phit, s)
    assert (dd.total() - phit).max_abs() == 0
    for a, b in ((dd.p1, d.p1), (dd.p7, d.p7), (dd.p27, d.p27)):
        assert (a - b).max_abs() == 0


# -- recovery -----------------------------------------------------------------


def test_recover_roundtrip_generic(s, rng):
    for _ in range(8):
        p = sample_params(rng)
        rec = recover(s, twist(s, p))
        assert rec.params.equivalent_to(p)
        assert rec.residual == 0


def test_recover_roundtrip_equator(s, rng):
    for _ in range(4):
        p = sample_params(rng, force_c_zero=True)
        rec = recover(s, twist(s, p))
        assert rec.params.equivalent_to(p)
        assert rec.residual == 0


def test_recover_is_canonical(s, rng):
    p = sample_params(rng)
    rec = recover(s, twist(s, p.antipode()))
    assert rec.params.c > 0 or (rec.params.c == 0)


def test_recover_float_roundtrip(sf, rng):
    for _ in range(5):
        p = sample_params(rng)
        pf = TwistParams(float(p.c), p.omega.as_float())
        rec = recover(sf, twist(sf, pf))
        assert rec.params.equivalent_to(pf, tol=1e-8)
        assert rec.residual <= 1e-9


def test_recover_rejects_foreign_metric(s):
    d = [[Fraction(2 if i == j == 0 else (1 if i == j else 0)) for j in range(DIM)]
         for i in range(DIM)]
    with pytest.raises(MetricMismatchError):
        recover(s, pullback(phi0(), d))


def test_recover_rejects_orientation_flip(s):
    with pytest.raises(MetricMismatchError):
        recover(s, phi0() * -1)


def test_recover_rejects_noise(sf, rng):
    p = sample_params(rng)
    pf = TwistParams(float(p.c), p.omega.as_float())
    noisy = twist(sf, pf) + KForm.from_entries(3, {(1, 2, 4): 1e-3}, exact=False)
    with pytest.raises((RecoveryError, MetricMismatchError)):
        recover(sf, noisy)


def test_two_step_twists_stay_in_family(s, rng):
    p1 = sample_params(rng)
    s1 = G2Structure(twist(s, p1))
    p2 = sample_params(rng)
    rec = recover(s, twist(s1, p2))
    assert rec.residual == 0


# -- derivatives ---------------------------------------------------------------


def test_tangency_enforced(s):
    p = TwistParams(1, ZERO1)
    bad = TwistTangent(1, ZERO1)  # radial direction
    with pytest.raises(TangencyError):
        twist_derivative(s, p, bad)


def test_derivative_at_pole_is_pure_seven_part(s):
    # at (1, 0) the c-line is radial; the omega directions give pure 7-parts
    t = TwistTangent(0, KForm.from_entries(1, {(1,): 1}))
    out = twist_derivative(s, TwistParams(1, ZERO1), t)
    d = decompose3(out, s)
    assert d.p1.max_abs() == 0 and d.p27.max_abs() == 0
    assert (out - d.p7).max_abs() == 0


def test_derivative_matches_finite_difference(sf, rng):
    h = 1e-5
    for _ in range(15):
        p = sample_params(rng)
        base = [float(p.c)] + [float(x) for x in p.omega.coeffs]
        q = sample_params(rng)
        vec = [float(q.c)] + [float(x) for x in q.omega.coeffs]
        dot = sum(x * y for x, y in zip(vec, base))
        vec = [x - dot * y for x, y in zip(vec, base)]
        n = math.sqrt(sum(x * x for x in vec))
        if n < 1e-6:
            continue
        vec = [x / n for x in vec]

        def at(theta):
            cs, sn = math.cos(theta), math.sin(theta)
            return twist(sf, TwistParams(
                cs * base[0] + sn * vec[0],
                KForm(1, tuple(cs * b + sn * v for b, v in zip(base[1:], vec[1:])))))

        fd = (at(h) - at(-h)) * (1.0 / (2 * h))
        an = twist_derivative(sf, TwistParams(base[0], KForm(1, tuple(base[1:]))),
                              TwistTangent(vec[0], KForm(1, tuple(vec[1:]))))
        rel = float((fd - an).max_abs()) / max(float(an.max_abs()), 1e-12)
        assert rel <= 1e-6


def test_zero_c_derivative_is_symmetric_tensor_action(s, rng):
    for _ in range(6):
        p = sample_params(rng, force_c_zero=True)
        wdot = rational_kform(rng, 1)
        wdot = wdot - p.omega * form_inner(wdot, p.omega, s.metric)
        t = TwistTangent(Fraction(0), wdot)
        h = [[2 * (wdot.coeffs[i] * p.omega.coeffs[j] + p.omega.coeffs[i] * wdot.coeffs[j])
              for j in range(DIM)] for i in range(DIM)]
        assert (twist_derivative(s, p, t) - odot(h, s)).max_abs() == 0


def test_derivative_rank_seven(s, rng):
    pts = [TwistParams(1, ZERO1)]
    pts += [sample_params(rng) for _ in range(4)]
    pts += [sample_params(rng, force_c_zero=True) for _ in range(2)]
    for p in pts:
        assert derivative_rank(s, p, DIM) == 7


def test_derivative_margin_positive(s, rng):
    lo, hi = derivative_margin(s, TwistParams(1, ZERO1), DIM)
    assert lo == pytest.approx(4.0, abs=1e-9)
    assert hi == pytest.approx(4.0, abs=1e-9)
    lo2, _ = derivative_margin(s, sample_params(rng), DIM)
    assert lo2 > 0.1


def test_derivative_rank_in_subspace(s, rng):
    for d in (1, 3):
        p = sample_params(rng, subspace_dim=d)
        assert derivative_rank(s, p, d) == d
        mat = derivative_matrix(s, p, d)
        assert len(mat[0]) == d


def test_tangent_basis_shape(s, rng):
    p = sample_params(rng)
    basis = tangent_basis(s, p, DIM)
    assert len(basis) == 7
    for t in basis:
        assert t.tangency_residual(p, s) == 0


def test_tangent_basis_rejects_off_subspace_point(s):
    p = TwistParams(Fraction(3, 5), KForm.from_entries(1, {(4,): Fraction(4, 5)}))
    with pytest.raises(ConstraintError):
        tangent_basis(s, p, 1)
