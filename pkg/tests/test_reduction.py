import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from majorana.errors import DegenerateExponent, DegenerateGauge, OutOfGaugeDomain, SingularDenominator
from majorana.gauges import gauge_identity, gauge_power, gauge_tf_abel, gauge_tf_aux
from majorana.reduction import (
    V_TILDE_TO_V,
    abel_coefficients,
    abel_rhs,
    aux_reduced_residual,
    aux_rhs,
    generic_reduced_residual,
    seed_from_point,
    tf_abel_reduced,
    tf_aux_reduced,
)
from majorana.scaling import THOMAS_FERMI, EmdenFowlerParams, ResidualODE2, ScalingLaw, emden_fowler_exponent, emden_fowler_residual

TF_LAW = emden_fowler_exponent(THOMAS_FERMI)
TF_F = emden_fowler_residual(THOMAS_FERMI)


def linear_root(residual):
    """Root of a residual that is affine in its argument."""
    r0, r1 = residual(0.0), residual(1.0)
    return -r0 / (r1 - r0)


def symbolic_abel_coefficients():
    """Coefficients of u' obtained by sympy from
    (z' u' - z'' u + (1-2c) z' u^2 + c(1-c) z u^3) = z^a (z' + c u z)^3."""
    u, ud, z, zd, zdd, a, c = sp.symbols("u ud z zd zdd a c")
    eq = sp.Eq(zd * ud - zdd * u + (1 - 2 * c) * zd * u**2 + c * (1 - c) * z * u**3, z**a * (zd + c * u * z) ** 3)
    sol = sp.expand(sp.solve(eq, ud)[0])
    poly = sp.Poly(sol, u)
    coeffs = [sp.simplify(poly.coeff_monomial(u**k)) for k in range(4)]
    return sp.lambdify((z, zd, zdd, a, c), coeffs, "math")


COEFFS = symbolic_abel_coefficients()


@pytest.mark.parametrize("t", [0.0, 0.5])
def test_tf_coefficients_examples(t):
    co = abel_coefficients(THOMAS_FERMI, gauge_tf_abel(), t)
    want = {0.0: (16 / 3, 25 / 3, 7 / 3, 0.0), 0.5: (32 / 3, 26 / 3, 1 / 3, -1 / 6)}[t]
    assert co.as_tuple() == pytest.approx(want, rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("a", [-1.5, 0.0, 1.0, 2.5])
def test_riccati_coefficients(a):
    co = abel_coefficients(EmdenFowlerParams(a, 1.0), gauge_identity(), 1.7)
    assert co.as_tuple() == pytest.approx((1.7**a, 0.0, -1.0, 0.0), abs=1e-14)


@pytest.mark.parametrize(
    "params,gauge,ts",
    [
        (THOMAS_FERMI, gauge_tf_abel(), [0.0, 0.3, 0.8]),
        (EmdenFowlerParams(1.0, 2.0), gauge_power(1.5, 0.7), [0.2, 1.0, 3.0]),
        (EmdenFowlerParams(-1.0, -1.0), gauge_tf_aux(), [0.4, 1.3]),
    ],
)
def test_coefficients_match_symbolic_solve(params, gauge, ts):
    c = emden_fowler_exponent(params).c
    for t in ts:
        want = COEFFS(gauge.z(t), gauge.zdot(t), gauge.zddot(t), params.a, c)
        got = abel_coefficients(params, gauge, t).as_tuple()
        for g, w in zip(got, want):
            assert abs(g - w) <= 1e-12 * max(1.0, abs(w))


def test_beta_uses_zddot_over_zdot():
    # the z''/z variant misses the closed-form coefficient
    g = gauge_tf_abel()
    t = 0.4
    beta = abel_coefficients(THOMAS_FERMI, g, t).beta
    assert beta == pytest.approx(8 + 1 / (3 * (1 - t)), rel=1e-13)
    variant = 3 * TF_LAW.c * g.z(t) ** 0.5 * g.zdot(t) + g.zddot(t) / g.z(t)
    assert abs(variant - beta) > 0.1


def test_abel_rhs_examples():
    g = gauge_tf_abel()
    assert abel_rhs(0.0, 0.0, THOMAS_FERMI, g) == pytest.approx(16 / 3, rel=1e-14)
    assert abel_rhs(0.0, 1.0, THOMAS_FERMI, g) == pytest.approx(16.0, rel=1e-14)
    assert abel_rhs(2.0, 0.0, EmdenFowlerParams(1.0, 1.0), gauge_identity()) == 2.0


def test_abel_errors():
    with pytest.raises(DegenerateExponent):
        abel_coefficients(EmdenFowlerParams(-2.0, 1.0), gauge_identity(), 1.0)
    with pytest.raises(OutOfGaugeDomain):
        abel_coefficients(THOMAS_FERMI, gauge_tf_abel(), 1.0)
    with pytest.raises(OutOfGaugeDomain):
        # z = t < 0 with a fractional exponent
        abel_coefficients(THOMAS_FERMI, gauge_identity(), -1.0)


def test_tf_abel_closed_form_matches_general():
    ode = tf_abel_reduced()
    g = gauge_tf_abel()
    rng = np.random.default_rng(1)
    for t, u in zip(rng.uniform(-1, 0.99, 100), rng.uniform(-5, 5, 100)):
        want = abel_rhs(t, u, THOMAS_FERMI, g)
        assert ode.rhs(t, u) == pytest.approx(want, rel=1e-12, abs=1e-12)
    assert ode.rhs(0, 0) == pytest.approx(16 / 3)
    with pytest.raises(OutOfGaugeDomain):
        ode.rhs(1.0, 0.0)


def test_tf_aux_closed_form_examples():
    ode = tf_aux_reduced()
    assert ode.rhs(0.0, 3.3) == -8.0
    assert ode.rhs(1.0, 0.0) == -8.0
    assert ode.rhs(0.5, 1.0) == pytest.approx(-16 / 3)
    with pytest.raises(SingularDenominator):
        ode.rhs(0.5, 4.0)
    assert ode.singular(0.5, 4.0)
    assert not ode.singular(0.5, 3.0)


def test_aux_rhs_riccati_case():
    p = EmdenFowlerParams(0.7, 1.0)
    g = gauge_power(2.0, 1.3)
    for t, v in [(0.5, 0.3), (1.2, -2.0)]:
        assert aux_rhs(t, v, p, g) == pytest.approx(g.zdot(t) * (g.z(t) ** 0.7 - v * v), rel=1e-14)


def test_aux_rhs_tf_matches_eq35_form():
    g = gauge_tf_aux()
    for t, vt in [(0.3, 2.0), (1.1, -0.4), (0.9, 0.5)]:
        got = aux_rhs(t, V_TILDE_TO_V * vt, THOMAS_FERMI, g) / V_TILDE_TO_V
        assert got == pytest.approx(8 * (t * vt * vt - 1) / (1 - t * t * vt), rel=1e-12)


def test_aux_rhs_singular():
    g = gauge_tf_aux()
    t = 0.5
    with pytest.raises(SingularDenominator):
        aux_rhs(t, V_TILDE_TO_V * (1 / t**2), THOMAS_FERMI, g)


@given(st.floats(-0.9, 0.9), st.floats(-3, 3))
def test_generic_residual_agrees_with_abel(t, u):
    g = gauge_tf_abel()
    z, zd = g.z(t), g.zdot(t)
    if abs(zd + TF_LAW.c * u * z) < 1e-3:
        return
    udot = linear_root(lambda p: generic_reduced_residual(TF_F, TF_LAW, g, t, u, p))
    want = abel_rhs(t, u, THOMAS_FERMI, g)
    assert abs(udot - want) <= 1e-9 * max(1.0, abs(want))


@given(st.floats(-0.9, 0.9), st.floats(-2, 2))
def test_aux_residual_agrees_with_aux_rhs(t, v):
    g = gauge_tf_abel()
    den = 1 - TF_LAW.c * v * g.z(t)
    if abs(den) < 1e-3:
        return
    vdot = linear_root(lambda p: aux_reduced_residual(TF_F, TF_LAW, g, t, v, p))
    want = aux_rhs(t, v, THOMAS_FERMI, g)
    assert abs(vdot - want) <= 1e-10 * max(1.0, abs(want))


def test_generic_residual_at_zero_u():
    g = gauge_power(1.0, 2.0)
    t, ud = 1.3, 0.7
    assert generic_reduced_residual(TF_F, TF_LAW, g, t, 0.0, ud) == pytest.approx(
        TF_F.evaluate(g.z(t), 1.0, 0.0, ud / g.zdot(t) ** 2), rel=1e-14
    )


def test_generic_residual_free_particle():
    # F = y'': the residual vanishes where z' u' = z'' u - (1-2c) z' u^2 - c(1-c) z u^3
    F = ResidualODE2(lambda x, y, yp, ypp: ypp)
    for c in (-0.7, 0.25, 1.5):
        law = ScalingLaw(c, 1 - 2 * c)
        g = gauge_identity()
        t, u = 0.8, 0.4
        ud = linear_root(lambda p: generic_reduced_residual(F, law, g, t, u, p))
        assert ud == pytest.approx(-(1 - 2 * c) * u * u - c * (1 - c) * t * u**3, rel=1e-12)
        assert abs(generic_reduced_residual(F, law, g, t, u, ud)) < 1e-12


def test_generic_residual_singular():
    g = gauge_identity()
    # z' + c u z = 1 - u/3 * t vanishes at u = 3/t
    with pytest.raises(SingularDenominator):
        generic_reduced_residual(TF_F, TF_LAW, g, 1.5, 2.0, 0.0)


def test_aux_residual_zero_v_and_riccati():
    g = gauge_power(1.0, 2.0)
    t, vd = 1.3, 0.7
    assert aux_reduced_residual(TF_F, TF_LAW, g, t, 0.0, vd) == pytest.approx(
        TF_F.evaluate(g.z(t), 1.0, 0.0, vd / g.zdot(t)), rel=1e-14
    )
    p = EmdenFowlerParams(0.5, 1.0)
    F, law = emden_fowler_residual(p), emden_fowler_exponent(p)
    v = 0.6
    assert aux_reduced_residual(F, law, g, t, v, vd) == pytest.approx(
        vd / g.zdot(t) + v * v - g.z(t) ** 0.5, rel=1e-14
    )


def test_aux_residual_degenerate_gauge():
    g = gauge_tf_aux()
    with pytest.raises((DegenerateGauge, OutOfGaugeDomain)):
        aux_reduced_residual(TF_F, TF_LAW, g, 0.0, 1.0, 1.0)


def test_seed_rejects_power_law_point():
    with pytest.raises(SingularDenominator):
        seed_from_point(-0.5, gauge_identity(), 2.0, 1.5, -1.5)


def test_seed_round_trip():
    g = gauge_tf_abel()
    t0, u0 = seed_from_point(TF_LAW.c, g, 3.0, 0.2, -0.1, t_bracket=(-50, 1))
    assert g.z(t0) * 0.2 ** TF_LAW.c == pytest.approx(3.0, rel=1e-13)
    v = u0 / (g.zdot(t0) + TF_LAW.c * u0 * g.z(t0))
    assert v * 0.2 ** (1 - TF_LAW.c) == pytest.approx(-0.1, rel=1e-12)
