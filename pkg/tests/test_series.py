import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from majorana.errors import OverflowDetected, SingularExpansionPoint
from majorana.integrate import SolverConfig, integrate_explicit
from majorana.reduction import ReducedODE, tf_aux_reduced
from majorana.gauges import gauge_identity
from majorana.series import (
    BivariatePoly,
    PowerSeries,
    eq35_polynomials,
    series_eval,
    series_residual,
    series_solve_rational,
    tf_boundary_series_at_one,
)

TIGHT = SolverConfig(rel_tol=1e-12, abs_tol=1e-14)


def test_exponential_series():
    P = BivariatePoly.from_terms({(0, 0): 1.0})
    Q = BivariatePoly.from_terms({(0, 1): 1.0})
    ps = series_solve_rational(P, Q, 0.0, 1.0, 12)
    assert ps.coeffs == pytest.approx([1 / math.factorial(k) for k in range(13)], rel=1e-14)


@pytest.mark.parametrize("w0", [-1.0, 0.0, 2.7746])
def test_eq35_first_coefficient(w0):
    ps = series_solve_rational(*eq35_polynomials(), 0.0, w0, 5)
    assert ps.coeffs[1] == -8.0


def test_eval_examples():
    assert series_eval(PowerSeries(0.0, (1, 1, 0.5, 1 / 6)), 1.0) == pytest.approx(8 / 3)
    assert series_eval(PowerSeries(3.0, (4.2,)), -17.0) == 4.2


def test_physical_branch_series_near_center():
    # on the Thomas-Fermi branch the radius is well below 0.4; check inside it
    P, Q = eq35_polynomials()
    ode = tf_aux_reduced()
    ps = series_solve_rational(P, Q, 0.0, 2.7746, 30)
    for t in (0.05, 0.1):
        ref = integrate_explicit(ode, 0.0, 2.7746, t, TIGHT)[-1][1]
        assert abs(series_eval(ps, t) - ref) < 1e-8


def test_tail_dominance_inside_radius():
    P, Q = eq35_polynomials()
    ps = series_solve_rational(P, Q, 3.0, -2.0, 30)
    for t in (2.5, 3.5):
        assert abs(series_eval(ps, t) - series_eval(ps.truncated(28), t)) < 1e-9


def test_singular_expansion_point():
    P, Q = eq35_polynomials()
    with pytest.raises(SingularExpansionPoint):
        series_solve_rational(P, Q, 1.0, 1.0, 5)


def test_overflow_guard():
    # w' = 1e200 w^2 pushes a_2 past the limit
    P = BivariatePoly.from_terms({(0, 0): 1.0})
    Q = BivariatePoly.from_terms({(0, 2): 1e200})
    with pytest.raises(OverflowDetected):
        series_solve_rational(P, Q, 0.0, 1.0, 5)


def test_boundary_series_leading_terms():
    ps = tf_boundary_series_at_one(10)
    assert ps.coeffs[0] == 0.0
    assert ps.coeffs[1] == 8.0
    assert ps.coeffs[2] == 32.0
    assert series_eval(ps, 1.0) == 0.0


def test_boundary_series_second_coefficient_by_hand():
    # v~ = 8 s + b s^2 in (1 - (1-s)^2 v~) dv~/ds = 8 (1 - (1-s) v~^2):
    # s^1 terms give 2b - 64 = 0
    b = 32.0
    s = 1e-4
    v = 8 * s + b * s * s
    lhs = (1 - (1 - s) ** 2 * v) * (8 + 2 * b * s)
    rhs = 8 * (1 - (1 - s) * v * v)
    assert abs(lhs - rhs) < 50 * s * s * 8


def test_boundary_series_residual():
    ps = tf_boundary_series_at_one(20)
    res = series_residual(*eq35_polynomials(), ps)
    assert np.max(np.abs(res)) <= 1e-12 * np.max(np.abs(ps.coeffs))


def test_boundary_series_vs_integrator():
    ode = tf_aux_reduced()
    s0 = 1e-4
    two_term = 8 * s0 + 32 * s0 * s0
    ref = integrate_explicit(ode, 1 - s0, two_term, 0.99, TIGHT)[-1][1]
    assert abs(series_eval(tf_boundary_series_at_one(8), 0.99) - ref) < 1e-9


def poly_strategy():
    coef = st.floats(-1.0, 1.0, allow_nan=False)
    return st.tuples(coef, coef, coef, coef, coef)


@settings(max_examples=5, deadline=None)
@given(poly_strategy(), st.floats(-0.5, 0.5))
def test_random_rational_equations_match_integrator(qc, w0):
    # P = 1 + 0.1 t w keeps P(0, w0) = 1; Q is a random quadratic
    P = BivariatePoly.from_terms({(0, 0): 1.0, (1, 1): 0.1})
    Q = BivariatePoly.from_terms({(0, 0): qc[0], (1, 0): qc[1], (0, 1): qc[2], (0, 2): qc[3], (1, 1): qc[4]})
    ps = series_solve_rational(P, Q, 0.0, w0, 30)
    res = series_residual(P, Q, ps)
    assert np.max(np.abs(res)) <= 1e-12 * max(1.0, np.max(np.abs(ps.coeffs)))
    ode = ReducedODE(form="explicit", c=0.0, gauge=gauge_identity(), variable_kind="u",
                     rhs=lambda t, w: Q(t, w) / P(t, w))
    for t in (-0.2, 0.2):
        ref = integrate_explicit(ode, 0.0, w0, t, TIGHT)[-1][1]
        assert abs(series_eval(ps, t) - ref) < 1e-8


def test_shifted_polynomial_identity():
    P = BivariatePoly.from_terms({(0, 0): 1.0, (2, 1): -1.0, (3, 0): 0.5})
    S = P.shifted(0.7)
    for t, w in [(0.1, 2.0), (1.5, -0.3)]:
        assert S(t - 0.7, w) == pytest.approx(P(t, w), rel=1e-13)
