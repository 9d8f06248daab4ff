import math

import numpy as np
import pytest

from majorana.errors import MaxStepsExceeded, RootNotFound, SingularDenominator, SingularityStop, StepUnderflow
from majorana.gauges import gauge_identity, gauge_power, gauge_tf_abel
from majorana.integrate import (
    SolverConfig,
    integrate_explicit,
    integrate_implicit,
    reconstruct_aux,
    reconstruct_majorana,
    rk4_fixed,
    solve_system,
)
from majorana.reduction import (
    ReducedODE,
    abel_reduced,
    aux_reduced,
    seed_from_point,
    tf_abel_reduced,
    tf_aux_reduced,
)
from majorana.scaling import THOMAS_FERMI, EmdenFowlerParams
from majorana.verify import direct_emden_fowler

EF02 = EmdenFowlerParams(0.0, 2.0)


def shifted(x):
    # y'' = y^2 is translation invariant, so 6/(x+1)^2 is exact and not self-similar
    return 6.0 / (x + 1.0) ** 2


def dshifted(x):
    return -12.0 / (x + 1.0) ** 3


def explicit(rhs, **kw):
    return ReducedODE(form="explicit", c=0.0, gauge=gauge_identity(), variable_kind="u", rhs=rhs, **kw)


def implicit(res):
    return ReducedODE(form="implicit", c=0.0, gauge=gauge_identity(), variable_kind="u", residual=res)


def test_exponential():
    out = integrate_explicit(explicit(lambda t, w: w), 0.0, 1.0, 1.0)
    assert out[-1][0] == 1.0
    assert abs(out[-1][1] - math.e) < 1e-8


def test_riccati_tanh():
    out = integrate_explicit(abel_reduced(EmdenFowlerParams(0.0, 1.0), gauge_identity()), 0.0, 0.0, 1.0)
    assert abs(out[-1][1] - 0.761594155955765) < 1e-8


def test_backward_direction():
    out = integrate_explicit(explicit(lambda t, w: w), 1.0, math.e, 0.0)
    assert np.all(np.diff([t for t, _ in out]) < 0)
    assert abs(out[-1][1] - 1.0) < 1e-8


def test_singularity_stop_on_auxiliary_equation():
    # from v~(0.5) = 3.5 the denominator 1 - t^2 v~ is driven to zero
    ode = tf_aux_reduced()
    with pytest.raises(SingularityStop) as info:
        integrate_explicit(ode, 0.5, 3.5, 1.0)
    t_last, w_last = info.value.last_sample
    assert 0.5 < t_last < 1.0
    assert abs(1 - t_last**2 * w_last) < 1e-2


def test_singular_start():
    with pytest.raises(SingularityStop):
        integrate_explicit(tf_aux_reduced(), 0.5, 4.0, 1.0)


def test_tightening_reduces_error():
    ode = abel_reduced(EmdenFowlerParams(0.0, 1.0), gauge_identity())
    errs = []
    for rt in (1e-5, 1e-7, 1e-9):
        w = integrate_explicit(ode, 0.0, 0.0, 2.0, SolverConfig(rel_tol=rt, abs_tol=rt * 1e-3))[-1][1]
        errs.append(abs(w - math.tanh(2.0)))
    assert errs[0] > errs[1] > errs[2]


def test_rk4_observed_order():
    f = lambda t, y: [1.0 - y[0] ** 2]
    errs = [abs(rk4_fixed(f, 0.0, [0.0], 1.0, n)[0] - math.tanh(1.0)) for n in (20, 40, 80)]
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert min(orders) >= 3.8


def test_max_steps():
    with pytest.raises(MaxStepsExceeded):
        integrate_explicit(explicit(lambda t, w: w), 0.0, 1.0, 10.0, SolverConfig(max_steps=3))


def test_step_underflow():
    # finite-time blow-up without a denominator to blame
    with pytest.raises((StepUnderflow, SingularityStop)):
        solve_system(lambda t, y: [y[0] ** 2], 0.0, [1.0], 2.0, SolverConfig(h_min=1e-10))


def test_implicit_constant_derivative():
    out = integrate_implicit(implicit(lambda t, u, ud: ud - 1.0), 0.5, 2.0, 1.5)
    assert out[-1][1] == pytest.approx(3.0, abs=1e-12)


def test_implicit_degenerate_linear_residual():
    with pytest.raises(RootNotFound):
        integrate_implicit(implicit(lambda t, u, ud: 0.0 * ud + 1.0), 0.0, 0.0, 1.0)


def test_implicit_nonlinear_residual_tanh():
    # (u')^3 = (1 - u^2)^3 has the single real root u' = 1 - u^2
    out = integrate_implicit(implicit(lambda t, u, ud: ud**3 - (1 - u * u) ** 3), 0.0, 0.0, 1.0, wdot_guess=1.0)
    assert out[-1][1] == pytest.approx(math.tanh(1.0), abs=1e-8)


def test_reconstruct_zero_u():
    g = gauge_power(2.0, 1.0)
    ode = ReducedODE(form="explicit", c=-0.5, gauge=g, variable_kind="u", rhs=lambda t, u: 0.0)
    tr = reconstruct_majorana(ode, 0.5, 0.0, 3.0, 2.0)
    assert np.allclose(tr.y, 3.0, rtol=0, atol=1e-15)
    assert np.allclose(tr.x, 2.0 * tr.t * 3.0**-0.5, rtol=1e-14)


def _seeded(kind, t_end):
    g = gauge_identity()
    t0, w0 = seed_from_point(-0.5, g, 1.0, shifted(1.0), dshifted(1.0), kind=kind)
    if kind == "u":
        return reconstruct_majorana(abel_reduced(EF02, g), t0, w0, shifted(1.0), t_end)
    return reconstruct_aux(aux_reduced(EF02, g), t0, w0, shifted(1.0), t_end)


@pytest.mark.parametrize("kind", ["u", "v"])
def test_reconstruct_shifted_exact_solution(kind):
    tr = _seeded(kind, 0.3)
    assert tr.x.max() / tr.x.min() > 7
    assert np.max(np.abs(tr.y - shifted(tr.x)) / shifted(tr.x)) < 1e-6
    assert np.max(np.abs(tr.slope - dshifted(tr.x)) / np.abs(dshifted(tr.x))) < 1e-6


@pytest.mark.parametrize("kind", ["u", "v"])
def test_trajectory_invariants(kind):
    tr = _seeded(kind, 2.0)
    assert np.all(np.diff(tr.t) > 0)
    assert np.all(tr.y > 0)
    z = np.array([gauge_identity().z(t) for t in tr.t])
    assert np.allclose(tr.x, z * tr.y**tr.c, rtol=1e-12, atol=0)
    res = tr.resample(np.linspace(tr.t[0], tr.t[-1], 333))
    zr = np.array([gauge_identity().z(t) for t in res.t])
    assert np.allclose(res.x, zr * res.y**res.c, rtol=1e-12, atol=0)


def test_slope_identity_under_refinement():
    tr = _seeded("u", 1.5)
    errs = []
    for n in (50, 100, 200, 400):
        r = tr.resample(np.linspace(tr.t[0], tr.t[-1], n))
        fd = np.diff(r.y) / np.diff(r.x)
        mid = 0.5 * (r.slope[1:] + r.slope[:-1])
        errs.append(np.max(np.abs(fd - mid) / np.abs(mid)))
    assert errs[-1] < errs[0] / 20
    assert errs[-1] < 1e-4


def test_reversibility():
    ode = tf_abel_reduced()
    cfg = SolverConfig()
    fwd = reconstruct_majorana(ode, 0.0, 0.0, 1.0, 0.4, cfg)
    back = reconstruct_majorana(ode, 0.4, float(fwd.w[-1]), float(fwd.y[-1]), 0.0, cfg)
    assert back.direction == "backward"
    local = cfg.rel_tol * np.max(np.abs(fwd.w)) + cfg.abs_tol
    assert abs(back.w[-1]) < 10 * local
    assert abs(back.y[-1] - 1.0) < 10 * local


def test_tf_abel_matches_direct_oracle():
    tr = reconstruct_majorana(tf_abel_reduced(), 0.0, 0.0, 1.0, 0.5)
    i = len(tr) // 3
    d = direct_emden_fowler(THOMAS_FERMI, float(tr.x[i]), float(tr.y[i]), float(tr.slope[i]), float(tr.x[-1]),
                            dense_points=None)
    assert d.y[-1] == pytest.approx(tr.y[-1], rel=1e-6)


def test_reconstruct_aux_chain_rule_at_c_zero():
    # c = 0: d log y/dt = v z', i.e. dy/dx = v y with dx = z' dt
    p = EmdenFowlerParams(0.0, 1.0)
    g = gauge_power(1.0, 2.0)
    tr = reconstruct_aux(aux_reduced(p, g), 0.5, 0.2, 1.0, 1.5)
    assert np.allclose(tr.x, [g.z(t) for t in tr.t], rtol=1e-14)
    # y'' = y from x = 0.25 with y = 1, y' = 0.2
    x0 = 0.25
    exact = np.cosh(tr.x - x0) + 0.2 * np.sinh(tr.x - x0)
    assert np.max(np.abs(tr.y - exact) / exact) < 1e-7


def test_reconstruct_aux_singular_seed():
    p = THOMAS_FERMI
    g = gauge_tf_abel()
    c = -1 / 3
    v0 = 1.0 / (c * g.z(0.2))
    with pytest.raises(SingularDenominator):
        reconstruct_aux(aux_reduced(p, g), 0.2, v0, 1.0, 0.5)


def test_invalid_config():
    from majorana.errors import ValidationError

    with pytest.raises(ValidationError):
        SolverConfig(rel_tol=0)
    with pytest.raises(ValidationError):
        SolverConfig(h_min=1.0, h_init=0.1)
