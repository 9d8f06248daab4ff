"""Independent checks: direct second-order integration, residuals along
sampled curves, and the Thomas-Fermi initial slope by two routes.

The direct integrator is scipy's DOP853, deliberately not the stepper
used by the reduced pipeline.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator

from .errors import BracketLost, DomainExit, IntegrationError, NonMonotoneX, RangeNotCovered, ValidationError
from .integrate import SolverConfig, Trajectory, reconstruct_aux
from .reduction import V_TILDE_TO_V, tf_aux_reduced
from .scaling import THOMAS_FERMI, EmdenFowlerParams, ResidualODE2
from .series import PowerSeries, eq35_polynomials, series_eval, series_solve_rational, tf_boundary_series_at_one

TF_SLOPE_BRACKET = (-2.0, -1.0)


@dataclass(frozen=True)
class DirectCurve:
    x: np.ndarray
    y: np.ndarray
    yp: np.ndarray
    params: EmdenFowlerParams
    method: str = "direct:DOP853"
    status: str = "ok"


def _ef_rhs(params):
    a, b = params.a, params.b
    fractional = not float(b).is_integer()

    def f(x, s):
        y = max(s[0], 0.0) if fractional else s[0]
        return [s[1], x**a * y**b]

    return f


def direct_emden_fowler(
    params: EmdenFowlerParams, x0: float, y0: float, yp0: float, x_end: float,
    cfg: SolverConfig = SolverConfig(), dense_points: int | None = None,
) -> DirectCurve:
    """Integrate y'' = x^a y^b as the system y' = p, p' = x^a y^b.

    With a fractional b the run stops where y reaches zero and the curve is
    returned with status "hit-zero".
    """
    if x0 <= 0 and not (float(params.a).is_integer() and params.a >= 0):
        raise ValidationError(f"x^{params.a:g} needs x0 > 0")
    if x_end == x0:
        raise ValidationError("x_end must differ from x0")
    fractional = not float(params.b).is_integer()
    if fractional and not y0 > 0:
        raise DomainExit(f"y0 = {y0!r} is outside the domain of y^{params.b:g}")
    events = []
    if fractional:
        def hit_zero(x, s):
            return s[0]
        hit_zero.terminal = True
        hit_zero.direction = -1
        events.append(hit_zero)
    t_eval = np.linspace(x0, x_end, dense_points) if dense_points else None
    sol = solve_ivp(
        _ef_rhs(params), (x0, x_end), [y0, yp0], method="DOP853",
        rtol=cfg.rel_tol, atol=cfg.abs_tol, events=events or None, t_eval=t_eval,
    )
    if sol.status < 0:
        raise IntegrationError(f"direct integration failed: {sol.message}")
    status = "hit-zero" if sol.status == 1 else "ok"
    return DirectCurve(sol.t, sol.y[0], sol.y[1], params, status=status)


def residual_along_curve(F: ResidualODE2, traj, scale=None) -> float:
    """Max |F(x, y, y', y'')| over interior samples, derivatives by centred
    finite differences in x on the (possibly non-uniform) sample grid.

    ``traj`` is anything with ``x`` and ``y`` arrays. The residual is
    divided by max(1, max|scale(x, y)|); for Emden-Fowler curves pass
    scale = x^a y^b.
    """
    x = np.asarray(traj.x, dtype=float)
    y = np.asarray(traj.y, dtype=float)
    if len(x) < 5:
        raise ValidationError("residual_along_curve needs at least 5 samples")
    dx = np.diff(x)
    if not (np.all(dx > 0) or np.all(dx < 0)):
        raise NonMonotoneX("x is not strictly monotone along the curve")
    if dx[0] < 0:
        x, y = x[::-1], y[::-1]
    h0, h1 = np.diff(x)[:-1], np.diff(x)[1:]
    ym, yc, yq = y[:-2], y[1:-1], y[2:]
    yp = (-h1 / (h0 * (h0 + h1))) * ym + ((h1 - h0) / (h0 * h1)) * yc + (h0 / (h1 * (h0 + h1))) * yq
    ypp = 2.0 * (ym / (h0 * (h0 + h1)) - yc / (h0 * h1) + yq / (h1 * (h0 + h1)))
    xc = x[1:-1]
    res = np.array([F.evaluate(*args) for args in zip(xc, yc, yp, ypp)])
    norm = 1.0
    if scale is not None:
        norm = max(1.0, float(np.max(np.abs([scale(xi, yi) for xi, yi in zip(xc, yc)]))))
    return float(np.max(np.abs(res))) / norm


def _tf_start(s, x0):
    # y = 1 + s x + (4/3) x^(3/2) + O(x^(5/2)) near the origin
    return 1.0 + s * x0 + (4.0 / 3.0) * x0**1.5, s + 2.0 * math.sqrt(x0)


def classify_tf_trial(s: float, cfg: SolverConfig = SolverConfig(), x0_small: float = 1e-6, x_max: float = 50.0) -> str:
    """"below" if the trial curve reaches y = 0, "above" if it turns upward."""
    y0, p0 = _tf_start(s, x0_small)

    def hits_zero(x, st):
        return st[0] - 1e-12
    hits_zero.terminal = True
    hits_zero.direction = -1

    def turns_up(x, st):
        return st[1]
    turns_up.terminal = True
    turns_up.direction = 1

    sol = solve_ivp(
        _ef_rhs(THOMAS_FERMI), (x0_small, x_max), [y0, p0], method="DOP853",
        rtol=cfg.rel_tol, atol=cfg.abs_tol, events=[hits_zero, turns_up],
    )
    if len(sol.t_events[0]):
        return "below"
    if len(sol.t_events[1]):
        return "above"
    # undecided at x_max: the trial is within the bisection tolerance
    return "above"


def tf_initial_slope_shooting(
    cfg: SolverConfig = SolverConfig(), bracket=TF_SLOPE_BRACKET, tol: float = 1e-6,
    x0_small: float = 1e-6, x_max: float = 50.0,
) -> float:
    """Bisection on y'(0) for y'' = y^(3/2)/sqrt(x), y(0) = 1, y(inf) = 0."""
    lo, hi = map(float, bracket)
    c_lo = classify_tf_trial(lo, cfg, x0_small, x_max)
    c_hi = classify_tf_trial(hi, cfg, x0_small, x_max)
    if c_lo == c_hi:
        raise BracketLost(f"both slopes {lo} and {hi} classify as {c_lo!r}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if classify_tf_trial(mid, cfg, x0_small, x_max) == c_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ReducedTF:
    slope: float
    v_tilde_at_zero: float
    curve: Trajectory  # normalised so that y(0) = 1


def tf_reduced_solution(cfg: SolverConfig = SolverConfig(), s_start: float = 1e-6, order: int = 8) -> ReducedTF:
    """Follow the auxiliary-equation trajectory through (t, v~) = (1, 0)
    back to t = 0 and rescale y so that y(0) = 1."""
    ode = tf_aux_reduced(cfg.eps_sing)
    t_start = 1.0 - s_start
    w_start = series_eval(tf_boundary_series_at_one(order), t_start)
    traj = reconstruct_aux(ode, t_start, w_start, 1.0, 0.0, cfg)
    lam = 1.0 / traj.y[-1]
    c = traj.c
    # y -> lam y, x -> lam^c x keeps x = z y^c; y' picks up lam^(1-c)
    curve = Trajectory(
        t=traj.t, w=traj.w, y=traj.y * lam, x=traj.x * lam**c, variable_kind=traj.variable_kind, c=c,
        gauge=traj.gauge, method=traj.method + "+normalised", direction=traj.direction,
        slope=traj.slope * lam ** (1.0 - c), wdot=traj.wdot, log_ydot=traj.log_ydot, z=traj.z,
        slope_fn=traj.slope_fn,
    )
    w0 = float(traj.w[-1])
    return ReducedTF(slope=ode.v_scale * w0, v_tilde_at_zero=w0, curve=curve)


def tf_initial_slope_reduced(cfg: SolverConfig = SolverConfig()) -> float:
    return tf_reduced_solution(cfg).slope


def compare_curves(A, B, x_range, n: int = 512) -> float:
    """Max relative deviation of y between two curves on a common x-grid
    (monotone cubic interpolation of each)."""
    x_lo, x_hi = x_range

    def interpolant(curve):
        x = np.asarray(curve.x, dtype=float)
        y = np.asarray(curve.y, dtype=float)
        if len(x) < 2:
            raise RangeNotCovered("a curve needs at least two samples")
        order = np.argsort(x)
        x, y = x[order], y[order]
        keep = np.concatenate([[True], np.diff(x) > 0])
        x, y = x[keep], y[keep]
        if x[0] > x_lo * (1 + 1e-12) or x[-1] < x_hi * (1 - 1e-12):
            raise RangeNotCovered(f"curve spans [{x[0]:.6g}, {x[-1]:.6g}], need [{x_lo:g}, {x_hi:g}]")
        return PchipInterpolator(x, y, extrapolate=True)

    ia, ib = interpolant(A), interpolant(B)
    grid = np.linspace(x_lo, x_hi, n)
    ya, yb = ia(grid), ib(grid)
    return float(np.max(np.abs(ya - yb) / np.maximum(np.abs(yb), 1e-300)))


@dataclass(frozen=True)
class AnalyticCurve:
    x: np.ndarray
    y: np.ndarray


def sample_function(fn, x_lo, x_hi, n=10_000) -> AnalyticCurve:
    x = np.linspace(x_lo, x_hi, n)
    return AnalyticCurve(x, fn(x))


def densify(traj: Trajectory, n: int = 4000) -> Trajectory:
    """Trajectory resampled on n uniform t-points by Hermite dense output."""
    return traj.resample(np.linspace(traj.t[0], traj.t[-1], n))


def closure_deviation(traj: Trajectory, params: EmdenFowlerParams, indices, cfg: SolverConfig = SolverConfig()) -> float:
    """Re-integrate the unreduced equation from trajectory samples and return
    the worst relative deviation from the trajectory over the shared x-range."""
    x = np.asarray(traj.x, dtype=float)
    y = np.asarray(traj.y, dtype=float)
    worst = 0.0
    for i in indices:
        x0, y0, p0 = float(x[i]), float(y[i]), float(traj.slope[i])
        for side in (np.flatnonzero(x < x0), np.flatnonzero(x > x0)):
            if len(side) == 0:
                continue
            # order targets along the integration direction
            side = side[np.argsort(np.abs(x[side] - x0))]
            sol = solve_ivp(
                _ef_rhs(params), (x0, float(x[side[-1]])), [y0, p0], method="DOP853",
                rtol=cfg.rel_tol, atol=cfg.abs_tol, t_eval=x[side],
            )
            n = len(sol.t)
            if n == 0:
                continue
            ref = y[side[:n]]
            worst = max(worst, float(np.max(np.abs(sol.y[0] - ref) / np.abs(ref))))
    return worst


@dataclass(frozen=True)
class SeriesTF:
    slope: float
    v_tilde_at_zero: float
    boundary: PowerSeries
    centers: tuple[float, ...]


def _safe_step(ps: PowerSeries, fraction: float, h_cap: float) -> float:
    # root test on the upper half of the coefficients
    a = np.abs(np.asarray(ps.coeffs, dtype=float))
    k = np.arange(len(a))
    upper = (k >= len(a) // 2) & (a > 0)
    if not np.any(upper):
        return h_cap
    radius = float(np.min(a[upper] ** (-1.0 / k[upper])))
    return min(h_cap, fraction * radius)


def tf_initial_slope_series(order: int = 30, s_start: float = 0.02, fraction: float = 0.3, h_cap: float = 0.1) -> SeriesTF:
    """Slope y'(0) by series continuation of the auxiliary equation from
    (t, v~) = (1, 0) down to t = 0, re-expanding at each step.

    No step integrator is involved. v = y' y^(c-1) does not change under
    y -> lam y, so v(0) is the slope of the solution with y(0) = 1.
    """
    P, Q = eq35_polynomials()
    boundary = tf_boundary_series_at_one(order)
    t = 1.0 - s_start
    w = series_eval(boundary, t)
    centers = [1.0]
    while t > 0.0:
        ps = series_solve_rational(P, Q, t, w, order)
        centers.append(t)
        t_next = max(0.0, t - _safe_step(ps, fraction, h_cap))
        w = series_eval(ps, t_next)
        t = t_next
    return SeriesTF(slope=V_TILDE_TO_V * w, v_tilde_at_zero=w, boundary=boundary, centers=tuple(centers))
