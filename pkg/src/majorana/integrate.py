"""Integration of reduced equations and reconstruction of (x(t), y(t)).

The stepper is a Dormand-Prince 5(4) pair with FSAL and a standard
PI-free step controller. Singularities of the reduced equation are caught
by watching the sign of its denominator across each step.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    MaxStepsExceeded,
    OutOfGaugeDomain,
    RootNotFound,
    SingularDenominator,
    SingularityStop,
    StepUnderflow,
    ValidationError,
)
from .reduction import ReducedODE


@dataclass(frozen=True)
class SolverConfig:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    h_init: float = 1e-4
    h_min: float = 1e-14
    h_max: float = math.inf
    max_steps: int = 10**6
    eps_sing: float = 1e-10
    newton_tol: float = 1e-12
    newton_max_iter: int = 50

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "h_init", "h_min", "h_max", "eps_sing", "newton_tol"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"solver setting {name} must be positive, got {getattr(self, name)!r}")
        if not self.h_min < self.h_init:
            raise ValidationError("h_min must be smaller than h_init")
        if self.max_steps < 1 or self.newton_max_iter < 1:
            raise ValidationError("max_steps and newton_max_iter must be at least 1")

    def replace(self, **changes) -> "SolverConfig":
        return SolverConfig(**{**asdict(self), **changes})

    def as_dict(self) -> dict:
        return asdict(self)


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = _B - np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


class _StageFailure(Exception):
    """A stage evaluation landed on or beyond the singular set."""


@dataclass
class OdeSolution:
    """Accepted steps of one integration run, with Hermite dense output."""

    t: np.ndarray
    y: np.ndarray
    f: np.ndarray
    n_steps: int = 0
    n_rejected: int = 0

    def __call__(self, tq):
        return hermite(self.t, self.y, self.f, tq)


def hermite(ts, ys, fs, tq):
    """Cubic Hermite interpolation between accepted steps; ts may decrease."""
    ts = np.asarray(ts)
    tq = np.atleast_1d(np.asarray(tq, dtype=float))
    sign = 1.0 if ts[-1] >= ts[0] else -1.0
    idx = np.searchsorted(sign * ts, sign * tq, side="right") - 1
    idx = np.clip(idx, 0, len(ts) - 2)
    t0, t1 = ts[idx], ts[idx + 1]
    h = t1 - t0
    s = ((tq - t0) / h)[:, None]
    y0, y1, f0, f1 = ys[idx], ys[idx + 1], fs[idx], fs[idx + 1]
    hh = h[:, None]
    h00 = 2 * s**3 - 3 * s**2 + 1
    h10 = s**3 - 2 * s**2 + s
    h01 = -2 * s**3 + 3 * s**2
    h11 = s**3 - s**2
    return h00 * y0 + h10 * hh * f0 + h01 * y1 + h11 * hh * f1


@np.errstate(over="ignore", invalid="ignore")
def _dp_step(f, t, y, k1, h):
    ks = [k1]
    for i in range(1, 7):
        yi = y + h * sum(a * k for a, k in zip(_A[i], ks))
        ks.append(np.asarray(f(t + _C[i] * h, yi), dtype=float))
    K = np.array(ks)
    y_new = y + h * (_B @ K)
    err = h * (_E @ K)
    return y_new, err, ks[-1]


def solve_system(
    f: Callable,
    t0: float,
    y0,
    t_end: float,
    cfg: SolverConfig = SolverConfig(),
    denominator: Callable | None = None,
    denominator_scale: Callable | None = None,
    stop: Callable | None = None,
) -> OdeSolution:
    """Adaptive DP5(4) from t0 to t_end in either direction.

    ``denominator(t, y)`` marks the singular set; a sign change across a
    step, or |denominator| < eps_sing * scale, ends the run with
    SingularityStop. ``stop(t, y)`` returning True ends the run quietly
    after the step where it first holds.
    """
    y = np.atleast_1d(np.asarray(y0, dtype=float)).copy()
    t = float(t0)
    direction = 1.0 if t_end >= t0 else -1.0
    span = abs(t_end - t0)

    def den_info(tt, yy):
        d = denominator(tt, yy)
        sc = denominator_scale(tt, yy) if denominator_scale else 1.0
        return d, sc

    def safe_f(tt, yy):
        try:
            val = np.asarray(f(tt, yy), dtype=float)
        except (SingularDenominator, ZeroDivisionError) as exc:
            raise _StageFailure(str(exc)) from exc
        if not np.all(np.isfinite(val)):
            raise _StageFailure(f"non-finite derivative at t = {tt!r}")
        return val

    ts, ys, fs = [t], [y.copy()], []
    if denominator is not None:
        d, sc = den_info(t, y)
        if abs(d) < cfg.eps_sing * sc:
            raise SingularityStop(f"initial point t = {t!r} is on the singular set", [], t)
    try:
        k1 = safe_f(t, y)
    except _StageFailure as exc:
        raise SingularityStop(f"initial point is singular: {exc}", [], t) from None
    fs.append(k1)
    if span == 0:
        return OdeSolution(np.array(ts), np.array(ys), np.array(fs))

    h = min(cfg.h_init, span, cfg.h_max)
    n_steps = n_rej = 0

    def snapshot():
        return OdeSolution(np.array(ts), np.array(ys), np.array(fs), n_steps, n_rej)

    while direction * (t_end - t) > 0:
        if n_steps >= cfg.max_steps:
            raise MaxStepsExceeded(f"more than {cfg.max_steps} steps before reaching t = {t_end!r}")
        remaining = abs(t_end - t)
        last = h >= remaining * (1 - 1e-12)
        if last:
            h = remaining
        hs = direction * h
        try:
            y_new, err, k_new = _dp_step(safe_f, t, y, k1, hs)
            crossed = False
            if denominator is not None:
                d_old, _ = den_info(t, y)
                d_new, sc_new = den_info(t + hs, y_new)
                crossed = d_old * d_new < 0 or abs(d_new) < cfg.eps_sing * sc_new
        except _StageFailure:
            y_new, err, k_new, crossed = None, None, None, True

        if crossed:
            # the step reaches the singular set; shrink onto it
            if h <= max(cfg.h_min, cfg.eps_sing * max(1.0, abs(t))):
                raise SingularityStop(
                    f"reduced equation is singular near t = {t + hs!r}", _records(snapshot()), t
                )
            h *= 0.5
            n_rej += 1
            continue

        scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err_norm = float(np.max(np.abs(err) / scale))
        if err_norm <= 1.0:
            t = t_end if last else t + hs
            y = y_new
            k1 = k_new
            ts.append(t)
            ys.append(y.copy())
            fs.append(k1)
            n_steps += 1
            if stop is not None and stop(t, y):
                break
            fac = 5.0 if err_norm == 0 else min(5.0, max(0.2, 0.9 * err_norm ** (-0.2)))
            h = min(h * fac, cfg.h_max)
        else:
            n_rej += 1
            h *= max(0.2, 0.9 * err_norm ** (-0.2))
            if h < cfg.h_min:
                if denominator is not None:
                    d, sc = den_info(t, y)
                    if abs(d) < math.sqrt(cfg.eps_sing) * sc:
                        raise SingularityStop(
                            f"step size collapsed next to the singular set at t = {t!r}",
                            _records(snapshot()),
                            t,
                        )
                raise StepUnderflow(f"step size fell below h_min = {cfg.h_min:g} at t = {t!r}")
    return snapshot()


def _records(sol: OdeSolution):
    return [(float(t), *map(float, y)) for t, y in zip(sol.t, sol.y)]


def rk4_fixed(f, t0, y0, t_end, n_steps):
    """Classical fixed-step RK4, for order diagnostics."""
    y = np.atleast_1d(np.asarray(y0, dtype=float))
    h = (t_end - t0) / n_steps
    t = t0
    for _ in range(n_steps):
        k1 = np.asarray(f(t, y))
        k2 = np.asarray(f(t + h / 2, y + h / 2 * k1))
        k3 = np.asarray(f(t + h / 2, y + h / 2 * k2))
        k4 = np.asarray(f(t + h, y + h * k3))
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
    return y


def solve_for_derivative(residual, t, w, guess, cfg: SolverConfig) -> float:
    """Root of p -> residual(t, w, p): Newton with a finite-difference slope,
    then bisection on a geometrically expanded bracket around ``guess``."""
    p = float(guess)
    for _ in range(cfg.newton_max_iter):
        r = residual(t, w, p)
        if r == 0:
            return p
        dp = 1e-7 * max(1.0, abs(p))
        slope = (residual(t, w, p + dp) - r) / dp
        if slope == 0 or not math.isfinite(slope):
            break
        step = r / slope
        p -= step
        if not math.isfinite(p):
            break
        if abs(step) <= cfg.newton_tol * max(1.0, abs(p)):
            return p
    return _bisect_root(residual, t, w, float(guess), cfg)


def _bisect_root(residual, t, w, guess, cfg):
    width = 0.1 * max(1.0, abs(guess))
    for _ in range(10):
        lo, hi = guess - width, guess + width
        r_lo, r_hi = residual(t, w, lo), residual(t, w, hi)
        if r_lo == 0:
            return lo
        if r_hi == 0:
            return hi
        if r_lo * r_hi < 0:
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                r_mid = residual(t, w, mid)
                if r_mid == 0 or hi - lo <= cfg.newton_tol * max(1.0, abs(mid)):
                    return mid
                if r_lo * r_mid < 0:
                    hi = mid
                else:
                    lo, r_lo = mid, r_mid
            return 0.5 * (lo + hi)
        width *= 10.0
    raise RootNotFound(f"no root of the implicit residual near w' = {guess!r} at t = {t!r}")


def derivative_function(ode: ReducedODE, cfg: SolverConfig, guess: float = 0.0):
    """Callable (t, w) -> w' for either form of a reduced equation."""
    if ode.form == "explicit":
        return ode.rhs
    state = {"p": guess}

    def f(t, w):
        p = solve_for_derivative(ode.residual, t, w, state["p"], cfg)
        state["p"] = p
        return p

    return f


def _check_span(ode: ReducedODE, t0, t_end):
    for t in (t0, t_end):
        if not ode.contains(t):
            raise OutOfGaugeDomain(f"t = {t!r} is outside the domain of {ode.name or 'the reduced equation'}")


def _integrate(ode: ReducedODE, t0, w0, t_end, cfg, guess=0.0):
    _check_span(ode, t0, t_end)
    f = derivative_function(ode, cfg, guess)
    if ode.singular(t0, w0, cfg.eps_sing):
        raise SingularityStop(f"initial value w({t0!r}) = {w0!r} is singular", [], t0)
    den = (lambda t, y: ode.denominator(t, y[0])) if ode.denominator else None
    den_scale = (lambda t, y: ode.denominator_scale(t, y[0])) if ode.denominator_scale else None
    sol = solve_system(lambda t, y: [f(t, y[0])], t0, [w0], t_end, cfg, den, den_scale)
    return [(float(t), float(y[0])) for t, y in zip(sol.t, sol.y)]


def integrate_explicit(ode: ReducedODE, t0: float, w0: float, t_end: float, cfg: SolverConfig = SolverConfig()):
    """List of (t, w) at accepted steps of the adaptive solution."""
    if ode.form != "explicit":
        raise ValidationError("integrate_explicit needs an explicit reduced equation")
    return _integrate(ode, t0, w0, t_end, cfg)


def integrate_implicit(
    ode: ReducedODE, t0: float, w0: float, t_end: float, cfg: SolverConfig = SolverConfig(), wdot_guess: float = 0.0
):
    if ode.form != "implicit":
        raise ValidationError("integrate_implicit needs an implicit reduced equation")
    return _integrate(ode, t0, w0, t_end, cfg, wdot_guess)


@dataclass(frozen=True)
class Trajectory:
    """Sampled parametric solution; ``log_y`` is what was integrated."""

    t: np.ndarray
    w: np.ndarray
    y: np.ndarray
    x: np.ndarray
    variable_kind: str
    c: float
    gauge: str
    method: str
    direction: str
    slope: np.ndarray = field(repr=False, default=None)
    wdot: np.ndarray = field(repr=False, default=None)
    log_ydot: np.ndarray = field(repr=False, default=None)
    z: Callable = field(repr=False, default=None, compare=False)
    slope_fn: Callable = field(repr=False, default=None, compare=False)

    def __len__(self):
        return len(self.t)

    @property
    def samples(self):
        return list(zip(self.t.tolist(), self.w.tolist(), self.y.tolist(), self.x.tolist()))

    def resample(self, t_grid) -> "Trajectory":
        """Hermite dense output on a new t-grid; x is recomputed from z and y."""
        t_grid = np.asarray(t_grid, dtype=float)
        ys = np.column_stack([self.w, np.log(self.y)])
        fs = np.column_stack([self.wdot, self.log_ydot])
        vals = hermite(self.t, ys, fs, t_grid)
        return _make_trajectory(
            t_grid, vals[:, 0], vals[:, 1], None, None, self.c, self.z, self.slope_fn,
            self.variable_kind, self.gauge, self.method + "+hermite", self.direction,
        )


def _make_trajectory(t, w, log_y, wdot, log_ydot, c, z, slope_fn, kind, gauge, method, direction):
    y = np.exp(log_y)
    zt = np.array([z(ti) for ti in t])
    x = zt * y**c
    slope = np.array([slope_fn(ti, wi) for ti, wi in zip(t, w)]) * y ** (1.0 - c)
    return Trajectory(
        t=np.asarray(t), w=np.asarray(w), y=y, x=x, variable_kind=kind, c=c, gauge=gauge, method=method,
        direction=direction, slope=slope, wdot=wdot, log_ydot=log_ydot, z=z, slope_fn=slope_fn,
    )


def _reconstruct(ode, t0, w0, y0, t_end, cfg, log_rate, slope_fn, method, guess=0.0):
    if not y0 > 0:
        raise ValidationError(f"y0 must be positive, got {y0!r}")
    _check_span(ode, t0, t_end)
    if ode.singular(t0, w0, cfg.eps_sing):
        raise SingularDenominator(f"initial value w({t0!r}) = {w0!r} lies on the singular set")
    fw = derivative_function(ode, cfg, guess)

    def f(t, s):
        return [fw(t, s[0]), log_rate(t, s[0])]

    den = (lambda t, s: ode.denominator(t, s[0])) if ode.denominator else None
    den_scale = (lambda t, s: ode.denominator_scale(t, s[0])) if ode.denominator_scale else None
    direction = "forward" if t_end >= t0 else "backward"

    def build(sol):
        return _make_trajectory(
            sol.t, sol.y[:, 0], sol.y[:, 1], sol.f[:, 0], sol.f[:, 1], ode.c, ode.gauge.z, slope_fn,
            ode.variable_kind, ode.gauge.name, method, direction,
        )

    try:
        sol = solve_system(f, t0, [w0, math.log(y0)], t_end, cfg, den, den_scale)
    except SingularityStop as exc:
        if exc.samples:
            rec = np.array(exc.samples)
            ts, ws, ls = rec[:, 0], rec[:, 1], rec[:, 2]
            derivs = np.array([f(ti, (wi, li)) for ti, wi, li in rec])
            exc.trajectory = build(OdeSolution(ts, np.column_stack([ws, ls]), derivs))
        raise
    return build(sol)


def reconstruct_majorana(
    ode: ReducedODE, t0: float, u0: float, y0: float, t_end: float, cfg: SolverConfig = SolverConfig(),
    udot_guess: float = 0.0,
) -> Trajectory:
    """Integrate u together with log y (d log y/dt = u); x = z(t) y^c."""
    if ode.variable_kind != "u":
        raise ValidationError("reconstruct_majorana needs a reduced equation in u")
    c, g = ode.c, ode.gauge

    def slope_fn(t, u):
        return u / (g.zdot(t) + c * u * g.z(t))

    return _reconstruct(ode, t0, u0, y0, t_end, cfg, lambda t, u: u, slope_fn, f"majorana:{ode.form}", udot_guess)


def reconstruct_aux(
    ode: ReducedODE, t0: float, v0: float, y0: float, t_end: float, cfg: SolverConfig = SolverConfig(),
    vdot_guess: float = 0.0,
) -> Trajectory:
    """Integrate v together with log y (d log y/dt = v z'/(1 - c v z))."""
    if ode.variable_kind not in ("v", "v_tilde"):
        raise ValidationError("reconstruct_aux needs a reduced equation in v or v_tilde")
    c, g, k = ode.c, ode.gauge, ode.v_scale
    v_start = k * v0
    den0 = 1.0 - c * v_start * g.z(t0)
    if abs(den0) <= cfg.eps_sing * max(1.0, abs(c * v_start * g.z(t0))):
        raise SingularDenominator(f"1 - c v z = {den0:.3g} at the initial point")

    def log_rate(t, w):
        v = k * w
        return v * g.zdot(t) / (1.0 - c * v * g.z(t))

    return _reconstruct(ode, t0, v0, y0, t_end, cfg, log_rate, lambda t, w: k * w, f"aux:{ode.form}", vdot_guess)
