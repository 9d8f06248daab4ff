"""Scaling laws and numerical certification of Majorana scale invariance.

A second-order equation F(x, y, y', y'') = 0 is Majorana scale invariant
with exponent c when the map

    x -> a^c x,  y -> a y,  y' -> a^(1-c) y',  y'' -> a^(1-2c) y''

leaves its zero set unchanged. The checker here accepts relative
invariance, F(scaled) = a^k F, and reports the fitted degree k.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.stats import qmc

from .errors import (
    DegenerateExponent,
    DomainViolation,
    IndeterminateRatio,
    NoInvariantExponent,
    NonPositiveScale,
)

Point = tuple[float, float, float, float]

DEFAULT_ALPHAS = (0.5, 2.0, 3.0)


def _always(x: float, y: float) -> bool:
    return True


@dataclass(frozen=True)
class ResidualODE2:
    """Evaluatable residual F(x, y, y', y'') of a second-order ODE."""

    evaluate: Callable[[float, float, float, float], float]
    domain: Callable[[float, float], bool] = _always
    description: str = ""

    def __call__(self, x, y, yp, ypp):
        return self.evaluate(x, y, yp, ypp)


@dataclass(frozen=True)
class ScalingLaw:
    c: float
    k: float
    defect: float | None = field(default=None, compare=False)

    def __post_init__(self):
        if not math.isfinite(self.c):
            raise ValueError(f"scaling exponent must be finite, got {self.c}")


@dataclass(frozen=True)
class EmdenFowlerParams:
    """Exponents of y'' = x^a y^b."""

    a: float
    b: float

    @property
    def is_thomas_fermi(self) -> bool:
        return self.a == -0.5 and self.b == 1.5


THOMAS_FERMI = EmdenFowlerParams(a=-0.5, b=1.5)


def _is_integer(v: float) -> bool:
    return float(v).is_integer()


def emden_fowler_residual(params: EmdenFowlerParams) -> ResidualODE2:
    a, b = params.a, params.b
    need_pos_x = not _is_integer(a)
    need_pos_y = not _is_integer(b)

    def evaluate(x, y, yp, ypp):
        return ypp - x**a * y**b

    def domain(x, y):
        if need_pos_x and x <= 0:
            return False
        if need_pos_y and y <= 0:
            return False
        if a < 0 and x == 0:
            return False
        if b < 0 and y == 0:
            return False
        return True

    return ResidualODE2(evaluate, domain, f"y'' = x^{a:g} y^{b:g}")


def emden_fowler_exponent(params: EmdenFowlerParams) -> ScalingLaw:
    """Majorana exponent c = (1-b)/(a+2); the residual scales with degree 1-2c."""
    if params.a == -2:
        raise DegenerateExponent(
            "a = -2: the Emden-Fowler equation has no Majorana exponent "
            "and the order reduction does not apply"
        )
    c = (1.0 - params.b) / (params.a + 2.0)
    return ScalingLaw(c=c, k=1.0 - 2.0 * c)


def default_probe_points(F: ResidualODE2, n: int = 20) -> list[Point]:
    """Deterministic Halton points in x, y in [0.5, 2], y', y'' in [-2, 2]."""
    sampler = qmc.Halton(d=4, scramble=False)
    # skip the origin of the sequence, it sits on a box corner
    sampler.fast_forward(1)
    raw = qmc.scale(sampler.random(4 * n), [0.5, 0.5, -2.0, -2.0], [2.0, 2.0, 2.0, 2.0])
    pts = [tuple(float(v) for v in row) for row in raw if F.domain(row[0], row[1])]
    return pts[:n]


def _scaled(pt: Point, c: float, alpha: float) -> Point:
    x, y, yp, ypp = pt
    return (alpha**c * x, alpha * y, alpha ** (1 - c) * yp, alpha ** (1 - 2 * c) * ypp)


def _defect_and_degree(F, c, points, alphas, zero_tol):
    log_alphas = [math.log(al) for al in alphas]
    rows = []  # (log alpha, log|ratio| or None, sign)
    n_used = 0
    for pt in points:
        f0 = F.evaluate(*pt)
        if not math.isfinite(f0) or abs(f0) <= zero_tol:
            continue
        n_used += 1
        for al, la in zip(alphas, log_alphas):
            sp = _scaled(pt, c, al)
            if not F.domain(sp[0], sp[1]):
                raise DomainViolation(f"scaled probe point {sp} left the domain ({al=})")
            f1 = F.evaluate(*sp)
            if f1 == 0 or not math.isfinite(f1):
                rows.append((la, None, 0.0))
            else:
                r = f1 / f0
                rows.append((la, math.log(abs(r)), math.copysign(1.0, r)))
    if n_used == 0:
        raise IndeterminateRatio("the residual vanishes at every probe point")

    fit = [(la, lr) for la, lr, _ in rows if lr is not None]
    denom = math.fsum(la * la for la, _ in fit)
    k = math.fsum(la * lr for la, lr in fit) / denom if denom > 0 else 0.0

    worst = 0.0
    for la, lr, sign in rows:
        if lr is None:
            dev = 1.0
        else:
            dev = abs(sign * math.exp(min(lr - k * la, 700.0)) - 1.0)
        worst = max(worst, dev)
    return worst, k


def _check_alphas(alphas):
    for al in alphas:
        if not al > 0:
            raise NonPositiveScale(f"scale factors must be positive, got {al}")


def _resolve_points(F, points):
    if points is None:
        return default_probe_points(F)
    pts = [tuple(map(float, p)) for p in points]
    for p in pts:
        if not F.domain(p[0], p[1]):
            raise DomainViolation(f"probe point {p} is outside the residual's domain")
    return pts


def invariance_defect(
    F: ResidualODE2,
    c: float,
    points: Sequence[Point] | None = None,
    alphas: Sequence[float] = DEFAULT_ALPHAS,
    zero_tol: float = 1e-10,
) -> float:
    """Maximum relative deviation of F(scaled)/F from the best-fit a^k.

    Points where |F| <= zero_tol are skipped. A value near zero certifies
    that the zero set of F is invariant under the scaling with exponent c.
    """
    _check_alphas(alphas)
    return _defect_and_degree(F, c, _resolve_points(F, points), list(alphas), zero_tol)[0]


def fitted_degree(F, c, points=None, alphas=DEFAULT_ALPHAS, zero_tol=1e-10) -> float:
    _check_alphas(alphas)
    return _defect_and_degree(F, c, _resolve_points(F, points), list(alphas), zero_tol)[1]


def _golden_section(f, a, b, xtol=1e-14):
    # the defect is V-shaped around its minimum, so stick to bracketing
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1, x2 = b - invphi * (b - a), a + invphi * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > xtol * max(1.0, abs(a) + abs(b)):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def estimate_exponent(
    F: ResidualODE2,
    c_interval: tuple[float, float] = (-2.0, 2.0),
    points: Sequence[Point] | None = None,
    alphas: Sequence[float] = DEFAULT_ALPHAS,
    threshold: float = 1e-8,
    n_grid: int = 401,
) -> ScalingLaw:
    """Search c_interval for the exponent minimising the invariance defect."""
    lo, hi = map(float, c_interval)
    if not hi > lo:
        raise ValueError(f"degenerate exponent interval {c_interval}")
    _check_alphas(alphas)
    pts = _resolve_points(F, points)
    alphas = list(alphas)

    def objective(c):
        try:
            return _defect_and_degree(F, c, pts, alphas, 1e-10)[0]
        except (DomainViolation, OverflowError, ZeroDivisionError):
            return math.inf

    grid = np.linspace(lo, hi, n_grid)
    values = np.array([objective(c) for c in grid])
    i = int(np.argmin(values))
    step = grid[1] - grid[0]
    a, b = max(lo, grid[i] - step), min(hi, grid[i] + step)
    c_best, d_best = _golden_section(objective, a, b)
    if values[i] < d_best:
        c_best, d_best = float(grid[i]), float(values[i])
    if not d_best <= threshold:
        raise NoInvariantExponent(
            f"smallest invariance defect {d_best:.3g} at c = {c_best:.6g} "
            f"exceeds threshold {threshold:g}"
        )
    k = _defect_and_degree(F, c_best, pts, alphas, 1e-10)[1]
    return ScalingLaw(c=c_best, k=k, defect=d_best)
