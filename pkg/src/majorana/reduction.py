"""Order reduction of second-order Majorana scale-invariant equations.

With x = z(t) y^c and y = exp(int u dt) a second-order equation
F(x, y, y', y'') = 0 becomes a first-order equation for u(t):

    F(z, 1, v1, v2) = 0,
    v1 = u / (z' + c u z),
    v2 = (z' u' - z'' u + (1-2c) z' u^2 + c(1-c) z u^3) / (z' + c u z)^3.

The auxiliary variable v = u / (z' + c u z) instead gives

    F(z, 1, v, (1 - c v z) v'/z' + (1-c) v^2) = 0,

with y = exp(int v z' / (1 - c v z) dt). Dots are t-derivatives above.

For Emden-Fowler residuals the u-equation is an Abel equation of the first
kind, u' = alpha + beta u + gamma u^2 + delta u^3, where

    alpha = z^a z'^2
    beta  = 3c z^(a+1) z' + z''/z'
    gamma = 3c^2 z^(a+2) + 2c - 1
    delta = c^3 z^(a+3)/z' + c(c-1) z/z'

Note the z''/z' in beta. Expanding (z' + c u z)^3 and isolating u' gives
z''/z'; the variant z''/z' -> z''/z does not reproduce the Thomas-Fermi
coefficient 1/(3(1-t)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import DegenerateGauge, OutOfGaugeDomain, SingularDenominator
from .gauges import GaugeFunction, gauge_tf_abel, gauge_tf_aux
from .scaling import THOMAS_FERMI, EmdenFowlerParams, ResidualODE2, ScalingLaw, emden_fowler_exponent

EPS_SING = 1e-10

# v = V_TILDE_TO_V * v_tilde for the Thomas-Fermi auxiliary reduction
V_TILDE_TO_V = -(12.0 ** (1.0 / 3.0)) / 4.0


@dataclass(frozen=True)
class AbelCoefficients:
    alpha: float
    beta: float
    gamma: float
    delta: float

    def __call__(self, u: float) -> float:
        return self.alpha + u * (self.beta + u * (self.gamma + u * self.delta))

    def as_tuple(self):
        return (self.alpha, self.beta, self.gamma, self.delta)


@dataclass(frozen=True)
class ReducedODE:
    """A first-order equation in the reduced variable w (u, v or v_tilde).

    ``denominator(t, w)`` is the expression whose zero set is singular; its
    sign change across a step is what the integrator watches for.
    ``v_scale`` converts w to the auxiliary variable v (v = v_scale * w).
    """

    form: str
    c: float
    gauge: GaugeFunction
    variable_kind: str
    rhs: Callable[[float, float], float] | None = None
    residual: Callable[[float, float, float], float] | None = None
    denominator: Callable[[float, float], float] | None = None
    denominator_scale: Callable[[float, float], float] | None = None
    t_domain: Callable[[float], bool] | None = None
    v_scale: float = 1.0
    name: str = ""

    def __post_init__(self):
        if self.form not in ("explicit", "implicit"):
            raise ValueError(f"form must be explicit or implicit, got {self.form!r}")
        if (self.form == "explicit") != (self.rhs is not None and self.residual is None):
            raise ValueError("explicit equations carry rhs only, implicit ones residual only")
        if self.variable_kind not in ("u", "v", "v_tilde"):
            raise ValueError(f"unknown variable kind {self.variable_kind!r}")

    def contains(self, t: float) -> bool:
        if self.t_domain is not None:
            return self.t_domain(t)
        return self.gauge.contains(t)

    def singular(self, t: float, w: float, eps: float = EPS_SING) -> bool:
        if self.denominator is None:
            return False
        den = self.denominator(t, w)
        scale = self.denominator_scale(t, w) if self.denominator_scale else 1.0
        return abs(den) < eps * scale


def _gauge_values(params: EmdenFowlerParams, gauge: GaugeFunction, t: float):
    z, zd, zdd = gauge.derivatives(t)
    if zd == 0:
        raise DegenerateGauge(f"z'({t!r}) = 0 for gauge {gauge.name!r}")
    if z <= 0 and not float(params.a).is_integer():
        raise OutOfGaugeDomain(f"z({t!r}) = {z!r} but x^{params.a:g} needs x > 0")
    return z, zd, zdd


def abel_coefficients(params: EmdenFowlerParams, gauge: GaugeFunction, t: float) -> AbelCoefficients:
    c = emden_fowler_exponent(params).c
    a = params.a
    z, zd, zdd = _gauge_values(params, gauge, t)
    za = z**a
    return AbelCoefficients(
        alpha=za * zd * zd,
        beta=3.0 * c * za * z * zd + zdd / zd,
        gamma=3.0 * c * c * za * z * z + 2.0 * c - 1.0,
        delta=(c**3 * za * z**3 + c * (c - 1.0) * z) / zd,
    )


def abel_rhs(t: float, u: float, params: EmdenFowlerParams, gauge: GaugeFunction) -> float:
    return abel_coefficients(params, gauge, t)(u)


def _aux_denominator_scale(c, v, z):
    return max(1.0, abs(c * v * z))


def aux_rhs(t: float, v: float, params: EmdenFowlerParams, gauge: GaugeFunction, eps_sing: float = EPS_SING) -> float:
    """v' = z' (z^a - (1-c) v^2) / (1 - c v z)."""
    c = emden_fowler_exponent(params).c
    z, zd, _ = _gauge_values(params, gauge, t)
    den = 1.0 - c * v * z
    if abs(den) < eps_sing * _aux_denominator_scale(c, v, z):
        raise SingularDenominator(f"1 - c v z = {den:.3g} at t = {t!r}, v = {v!r}")
    return zd * (z**params.a - (1.0 - c) * v * v) / den


def abel_reduced(params: EmdenFowlerParams, gauge: GaugeFunction) -> ReducedODE:
    c = emden_fowler_exponent(params).c
    return ReducedODE(
        form="explicit",
        c=c,
        gauge=gauge,
        variable_kind="u",
        rhs=lambda t, u: abel_rhs(t, u, params, gauge),
        name=f"abel[a={params.a:g}, b={params.b:g}, {gauge.name}]",
    )


def aux_reduced(params: EmdenFowlerParams, gauge: GaugeFunction, eps_sing: float = EPS_SING) -> ReducedODE:
    c = emden_fowler_exponent(params).c
    return ReducedODE(
        form="explicit",
        c=c,
        gauge=gauge,
        variable_kind="v",
        rhs=lambda t, v: aux_rhs(t, v, params, gauge, eps_sing),
        denominator=lambda t, v: 1.0 - c * v * gauge.z(t),
        denominator_scale=lambda t, v: _aux_denominator_scale(c, v, gauge.z(t)),
        name=f"aux[a={params.a:g}, b={params.b:g}, {gauge.name}]",
    )


def _tf_abel_rhs(t, u):
    if t >= 1.0:
        raise OutOfGaugeDomain(f"the tf-abel Abel equation holds for t < 1, got t = {t!r}")
    s = 1.0 - t
    return (
        16.0 / (3.0 * s)
        + (8.0 + 1.0 / (3.0 * s)) * u
        + (7.0 / 3.0 - 4.0 * t) * u * u
        - (2.0 / 3.0) * t * s * u**3
    )


def tf_abel_reduced() -> ReducedODE:
    """Closed-form Abel equation for Thomas-Fermi with z = (12(1-t))^(2/3)."""
    return ReducedODE(
        form="explicit",
        c=-1.0 / 3.0,
        gauge=gauge_tf_abel(),
        variable_kind="u",
        rhs=_tf_abel_rhs,
        t_domain=lambda t: t < 1.0,
        name="thomas-fermi abel",
    )


def _tf_aux_rhs(t, w, eps_sing=EPS_SING):
    den = 1.0 - t * t * w
    if abs(den) < eps_sing * max(1.0, abs(t * t * w)):
        raise SingularDenominator(f"1 - t^2 v~ = {den:.3g} at t = {t!r}, v~ = {w!r}")
    return 8.0 * (t * w * w - 1.0) / den


def tf_aux_reduced(eps_sing: float = EPS_SING) -> ReducedODE:
    """dv~/dt = 8 (t v~^2 - 1) / (1 - t^2 v~), with v~ = -4 * 12^(-1/3) v and z = 12^(2/3) t^2."""
    return ReducedODE(
        form="explicit",
        c=-1.0 / 3.0,
        gauge=gauge_tf_aux(),
        variable_kind="v_tilde",
        rhs=lambda t, w: _tf_aux_rhs(t, w, eps_sing),
        denominator=lambda t, w: 1.0 - t * t * w,
        denominator_scale=lambda t, w: max(1.0, abs(t * t * w)),
        t_domain=lambda t: t >= 0.0,
        v_scale=V_TILDE_TO_V,
        name="thomas-fermi auxiliary",
    )


def generic_reduced_residual(
    F: ResidualODE2, law: ScalingLaw, gauge: GaugeFunction, t: float, u: float, udot: float,
    eps_sing: float = EPS_SING,
) -> float:
    c = law.c
    z, zd, zdd = gauge.derivatives(t)
    if zd == 0:
        raise DegenerateGauge(f"z'({t!r}) = 0 for gauge {gauge.name!r}")
    den = zd + c * u * z
    if abs(den) < eps_sing * max(abs(zd), abs(c * u * z)):
        raise SingularDenominator(f"z' + c u z = {den:.3g} at t = {t!r}, u = {u!r}")
    v1 = u / den
    v2 = (zd * udot - zdd * u + (1.0 - 2.0 * c) * zd * u * u + c * (1.0 - c) * z * u**3) / den**3
    return F.evaluate(z, 1.0, v1, v2)


def aux_reduced_residual(
    F: ResidualODE2, law: ScalingLaw, gauge: GaugeFunction, t: float, v: float, vdot: float
) -> float:
    c = law.c
    z, zd, _ = gauge.derivatives(t)
    if zd == 0:
        raise DegenerateGauge(f"z'({t!r}) = 0 for gauge {gauge.name!r}")
    v2 = (1.0 - c * v * z) * (vdot / zd) + (1.0 - c) * v * v
    return F.evaluate(z, 1.0, v, v2)


def generic_reduced(F: ResidualODE2, law: ScalingLaw, gauge: GaugeFunction, eps_sing: float = EPS_SING) -> ReducedODE:
    c = law.c
    return ReducedODE(
        form="implicit",
        c=c,
        gauge=gauge,
        variable_kind="u",
        residual=lambda t, u, ud: generic_reduced_residual(F, law, gauge, t, u, ud, eps_sing),
        denominator=lambda t, u: gauge.zdot(t) + c * u * gauge.z(t),
        denominator_scale=lambda t, u: max(abs(gauge.zdot(t)), abs(c * u * gauge.z(t))),
        name=f"generic[{F.description}, {gauge.name}]",
    )


def aux_generic_reduced(F: ResidualODE2, law: ScalingLaw, gauge: GaugeFunction) -> ReducedODE:
    c = law.c
    return ReducedODE(
        form="implicit",
        c=c,
        gauge=gauge,
        variable_kind="v",
        residual=lambda t, v, vd: aux_reduced_residual(F, law, gauge, t, v, vd),
        denominator=lambda t, v: 1.0 - c * v * gauge.z(t),
        denominator_scale=lambda t, v: _aux_denominator_scale(c, v, gauge.z(t)),
        name=f"aux-generic[{F.description}, {gauge.name}]",
    )


def u_from_slope(c, z, zd, v, eps_sing=EPS_SING):
    """Invert v = u / (z' + c u z)."""
    den = 1.0 - c * v * z
    if abs(den) < eps_sing * _aux_denominator_scale(c, v, z):
        raise SingularDenominator("1 - c v z = 0: the point lies on a self-similar solution")
    return v * zd / den


def seed_from_point(
    c: float, gauge: GaugeFunction, x0: float, y0: float, yp0: float, kind: str = "u",
    t_bracket: tuple[float, float] | None = None,
) -> tuple[float, float]:
    """Initial (t0, w0) of the reduced equation for the point (x0, y0, y0').

    Solves z(t0) = x0 y0^(-c); the reduced slope is v0 = y0' y0^(c-1) and
    u0 = v0 z' / (1 - c v0 z). Points on power-law solutions y ~ x^(1/c)
    have 1 - c v0 z = 0 and cannot be seeded.
    """
    from scipy.optimize import brentq

    if not y0 > 0:
        raise ValueError("seeding needs y0 > 0")
    target = x0 * y0 ** (-c)
    if gauge.name == "identity":
        t0 = target
    else:
        lo, hi = t_bracket if t_bracket is not None else gauge.valid_interval
        lo = lo if math.isfinite(lo) else -1e6
        hi = hi if math.isfinite(hi) else 1e6
        eps = 1e-12 * max(1.0, abs(hi - lo))
        t0 = brentq(lambda t: gauge.z(t) - target, lo + eps, hi - eps, xtol=1e-15, rtol=1e-15)
    z0, zd0 = gauge.z(t0), gauge.zdot(t0)
    v0 = yp0 * y0 ** (c - 1.0)
    if kind == "v":
        return t0, v0
    return t0, u_from_slope(c, z0, zd0, v0)


def thomas_fermi_law() -> ScalingLaw:
    return emden_fowler_exponent(THOMAS_FERMI)
