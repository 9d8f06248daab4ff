"""Gauge functions z(t) parametrising solutions as x = z(t) * y(t)**c."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import DegenerateGauge, InconsistentDerivatives, OutOfGaugeDomain, ValidationError

FD_STEP = 1e-5
# z'' by central differences is rounding-limited at 1e-5; use a wider
# stencil plus one Richardson level instead.
FD_STEP_SECOND = 1e-3
CONSISTENCY_RTOL = 1e-6

TWELVE_23 = 12.0 ** (2.0 / 3.0)


@dataclass(frozen=True)
class GaugeFunction:
    z: Callable[[float], float]
    zdot: Callable[[float], float]
    zddot: Callable[[float], float]
    valid_interval: tuple[float, float]
    name: str

    def contains(self, t: float) -> bool:
        lo, hi = self.valid_interval
        return lo < t < hi

    def require(self, t: float) -> None:
        if not self.contains(t):
            raise OutOfGaugeDomain(
                f"t = {t!r} is outside the open interval {self.valid_interval} of gauge {self.name!r}"
            )

    def derivatives(self, t: float) -> tuple[float, float, float]:
        """(z, z', z'') at t, checked against the validity interval."""
        self.require(t)
        return self.z(t), self.zdot(t), self.zddot(t)


def fd_first(f, t, h=FD_STEP):
    return (f(t + h) - f(t - h)) / (2.0 * h)


def fd_second(f, t, h=FD_STEP_SECOND):
    def d2(s):
        return (f(t + s) - 2.0 * f(t) + f(t - s)) / (s * s)

    return (4.0 * d2(h / 2.0) - d2(h)) / 3.0


def gauge_identity() -> GaugeFunction:
    return GaugeFunction(
        z=lambda t: t,
        zdot=lambda t: 1.0,
        zddot=lambda t: 0.0,
        valid_interval=(-math.inf, math.inf),
        name="identity",
    )


def _below_one(t):
    if t >= 1.0:
        raise OutOfGaugeDomain(f"tf-abel gauge is defined for t < 1, got t = {t!r}")
    return 1.0 - t


def gauge_tf_abel() -> GaugeFunction:
    """z = (12 (1 - t))^(2/3), the choice that gives the closed-form Thomas-Fermi Abel equation."""
    return GaugeFunction(
        z=lambda t: (12.0 * _below_one(t)) ** (2.0 / 3.0),
        zdot=lambda t: -(2.0 / 3.0) * TWELVE_23 * _below_one(t) ** (-1.0 / 3.0),
        zddot=lambda t: -(2.0 / 9.0) * TWELVE_23 * _below_one(t) ** (-4.0 / 3.0),
        valid_interval=(-math.inf, 1.0),
        name="tf-abel",
    )


def gauge_tf_aux() -> GaugeFunction:
    """z = 12^(2/3) t^2; t = 0 is excluded since z' vanishes there."""
    return GaugeFunction(
        z=lambda t: TWELVE_23 * t * t,
        zdot=lambda t: 2.0 * TWELVE_23 * t,
        zddot=lambda t: 2.0 * TWELVE_23,
        valid_interval=(0.0, math.inf),
        name="tf-aux",
    )


def gauge_power(k: float, p: float) -> GaugeFunction:
    """z = k t^p on t > 0."""
    if k == 0 or p == 0:
        raise DegenerateGauge(f"power gauge with k={k}, p={p} is constant")
    return GaugeFunction(
        z=lambda t: k * t**p,
        zdot=lambda t: k * p * t ** (p - 1.0),
        zddot=lambda t: k * p * (p - 1.0) * t ** (p - 2.0),
        valid_interval=(0.0, math.inf),
        name=f"power:{k:g}:{p:g}",
    )


def interior_points(interval, n=5):
    lo, hi = interval
    if math.isfinite(lo) and math.isfinite(hi):
        return [lo + (hi - lo) * (i + 1) / (n + 1) for i in range(n)]
    offsets = [0.25 * 2.0**i for i in range(n)]
    if math.isfinite(lo):
        return [lo + o for o in offsets]
    if math.isfinite(hi):
        return [hi - o for o in offsets]
    return [-2.0, -0.75, 0.5, 1.25, 2.5][:n]


def gauge_from_callables(z, zdot=None, zddot=None, interval=(-math.inf, math.inf), name="custom") -> GaugeFunction:
    """Wrap user callables; missing derivatives are synthesised by finite differences.

    Supplied derivatives are checked against finite differences at five
    interior points, and z' must not vanish there.
    """
    zdot_fn = zdot if zdot is not None else (lambda t: fd_first(z, t))
    zddot_fn = zddot if zddot is not None else (lambda t: fd_second(z, t))
    for t in interior_points(interval):
        zt = z(t)
        if not math.isfinite(zt):
            raise ValidationError(f"gauge {name!r} is not finite at t = {t}")
        for label, given, fd in (
            ("z'", zdot, fd_first),
            ("z''", zddot, fd_second),
        ):
            if given is None:
                continue
            g, ref = given(t), fd(z, t)
            if abs(g - ref) > CONSISTENCY_RTOL * (abs(ref) + 1.0):
                raise InconsistentDerivatives(
                    f"supplied {label} of gauge {name!r} at t = {t:g} is {g!r}, "
                    f"finite differences give {ref!r}"
                )
        if abs(zdot_fn(t)) <= 1e-10 * max(1.0, abs(zt)):
            raise DegenerateGauge(f"gauge {name!r} has z'({t:g}) = 0; z must not be constant")
    return GaugeFunction(z, zdot_fn, zddot_fn, tuple(interval), name)


GAUGE_NAMES = ("identity", "tf-abel", "tf-aux", "power:<k>:<p>")


def gauge_by_name(spec: str) -> GaugeFunction:
    if spec == "identity":
        return gauge_identity()
    if spec == "tf-abel":
        return gauge_tf_abel()
    if spec == "tf-aux":
        return gauge_tf_aux()
    if spec.startswith("power:"):
        parts = spec.split(":")
        try:
            _, k, p = parts
            return gauge_power(float(k), float(p))
        except ValueError:
            pass
    raise ValidationError(f"unknown gauge {spec!r}; available gauges: {', '.join(GAUGE_NAMES)}")
