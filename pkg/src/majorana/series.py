"""Formal power-series solutions of P(t, w) w' = Q(t, w) for polynomial P, Q."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import comb

from .errors import OverflowDetected, SingularExpansionPoint

OVERFLOW_LIMIT = 1e300


@dataclass(frozen=True)
class BivariatePoly:
    """sum_ij coeffs[i, j] t^i w^j."""

    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.atleast_2d(np.asarray(self.coeffs, dtype=float))
        if arr.ndim != 2 or not np.all(np.isfinite(arr)):
            raise ValueError("bivariate coefficients must be a finite 2-D table")
        object.__setattr__(self, "coeffs", arr)

    @classmethod
    def from_terms(cls, terms: dict[tuple[int, int], float]) -> "BivariatePoly":
        ni = max(i for i, _ in terms) + 1
        nj = max(j for _, j in terms) + 1
        arr = np.zeros((ni, nj))
        for (i, j), v in terms.items():
            arr[i, j] += v
        return cls(arr)

    def __call__(self, t: float, w: float) -> float:
        tp = t ** np.arange(self.coeffs.shape[0])
        wp = w ** np.arange(self.coeffs.shape[1])
        return float(tp @ self.coeffs @ wp)

    def shifted(self, t0: float) -> "BivariatePoly":
        """Same polynomial written in powers of (t - t0)."""
        n = self.coeffs.shape[0]
        out = np.zeros_like(self.coeffs)
        for i in range(n):
            for m in range(i + 1):
                out[m] += comb(i, m, exact=True) * t0 ** (i - m) * self.coeffs[i]
        return BivariatePoly(out)

    def reflected(self) -> "BivariatePoly":
        """Polynomial in s = -t."""
        signs = (-1.0) ** np.arange(self.coeffs.shape[0])
        return BivariatePoly(self.coeffs * signs[:, None])


@dataclass(frozen=True)
class PowerSeries:
    """sum_k coeffs[k] s^k with s = t - center, or s = center - t if reflected."""

    center: float
    coeffs: tuple[float, ...]
    reflected: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if not all(math.isfinite(c) for c in self.coeffs):
            raise ValueError("series coefficients must be finite")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def local(self, t: float) -> float:
        return self.center - t if self.reflected else t - self.center

    def truncated(self, n: int) -> "PowerSeries":
        return PowerSeries(self.center, self.coeffs[: n + 1], self.reflected)

    def __call__(self, t):
        return series_eval(self, t)


def series_eval(ps: PowerSeries, t: float) -> float:
    s = ps.local(t)
    acc = 0.0
    for a in reversed(ps.coeffs):
        acc = acc * s + a
    return acc


def _compose(poly: BivariatePoly, w: np.ndarray, order: int) -> np.ndarray:
    """Coefficients of poly(tau, w(tau)) through tau^order; poly is already centred."""
    n = order + 1
    out = np.zeros(n)
    wpow = np.zeros(n)
    wpow[0] = 1.0
    wt = np.zeros(n)
    m = min(len(w), n)
    wt[:m] = w[:m]
    ni, nj = poly.coeffs.shape
    for j in range(nj):
        if j > 0:
            wpow = np.convolve(wpow, wt)[:n]
        # p_j(tau) * w^j
        for i in range(min(ni, n)):
            cij = poly.coeffs[i, j]
            if cij != 0.0:
                out[i:] += cij * wpow[: n - i]
    return out


@np.errstate(over="ignore", invalid="ignore")
def _solve_centred(P, Q, w0, N):
    p00 = P(0.0, w0)
    if abs(p00) < 1e-12 * max(1.0, float(np.max(np.abs(P.coeffs)))):
        raise SingularExpansionPoint(f"P vanishes at the expansion point (P = {p00:.3g})")
    a = np.zeros(N + 1)
    a[0] = w0
    for k in range(1, N + 1):
        ps = _compose(P, a[:k], k - 1)
        qs = _compose(Q, a[:k], k - 1)
        acc = qs[k - 1]
        for j in range(1, k):
            acc -= ps[j] * (k - j) * a[k - j]
        a[k] = acc / (k * ps[0])
        if not abs(a[k]) <= OVERFLOW_LIMIT:
            raise OverflowDetected(f"series coefficient a_{k} = {a[k]:.3g} overflowed")
    return a


def series_solve_rational(P: BivariatePoly, Q: BivariatePoly, t0: float, w0: float, N: int = 30) -> PowerSeries:
    """Series of the solution of P w' = Q through (t0, w0), to order N.

    The (t - t0)^(k-1) coefficient of P w' - Q is linear in a_k with factor
    k P(t0, w0), which fixes the coefficients one at a time.
    """
    if N < 1:
        raise ValueError("series order must be at least 1")
    a = _solve_centred(P.shifted(t0), Q.shifted(t0), float(w0), int(N))
    return PowerSeries(float(t0), tuple(a))


def series_residual(P: BivariatePoly, Q: BivariatePoly, ps: PowerSeries) -> np.ndarray:
    """Coefficients of P w' - Q through order N-1 for the truncated series."""
    Pc, Qc = P.shifted(ps.center), Q.shifted(ps.center)
    if ps.reflected:
        # d/ds = -d/dt, and the polynomials are rewritten in s = -(t - center)
        Pc, Qc = Pc.reflected(), BivariatePoly(-Qc.reflected().coeffs)
    a = np.array(ps.coeffs)
    N = ps.order
    dw = np.arange(1, N + 1) * a[1:]
    pw = np.convolve(_compose(Pc, a, N - 1), dw)[:N]
    return pw - _compose(Qc, a, N - 1)


def eq35_polynomials() -> tuple[BivariatePoly, BivariatePoly]:
    """(1 - t^2 v) v' = 8 (t v^2 - 1) as (P, Q)."""
    P = BivariatePoly.from_terms({(0, 0): 1.0, (2, 1): -1.0})
    Q = BivariatePoly.from_terms({(1, 2): 8.0, (0, 0): -8.0})
    return P, Q


def tf_boundary_series_at_one(N: int = 30) -> PowerSeries:
    """Solution of the Thomas-Fermi auxiliary equation through (t, v~) = (1, 0),
    expanded in s = 1 - t: v~ = 8 s + 32 s^2 + ..."""
    if N < 1:
        raise ValueError("series order must be at least 1")
    P, Q = eq35_polynomials()
    # in s = 1 - t: P(1 - s, w) dw/ds = -Q(1 - s, w)
    Ps = P.shifted(1.0).reflected()
    Qs = BivariatePoly(-Q.shifted(1.0).reflected().coeffs)
    a = _solve_centred(Ps, Qs, 0.0, int(N))
    return PowerSeries(1.0, tuple(a), reflected=True)
