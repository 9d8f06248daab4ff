"""Radius of convergence of the Thomas-Fermi auxiliary-equation series along
the boundary solution, estimated from the root test on the coefficients.

    python scripts/series_radius.py
"""
from __future__ import annotations

import numpy as np

from majorana.series import eq35_polynomials, series_eval, series_solve_rational, tf_boundary_series_at_one
from majorana.verify import tf_reduced_solution


def root_test_radius(coeffs):
    a = np.abs(np.asarray(coeffs, dtype=float))
    k = np.arange(len(a))
    upper = (k >= len(a) // 2) & (a > 0)
    return float(np.min(a[upper] ** (-1.0 / k[upper])))


def main(order=30):
    P, Q = eq35_polynomials()
    print(f"series through (1, 0): radius ~ {root_test_radius(tf_boundary_series_at_one(order).coeffs):.3f}")
    curve = tf_reduced_solution().curve
    for t0 in (0.9, 0.7, 0.5, 0.3, 0.1):
        w0 = float(curve.resample([t0]).w[0])
        ps = series_solve_rational(P, Q, t0, w0, order)
        r = root_test_radius(ps.coeffs)
        # compare with the integrated curve half a radius away
        t1 = max(0.0, t0 - 0.5 * r)
        ref = float(curve.resample([t1]).w[0])
        print(f"t0 = {t0:.1f}  v~ = {w0:+.8f}  radius ~ {r:.3f}  |series - curve| at t0 - r/2: {abs(series_eval(ps, t1) - ref):.1e}")


if __name__ == "__main__":
    main()
