"""Recover the scaling exponent numerically over a grid of Emden-Fowler (a, b).

    python scripts/exponent_grid.py
"""
from __future__ import annotations

import numpy as np

from majorana.errors import NoInvariantExponent
from majorana.scaling import EmdenFowlerParams, emden_fowler_exponent, emden_fowler_residual, estimate_exponent

A_VALUES = (-1.5, -1.0, -0.5, 0.0, 1.0, 2.0)
B_VALUES = (-1.0, 0.0, 0.5, 1.5, 2.0, 3.0, 5.0)


def main():
    worst = 0.0
    print("    a     b   c exact        c found        |diff|")
    for a in A_VALUES:
        for b in B_VALUES:
            p = EmdenFowlerParams(a, b)
            exact = emden_fowler_exponent(p).c
            try:
                found = estimate_exponent(emden_fowler_residual(p), c_interval=(-5.0, 5.0)).c
            except NoInvariantExponent:
                print(f"{a:5.1f} {b:5.1f}   no exponent found")
                continue
            worst = max(worst, abs(found - exact))
            print(f"{a:5.1f} {b:5.1f} {exact:+.10f} {found:+.10f} {abs(found - exact):.1e}")
    print(f"worst |c found - c exact| = {worst:.2e}")
    return worst


if __name__ == "__main__":
    main()
