"""Thomas-Fermi initial slope by every route, with timings and tolerance sweeps.

    python scripts/tf_slope.py [--json out.json]
"""
from __future__ import annotations

import argparse
import json
import time

from majorana.integrate import SolverConfig
from majorana.verify import tf_initial_slope_series, tf_initial_slope_shooting, tf_reduced_solution


def timed(fn, *args, **kw):
    t0 = time.perf_counter()
    val = fn(*args, **kw)
    return val, time.perf_counter() - t0


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--json", help="write the results here")
    args = ap.parse_args(argv)
    rows = []
    for tol in (1e-4, 1e-6, 1e-8):
        s, dt = timed(tf_initial_slope_shooting, tol=tol)
        rows.append({"route": "shooting", "setting": f"bisection tol {tol:g}", "slope": s, "seconds": dt})
    for rtol in (1e-7, 1e-9, 1e-11):
        r, dt = timed(tf_reduced_solution, SolverConfig(rel_tol=rtol, abs_tol=rtol * 1e-3))
        rows.append({"route": "reduced ode", "setting": f"rel_tol {rtol:g}", "slope": r.slope, "seconds": dt})
    for order in (10, 20, 30):
        r, dt = timed(tf_initial_slope_series, order=order)
        rows.append({"route": "series", "setting": f"order {order}", "slope": r.slope, "seconds": dt})
    for r in rows:
        print(f"{r['route']:12s} {r['setting']:22s} {r['slope']:+.12f}  {r['seconds']:.2f} s")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
