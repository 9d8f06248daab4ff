"""Command-line front end.

Subcommands: reduce, solve, tf, verify, classify, sweep. A problem is
described by flags or by a JSON file given with --config; flags override
file values. Trajectories go to CSV (columns t,w,y,x, metadata as '#'
lines), reports to JSON. Exit codes: 0 ok, 2 invalid input, 3 solver
failure.
"""
from __future__ import annotations

import argparse
import copy
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator

from .errors import (
    BracketLost,
    DegenerateExponent,
    DegenerateGauge,
    InconsistentDerivatives,
    MajoranaError,
    NoInvariantExponent,
    OutOfGaugeDomain,
    SingularDenominator,
    SingularityStop,
    ValidationError,
)
from .gauges import GAUGE_NAMES, gauge_by_name
from .integrate import SolverConfig, Trajectory, reconstruct_aux, reconstruct_majorana
from .reduction import (
    abel_coefficients,
    abel_reduced,
    aux_generic_reduced,
    aux_reduced,
    generic_reduced,
    seed_from_point,
    tf_abel_reduced,
    tf_aux_reduced,
)
from .scaling import (
    THOMAS_FERMI,
    EmdenFowlerParams,
    emden_fowler_exponent,
    emden_fowler_residual,
    estimate_exponent,
    invariance_defect,
)
from .series import eq35_polynomials, series_eval, series_solve_rational
from .verify import (
    AnalyticCurve,
    compare_curves,
    densify,
    direct_emden_fowler,
    residual_along_curve,
    tf_initial_slope_series,
    tf_initial_slope_shooting,
    tf_reduced_solution,
)

EXIT_OK, EXIT_INVALID, EXIT_SOLVER = 0, 2, 3
METHODS = ("abel", "aux", "generic", "aux-generic", "series")
DEFAULT_OUT_DIR = "majorana_out"

# errors that describe a bad problem rather than a failed computation
_INPUT_ERRORS = (
    ValidationError, DegenerateExponent, OutOfGaugeDomain, DegenerateGauge, InconsistentDerivatives,
    SingularDenominator, BracketLost,
)


@dataclass
class ProblemDescriptor:
    equation: dict = field(default_factory=lambda: {"kind": "thomas-fermi"})
    gauge: str = "identity"
    method: str = "abel"
    initial: dict | None = None
    range: dict = field(default_factory=dict)
    solver: dict = field(default_factory=dict)
    samples: int | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "ProblemDescriptor":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValidationError(f"unknown descriptor keys: {sorted(unknown)}")
        return cls(**copy.deepcopy(d))

    def params(self) -> EmdenFowlerParams:
        kind = self.equation.get("kind")
        if kind == "thomas-fermi":
            return THOMAS_FERMI
        if kind == "emden-fowler":
            try:
                return EmdenFowlerParams(float(self.equation["a"]), float(self.equation["b"]))
            except KeyError as exc:
                raise ValidationError(f"emden-fowler equation needs {exc.args[0]!r}") from None
        raise ValidationError(f"equation kind must be 'emden-fowler' or 'thomas-fermi', got {kind!r}")

    def config(self) -> SolverConfig:
        unknown = set(self.solver) - set(SolverConfig.__dataclass_fields__)
        if unknown:
            raise ValidationError(f"unknown solver settings {sorted(unknown)}; known: {sorted(SolverConfig.__dataclass_fields__)}")
        return SolverConfig(**self.solver)

    def validate(self):
        if self.method not in METHODS:
            raise ValidationError(f"method must be one of {', '.join(METHODS)}; got {self.method!r}")
        self.params()
        gauge_by_name(self.gauge)
        self.config()
        if self.method == "series" and (self.equation.get("kind") != "thomas-fermi" or self.gauge != "tf-aux"):
            raise ValidationError("method 'series' is available for the thomas-fermi equation with gauge tf-aux")
        if self.samples is not None and int(self.samples) < 5:
            raise ValidationError("samples must be at least 5")

    def effective(self) -> dict:
        """Descriptor with solver defaults filled in."""
        d = asdict(self)
        d["solver"] = self.config().as_dict()
        if d["equation"].get("kind") == "emden-fowler":
            p = self.params()
            d["equation"] = {"kind": "emden-fowler", "a": p.a, "b": p.b}
        return d


# ----------------------------------------------------------------- building

def build_reduced(desc: ProblemDescriptor):
    params, gauge, cfg = desc.params(), gauge_by_name(desc.gauge), desc.config()
    tf = desc.equation.get("kind") == "thomas-fermi"
    m = desc.method
    if m == "abel":
        return tf_abel_reduced() if tf and desc.gauge == "tf-abel" else abel_reduced(params, gauge)
    if m in ("aux", "series"):
        return tf_aux_reduced(cfg.eps_sing) if tf and desc.gauge == "tf-aux" else aux_reduced(params, gauge, cfg.eps_sing)
    law = emden_fowler_exponent(params)
    F = emden_fowler_residual(params)
    if m == "generic":
        return generic_reduced(F, law, gauge, cfg.eps_sing)
    return aux_generic_reduced(F, law, gauge)


def initial_values(desc: ProblemDescriptor, ode) -> tuple[float, float, float]:
    """(t0, w0, y0) from either {t0, w0, y0} or a point {x0, y0, yp0}."""
    ini = desc.initial
    if not ini:
        raise ValidationError(f"method {desc.method!r} needs initial data: {{t0, w0, y0}} or {{x0, y0, yp0}}")
    if {"t0", "w0"} <= set(ini):
        return float(ini["t0"]), float(ini["w0"]), float(ini.get("y0", 1.0))
    if {"x0", "y0", "yp0"} <= set(ini):
        kind = "u" if ode.variable_kind == "u" else "v"
        y0 = float(ini["y0"])
        if not y0 > 0:
            raise ValidationError("seeding from a point needs y0 > 0")
        t0, w0 = seed_from_point(ode.c, ode.gauge, float(ini["x0"]), y0, float(ini["yp0"]), kind=kind)
        return t0, w0 / ode.v_scale if kind == "v" else w0, y0
    raise ValidationError("initial data must contain t0 and w0 (and optionally y0), or x0, y0 and yp0")


def _t_end(desc: ProblemDescriptor) -> float:
    if "t_end" not in desc.range:
        raise ValidationError("range needs t_end for the reduced integration")
    return float(desc.range["t_end"])


def _series_trajectory(desc, ode, t0, w0, y0, t_end, order=30, n=201) -> Trajectory:
    """w from the series of the auxiliary equation, log y by quadrature of
    its rate d log y/dt = v z'/(1 - c v z)."""
    P, Q = eq35_polynomials()
    ps = series_solve_rational(P, Q, t0, w0, order)
    c, g, k = ode.c, ode.gauge, ode.v_scale
    t = np.linspace(t0, t_end, n if desc.samples is None else int(desc.samples))
    w = np.array([series_eval(ps, ti) for ti in t])

    def rate(s):
        v = k * series_eval(ps, s)
        return v * g.zdot(s) / (1.0 - c * v * g.z(s))

    log_y = np.empty_like(t)
    log_y[0] = math.log(y0)
    for i in range(1, len(t)):
        log_y[i] = log_y[i - 1] + quad(rate, t[i - 1], t[i], epsabs=1e-14, epsrel=1e-13)[0]
    wdot = np.array([(8.0 * (ti * wi**2 - 1.0)) / (1.0 - ti**2 * wi) for ti, wi in zip(t, w)])
    y = np.exp(log_y)
    x = np.array([g.z(ti) for ti in t]) * y**c
    slope = k * w * y ** (1.0 - c)
    return Trajectory(
        t=t, w=w, y=y, x=x, variable_kind=ode.variable_kind, c=c, gauge=g.name, method="series",
        direction="forward" if t_end >= t0 else "backward", slope=slope, wdot=wdot,
        log_ydot=np.array([rate(ti) for ti in t]), z=g.z, slope_fn=lambda s, w_: k * w_,
    )


def run_pipeline(desc: ProblemDescriptor) -> Trajectory:
    desc.validate()
    ode = build_reduced(desc)
    t0, w0, y0 = initial_values(desc, ode)
    t_end, cfg = _t_end(desc), desc.config()
    if desc.method == "series":
        return _series_trajectory(desc, ode, t0, w0, y0, t_end)
    rec = reconstruct_majorana if ode.variable_kind == "u" else reconstruct_aux
    traj = rec(ode, t0, w0, y0, t_end, cfg)
    if desc.samples is not None:
        traj = densify(traj, int(desc.samples))
    return traj


def curve_residual(params: EmdenFowlerParams, curve, x_range=None) -> float:
    """Residual of y'' = x^a y^b along sampled points, relative to max|x^a y^b|."""
    x, y = np.asarray(curve.x), np.asarray(curve.y)
    if x_range is not None:
        keep = (x >= min(x_range)) & (x <= max(x_range))
        x, y = x[keep], y[keep]
    F = emden_fowler_residual(params)
    return residual_along_curve(F, AnalyticCurve(x, y), scale=lambda x, y: x**params.a * abs(y) ** params.b)


def pipeline_residual(desc: ProblemDescriptor, n: int = 2000) -> float:
    """Residual on a re-run with at most |t_end - t0|/n per step.

    Interpolated samples are not used because the second difference would
    then measure the interpolant rather than the solution.
    """
    fine = copy.deepcopy(desc)
    if desc.method == "series":
        fine.samples = n
    else:
        ode = build_reduced(desc)
        t0, _, _ = initial_values(desc, ode)
        fine.samples = None
        h = abs(_t_end(desc) - t0) / n
        # a uniform step from the start: the three-point second difference
        # loses an order wherever neighbouring spacings differ
        fine.solver = {**desc.solver, "h_max": h, "h_init": h}
    lo, hi = desc.range.get("x_lo"), desc.range.get("x_hi")
    return curve_residual(desc.params(), run_pipeline(fine), None if lo is None or hi is None else (lo, hi))


# ----------------------------------------------------------------- output

def out_dir(args) -> Path:
    d = Path(args.out_dir or os.environ.get("MAJORANA_OUT_DIR") or DEFAULT_OUT_DIR)
    d.mkdir(parents=True, exist_ok=True)
    return d


def write_trajectory_csv(path: Path, traj: Trajectory, meta: dict):
    with open(path, "w") as fh:
        for key, value in meta.items():
            fh.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
        fh.write("t,w,y,x\n")
        for row in zip(traj.t, traj.w, traj.y, traj.x):
            fh.write(",".join("%.17g" % v for v in row) + "\n")


def write_gnuplot(path: Path, csv_name: str):
    path.write_text(
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        "set xlabel 'x'\nset ylabel 'y'\n"
        f"plot '{csv_name}' using 4:3 with lines\n"
    )


def write_report(path: Path, report: dict):
    path.write_text(json.dumps(report, indent=2, sort_keys=True, default=_jsonable) + "\n")


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return str(obj)


def _summary(traj: Trajectory, desc: ProblemDescriptor) -> dict:
    s = {
        "n_samples": len(traj.t),
        "t_final": float(traj.t[-1]),
        "w_final": float(traj.w[-1]),
        "y_final": float(traj.y[-1]),
        "x_final": float(traj.x[-1]),
        "x_monotone": bool(np.all(np.diff(traj.x) > 0) or np.all(np.diff(traj.x) < 0)),
    }
    if len(traj.t) >= 5 and s["x_monotone"]:
        s["max_residual"] = pipeline_residual(desc)
    return s


def solve_to_dir(desc_dict: dict, directory: str, gnuplot: bool = False) -> dict:
    """Run one descriptor and write trajectory.csv and report.json into
    ``directory``. Returns the report; never raises for solver failures."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    report = {"command": "solve", "descriptor": desc_dict, "status": "error", "summary": {}, "outputs": {}}
    try:
        desc = ProblemDescriptor.from_dict(desc_dict)
        desc.validate()
        report["descriptor"] = desc.effective()
        try:
            traj = run_pipeline(desc)
            report["status"] = "ok"
        except SingularityStop as exc:
            traj = getattr(exc, "trajectory", None)
            report["status"] = "singular-stop"
            report["error"] = str(exc)
            report["t_stop"] = exc.t_stop
        if traj is not None:
            csv = directory / "trajectory.csv"
            write_trajectory_csv(csv, traj, {
                "equation": report["descriptor"]["equation"], "gauge": desc.gauge, "method": traj.method,
                "variable": traj.variable_kind, "c": traj.c, "status": report["status"],
            })
            report["outputs"]["trajectory"] = str(csv)
            report["summary"] = _summary(traj, desc) if report["status"] == "ok" else {"n_samples": len(traj.t)}
            if gnuplot:
                gp = directory / "plot.gp"
                write_gnuplot(gp, csv.name)
                report["outputs"]["gnuplot"] = str(gp)
    except _INPUT_ERRORS as exc:
        report["error"] = f"{type(exc).__name__}: {exc}"
        report["error_kind"] = "invalid"
    except MajoranaError as exc:
        report["error"] = f"{type(exc).__name__}: {exc}"
        report["error_kind"] = "solver"
    rp = directory / "report.json"
    report["outputs"]["report"] = str(rp)
    write_report(rp, report)
    return report


def _exit_code(report: dict) -> int:
    if report["status"] == "ok":
        return EXIT_OK
    return EXIT_INVALID if report.get("error_kind") == "invalid" else EXIT_SOLVER


# ----------------------------------------------------------------- commands

def descriptor_from_args(args) -> ProblemDescriptor:
    d: dict = {}
    if getattr(args, "config", None):
        try:
            d = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config {args.config}: {exc}") from None
    desc = ProblemDescriptor.from_dict(d)
    if getattr(args, "thomas_fermi", False):
        desc.equation = {"kind": "thomas-fermi"}
    if getattr(args, "a", None) is not None or getattr(args, "b", None) is not None:
        eq = dict(desc.equation) if desc.equation.get("kind") == "emden-fowler" else {"kind": "emden-fowler"}
        if args.a is not None:
            eq["a"] = args.a
        if args.b is not None:
            eq["b"] = args.b
        desc.equation = eq
    for name in ("gauge", "method", "samples"):
        if getattr(args, name, None) is not None:
            setattr(desc, name, getattr(args, name))
    ini = {k: getattr(args, k) for k in ("t0", "w0", "y0", "x0", "yp0") if getattr(args, k, None) is not None}
    if ini:
        base = dict(desc.initial or {})
        # a new seeding style replaces the other one
        if {"t0", "w0"} & set(ini):
            base = {k: v for k, v in base.items() if k not in ("x0", "yp0")}
        if {"x0", "yp0"} & set(ini):
            base = {k: v for k, v in base.items() if k not in ("t0", "w0")}
        desc.initial = {**base, **ini}
    rng = {k: getattr(args, k) for k in ("t_end", "x_lo", "x_hi") if getattr(args, k, None) is not None}
    desc.range = {**desc.range, **rng}
    solver = {k: getattr(args, k) for k in SolverConfig.__dataclass_fields__ if getattr(args, k, None) is not None}
    desc.solver = {**desc.solver, **solver}
    return desc


def cmd_reduce(args) -> int:
    desc = descriptor_from_args(args)
    if desc.method not in ("abel", "aux"):
        raise ValidationError("reduce tabulates the abel or aux form")
    params, gauge = desc.params(), gauge_by_name(desc.gauge)
    law = emden_fowler_exponent(params)
    if args.t is not None:
        ts = [args.t]
    else:
        lo, hi = gauge.valid_interval
        t_lo = args.t_lo if args.t_lo is not None else lo
        t_hi = args.t_hi if args.t_hi is not None else hi
        if not (math.isfinite(t_lo) and math.isfinite(t_hi)):
            raise ValidationError("give --t or a finite --t-lo/--t-hi for this gauge")
        ts = np.linspace(t_lo, t_hi, args.n).tolist()
    for t in ts:
        gauge.require(t)
    if desc.method == "abel":
        header = "t,alpha,beta,gamma,delta"
        rows = [[t, *abel_coefficients(params, gauge, t).as_tuple()] for t in ts]
    else:
        # v' = z'(z^a - (1 - c) v^2)/(1 - c v z): tabulate its t-dependent pieces
        header = "t,z,zdot,z_pow_a,one_minus_c"
        rows = [[t, gauge.z(t), gauge.zdot(t), gauge.z(t) ** params.a, 1.0 - law.c] for t in ts]
    lines = [f"# equation: a={params.a:g} b={params.b:g} c={law.c!r} gauge={gauge.name} form={desc.method}", header]
    lines += [",".join("%.17g" % v for v in r) for r in rows]
    text = "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_solve(args) -> int:
    desc = descriptor_from_args(args)
    report = solve_to_dir(asdict(desc), str(out_dir(args)), gnuplot=args.gnuplot)
    print(json.dumps({"status": report["status"], **report["outputs"], **({"error": report["error"]} if "error" in report else {})}))
    return _exit_code(report)


def _tf_table(slope: float, xs, cfg: SolverConfig):
    x0 = 1e-6
    d = direct_emden_fowler(THOMAS_FERMI, x0, 1 + slope * x0 + 4 / 3 * x0**1.5, slope + 2 * math.sqrt(x0),
                            max(xs), cfg, dense_points=20_000)
    f = PchipInterpolator(np.concatenate([[0.0], d.x]), np.concatenate([[1.0], d.y]))
    return [[float(x), float(f(x))] for x in xs]


def cmd_tf(args) -> int:
    desc = descriptor_from_args(args)
    cfg = desc.config()
    result: dict = {"method": args.method, "solver": cfg.as_dict()}
    if args.method == "shooting":
        result["slope"] = tf_initial_slope_shooting(cfg, tol=args.tol)
    elif args.method == "ode":
        red = tf_reduced_solution(cfg)
        result["slope"], result["v_tilde_at_zero"] = red.slope, red.v_tilde_at_zero
    else:
        ser = tf_initial_slope_series(order=args.order)
        result["slope"], result["v_tilde_at_zero"] = ser.slope, ser.v_tilde_at_zero
        result["boundary_series"] = {"center": 1.0, "variable": "s = 1 - t", "coefficients": list(ser.boundary.coeffs)}
        result["continuation_centers"] = list(ser.centers)
    if args.x_grid:
        xs = [float(v) for v in args.x_grid.split(",")]
        if min(xs) < 0:
            raise ValidationError("x-grid values must be non-negative")
        result["table"] = _tf_table(result["slope"], xs, cfg)
    text = json.dumps(result, indent=2, default=_jsonable)
    if args.output:
        Path(args.output).write_text(text + "\n")
    print(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    desc = descriptor_from_args(args)
    desc.validate()
    cfg = desc.config()
    params = desc.params()
    report = {"command": "verify", "descriptor": desc.effective(), "status": "ok"}
    if desc.equation.get("kind") == "thomas-fermi" and not desc.initial:
        # the boundary solution y(0) = 1, y(inf) = 0
        red = tf_reduced_solution(cfg)
        curve = densify(red.curve, 4000)
        s, x0 = red.slope, 1e-6
        x_hi = float(desc.range.get("x_hi", 5.0))
        direct = direct_emden_fowler(THOMAS_FERMI, x0, 1 + s * x0 + 4 / 3 * x0**1.5, s + 2 * math.sqrt(x0),
                                     x_hi * 1.01, cfg.replace(rel_tol=1e-11, abs_tol=1e-13), dense_points=20_000)
        x_range = (float(desc.range.get("x_lo", 0.5)), x_hi)
        report["slope"] = s
    else:
        curve = densify(run_pipeline(desc), 4000)
        i = len(curve.x) // 2
        xs = np.sort(curve.x)
        x_range = (float(desc.range.get("x_lo", xs[0])), float(desc.range.get("x_hi", xs[-1])))
        oracle_cfg = cfg.replace(rel_tol=1e-12, abs_tol=1e-14)
        x_mid, y_mid, p_mid = float(curve.x[i]), float(curve.y[i]), float(curve.slope[i])
        left = direct_emden_fowler(params, x_mid, y_mid, p_mid, x_range[0], oracle_cfg, dense_points=5000)
        right = direct_emden_fowler(params, x_mid, y_mid, p_mid, x_range[1], oracle_cfg, dense_points=5000)
        direct = AnalyticCurve(np.concatenate([left.x[::-1], right.x[1:]]), np.concatenate([left.y[::-1], right.y[1:]]))
    report["x_range"] = list(x_range)
    report["deviation"] = compare_curves(curve, direct, x_range)
    if desc.equation.get("kind") == "thomas-fermi" and not desc.initial:
        fine = tf_reduced_solution(cfg.replace(h_max=1.0 / 4000, h_init=1.0 / 4000)).curve
        report["max_residual"] = curve_residual(params, fine, x_range)
    else:
        report["max_residual"] = pipeline_residual(desc)
    print(json.dumps(report, indent=2, sort_keys=True, default=_jsonable))
    return EXIT_OK


def cmd_classify(args) -> int:
    desc = descriptor_from_args(args)
    params = desc.params()
    law = emden_fowler_exponent(params)
    F = emden_fowler_residual(params)
    defect = invariance_defect(F, law.c)
    report = {"a": params.a, "b": params.b, "c": law.c, "k": law.k, "defect": defect}
    if args.estimate:
        try:
            est = estimate_exponent(F, c_interval=(args.c_lo, args.c_hi))
            report["c_estimated"] = est.c
            report["defect_estimated"] = est.defect
        except NoInvariantExponent as exc:
            report["c_estimated"] = None
            report["estimate_error"] = str(exc)
    print(json.dumps(report, indent=2))
    return EXIT_OK


def expand_sweep(spec: dict) -> list[dict]:
    """{"base": descriptor, "vary": {dotted.key: [values]}} -> descriptors
    (cartesian product, in key order), or a plain list of descriptors."""
    if isinstance(spec, list):
        return spec
    base, vary = spec.get("base", {}), spec.get("vary", {})
    runs = [copy.deepcopy(base)]
    for key, values in vary.items():
        nxt = []
        for run in runs:
            for v in values:
                r = copy.deepcopy(run)
                node = r
                *path, leaf = key.split(".")
                for p in path:
                    node = node.setdefault(p, {})
                node[leaf] = v
                nxt.append(r)
        runs = nxt
    return runs


def cmd_sweep(args) -> int:
    try:
        spec = json.loads(Path(args.sweep_file).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read sweep file {args.sweep_file}: {exc}") from None
    runs = expand_sweep(spec)
    root = out_dir(args)
    dirs = [str(root / f"run_{i:03d}") for i in range(len(runs))]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(solve_to_dir, runs, dirs))
    else:
        reports = [solve_to_dir(r, d) for r, d in zip(runs, dirs)]
    index = [{"dir": d, "status": r["status"], "error": r.get("error")} for d, r in zip(dirs, reports)]
    write_report(root / "sweep.json", {"command": "sweep", "runs": index})
    print(json.dumps(index, indent=2))
    return max((_exit_code(r) for r in reports), default=EXIT_OK)


# ----------------------------------------------------------------- parser

def _add_problem_flags(p):
    p.add_argument("--config", help="JSON problem descriptor; flags override its values")
    p.add_argument("--a", type=float, help="Emden-Fowler exponent of x")
    p.add_argument("--b", type=float, help="Emden-Fowler exponent of y")
    p.add_argument("--thomas-fermi", action="store_true", help="use y'' = y^(3/2)/sqrt(x)")
    p.add_argument("--gauge", help=f"one of {', '.join(GAUGE_NAMES)}")
    p.add_argument("--method", choices=METHODS)


def _add_run_flags(p):
    for name in ("t0", "w0", "y0", "x0", "yp0"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--t-end", type=float)
    p.add_argument("--x-lo", type=float)
    p.add_argument("--x-hi", type=float)
    p.add_argument("--samples", type=int, help="resample the trajectory on this many uniform t points")


def _add_solver_flags(p):
    for name, f in SolverConfig.__dataclass_fields__.items():
        p.add_argument(f"--{name.replace('_', '-')}", dest=name, type=int if f.type in ("int", int) else float)


def _add_out_flags(p):
    p.add_argument("--out-dir", help="output directory (default: $MAJORANA_OUT_DIR or ./majorana_out)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="majorana", description="Order reduction of scale-invariant second-order ODEs.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", help="tabulate the reduced-equation coefficients")
    _add_problem_flags(p)
    p.add_argument("--t", type=float, help="single t value")
    p.add_argument("--t-lo", type=float)
    p.add_argument("--t-hi", type=float)
    p.add_argument("--n", type=int, default=11)
    p.add_argument("--output", help="write the CSV table here instead of stdout")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("solve", help="integrate and reconstruct a trajectory")
    _add_problem_flags(p)
    _add_run_flags(p)
    _add_solver_flags(p)
    _add_out_flags(p)
    p.add_argument("--gnuplot", action="store_true", help="also write a gnuplot script for the CSV")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("tf", help="initial slope of the Thomas-Fermi boundary solution")
    p.add_argument("--method", choices=("series", "ode", "shooting"), default="ode")
    p.add_argument("--order", type=int, default=30, help="series order")
    p.add_argument("--tol", type=float, default=1e-6, help="shooting bisection tolerance")
    p.add_argument("--x-grid", help="comma-separated x values for a y(x) table")
    p.add_argument("--output", help="also write the JSON result here")
    p.add_argument("--config")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_tf)

    p = sub.add_parser("verify", help="compare the reduced pipeline with direct integration")
    _add_problem_flags(p)
    _add_run_flags(p)
    _add_solver_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("classify", help="scaling exponent and invariance defect")
    _add_problem_flags(p)
    p.add_argument("--estimate", action="store_true", help="also recover c numerically")
    p.add_argument("--c-lo", type=float, default=-5.0)
    p.add_argument("--c-hi", type=float, default=5.0)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("sweep", help="run many solve descriptors")
    p.add_argument("sweep_file", help='JSON: list of descriptors or {"base": ..., "vary": {key: [values]}}')
    p.add_argument("--jobs", type=int, default=1)
    _add_out_flags(p)
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _INPUT_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except MajoranaError as exc:
        print(f"solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
