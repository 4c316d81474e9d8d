"""Command-line entry point: simulate, verify, transform and scan.

Exit codes
----------
0 success, 2 configuration error, 3 integration failure, 4 a verification
check failed, 5 domain violation during a transform.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import integrators as integ
from .chartcore import Chart, ChartPoint, exterior_derivative
from .errors import DomainViolation, KeplerError, StepFailure, UnboundState
from .grids import grid_points, parse_grid
from .keplermodel import (
    ModelParams,
    hamiltonian_action,
    hamiltonian_pi,
    hamiltonian_reduced,
    hamiltonian_xi,
)
from .qbh import Family, build_qbh, contraction_residuals
from .recursion import Label, build_recursion, chain_identity, invariance_residual, lie_delta_residual, torsion_residual
from .transforms import TransformMode, action_to_pi, action_to_xi, pi_to_action, reduced_to_action, xi_to_action
from .verify import MODES, SUITES, run_verification

EXIT_OK, EXIT_CONFIG, EXIT_INTEGRATION, EXIT_CHECK, EXIT_DOMAIN = 0, 2, 3, 4, 5


class ConfigError(Exception):
    pass


# --- serialization ------------------------------------------------------------


def _clean(obj):
    """JSON-ready copy: numpy scalars to float, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def dumps(obj) -> str:
    # repr-based float output round-trips every double exactly
    return json.dumps(_clean(obj), indent=2, sort_keys=False, allow_nan=False) + "\n"


def _fmt(v) -> str:
    v = float(v)
    return "%.17g" % v if math.isfinite(v) else "nan"


def write_csv(path: str, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) if isinstance(v, (float, int, np.floating, np.integer)) else v for v in row])
    _write_text(path, buf.getvalue())


def _write_text(path, text):
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)


# --- argument handling --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="deformed-kepler",
        description="Deformed-phase-space Kepler dynamics: simulation, identity checks, transforms and scans.",
    )
    p.add_argument("--command", required=True, choices=["simulate", "verify", "transform", "scan"])
    p.add_argument("--m", type=float, default=1.0, help="mass (default 1)")
    p.add_argument("--k", type=float, default=1.0, help="coupling (default 1)")
    p.add_argument("--alpha", type=float, default=0.1, help="deformation (default 0.1)")
    p.add_argument("--chart", default=None, help="chart of --state, or of the grid for scan")
    p.add_argument("--to", default=None, help="target chart for transform")
    p.add_argument("--state", default=None, help="comma-separated coordinates")
    p.add_argument("--r-context", type=float, default=None,
                   help="radius used by the XI chart when the source carries no r")
    p.add_argument("--t-end", type=float, default=10.0)
    p.add_argument("--integrator", choices=["rk45", "midpoint"], default="rk45")
    p.add_argument("--rel-tol", type=float, default=1e-9)
    p.add_argument("--abs-tol", type=float, default=1e-12)
    p.add_argument("--dt", type=float, default=1e-3, help="fixed step of the midpoint rule")
    p.add_argument("--max-steps", type=int, default=1_000_000)
    p.add_argument("--mode", choices=MODES, default="canonical",
                   help="canonical/paper-literal vector fields; corrected/paper-literal PI inverse")
    p.add_argument("--suite", choices=("all",) + SUITES, default="all")
    p.add_argument("--grid", default=None, help="name=min:max:count,... over chart coordinates")
    p.add_argument("--checks", default=None, help="comma list of scan residuals (default: all for the chart)")
    p.add_argument("--out", default=None, help="CSV output (simulate, scan)")
    p.add_argument("--report", default=None, help="JSON report (verify) or run summary (simulate)")
    p.add_argument("--workers", type=int, default=4, help="threads for scan")
    return p


def _params(args) -> ModelParams:
    try:
        return ModelParams(args.m, args.k, args.alpha)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _chart(name, what="--chart") -> Chart:
    if name is None:
        raise ConfigError(f"{what} is required")
    try:
        return Chart[name.upper()]
    except KeyError:
        raise ConfigError(f"unknown chart {name!r}; choose from {[c.name for c in Chart]}") from None


def _state(args, chart: Chart) -> ChartPoint:
    if args.state is None:
        raise ConfigError("--state is required")
    try:
        values = [float(v) for v in args.state.split(",")]
    except ValueError:
        raise ConfigError(f"--state must be a comma list of numbers, got {args.state!r}") from None
    try:
        return ChartPoint(chart, values)
    except DomainViolation as exc:
        raise ConfigError(str(exc)) from None


def _header(args, params) -> dict:
    return {
        "command": args.command,
        "params": {"m": params.m, "k": params.k, "alpha": params.alpha},
        "mode": args.mode,
    }


# --- simulate -----------------------------------------------------------------


def cmd_simulate(args) -> int:
    params = _params(args)
    chart = _chart(args.chart or "CARTESIAN")
    if chart not in (Chart.CARTESIAN, Chart.REDUCED):
        raise ConfigError("simulate integrates on CARTESIAN or REDUCED")
    x0 = _state(args, chart)
    if not args.t_end > 0:
        raise ConfigError(f"t_end must be > 0 (got {args.t_end}); an empty trajectory has nothing to report")
    try:
        cfg = integ.IntegratorConfig(
            method=integ.Method(args.integrator),
            rel_tol=args.rel_tol,
            abs_tol=args.abs_tol,
            dt=args.dt,
            t_end=args.t_end,
            max_steps=args.max_steps,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    reduced_mode = "paper-literal" if args.mode == "paper-literal" else "canonical"
    try:
        if chart is Chart.CARTESIAN:
            traj = integ.integrate_cartesian(x0, params, cfg)
        else:
            traj = integ.integrate_reduced(x0, params, cfg, mode=reduced_mode)
    except (StepFailure, DomainViolation) as exc:
        print(f"integration failed: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION

    names = list(chart.coordinate_names)
    mons = list(integ.MONITORS)
    header = ["t"] + names + mons + [f"drift_{m}" for m in mons]
    rows = []
    for i, t in enumerate(traj.times):
        vals = [traj.monitors[m][i] for m in mons]
        drifts = [abs(traj.monitors[m][i] - traj.monitors[m][0]) for m in mons]
        rows.append([t, *traj.states[i], *vals, *drifts])
    if args.out:
        write_csv(args.out, header, rows)
    summary = {
        "header": {**_header(args, params), "chart": chart.name, "integrator": cfg.method.value,
                   "rel_tol": cfg.rel_tol, "abs_tol": cfg.abs_tol, "dt": cfg.dt, "t_end": cfg.t_end,
                   "max_steps": cfg.max_steps, "reduced_field": reduced_mode if chart is Chart.REDUCED else None},
        "initial_state": list(x0.coords),
        "final_state": traj.states[-1],
        "n_samples": len(traj),
        "drift": traj.drift,
    }
    text = dumps(summary)
    if args.report:
        _write_text(args.report, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# --- verify -------------------------------------------------------------------


def cmd_verify(args) -> int:
    params = _params(args)
    report = run_verification(params, suite=args.suite, mode=args.mode)
    text = dumps(report.to_dict())
    _write_text(args.report or "-", text)
    s = report.summary
    print(f"{s['passed']}/{s['checks']} checks passed, {s['ledger']} ledger records", file=sys.stderr)
    for r in report.records:
        if not r.ledger and not r.passed:
            print(f"FAILED {r.check_id}: residual {r.residual:.3g} vs {r.tolerance:g}", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_CHECK


# --- transform ----------------------------------------------------------------


_HAMILTONIANS = {
    Chart.REDUCED: hamiltonian_reduced,
    Chart.ACTION: hamiltonian_action,
    Chart.XI: hamiltonian_xi,
    Chart.PI: hamiltonian_pi,
}


def transform_point(x: ChartPoint, target: Chart, params: ModelParams, mode: TransformMode, r_context=None):
    """Route ``x`` to ``target`` through ACTION; returns ``(point, path)``."""
    path = [x.chart.name]
    r = x[0] if x.chart is Chart.REDUCED else r_context
    if x.chart is Chart.REDUCED:
        x = reduced_to_action(x, params)
        path.append("ACTION")
    elif x.chart is Chart.XI:
        if r is None:
            raise ConfigError("XI source needs --r-context")
        x = xi_to_action(x, params, r)
        path.append("ACTION")
    elif x.chart is Chart.PI:
        x = pi_to_action(x, params, mode)
        path.append("ACTION")
    elif x.chart is not Chart.ACTION:
        raise ConfigError(f"no transform from {x.chart.name}")
    if target is Chart.ACTION:
        return x, path
    if target is Chart.XI:
        if r is None:
            raise ConfigError("ACTION -> XI needs --r-context")
        y = action_to_xi(x, params, r)
    elif target is Chart.PI:
        y = action_to_pi(x, params)
    else:
        raise ConfigError(f"no transform to {target.name}")
    path.append(target.name)
    return y, path


def cmd_transform(args) -> int:
    params = _params(args)
    src = _chart(args.chart)
    dst = _chart(args.to, "--to")
    x = _state(args, src)
    mode = TransformMode.PAPER_LITERAL if args.mode == "paper-literal" else TransformMode.CORRECTED
    try:
        y, path = transform_point(x, dst, params, mode, args.r_context)
        h_src = _HAMILTONIANS[src](params)(x)
        h_dst = _HAMILTONIANS[dst](params)(y)
        record = {
            "header": {**_header(args, params), "path": path},
            "source": {"chart": src.name, "coords": list(x.coords), "H": h_src},
            "target": {"chart": dst.name, "coords": list(y.coords), "H": h_dst},
            "H_difference": h_dst - h_src,
        }
        if src is Chart.ACTION and dst is Chart.PI:
            back = pi_to_action(y, params, mode)
            record["round_trip"] = {"coords": list(back.coords),
                                    "max_abs_diff": float(np.max(np.abs(back.array - x.array)))}
    except (UnboundState, DomainViolation, KeplerError) as exc:
        print(f"domain violation: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    sys.stdout.write(dumps(record))
    return EXIT_OK


# --- scan ---------------------------------------------------------------------


def _scan_checks(params: ModelParams, mode: str) -> dict:
    """Residual fields by chart: ``name -> fn(point)``."""
    xh_mode = "paper-literal" if mode == "paper-literal" else "canonical"
    out = {Chart.ACTION: {}, Chart.XI: {}, Chart.PI: {}, Chart.NU: {}}
    t = build_recursion(Label.T)
    out[Chart.ACTION]["torsion_T"] = lambda x: torsion_residual(t, x)
    for l in range(4):
        out[Chart.ACTION][f"lie_X{l}_T"] = lambda x, l=l: invariance_residual(params, x, l)
    out[Chart.ACTION]["lie_delta_omega"] = lambda x: lie_delta_residual(params, x)
    for i in range(3):
        out[Chart.ACTION][f"chain_{i}"] = lambda x, i=i: max(chain_identity(params, x, i))
    fams = [Family.DOUBLE_PRIME] if params.alpha <= 0 else [Family.PRIME, Family.DOUBLE_PRIME]
    for fam in fams:
        q = build_qbh(params, fam)
        tag = "prime" if fam is Family.PRIME else "double_prime"
        for idx in range(2):
            form = q.partner_forms[idx]
            out[Chart.ACTION][f"closedness_{tag}_{idx + 1}"] = (
                lambda x, form=form: float(np.max(np.abs(exterior_derivative(form, x)))))
            out[Chart.ACTION][f"contraction_{tag}_{idx + 1}"] = (
                lambda x, q=q, idx=idx: contraction_residuals(q, x, xh_mode)[idx]["max_abs"])
            out[Chart.ACTION][f"g_star_{tag}_{idx + 1}"] = (
                lambda x, q=q, idx=idx: contraction_residuals(q, x, xh_mode)[idx]["g_star"])
    tp, tpp = build_recursion(Label.T_PRIME), build_recursion(Label.T_DOUBLE_PRIME)
    out[Chart.XI]["torsion_T_prime"] = lambda x: torsion_residual(tp, x)
    out[Chart.PI]["torsion_T_double_prime"] = lambda x: torsion_residual(tpp, x)
    tc = build_recursion(Label.CAL_T)
    out[Chart.NU]["torsion_calT"] = lambda x: torsion_residual(tc, x)
    return out


def cmd_scan(args) -> int:
    params = _params(args)
    chart = _chart(args.chart or "ACTION")
    if args.grid is None:
        raise ConfigError("--grid is required for scan")
    try:
        axes = parse_grid(args.grid)
        points = grid_points(chart, axes)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if not points:
        raise ConfigError("grid contains no valid points")
    available = _scan_checks(params, args.mode).get(chart, {})
    if not available:
        raise ConfigError(f"no scan residuals on {chart.name}")
    names = list(available) if args.checks is None else [c.strip() for c in args.checks.split(",") if c.strip()]
    unknown = [n for n in names if n not in available]
    if unknown:
        raise ConfigError(f"unknown checks {unknown} on {chart.name}; available: {sorted(available)}")

    def row(x):
        return [*x.coords, *(available[n](x) for n in names)]

    # map preserves input order, so rows stay row-major whatever the thread timing
    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as pool:
        rows = list(pool.map(row, points))
    header = list(chart.coordinate_names) + names
    write_csv(args.out or "-", header, rows)
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "verify": cmd_verify, "transform": cmd_transform, "scan": cmd_scan}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
