"""Command-line front end.

Subcommands: trajectory, action, verify, hierarchy, sweep. Every command writes
one JSON document (or one CSV table) to stdout or ``--out``. Floats are written
in shortest round-trip form, so identical inputs give byte-identical output.

Exit codes: 0 success, 1 verification failure, 2 usage or degenerate input,
3 numerical non-convergence. Errors go to stderr as a JSON object.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import action as act
from . import bvp, extremal, hierarchy, oracle, verify
from .core import (
    BoundaryData,
    BranchSelector,
    DegenerateInputError,
    DegenerateSeparationError,
    ExtremalChart,
    HierarchyParams,
    NoSolutionError,
    NonConvergenceError,
    OscillatorParams,
    PoleError,
    QuarticActionError,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_NONCONVERGENCE = 3

_ORACLE_TOL = 1e-8


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    """Validated view of the parsed flags for one invocation."""

    command: str
    params: OscillatorParams | HierarchyParams
    chart: ExtremalChart | None
    data: BoundaryData | None
    branch: BranchSelector | None
    tol: float
    fmt: str
    out: str | None

    def header(self) -> dict:
        p = self.params
        head = {"command": self.command, "m": p.m}
        if isinstance(p, OscillatorParams):
            head["k4"] = p.k4
        else:
            head["n"] = p.n
            head["k2n"] = p.k2n
        head["tol"] = self.tol
        return head


# ---------------------------------------------------------------- formatting


def _clean(value):
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, (np.floating, np.integer)):
        return _clean(value.item())
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def dumps(doc: dict) -> str:
    return json.dumps(_clean(doc), indent=2, allow_nan=False) + "\n"


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else ""
    return str(value)


def csv_text(header: dict, columns: Sequence[str], rows: Sequence[Sequence]) -> str:
    """CSV with ``# key=value`` comment lines, then a mandatory header row."""
    buf = io.StringIO()
    for key, value in header.items():
        buf.write(f"# {key}={_cell(value)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _chart_dict(chart: ExtremalChart) -> dict:
    return {"E": chart.E, "theta0": chart.theta0, "t0": chart.t0}


def _data_dict(data: BoundaryData) -> dict:
    return {"t_a": data.a.t, "y_a": data.a.y, "t_b": data.b.t, "y_b": data.b.y}


def _branch_dict(branch: BranchSelector) -> dict:
    return {
        "crossings": branch.crossings,
        "rising_at_a": branch.rising_at_a,
        "rising_at_b": branch.rising_at_b,
    }


# ---------------------------------------------------------------- arguments


def _direction(text: str) -> bool | None:
    table = {"up": True, "down": False, "any": None}
    if text not in table:
        raise argparse.ArgumentTypeError("expected up, down or any")
    return table[text]


def _add_params(p: argparse.ArgumentParser, hierarchy_member: bool = False) -> None:
    p.add_argument("--m", type=float, default=1.0, help="mass (default 1)")
    if hierarchy_member:
        p.add_argument("--n", type=int, required=True, help="potential exponent 2n")
        p.add_argument("--k2n", type=float, default=1.0, help="stiffness (default 1)")
    else:
        p.add_argument("--k4", type=float, default=1.0, help="quartic stiffness (default 1)")


def _add_endpoints(p: argparse.ArgumentParser, required: bool) -> None:
    g = p.add_argument_group("endpoints")
    for name in ("ta", "ya", "tb", "yb"):
        g.add_argument(f"--{name}", type=float, required=required)
    b = p.add_argument_group("branch")
    b.add_argument(
        "--crossings", type=int, default=None,
        help="zero crossings inside (t_a, t_b); omit for the minimal-crossing extremal",
    )
    b.add_argument("--rising-a", type=_direction, default=None, metavar="{up,down,any}")
    b.add_argument("--rising-b", type=_direction, default=None, metavar="{up,down,any}")
    b.add_argument(
        "--energy-guess", type=float, default=None,
        help="pick the extremal nearest this energy when several share the branch",
    )


def _add_common(p: argparse.ArgumentParser, formats=("json",)) -> None:
    p.add_argument("--tol", type=float, default=bvp.DEFAULT_TOL, help="solver tolerance")
    p.add_argument("--format", dest="fmt", choices=formats, default=formats[0])
    p.add_argument("--out", default=None, help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="quartic-action", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("trajectory", help="sample an extremal on a time grid")
    _add_params(p)
    c = p.add_argument_group("chart")
    c.add_argument("--E", type=float, default=None)
    c.add_argument("--theta0", type=float, default=0.0)
    c.add_argument("--t0", type=float, default=0.0)
    _add_endpoints(p, required=False)
    p.add_argument("--t-start", type=float, default=None, help="default t0 or t_a")
    p.add_argument("--t-end", type=float, default=None, help="default t_b, or t0 + one period")
    p.add_argument("--samples", type=int, default=256)
    _add_common(p, ("csv", "json"))

    p = sub.add_parser("action", help="closed-form action between two endpoints")
    _add_params(p)
    _add_endpoints(p, required=True)
    p.add_argument(
        "--form", choices=[f.value for f in act.ActionForm], default=act.ActionForm.PRIMARY.value
    )
    p.add_argument("--all-forms", action="store_true", help="also report every equivalent form")
    _add_common(p)

    p = sub.add_parser("verify", help="randomized cross-checks against the brute-force oracle")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--cases", type=int, default=50)
    p.add_argument("--full", action="store_true", help="acceptance-size case counts")
    p.add_argument("--tol", type=float, default=None, help="override every tolerance")
    p.add_argument("--timings", action="store_true", help="include wall-clock seconds")
    p.add_argument("--out", default=None)

    p = sub.add_parser("hierarchy", help="action for V = k2n y**(2n) / (2n)")
    _add_params(p, hierarchy_member=True)
    _add_endpoints(p, required=True)
    _add_common(p)

    p = sub.add_parser("sweep", help="action along one parameter axis")
    p.add_argument("--axis", choices=("E", "dt", "yb", "n"), required=True)
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--k4", type=float, default=1.0, help="stiffness for every n (default 1)")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--theta-a", type=float, default=0.0, help="E axis: start angle from theta0")
    p.add_argument("--theta-b", type=float, default=1.0, help="E axis: end angle from theta0")
    _add_endpoints(p, required=False)
    _add_common(p, ("csv",))
    return parser


def _params(args) -> OscillatorParams | HierarchyParams:
    if args.command == "hierarchy":
        return HierarchyParams(args.n, args.m, args.k2n)
    return OscillatorParams(args.m, args.k4)


def _branch(args) -> BranchSelector | None:
    if args.crossings is None:
        if args.rising_a is not None or args.rising_b is not None:
            raise UsageError("--rising-a/--rising-b need --crossings")
        return None
    return BranchSelector(args.crossings, args.rising_a, args.rising_b)


def _endpoints(args, required: bool) -> BoundaryData | None:
    given = [getattr(args, k) for k in ("ta", "ya", "tb", "yb")]
    if all(v is None for v in given) and not required:
        return None
    if any(v is None for v in given):
        raise UsageError("endpoints need all of --ta --ya --tb --yb")
    return BoundaryData.of(*given)


def make_config(args) -> RunConfig:
    params = _params(args)
    chart = data = None
    if args.command == "trajectory":
        data = _endpoints(args, required=False)
        if (args.E is None) == (data is None):
            raise UsageError("give exactly one of a chart (--E ...) or endpoints (--ta ...)")
        if args.E is not None:
            chart = ExtremalChart(params, args.E, args.theta0, args.t0)
    elif args.command in ("action", "hierarchy"):
        data = _endpoints(args, required=True)
    return RunConfig(
        command=args.command,
        params=params,
        chart=chart,
        data=data,
        branch=_branch(args),
        tol=args.tol,
        fmt=args.fmt,
        out=args.out,
    )


# ---------------------------------------------------------------- commands


def _solve(params, data: BoundaryData, branch, tol: float, guess: float | None):
    if branch is None:
        return bvp.solve_minimal(params, data, tol)
    return bvp.solve(params, data, branch, tol, energy_guess=guess)


def cmd_trajectory(cfg: RunConfig, args) -> int:
    if cfg.chart is not None:
        chart, sol = cfg.chart, None
    else:
        sol = _solve(cfg.params, cfg.data, cfg.branch, cfg.tol, args.energy_guess)
        chart = sol.chart
    if args.samples < 1:
        raise DegenerateInputError("--samples must be >= 1")
    t_start = args.t_start
    if t_start is None:
        t_start = chart.t0 if sol is None else sol.data.a.t
    t_end = args.t_end
    if t_end is None:
        t_end = chart.t0 + extremal.period(chart) if sol is None else sol.data.b.t
    grid = np.linspace(t_start, t_end, args.samples) if args.samples > 1 else np.array([t_start])
    rows = []
    for t in grid:
        t = float(t)
        if sol is not None and sol.data.a.t <= t <= sol.data.b.t:
            theta = bvp.interpolate(sol, t)
            y, v = extremal.position(chart, theta), extremal.velocity(chart, theta)
        else:
            theta = extremal.theta_of_time(chart, t)
            point = extremal.phase_point(chart, t)
            y, v = point.y, point.v
        residual = abs(float(oracle.energy(chart.params, y, v)) - chart.E) / chart.E
        rows.append((t, y, v, chart.params.m * v, theta, residual))
    columns = ("t", "y", "v", "p", "theta", "energy_residual")
    header = cfg.header() | {"E": chart.E, "theta0": chart.theta0, "t0": chart.t0}
    if cfg.fmt == "csv":
        _emit(csv_text(header, columns, rows), cfg.out)
    else:
        doc = {
            "header": header,
            "chart": _chart_dict(chart),
            "columns": {name: [r[i] for r in rows] for i, name in enumerate(columns)},
        }
        _emit(dumps(doc), cfg.out)
    return EXIT_OK


def _solution_doc(sol: bvp.BvpSolution) -> dict:
    return {
        "chart": _chart_dict(sol.chart),
        "theta_a": sol.theta_a,
        "theta_b": sol.theta_b,
        "branch": _branch_dict(bvp.branch_of(sol)),
        "residuals": sol.residuals._asdict(),
    }


def cmd_action(cfg: RunConfig, args) -> int:
    sol = _solve(cfg.params, cfg.data, cfg.branch, cfg.tol, args.energy_guess)
    form = act.ActionForm(args.form)
    parts = act.action(sol, form)
    doc = {"header": cfg.header(), "endpoints": _data_dict(cfg.data), "form": form.value}
    doc |= _solution_doc(sol)
    doc["action"] = parts.as_dict()
    derivs = act.endpoint_derivatives(sol)
    doc["p_a"], doc["p_b"] = derivs.p_a, derivs.p_b
    if args.all_forms:
        forms = {}
        for other in act.ActionForm:
            try:
                forms[other.value] = {"total": act.action(sol, other).total}
            except PoleError as exc:
                forms[other.value] = {"total": None, "error": str(exc)}
        doc["forms"] = forms
    _emit(dumps(doc), cfg.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.cases < 0:
        raise DegenerateInputError("--cases must be >= 0")
    cases = None if args.full else args.cases
    results = verify.run_verify(args.seed, cases, args.tol)
    props = []
    for r in results:
        row = r.as_dict()
        if not args.timings:
            row.pop("seconds")
        props.append(row)
    passed = all(r.passed for r in results)
    doc = {
        "header": {"command": "verify", "m": 1.0, "k4": 4.0, "seed": args.seed,
                   "cases": "full" if args.full else args.cases, "tol": args.tol},
        "passed": passed,
        "properties": props,
    }
    _emit(dumps(doc), args.out)
    return EXIT_OK if passed else EXIT_VERIFY_FAILED


def cmd_hierarchy(cfg: RunConfig, args) -> int:
    sol = _solve(cfg.params, cfg.data, cfg.branch, cfg.tol, args.energy_guess)
    parts = hierarchy.h_breakdown(sol)
    doc = {"header": cfg.header(), "endpoints": _data_dict(cfg.data)}
    doc |= _solution_doc(sol)
    doc["action"] = parts.as_dict()
    doc["energy_coefficient"] = hierarchy.energy_coefficient(cfg.params.n)
    ode = oracle.trajectory_for(sol)
    reference = oracle.lagrangian_action_quadrature(ode, cfg.data.a.t, cfg.data.b.t)
    rel = abs(parts.total - reference) / max(abs(reference), 1e-300)
    doc["oracle"] = {"action": reference, "relative_error": rel, "passed": rel <= _ORACLE_TOL}
    if cfg.params.n == 1:
        omega = math.sqrt(cfg.params.k2n / cfg.params.m)
        try:
            doc["harmonic_principal_function"] = hierarchy.ho_principal_function(
                cfg.params.m, omega, cfg.data
            )
        except DegenerateSeparationError as exc:
            doc["harmonic_principal_function"] = None
            doc["harmonic_error"] = str(exc)
    _emit(dumps(doc), cfg.out)
    return EXIT_OK


def _sweep_row(args, value: float, data: BoundaryData | None, branch) -> tuple:
    if args.axis == "E":
        params = OscillatorParams(args.m, args.k4) if args.n == 2 else HierarchyParams(
            args.n, args.m, args.k4
        )
        chart = bvp.make_chart(params, value)
        sol = bvp.segment(chart, args.theta_a, args.theta_b)
    else:
        n = int(round(value)) if args.axis == "n" else args.n
        if args.axis == "n" and n != value:
            raise DegenerateInputError(f"n must be an integer, got {value!r}")
        params = OscillatorParams(args.m, args.k4) if n == 2 else HierarchyParams(n, args.m, args.k4)
        t_a, y_a, t_b, y_b = data.a.t, data.a.y, data.b.t, data.b.y
        if args.axis == "dt":
            t_b = t_a + value
        elif args.axis == "yb":
            y_b = value
        sol = _solve(params, BoundaryData.of(t_a, y_a, t_b, y_b), branch, args.tol, args.energy_guess)
    # endpoint reconstruction is undefined a whole number of half periods apart
    bvp.theta0_from_endpoints(sol)
    chart = sol.chart
    if isinstance(chart.params, OscillatorParams):
        S = act.action(sol).total
    else:
        S = hierarchy.h_breakdown(sol).total
    scale = math.sqrt(2.0 * chart.params.m * chart.E)
    p_a = scale * math.cos(sol.theta_a - chart.theta0)
    p_b = scale * math.cos(sol.theta_b - chart.theta0)
    return S, chart.E, p_a, p_b, hierarchy.h_period(chart)


def cmd_sweep(args) -> int:
    if args.count < 1:
        raise DegenerateInputError("--count must be >= 1")
    data = None
    if args.axis == "dt":
        if None in (args.ta, args.ya, args.yb):
            raise UsageError("the dt axis needs --ta --ya --yb")
        # t_b is replaced row by row; a placeholder keeps the data valid
        data = BoundaryData.of(args.ta, args.ya, args.ta + 1.0, args.yb)
    elif args.axis == "yb":
        if None in (args.ta, args.ya, args.tb):
            raise UsageError("the yb axis needs --ta --ya --tb")
        data = BoundaryData.of(args.ta, args.ya, args.tb, 0.0)
    elif args.axis != "E":
        data = _endpoints(args, required=True)
    branch = _branch(args)
    values = np.linspace(args.start, args.stop, args.count) if args.count > 1 else np.array([args.start])

    def one(index_value):
        index, value = index_value
        try:
            return (index, float(value)) + _sweep_row(args, float(value), data, branch) + ("",)
        except QuarticActionError as exc:
            return (index, float(value), None, None, None, None, None, f"{type(exc).__name__}: {exc}")

    rows = verify.ordered_map(one, list(enumerate(values)))
    header = {"command": "sweep", "axis": args.axis, "m": args.m, "k4": args.k4, "n": args.n,
              "tol": args.tol}
    columns = ("index", "value", "S", "E", "p_a", "p_b", "period", "error")
    _emit(csv_text(header, columns, rows), args.out)
    return EXIT_OK


# ---------------------------------------------------------------- entry point


def _error(kind: str, exc: BaseException, code: int, extra: dict | None = None) -> int:
    doc = {"error": kind, "message": str(exc), "exit_code": code}
    if extra:
        doc |= extra
    sys.stderr.write(dumps(doc))
    return code


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        cfg = make_config(args)
        handler = {"trajectory": cmd_trajectory, "action": cmd_action, "hierarchy": cmd_hierarchy}
        return handler[args.command](cfg, args)
    except UsageError as exc:
        return _error("usage", exc, EXIT_USAGE)
    except NonConvergenceError as exc:
        return _error("non_convergence", exc, EXIT_NONCONVERGENCE,
                      {"residuals": list(exc.residuals)})
    except (DegenerateInputError, DegenerateSeparationError, PoleError, NoSolutionError) as exc:
        return _error(type(exc).__name__, exc, EXIT_USAGE)
    except QuarticActionError as exc:
        return _error(type(exc).__name__, exc, EXIT_NONCONVERGENCE)
    except OSError as exc:
        return _error("io", exc, EXIT_USAGE)


if __name__ == "__main__":
    sys.exit(main())
