"""Randomized cross-checks of the closed forms against the oracle.

Each ``check_*`` function draws its cases from ``numpy.random.default_rng`` seeded
per check, so results do not depend on which other checks run or in what order.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import action as act
from . import bvp, extremal, hierarchy, oracle
from .core import (
    BoundaryData,
    BranchSelector,
    DegenerateInputError,
    DegenerateSeparationError,
    ExtremalChart,
    HierarchyParams,
    OscillatorParams,
    QuarticActionError,
    amplitude,
)

HALF_PI = 0.5 * math.pi

#: case counts used by the acceptance criteria
FULL_CASES = {
    "closed_form_vs_oracle": 200,
    "hamilton_jacobi": 20,
    "form_equivalence": 200,
    "bvp_round_trip": 100,
    "hierarchy": 50,
}


@dataclass
class PropertyResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    cases: int
    seconds: float = 0.0
    detail: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


def threads() -> int:
    try:
        return max(1, int(os.environ.get("QO_ACTION_THREADS", "1")))
    except ValueError:
        return 1


def ordered_map(fn: Callable, items: list) -> list:
    """``map`` that may run in a thread pool; results keep input order."""
    workers = threads()
    if workers == 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _near(x: float, step: float, gap: float) -> bool:
    r = x - step * round(x / step)
    return abs(r) < gap


def _seed(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng([seed, sum(ord(ch) for ch in name)])


def random_segment(
    rng: np.random.Generator,
    params=None,
    *,
    energy_range: tuple[float, float] = (0.1, 10.0),
    span_range: tuple[float, float] = (0.1, 2 * math.pi - 0.1),
    gap: float = 0.05,
) -> bvp.BvpSolution:
    """Random segment of a random extremal, endpoints away from zeros and turning points."""
    params = params or OscillatorParams(1.0, 4.0)
    while True:
        E = float(np.exp(rng.uniform(np.log(energy_range[0]), np.log(energy_range[1]))))
        theta0 = float(rng.uniform(0.0, 2 * math.pi))
        t0 = float(rng.uniform(-1.0, 1.0))
        phi_a = float(rng.uniform(-math.pi, math.pi))
        span = float(rng.uniform(*span_range))
        phi_b = phi_a + span
        if _near(phi_a, HALF_PI, gap) or _near(phi_b, HALF_PI, gap) or _near(span, math.pi, gap):
            continue
        chart = bvp.make_chart(params, E, theta0, t0)
        return bvp.segment(chart, theta0 + phi_a, theta0 + phi_b)


def resolve(seg: bvp.BvpSolution, tol: float = 1e-12) -> bvp.BvpSolution:
    """Re-solve a forward-generated segment from its endpoints alone.

    Several extremals can share a branch label; the one nearest the generating
    energy is returned.
    """
    sols = bvp.solve_all(seg.chart.params, seg.data, bvp.branch_of(seg), tol)
    if not sols:
        raise QuarticActionError("generating extremal not recovered")
    E = seg.chart.E
    return min(sols, key=lambda s: abs(s.chart.E - E))


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b) if b != 0.0 else abs(a)


def _finish(name, errors, tol, t_start, detail=None) -> PropertyResult:
    worst = float(max(errors)) if errors else 0.0
    return PropertyResult(
        name=name,
        passed=bool(worst <= tol) and all(math.isfinite(e) for e in errors),
        worst=worst,
        tolerance=tol,
        cases=len(errors),
        seconds=round(time.perf_counter() - t_start, 3),
        detail=detail or {},
    )


def beta_quarter_integral() -> float:
    """High-precision value of the quarter-period integral of ``sin**(-1/2)``.

    Tanh-sinh quadrature at 40 digits, checked against ``(sqrt(pi)/2) G(1/4)/G(3/4)``.
    """
    import mpmath

    with mpmath.workdps(40):
        quad = mpmath.quad(lambda u: mpmath.sin(u) ** mpmath.mpf(-0.5), [0, mpmath.pi / 2])
        gamma = mpmath.sqrt(mpmath.pi) / 2 * mpmath.gamma(0.25) / mpmath.gamma(0.75)
        if abs(quad - gamma) > mpmath.mpf(10) ** -18:
            raise AssertionError("Beta identity and tanh-sinh quadrature disagree")
        return float(gamma)


def check_quarter_period(tol: float = 1e-9) -> PropertyResult:
    start = time.perf_counter()
    chart = ExtremalChart(OscillatorParams(1.0, 4.0), 1.0)
    expected = 4.0**-0.25 * 0.5 * beta_quarter_integral()
    got = extremal.time_of_theta(chart, extremal.ThetaInterval(0.0, HALF_PI))
    return _finish("quarter_period_anchor", [_rel(got, expected)], tol, start,
                   {"value": got, "expected": expected})


def check_closed_form_vs_oracle(seed: int, cases: int, tol: float = 1e-8) -> PropertyResult:
    start = time.perf_counter()
    rng = _seed(seed, "closed_form_vs_oracle")
    segments = [random_segment(rng) for _ in range(cases)]

    def one(seg):
        sol = resolve(seg)
        traj = oracle.trajectory_for(sol, tol=1e-13)
        S_oracle = oracle.lagrangian_action_quadrature(traj, sol.data.a.t, sol.data.b.t)
        return _rel(act.action(sol).total, S_oracle)

    return _finish("closed_form_vs_oracle", ordered_map(one, segments), tol, start)


def check_hamilton_jacobi(seed: int, cases: int, tol: float = 1e-6) -> PropertyResult:
    start = time.perf_counter()
    rng = _seed(seed, "hamilton_jacobi")
    segments = [random_segment(rng) for _ in range(cases)]

    def one(seg):
        sol = resolve(seg)
        exact = act.endpoint_derivatives(sol)
        targets = {
            "y_a": exact.dS_dy_a,
            "y_b": exact.dS_dy_b,
            "t_a": exact.dS_dt_a,
            "t_b": exact.dS_dt_b,
        }
        branch = bvp.branch_of(sol)
        errs = []
        for comp, target in targets.items():
            grad = oracle.fd_action_gradient(sol.chart.params, sol.data, branch, comp, base=sol)
            errs.append(_rel(grad.value, target))
        return max(errs)

    return _finish("hamilton_jacobi", ordered_map(one, segments), tol, start)


def check_form_equivalence(seed: int, cases: int, tol: float = 1e-10) -> PropertyResult:
    start = time.perf_counter()
    rng = _seed(seed, "form_equivalence")
    errors, identity = [], []
    while len(errors) < cases:
        seg = random_segment(rng)
        anchor = act.theta_max(seg)
        psi = [seg.theta_a - anchor, seg.theta_b - anchor]
        if any(_near(p, HALF_PI, 0.05) for p in psi):
            continue
        sol = resolve(seg)
        totals = [act.action(sol, form).total for form in act.ActionForm]
        errors.append(max(_rel(x, y) for x in totals for y in totals))
        y_max = act.y_max_signed(sol)
        for y, theta in ((sol.data.a.y, sol.theta_a), (sol.data.b.y, sol.theta_b)):
            identity.append(act.inverse_cos_identity_residual(y, y_max, theta - act.theta_max(sol)))
    forms = _finish("form_equivalence", errors, tol, start)
    ident = _finish("inverse_cos_identity", identity, tol, start)
    forms.detail["identity_worst"] = ident.worst
    forms.passed = forms.passed and ident.passed
    forms.worst = max(forms.worst, ident.worst)
    return forms


def check_bvp_round_trip(seed: int, cases: int, tol_energy: float = 1e-8,
                         tol_identity: float = 1e-10) -> PropertyResult:
    start = time.perf_counter()
    rng = _seed(seed, "bvp_round_trip")
    segments = [random_segment(rng) for _ in range(cases)]

    def one(seg):
        sol = resolve(seg, tol=1e-10)
        return _rel(sol.chart.E, seg.chart.E), bvp.amplitude_identity_residual(sol)

    rows = ordered_map(one, segments)
    energy_errs = [r[0] for r in rows]
    identity_errs = [r[1] for r in rows]
    res = _finish("bvp_round_trip", energy_errs, tol_energy, start)
    res.detail["identity_worst"] = max(identity_errs, default=0.0)
    res.detail["identity_tolerance"] = tol_identity
    res.passed = res.passed and res.detail["identity_worst"] <= tol_identity
    return res


def _hierarchy_n2(rng, cases) -> list[float]:
    errs = []
    for _ in range(cases):
        seg = random_segment(rng)
        quartic = resolve(seg)
        hp = HierarchyParams(2, seg.chart.params.m, seg.chart.params.k4)
        sol = bvp.solve(hp, seg.data, bvp.branch_of(seg), 1e-12, energy_guess=quartic.chart.E)
        errs.append(_rel(hierarchy.h_breakdown(sol).total, act.action(quartic).total))
    return errs


def _hierarchy_n1(rng, cases) -> list[float]:
    errs = []
    omega = 1.0
    params = HierarchyParams(1, 1.0, omega**2)
    while len(errs) < cases:
        dt = float(rng.uniform(0.05, 3 * math.pi))
        if _near(omega * dt, math.pi, 0.05):
            continue
        ya, yb = (float(x) for x in rng.uniform(-1.0, 1.0, 2))
        data = BoundaryData.of(0.0, ya, dt, yb)
        S = hierarchy.h_action(params, data).total
        errs.append(_rel(S, hierarchy.ho_principal_function(1.0, omega, data)))
    return errs


def _hierarchy_oracle(rng, cases, n) -> tuple[list[float], list[tuple[float, float]]]:
    errs, points = [], []
    params = HierarchyParams(n, 1.0, float(n))
    for _ in range(cases):
        seg = random_segment(rng, params)
        sol = resolve(seg)
        traj = oracle.trajectory_for(sol, tol=1e-13)
        S_oracle = oracle.lagrangian_action_quadrature(traj, sol.data.a.t, sol.data.b.t)
        parts = hierarchy.h_breakdown(sol)
        errs.append(_rel(parts.total, S_oracle))
        boundary = parts.boundary_term_b - parts.boundary_term_a
        points.append((parts.energy_term, S_oracle - boundary))
    return errs, points


def _slope(points) -> float:
    x = np.array([p[0] for p in points])
    y = np.array([p[1] for p in points])
    return float(np.dot(x, y) / np.dot(x, x))


def check_hierarchy(seed: int, cases: int, tol_reduction: float = 1e-12,
                    tol_ho: float = 1e-10, tol_oracle: float = 1e-8,
                    tol_slope: float = 1e-10) -> PropertyResult:
    start = time.perf_counter()
    rng = _seed(seed, "hierarchy")
    n2 = _hierarchy_n2(rng, cases)
    n1 = _hierarchy_n1(rng, cases)
    oracle_errs, slope_errs = [], {}
    for n in (3, 4):
        errs, points = _hierarchy_oracle(rng, max(cases // 5, 1) if cases else 0, n)
        oracle_errs += errs
        if points:
            slope_errs[n] = abs(_slope(points) - hierarchy.energy_coefficient(n))
    for n in (1, 2):
        _, points = _hierarchy_oracle(rng, max(cases // 5, 1) if cases else 0, n)
        if points:
            slope_errs[n] = abs(_slope(points) - hierarchy.energy_coefficient(n))
    parts = {
        "n2_reduction": (max(n2, default=0.0), tol_reduction),
        "n1_textbook": (max(n1, default=0.0), tol_ho),
        "n34_oracle": (max(oracle_errs, default=0.0), tol_oracle),
        "energy_coefficient": (max(slope_errs.values(), default=0.0), tol_slope),
    }
    passed = all(w <= t for w, t in parts.values())
    return PropertyResult(
        name="hierarchy",
        passed=passed,
        worst=max(w / t for w, t in parts.values()) if cases else 0.0,
        tolerance=1.0,
        cases=len(n1) + len(n2) + len(oracle_errs),
        seconds=round(time.perf_counter() - start, 3),
        detail={k: {"worst": w, "tolerance": t} for k, (w, t) in parts.items()},
    )


def check_trajectory_fidelity(tol_position: float = 1e-7, tol_drift: float = 1e-9,
                              samples: int = 512) -> PropertyResult:
    start = time.perf_counter()
    chart = ExtremalChart(OscillatorParams(1.0, 4.0), 1.0)
    T = extremal.period(chart)
    start_point = extremal.phase_point(chart, chart.t0)
    traj = oracle.integrate_newton(chart.params, start_point, chart.t0 + T, tol=1e-12)
    ts = np.linspace(chart.t0, chart.t0 + T, samples)
    y_ode, _ = traj(ts)
    y_closed = np.array([p.y for p in extremal.trajectory(chart, ts)])
    worst = float(np.max(np.abs(y_ode - y_closed)) / amplitude(chart))
    res = _finish("trajectory_fidelity", [worst], tol_position, start)
    res.detail["energy_drift"] = traj.max_energy_drift
    res.detail["drift_tolerance"] = tol_drift
    res.passed = res.passed and traj.max_energy_drift < tol_drift
    return res


def check_degenerate_handling() -> PropertyResult:
    start = time.perf_counter()
    outcomes = {}
    try:
        ExtremalChart(OscillatorParams(1.0, 4.0), 0.0)
        outcomes["zero_energy_rejected"] = False
    except DegenerateInputError:
        outcomes["zero_energy_rejected"] = True
    chart = ExtremalChart(OscillatorParams(1.0, 4.0), 1.0)
    half = bvp.segment(chart, 0.3, 0.3 + math.pi)
    try:
        bvp.interpolate(half, 0.5 * (half.data.a.t + half.data.b.t))
        outcomes["half_period_separation"] = False
    except DegenerateSeparationError:
        outcomes["half_period_separation"] = True
    crossing = bvp.segment(chart, 0.0, math.pi)
    parts = act.action(crossing)
    outcomes["crossing_boundary_finite"] = all(
        math.isfinite(x) for x in (parts.boundary_term_a, parts.boundary_term_b, parts.total)
    ) and abs(parts.boundary_term_b) < 1e-7
    failures = [0.0 if ok else 1.0 for ok in outcomes.values()]
    return _finish("degenerate_handling", failures, 0.0, start, outcomes)


def run_verify(seed: int = 42, cases: int | None = 50, tol: float | None = None) -> list[PropertyResult]:
    """Run every property check.

    ``cases=None`` uses the acceptance-criterion case counts; ``cases=0`` runs
    nothing. ``tol`` overrides every tolerance.
    """
    if cases == 0:
        return []

    def count(name: str) -> int:
        return FULL_CASES[name] if cases is None else int(cases)

    def t(default: float) -> float:
        return default if tol is None else tol

    hj_cases = count("hamilton_jacobi") if cases is None else max(1, int(cases) // 5)
    results = [
        check_quarter_period(t(1e-9)),
        check_closed_form_vs_oracle(seed, count("closed_form_vs_oracle"), t(1e-8)),
        check_hamilton_jacobi(seed, hj_cases, t(1e-6)),
        check_form_equivalence(seed, count("form_equivalence"), t(1e-10)),
        check_bvp_round_trip(seed, count("bvp_round_trip"), t(1e-8), t(1e-10)),
        check_hierarchy(seed, count("hierarchy"), t(1e-12), t(1e-10), t(1e-8), t(1e-10)),
        check_trajectory_fidelity(t(1e-7), t(1e-9)),
        check_degenerate_handling(),
    ]
    if tol is not None:
        results[-1].tolerance = tol
    return results
