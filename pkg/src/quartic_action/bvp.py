"""Reconstruct an extremal from its two spacetime endpoints.

Given the energy ``E``, the endpoint angles follow in closed form from
``sin(phi) = sign(y) (|y|/y_max)**n``. The branch label fixes which quarter of
the cycle each endpoint angle sits in, so the two position equations are
solved exactly and only the elapsed-time condition

    time_scale(E) * I_n(phi_a(E), phi_b(E)) = t_b - t_a

remains. It is a scalar equation in ``E``; roots are bracketed on a
logarithmic energy grid and polished with Brent's method.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import extremal, hierarchy
from .core import (
    BoundaryData,
    BranchSelector,
    DegenerateInputError,
    DegenerateSeparationError,
    ExtremalChart,
    HierarchyChart,
    HierarchyParams,
    NoSolutionError,
    NonConvergenceError,
    OscillatorParams,
    Params,
    amplitude,
)
from .quadrature import quarter_integral, sine_power_integral

DEFAULT_TOL = 1e-10
TURNING_TOL = 1e-9
SEPARATION_TOL = 1e-8
_GRID_POINTS = 96
_MAX_DOUBLINGS = 150


class Residuals(NamedTuple):
    """Scaled mismatches of a solution.

    Positions are compared through ``sign(y)|y|**n / y_max**n``, which equals
    ``sin(theta - theta0)`` on the extremal and stays well conditioned at zero
    crossings (``y`` itself behaves like ``|sin|**(1/n)`` there).
    """

    position_a: float
    position_b: float
    elapsed_time: float


@dataclass(frozen=True)
class BvpSolution:
    """Solved extremal segment; angles share the chart's ``theta0``."""

    chart: ExtremalChart
    theta_a: float
    theta_b: float
    residuals: Residuals
    data: BoundaryData

    @property
    def duration(self) -> float:
        return self.data.duration


def make_chart(params: Params, E: float, theta0: float = 0.0, t0: float = 0.0) -> ExtremalChart:
    if isinstance(params, HierarchyParams):
        return HierarchyChart(params, E, theta0, t0)
    return ExtremalChart(params, E, theta0, t0)


def _kinematics(chart: ExtremalChart):
    if isinstance(chart.params, OscillatorParams):
        return extremal.position, extremal.velocity, extremal.elapsed_time
    return hierarchy.h_position, hierarchy.h_velocity, hierarchy.h_elapsed_time


def position_at(chart: ExtremalChart, theta: float) -> float:
    return _kinematics(chart)[0](chart, theta)


def velocity_at(chart: ExtremalChart, theta: float) -> float:
    return _kinematics(chart)[1](chart, theta)


def elapsed_between(chart: ExtremalChart, theta_a: float, theta_b: float) -> float:
    return _kinematics(chart)[2](chart, theta_a, theta_b)


def _time_scale(params: Params, E: float) -> float:
    chart = make_chart(params, E)
    if isinstance(params, OscillatorParams):
        return extremal.time_scale(chart)
    return hierarchy.h_time_scale(chart)


def _sine_target(y: float, A: float, n: int) -> float:
    s = math.copysign(min(abs(y) / A, 1.0) ** n, y)
    return s


def _is_turning(s: float, n: int) -> bool:
    return abs(s) >= (1.0 - TURNING_TOL) ** n


@dataclass(frozen=True)
class _Config:
    rising_a: bool
    outgoing_b: bool
    strict_a: bool


class _Problem:
    """Elapsed-time residual for one (branch, quarter) configuration."""

    def __init__(self, params: Params, data: BoundaryData, crossings: int):
        self.params = params
        self.n = params.n
        self.data = data
        self.crossings = crossings
        ya, yb = data.a.y, data.b.y
        self.E_min = params.k * max(abs(ya), abs(yb)) ** (2 * self.n) / (2 * self.n)

    def angles(self, E: float, cfg: _Config) -> tuple[float, float] | None:
        if E < self.E_min:
            return None
        n = self.n
        A = (2 * n * E / self.params.k) ** (1.0 / (2 * n))
        s_a = _sine_target(self.data.a.y, A, n)
        s_b = _sine_target(self.data.b.y, A, n)
        base_a = math.asin(s_a)
        phi_a = base_a if cfg.rising_a else math.pi - base_a
        k = math.floor(phi_a / math.pi) + self.crossings
        window_sign = 1.0 if k % 2 == 0 else -1.0
        if s_b != 0.0 and math.copysign(1.0, s_b) != window_sign:
            return None
        offset = math.asin(abs(s_b))
        if s_b == 0.0:
            if cfg.outgoing_b:
                return None
            phi_b = (k + 1) * math.pi
        elif cfg.outgoing_b:
            phi_b = k * math.pi + offset
        else:
            phi_b = (k + 1) * math.pi - offset
        if phi_b <= phi_a:
            return None
        return phi_a, phi_b

    def residual(self, E: float, cfg: _Config) -> float:
        angles = self.angles(E, cfg)
        if angles is None:
            return math.nan
        phi_a, phi_b = angles
        return _time_scale(self.params, E) * sine_power_integral(phi_a, phi_b, self.n) - self.data.duration


def _configs(branch: BranchSelector) -> list[_Config]:
    out = []
    for rising_a in (True, False):
        strict_a = branch.rising_at_a is not None and rising_a != branch.rising_at_a
        for outgoing in (True, False):
            out.append(_Config(rising_a, outgoing, strict_a))
    return out


def _rising_b(phi_b: float) -> bool:
    return math.cos(phi_b) > 0.0


def _energy_bounds(problem: _Problem, configs: list[_Config]) -> tuple[float, float]:
    data = problem.data
    params = problem.params
    kinetic = 0.5 * params.m * ((data.b.y - data.a.y) / data.duration) ** 2
    E_ref = max(problem.E_min, kinetic)
    if E_ref == 0.0:
        # both endpoints at rest position: use the energy whose quarter period is dt
        E_ref = 1.0
        for _ in range(_MAX_DOUBLINGS):
            scale = _time_scale(params, E_ref) * math.pi / 2
            if abs(math.log(scale / data.duration)) < 1.0 or problem.n == 1:
                break
            E_ref *= 2.0 if scale > data.duration else 0.5

    def all_above(E: float) -> bool:
        vals = [problem.residual(E, c) for c in configs]
        return all(not (v <= 0.0) for v in vals)

    if problem.n == 1:
        # the angles saturate as E grows; far above E_ref nothing changes
        E_hi = E_ref * 1e8
    else:
        # no angle window of this branch spans more than (crossings + 2) half periods
        widest = 2.0 * (problem.crossings + 2) * quarter_integral(problem.n)
        exponent = (1 - problem.n) / (2 * problem.n)
        ratio = 0.5 * data.duration / (_time_scale(params, E_ref) * widest)
        E_hi = E_ref * max(ratio ** (1.0 / exponent), 2.0)
    if problem.E_min > 0.0:
        return problem.E_min, E_hi
    E_lo = E_ref
    for _ in range(_MAX_DOUBLINGS):
        if all_above(E_lo):
            break
        E_lo *= 0.5
    return E_lo, E_hi


def _energy_grid(E_lo: float, E_hi: float, anchored: bool) -> np.ndarray:
    if anchored:
        g = np.concatenate(([0.0], np.geomspace(1e-12, 1.0, _GRID_POINTS)))
        return E_lo + (E_hi - E_lo) * g
    return np.geomspace(E_lo, E_hi, _GRID_POINTS)


def _polish(f: Callable[[float], float], lo: float, hi: float) -> float:
    try:
        return brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)
    except (RuntimeError, ValueError) as exc:
        raise NonConvergenceError(f"energy root polish failed on [{lo:g}, {hi:g}]: {exc}") from exc


def _roots_on_grid(problem: _Problem, cfg: _Config, grid: np.ndarray, tol: float) -> list[float]:
    f = lambda E: problem.residual(E, cfg)  # noqa: E731
    vals = [f(float(E)) for E in grid]
    roots = []
    if problem.E_min > 0.0 and grid[0] == problem.E_min:
        v0 = vals[0]
        if math.isfinite(v0) and abs(v0) <= tol * problem.data.duration:
            roots.append(float(grid[0]))
    for i in range(len(grid) - 1):
        v1, v2 = vals[i], vals[i + 1]
        if not (math.isfinite(v1) and math.isfinite(v2)):
            continue
        if v1 == 0.0 and i > 0:
            roots.append(float(grid[i]))
        elif v1 * v2 < 0.0:
            roots.append(_polish(f, float(grid[i]), float(grid[i + 1])))
    for i in range(1, len(grid) - 1):
        roots.extend(_hidden_pair(f, grid[i - 1 : i + 2], vals[i - 1 : i + 2], tol * problem.data.duration))
    return roots


def _hidden_pair(f, nodes, vals, floor: float) -> list[float]:
    # a same-sign dip towards zero may hide two roots between grid nodes
    v0, v1, v2 = vals
    if not all(math.isfinite(v) for v in vals) or v1 == 0.0:
        return []
    sign = math.copysign(1.0, v1)
    if v0 * sign <= 0.0 or v2 * sign <= 0.0 or abs(v1) >= min(abs(v0), abs(v2)):
        return []
    lo, hi = float(nodes[0]), float(nodes[2])
    res = minimize_scalar(
        lambda E: sign * f(E), bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-15 * hi, "maxiter": 500},
    )
    x, fx = float(res.x), sign * float(res.fun)
    if not math.isfinite(fx):
        return []
    if fx * sign < 0.0:
        return [_polish(f, lo, x), _polish(f, x, hi)]
    if abs(fx) <= floor:
        return [x]
    return []


def _roots_near(problem: _Problem, cfg: _Config, guess: float) -> list[float]:
    f = lambda E: problem.residual(E, cfg)  # noqa: E731
    guess = max(guess, problem.E_min)
    x0 = math.log(guess)
    f0 = f(guess)
    if not math.isfinite(f0):
        return []
    if f0 == 0.0:
        return [guess]
    floor = math.log(problem.E_min) if problem.E_min > 0.0 else -math.inf
    delta = 1e-6
    for _ in range(40):
        for sign in (1.0, -1.0):
            x = x0 + sign * delta
            if x < floor:
                x = floor
            E = math.exp(x) if x != floor else problem.E_min
            fx = f(E)
            if math.isfinite(fx) and fx * f0 <= 0.0:
                lo, hi = sorted((guess, E))
                return [_polish(f, lo, hi)]
        delta *= 2.0
        if delta > 2.0:
            break
    return []


def _build(problem: _Problem, cfg: _Config, E: float, tol: float) -> "BvpSolution | None":
    angles = problem.angles(E, cfg)
    if angles is None:
        return None
    phi_a, phi_b = angles
    n = problem.n
    A = (2 * n * E / problem.params.k) ** (1.0 / (2 * n))
    if cfg.strict_a and not _is_turning(_sine_target(problem.data.a.y, A, n), n):
        return None
    data = problem.data
    chart = make_chart(problem.params, E, 0.0, 0.0)
    t0 = data.a.t - elapsed_between(chart, 0.0, phi_a)
    chart = replace(chart, t0=t0)
    scale = amplitude(chart) ** n
    residuals = Residuals(
        math.sin(phi_a) - _signed_power(data.a.y, n) / scale,
        math.sin(phi_b) - _signed_power(data.b.y, n) / scale,
        (elapsed_between(chart, phi_a, phi_b) - data.duration) / data.duration,
    )
    if max(abs(r) for r in residuals) > tol:
        raise NonConvergenceError(
            f"solution at E={E:.17g} misses tolerance {tol:g}: {residuals}", tuple(residuals)
        )
    return BvpSolution(chart, phi_a, phi_b, residuals, data)


def _check_tol(tol: float) -> float:
    tol = float(tol)
    if not (0.0 < tol <= 1e-4):
        raise DegenerateInputError(f"tol must lie in (0, 1e-4], got {tol!r}")
    return tol


def _accept(sol: BvpSolution, branch: BranchSelector, n: int) -> bool:
    if branch.rising_at_b is None:
        return True
    rising = _rising_b(sol.theta_b - sol.chart.theta0)
    if rising == branch.rising_at_b:
        return True
    A = amplitude(sol.chart)
    return _is_turning(_sine_target(sol.data.b.y, A, n), n)


def _dedupe(solutions: list[BvpSolution]) -> list[BvpSolution]:
    solutions = sorted(solutions, key=lambda s: s.chart.E)
    out: list[BvpSolution] = []
    for sol in solutions:
        if out and abs(sol.chart.E - out[-1].chart.E) <= 1e-9 * out[-1].chart.E:
            continue
        out.append(sol)
    return out


def solve_all(
    params: Params,
    data: BoundaryData,
    branch: BranchSelector,
    tol: float = DEFAULT_TOL,
    energy_guess: float | None = None,
) -> list[BvpSolution]:
    """Every extremal on ``branch`` found by the energy scan, sorted by energy.

    With ``energy_guess`` only the root nearest to the guess in each quarter
    configuration is sought (cheap continuation); the full scan is the fallback.
    """
    tol = _check_tol(tol)
    problem = _Problem(params, data, branch.crossings)
    configs = _configs(branch)
    candidates: list[tuple[_Config, float]] = []
    if energy_guess is not None and energy_guess > 0.0:
        for cfg in configs:
            candidates += [(cfg, E) for E in _roots_near(problem, cfg, float(energy_guess))]
    if not candidates:
        E_lo, E_hi = _energy_bounds(problem, configs)
        grid = _energy_grid(E_lo, E_hi, anchored=problem.E_min > 0.0)
        for cfg in configs:
            candidates += [(cfg, E) for E in _roots_on_grid(problem, cfg, grid, tol)]
    solutions = []
    for cfg, E in candidates:
        sol = _build(problem, cfg, E, tol)
        if sol is not None and _accept(sol, branch, params.n):
            solutions.append(sol)
    return _dedupe(solutions)


def solve(
    params: Params,
    data: BoundaryData,
    branch: BranchSelector,
    tol: float = DEFAULT_TOL,
    energy_guess: float | None = None,
) -> BvpSolution:
    """Extremal joining ``data`` on ``branch``.

    Several extremals can share one branch label; the lowest-energy one is
    returned unless ``energy_guess`` is given, in which case the root nearest
    to it (in log energy) wins.

    Raises
    ------
    NoSolutionError
        No extremal with the requested crossing count and velocity signs.
    NonConvergenceError
        A root was found but its residuals exceed ``tol``.
    """
    solutions = solve_all(params, data, branch, tol, energy_guess)
    if not solutions:
        raise NoSolutionError(
            f"no extremal on branch {branch} joins (t={data.a.t:g}, y={data.a.y:g}) "
            f"and (t={data.b.t:g}, y={data.b.y:g})"
        )
    if energy_guess is None:
        return solutions[0]
    target = math.log(energy_guess)
    return min(solutions, key=lambda s: abs(math.log(s.chart.E) - target))


def solve_minimal(
    params: Params, data: BoundaryData, tol: float = DEFAULT_TOL, max_crossings: int = 64
) -> BvpSolution:
    """Lowest-crossing extremal with either initial velocity sign (lowest energy on ties)."""
    for crossings in range(max_crossings + 1):
        found = solve_all(params, data, BranchSelector(crossings, None), tol)
        if found:
            return found[0]
    raise NoSolutionError(f"no extremal with at most {max_crossings} crossings")


def count_crossings(phi_a: float, phi_b: float) -> int:
    first = math.floor(phi_a / math.pi) + 1
    last = math.ceil(phi_b / math.pi) - 1
    return max(0, last - first + 1)


def branch_of(sol: BvpSolution) -> BranchSelector:
    phi_a = sol.theta_a - sol.chart.theta0
    phi_b = sol.theta_b - sol.chart.theta0
    return BranchSelector(
        count_crossings(phi_a, phi_b), math.cos(phi_a) > 0.0, math.cos(phi_b) > 0.0
    )


def segment(chart: ExtremalChart, theta_a: float, theta_b: float) -> BvpSolution:
    """Segment of a known extremal between two angles, packaged as a solution."""
    if not theta_b > theta_a:
        raise DegenerateInputError("segment needs theta_b > theta_a")
    t_a = chart.t0 + elapsed_between(chart, chart.theta0, theta_a)
    t_b = chart.t0 + elapsed_between(chart, chart.theta0, theta_b)
    data = BoundaryData.of(t_a, position_at(chart, theta_a), t_b, position_at(chart, theta_b))
    return BvpSolution(chart, theta_a, theta_b, Residuals(0.0, 0.0, 0.0), data)


def amplitude_identity_residual(sol: BvpSolution) -> float:
    """Relative mismatch of ``4E/k4`` against its endpoint-only expression.

    ``(y_max**2)**2 = [y_b**4 + y_a**4 - 2|y_b|y_b|y_a|y_a cos(dtheta)] / sin(dtheta)**2``
    (written for general n with ``|y|**n`` in place of ``|y| y``).
    """
    n = sol.chart.params.n
    dtheta = sol.theta_b - sol.theta_a
    sin_d = math.sin(dtheta)
    if abs(sin_d) < SEPARATION_TOL:
        raise DegenerateSeparationError("endpoints a whole number of half periods apart")
    A = amplitude(sol.chart)
    wa = _signed_power(sol.data.a.y, n)
    wb = _signed_power(sol.data.b.y, n)
    lhs = A ** (2 * n)
    rhs = (wb * wb + wa * wa - 2.0 * wb * wa * math.cos(dtheta)) / sin_d**2
    return abs(lhs - rhs) / lhs


def _signed_power(y: float, n: int) -> float:
    return math.copysign(abs(y) ** n, y)


def anchored_sin_cos(sol: BvpSolution, theta: float) -> tuple[float, float]:
    """``sin`` and ``cos`` of ``theta - theta0`` built from endpoint data only."""
    n = sol.chart.params.n
    dtheta = sol.theta_b - sol.theta_a
    sin_d = math.sin(dtheta)
    if abs(sin_d) < SEPARATION_TOL:
        raise DegenerateSeparationError(
            "sin(theta_b - theta_a) = 0: endpoint-anchored angle formulas are indeterminate"
        )
    scale = amplitude(sol.chart) ** n
    wa = _signed_power(sol.data.a.y, n) / scale
    wb = _signed_power(sol.data.b.y, n) / scale
    s = (wb * math.sin(theta - sol.theta_a) + wa * math.sin(sol.theta_b - theta)) / sin_d
    c = (wb * math.cos(theta - sol.theta_a) - wa * math.cos(sol.theta_b - theta)) / sin_d
    return s, c


def theta0_from_endpoints(sol: BvpSolution) -> float:
    """``theta0`` in ``[0, 2pi)`` from the endpoint tangent formula.

    ``tan(theta_b - theta0)`` fixes the angle modulo pi; the sign of the velocity
    at ``t_b`` (or of ``y_b`` at a turning point) picks the half turn.
    """
    n = sol.chart.params.n
    dtheta = sol.theta_b - sol.theta_a
    if abs(math.sin(dtheta)) < SEPARATION_TOL:
        raise DegenerateSeparationError("endpoints a whole number of half periods apart")
    wa = _signed_power(sol.data.a.y, n)
    wb = _signed_power(sol.data.b.y, n)
    num = wb * math.sin(dtheta)
    den = wb * math.cos(dtheta) - wa
    psi = math.atan(num / den) if den != 0.0 else math.copysign(math.pi / 2, num)
    v_b = velocity_at(sol.chart, sol.theta_b)
    if abs(v_b) > 1e-12 * math.sqrt(2 * sol.chart.E / sol.chart.params.m):
        if (math.cos(psi) > 0.0) != (v_b > 0.0):
            psi += math.pi
    elif (math.sin(psi) > 0.0) != (sol.data.b.y > 0.0):
        psi += math.pi
    return (sol.theta_b - psi) % (2.0 * math.pi)


def interpolate(sol: BvpSolution, t: float) -> float:
    """Angle at time ``t`` inside the segment.

    The angle modulo 2pi comes from the endpoint-anchored sine/cosine; the time
    quadrature only selects the winding.
    """
    data = sol.data
    if not (data.a.t <= t <= data.b.t):
        raise DegenerateInputError(f"t={t!r} outside [{data.a.t!r}, {data.b.t!r}]")
    if t == data.a.t:
        anchored_sin_cos(sol, sol.theta_a)
        return sol.theta_a
    if t == data.b.t:
        anchored_sin_cos(sol, sol.theta_b)
        return sol.theta_b
    chart = sol.chart
    if isinstance(chart.params, OscillatorParams):
        rough = extremal.theta_of_time(chart, t)
    else:
        rough = hierarchy.h_theta_of_time(chart, t)
    s, c = anchored_sin_cos(sol, rough)
    phase = math.atan2(s, c)
    offset = rough - chart.theta0 - phase
    return chart.theta0 + phase + 2.0 * math.pi * round(offset / (2.0 * math.pi))
