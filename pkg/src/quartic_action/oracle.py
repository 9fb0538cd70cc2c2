"""Brute-force ground truth for the closed forms.

Newton's equation ``m y'' = -k y**(2n-1)`` is integrated numerically and the
action, the momentum integral and the endpoint derivatives are recomputed from
the numerical trajectory. Potential and force are evaluated here, independently
of the angle parametrization used elsewhere in the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .core import (
    BoundaryData,
    BranchSelector,
    DegenerateInputError,
    NonConvergenceError,
    Params,
    PhasePoint,
    QuarticActionError,
)

_GAUSS_ORDER = 24


class InvalidStencilError(QuarticActionError):
    """Finite-difference stencil points landed on different extremal branches."""


def potential(params: Params, y):
    n = params.n
    return params.k * np.power(np.abs(y), 2 * n) / (2 * n)


def force(params: Params, y):
    n = params.n
    return -params.k * np.power(y, 2 * n - 1)


def energy(params: Params, y, v):
    return 0.5 * params.m * np.square(v) + potential(params, y)


@dataclass
class OdeSolution:
    """Adaptive Runge-Kutta trajectory with dense output.

    ``t``, ``y``, ``v`` hold the accepted steps (strictly increasing in t).
    """

    params: Params
    t: np.ndarray
    y: np.ndarray
    v: np.ndarray
    n_steps: int
    min_step: float
    max_step: float
    max_energy_drift: float
    _dense: Callable | None = None

    def __call__(self, t):
        """``(y, v)`` at time(s) ``t`` from the dense interpolant."""
        t = np.asarray(t, dtype=float)
        if self._dense is None:
            return np.full_like(t, self.y[0]), np.full_like(t, self.v[0])
        state = self._dense(t)
        return state[0], state[1]

    @property
    def t_start(self) -> float:
        return float(self.t[0])

    @property
    def t_end(self) -> float:
        return float(self.t[-1])


def integrate_newton(
    params: Params, initial: PhasePoint, t_end: float, tol: float = 1e-12
) -> OdeSolution:
    """Integrate ``m y'' = -dV/dy`` from ``initial`` to ``t_end`` (DOP853).

    Raises
    ------
    NonConvergenceError
        The integrator failed (step-size underflow, non-finite state).
    """
    if not (1e-13 <= tol <= 1e-6):
        raise DegenerateInputError(f"oracle tol must lie in [1e-13, 1e-6], got {tol!r}")
    t0 = float(initial.t)
    y0 = np.array([initial.y, initial.v], dtype=float)
    if not np.all(np.isfinite(y0)) or not math.isfinite(t_end):
        raise NonConvergenceError("non-finite initial state or end time")
    E0 = float(energy(params, y0[0], y0[1]))
    if t_end == t0:
        return OdeSolution(params, np.array([t0]), y0[:1].copy(), y0[1:].copy(), 0, 0.0, 0.0, 0.0)
    if t_end < t0:
        raise DegenerateInputError("integrate_newton runs forward in time only")

    n, m, k = params.n, params.m, params.k
    y_scale = max(abs(y0[0]), (2 * n * E0 / k) ** (1.0 / (2 * n)) if E0 > 0 else 0.0, 1e-300)
    v_scale = max(abs(y0[1]), math.sqrt(2.0 * E0 / m) if E0 > 0 else 0.0, 1e-300)

    def rhs(_t, state):
        return [state[1], float(force(params, state[0])) / m]

    result = solve_ivp(
        rhs,
        (t0, float(t_end)),
        y0,
        method="DOP853",
        rtol=tol,
        atol=[tol * y_scale, tol * v_scale],
        dense_output=True,
    )
    if not result.success:
        raise NonConvergenceError(f"ODE integration failed: {result.message}")
    t = result.t
    y, v = result.y
    steps = np.diff(t)
    drift = np.abs(energy(params, y, v) - E0)
    rel = float(drift.max() / E0) if E0 > 0 else float(drift.max())
    return OdeSolution(
        params=params,
        t=t,
        y=y,
        v=v,
        n_steps=len(steps),
        min_step=float(steps.min()),
        max_step=float(steps.max()),
        max_energy_drift=rel,
        _dense=result.sol,
    )


def integrate_symplectic(
    params: Params, initial: PhasePoint, t_end: float, steps: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Fixed-step 4th-order Yoshida composition of velocity Verlet.

    Returns the sampled ``(t, y, v)``; used for long-time drift checks only.
    """
    if steps < 1:
        raise DegenerateInputError("steps must be >= 1")
    w1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
    w0 = -(2.0 ** (1.0 / 3.0)) * w1
    c = (w1 / 2, (w0 + w1) / 2, (w0 + w1) / 2, w1 / 2)
    d = (w1, w0, w1)
    h = (t_end - initial.t) / steps
    t = initial.t + h * np.arange(steps + 1)
    ys = np.empty(steps + 1)
    vs = np.empty(steps + 1)
    y, v = float(initial.y), float(initial.v)
    ys[0], vs[0] = y, v
    m = params.m
    for i in range(steps):
        for j in range(3):
            y += c[j] * h * v
            v += d[j] * h * float(force(params, y)) / m
        y += c[3] * h * v
        ys[i + 1], vs[i + 1] = y, v
    return t, ys, vs


def _check_span(solution: OdeSolution, t_a: float, t_b: float) -> None:
    span = max(abs(solution.t_end), abs(solution.t_start), 1.0) * 1e-12
    if t_a < solution.t_start - span or t_b > solution.t_end + span or t_b < t_a:
        raise DegenerateInputError(
            f"[{t_a}, {t_b}] not inside solution span [{solution.t_start}, {solution.t_end}]"
        )


def _integrate_dense(solution: OdeSolution, t_a: float, t_b: float, integrand) -> float:
    _check_span(solution, t_a, t_b)
    if t_b == t_a:
        return 0.0
    inner = solution.t[(solution.t > t_a) & (solution.t < t_b)]
    edges = np.concatenate(([t_a], inner, [t_b]))
    nodes, weights = np.polynomial.legendre.leggauss(_GAUSS_ORDER)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    ts = (0.5 * (hi + lo) + half * nodes).ravel()
    y, v = solution(ts)
    values = integrand(y, v).reshape(len(lo), _GAUSS_ORDER)
    return float(np.sum(half[:, 0] * (values @ weights)))


def lagrangian_action_quadrature(solution: OdeSolution, t_a: float, t_b: float) -> float:
    """``integral of (m/2) v**2 - V(y) dt`` along the numerical trajectory.

    Gauss-Legendre on every accepted step, so the interpolant is integrated
    essentially exactly.
    """
    params = solution.params
    return _integrate_dense(
        solution, t_a, t_b, lambda y, v: 0.5 * params.m * v * v - potential(params, y)
    )


def momentum_quadrature(solution: OdeSolution, t_a: float, t_b: float) -> float:
    """``integral of m v dy`` rewritten as ``integral of m v**2 dt``."""
    m = solution.params.m
    return _integrate_dense(solution, t_a, t_b, lambda y, v: m * v * v)


def count_zero_crossings(solution: OdeSolution, t_a: float, t_b: float, samples: int = 4096) -> int:
    """Sign changes of ``y`` strictly inside ``(t_a, t_b)``."""
    _check_span(solution, t_a, t_b)
    inset = 1e-7 * (t_b - t_a)
    ts = np.linspace(t_a + inset, t_b - inset, samples)
    y, _ = solution(ts)
    signs = np.sign(y)
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


@dataclass(frozen=True)
class FdGradient:
    value: float
    error: float
    coarse: float
    fine: float
    step: float


_COMPONENTS = ("y_a", "y_b", "t_a", "t_b")


def _perturbed(data: BoundaryData, component: str, delta: float) -> BoundaryData:
    t_a, y_a, t_b, y_b = data.a.t, data.a.y, data.b.t, data.b.y
    if component == "y_a":
        y_a += delta
    elif component == "y_b":
        y_b += delta
    elif component == "t_a":
        t_a += delta
    else:
        t_b += delta
    return BoundaryData.of(t_a, y_a, t_b, y_b)


def _closed_form_total(sol) -> float:
    from . import action, hierarchy
    from .core import OscillatorParams

    if isinstance(sol.chart.params, OscillatorParams):
        return action.action(sol).total
    return hierarchy.h_breakdown(sol).total


def fd_action_gradient(
    params: Params,
    data: BoundaryData,
    branch: BranchSelector,
    component: str,
    *,
    rel_step: float = 1e-3,
    base=None,
    evaluate: Callable | None = None,
    tol: float = 1e-12,
    max_levels: int = 5,
    target: float = 1e-9,
) -> FdGradient:
    """Central-difference derivative of the action with Richardson extrapolation.

    Every stencil point re-solves the endpoint problem, continuing from the
    base energy on the same crossing count. ``evaluate`` maps a solution to the
    action (closed form by default). The step is halved up to ``max_levels``
    times until the extrapolation error estimate drops below ``target``
    (relative).

    Raises
    ------
    InvalidStencilError
        A stencil point jumped to another branch.
    """
    from . import bvp
    from .core import amplitude

    if component not in _COMPONENTS:
        raise DegenerateInputError(f"component must be one of {_COMPONENTS}, got {component!r}")
    evaluate = evaluate or _closed_form_total
    if base is None:
        base = bvp.solve(params, data, branch, tol)
    E0 = base.chart.E
    if component.startswith("y"):
        h = rel_step * amplitude(base.chart)
    else:
        quarter = bvp.elapsed_between(
            base.chart, base.chart.theta0, base.chart.theta0 + 0.5 * math.pi
        )
        h = rel_step * min(data.duration, quarter)
    loose = BranchSelector(branch.crossings, None, None)

    def action_at(delta: float) -> float:
        try:
            sol = bvp.solve(params, _perturbed(data, component, delta), loose, tol, energy_guess=E0)
        except QuarticActionError as exc:
            raise InvalidStencilError(f"stencil point {component}{delta:+g} unsolvable: {exc}") from exc
        if abs(sol.chart.E - E0) > 0.1 * E0 or bvp.branch_of(sol).crossings != branch.crossings:
            raise InvalidStencilError(
                f"stencil point {component}{delta:+g} jumped branch (E {E0:g} -> {sol.chart.E:g})"
            )
        return evaluate(sol)

    def central(step: float) -> float:
        return (action_at(step) - action_at(-step)) / (2.0 * step)

    # Richardson table in h**2, halving the step until the estimate settles
    coarse = central(h)
    rows = [[coarse]]
    best, error = coarse, math.inf
    for level in range(1, max_levels + 1):
        row = [central(h / 2**level)]
        for j in range(1, level + 1):
            factor = 4.0**j
            row.append((factor * row[j - 1] - rows[-1][j - 1]) / (factor - 1.0))
        estimate = abs(row[-1] - rows[-1][-1])
        rows.append(row)
        if estimate < error:
            best, error = row[-1], estimate
        if error <= target * max(abs(best), 1.0):
            break
    return FdGradient(value=best, error=error, coarse=coarse, fine=rows[-1][0], step=h)


def trajectory_for(sol, tol: float = 1e-12, t_end: float | None = None) -> OdeSolution:
    """Integrate from the solved left endpoint; the velocity comes from the chart."""
    from . import bvp

    v_a = bvp.velocity_at(sol.chart, sol.theta_a)
    start = PhasePoint.from_state(sol.chart.params.m, sol.data.a.t, sol.data.a.y, v_a)
    return integrate_newton(sol.chart.params, start, sol.data.b.t if t_end is None else t_end, tol)
