"""Even-power hierarchy ``V(y) = k2n y**(2n) / (2n)``.

Same angle substitution as the quartic case, ``sin(phi)**2 = V(y)/E``:

    y       = (2nE/k2n)**(1/(2n)) * sign(sin phi) * |sin phi|**(1/n)
    v       = sqrt(2E/m) cos(phi)
    dt/dphi = y_max / (n sqrt(2E/m)) * |sin phi|**(1/n - 1)

Integrating ``m v dy`` by parts with ``f = |sin|**((n+1)/n)`` and
``g = n cos / ((n+1) sin)`` gives the momentum integral

    2n/(n+1) * E*dt + C_n [sign(sin)|sin|**(1/n) cos]_a^b,
    C_n = sqrt(2mE) * y_max / (n+1),

so the action carries ``(n-1)/(n+1) * E*dt``. n = 1 is the harmonic
oscillator and n = 2 the quartic oscillator.
"""

from __future__ import annotations

import math
from typing import Iterable

from .core import (
    ActionBreakdown,
    BoundaryData,
    BranchSelector,
    DegenerateInputError,
    DegenerateSeparationError,
    ExtremalChart,
    HierarchyParams,
    PhasePoint,
    amplitude,
)
from .extremal import ThetaInterval
from .quadrature import (
    invert_sine_power_integral,
    invert_with_zero_offset,
    quarter_integral,
    sine_power_integral,
)


def h_time_scale(chart: ExtremalChart) -> float:
    n = chart.params.n
    return amplitude(chart) / (n * math.sqrt(2.0 * chart.E / chart.params.m))


def h_position(chart: ExtremalChart, theta: float) -> float:
    n = chart.params.n
    s = math.sin(theta - chart.theta0)
    return amplitude(chart) * math.copysign(abs(s) ** (1.0 / n), s)


def h_velocity(chart: ExtremalChart, theta: float) -> float:
    return math.sqrt(2.0 * chart.E / chart.params.m) * math.cos(theta - chart.theta0)


def h_time_of_theta(chart: ExtremalChart, interval: ThetaInterval) -> float:
    return h_elapsed_time(chart, interval.lo, interval.hi)


def h_elapsed_time(chart: ExtremalChart, theta_a: float, theta_b: float) -> float:
    n = chart.params.n
    return h_time_scale(chart) * sine_power_integral(
        theta_a - chart.theta0, theta_b - chart.theta0, n
    )


def h_period(chart: ExtremalChart) -> float:
    return 4.0 * h_time_scale(chart) * quarter_integral(chart.params.n)


def h_theta_of_time(chart: ExtremalChart, t: float) -> float:
    if not math.isfinite(t):
        raise DegenerateInputError(f"t must be finite, got {t!r}")
    if t == chart.t0:
        return chart.theta0
    elapsed = (t - chart.t0) / h_time_scale(chart)
    return chart.theta0 + invert_sine_power_integral(elapsed, chart.params.n)


def h_trajectory(chart: ExtremalChart, t_grid: Iterable[float]) -> list[PhasePoint]:
    n = chart.params.n
    out = []
    for t in t_grid:
        t = float(t)
        if not math.isfinite(t):
            raise DegenerateInputError(f"t must be finite, got {t!r}")
        phi, x, sign = invert_with_zero_offset((t - chart.t0) / h_time_scale(chart), n)
        y = amplitude(chart) * sign * math.sin(x) ** (1.0 / n)
        out.append(PhasePoint.from_state(chart.params.m, t, y, h_velocity(chart, chart.theta0 + phi)))
    return out


def boundary_profile(chart: ExtremalChart, theta: float) -> float:
    """``sign(sin)|sin|**(1/n) cos`` at ``theta``; finite at every zero crossing."""
    n = chart.params.n
    phi = theta - chart.theta0
    s = math.sin(phi)
    return math.copysign(abs(s) ** (1.0 / n), s) * math.cos(phi)


def boundary_coefficient(chart: ExtremalChart) -> float:
    n = chart.params.n
    return math.sqrt(2.0 * chart.params.m * chart.E) * amplitude(chart) / (n + 1)


def energy_coefficient(n: int) -> float:
    """Coefficient of ``E*(t_b - t_a)`` in the action."""
    return (n - 1) / (n + 1)


def h_breakdown(sol) -> ActionBreakdown:
    """Action of a solved hierarchy segment (any ``BvpSolution``)."""
    chart = sol.chart
    n = chart.params.n
    C = boundary_coefficient(chart)
    term_b = C * boundary_profile(chart, sol.theta_b)
    term_a = C * boundary_profile(chart, sol.theta_a)
    energy_term = chart.E * sol.duration
    momentum = 2.0 * n / (n + 1) * energy_term + term_b - term_a
    return ActionBreakdown(
        momentum_integral=momentum,
        energy_term=energy_term,
        boundary_term_b=term_b,
        boundary_term_a=term_a,
        total=momentum - energy_term,
    )


def h_momentum_integral(sol) -> float:
    return h_breakdown(sol).momentum_integral


def h_action(
    params: HierarchyParams,
    data: BoundaryData,
    branch: BranchSelector | None = None,
    tol: float = 1e-10,
) -> ActionBreakdown:
    """Solve the endpoint problem for a hierarchy member and return its action.

    ``branch=None`` picks the minimal-crossing extremal.
    """
    from . import bvp

    if branch is None:
        sol = bvp.solve_minimal(params, data, tol)
    else:
        sol = bvp.solve(params, data, branch, tol)
    return h_breakdown(sol)


def ho_principal_function(m: float, omega: float, data: BoundaryData) -> float:
    """Textbook harmonic-oscillator action between two endpoints."""
    dt = data.duration
    s = math.sin(omega * dt)
    if abs(s) < 1e-12:
        raise DegenerateSeparationError("omega*dt is a multiple of pi")
    ya, yb = data.a.y, data.b.y
    return m * omega / (2.0 * s) * ((ya * ya + yb * yb) * math.cos(omega * dt) - 2.0 * ya * yb)
