"""Angle parametrization of quartic-oscillator extremals.

With ``phi = theta - theta0`` and ``sin(phi)**2 = k4 y**4 / (4E)`` an extremal reads

    y(phi)  = (4E/k4)**(1/4) * sign(sin phi) * |sin phi|**(1/2)
    v(phi)  = sqrt(2E/m) * cos(phi)
    dt/dphi = (k4 E)**(-1/4) * sqrt(m)/2 * |sin phi|**(-1/2)

The last relation is singular (but integrable) at every zero crossing; see
`quartic_action.quadrature`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .core import (
    DegenerateInputError,
    ExtremalChart,
    OscillatorParams,
    PhasePoint,
    amplitude,
)
from .quadrature import (
    invert_sine_power_integral,
    invert_with_zero_offset,
    quarter_integral,
    sine_power_integral,
)

MAX_THETA_SPAN = 1e6


@dataclass(frozen=True)
class ThetaInterval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise DegenerateInputError("theta interval bounds must be finite")
        if self.hi < self.lo:
            raise DegenerateInputError(f"theta interval reversed: [{self.lo}, {self.hi}]")
        if self.hi - self.lo >= MAX_THETA_SPAN:
            raise DegenerateInputError(f"theta interval span {self.hi - self.lo:g} too large")


@dataclass(frozen=True)
class HoCorrespondence:
    """Harmonic oscillator matched to a quartic extremal.

    ``theta - theta0 = omega * (t_hat - t_hat_offset)`` and ``k2 = m * omega**2``.
    """

    omega: float
    k2: float
    t_hat_offset: float


def _check_quartic(chart: ExtremalChart) -> None:
    if chart.params.n != 2:
        raise TypeError("extremal functions need a quartic chart; use hierarchy.h_* for n != 2")


def time_scale(chart: ExtremalChart) -> float:
    """Prefactor ``(k4 E)**(-1/4) sqrt(m)/2`` of the time quadrature."""
    return (chart.params.k * chart.E) ** -0.25 * math.sqrt(chart.params.m) / 2.0


def position(chart: ExtremalChart, theta: float) -> float:
    _check_quartic(chart)
    s = math.sin(theta - chart.theta0)
    return amplitude(chart) * math.copysign(math.sqrt(abs(s)), s)


def velocity(chart: ExtremalChart, theta: float) -> float:
    _check_quartic(chart)
    return math.sqrt(2.0 * chart.E / chart.params.m) * math.cos(theta - chart.theta0)


def time_of_theta(chart: ExtremalChart, interval: ThetaInterval) -> float:
    """Time needed to sweep ``interval`` along the extremal."""
    _check_quartic(chart)
    phi_lo = interval.lo - chart.theta0
    phi_hi = interval.hi - chart.theta0
    return time_scale(chart) * sine_power_integral(phi_lo, phi_hi, 2)


def elapsed_time(chart: ExtremalChart, theta_a: float, theta_b: float) -> float:
    """Signed version of `time_of_theta`: ``t(theta_b) - t(theta_a)``."""
    _check_quartic(chart)
    return time_scale(chart) * sine_power_integral(
        theta_a - chart.theta0, theta_b - chart.theta0, 2
    )


def period(chart: ExtremalChart) -> float:
    _check_quartic(chart)
    return 4.0 * time_scale(chart) * quarter_integral(2)


def theta_of_time(chart: ExtremalChart, t: float) -> float:
    """Inverse of the time quadrature, continued monotonically through zero crossings."""
    _check_quartic(chart)
    if not math.isfinite(t):
        raise DegenerateInputError(f"t must be finite, got {t!r}")
    if t == chart.t0:
        return chart.theta0
    return chart.theta0 + invert_sine_power_integral((t - chart.t0) / time_scale(chart), 2)


def phase_point(chart: ExtremalChart, t: float) -> PhasePoint:
    """State at time ``t``.

    The position is built from the distance to the nearest zero crossing, so
    it stays accurate where ``|sin|**(1/2)`` would amplify angle rounding.
    """
    _check_quartic(chart)
    if not math.isfinite(t):
        raise DegenerateInputError(f"t must be finite, got {t!r}")
    phi, x, sign = invert_with_zero_offset((t - chart.t0) / time_scale(chart), 2)
    y = amplitude(chart) * sign * math.sqrt(math.sin(x))
    return PhasePoint.from_state(chart.params.m, t, y, velocity(chart, chart.theta0 + phi))


def trajectory(chart: ExtremalChart, t_grid: Iterable[float]) -> list[PhasePoint]:
    return [phase_point(chart, float(t)) for t in t_grid]


def ho_map(chart: ExtremalChart, omega: float = 1.0) -> HoCorrespondence:
    """Match the extremal to a harmonic oscillator of angular frequency ``omega``.

    ``omega`` only rescales the oscillator time; any positive value is valid.
    """
    omega = float(omega)
    if not math.isfinite(omega) or omega <= 0.0:
        raise DegenerateInputError(f"omega must be > 0, got {omega!r}")
    return HoCorrespondence(
        omega=omega, k2=chart.params.m * omega**2, t_hat_offset=chart.theta0 / omega
    )


def ho_time(corr: HoCorrespondence, chart: ExtremalChart, theta: float) -> float:
    return corr.t_hat_offset + (theta - chart.theta0) / corr.omega


def ho_position(corr: HoCorrespondence, chart: ExtremalChart, theta: float) -> float:
    return math.sqrt(2.0 * chart.E / corr.k2) * math.sin(theta - chart.theta0)


def linearized(chart: ExtremalChart, y: float) -> float:
    """``|y| y / (4E/k4)**(1/2)``; equals ``sin(theta - theta0)`` on the extremal."""
    return abs(y) * y / math.sqrt(4.0 * chart.E / chart.params.k)


__all__ = [
    "HoCorrespondence",
    "OscillatorParams",
    "ThetaInterval",
    "elapsed_time",
    "ho_map",
    "ho_position",
    "ho_time",
    "linearized",
    "period",
    "phase_point",
    "position",
    "theta_of_time",
    "time_of_theta",
    "time_scale",
    "trajectory",
    "velocity",
]
