"""Domain types shared by every module.

All quantities are plain double-precision floats. Units are conventions only:
``m`` in mass units, stiffness ``k`` in energy/length**(2n), ``E`` in energy
units, angles in radians.

Sign convention: ``|y|`` and ``|y|**3`` are always written with explicit
absolute values and ``sign`` factors, so every closed form stays real for
``y < 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union


class QuarticActionError(Exception):
    """Base class for every error raised by this package."""


class DegenerateInputError(QuarticActionError, ValueError):
    """Input outside the domain of the angle parametrization (e.g. ``E = 0``)."""


class DegenerateSeparationError(QuarticActionError):
    """Endpoints a whole number of half periods apart; anchored formulas are 0/0."""


class NoSolutionError(QuarticActionError):
    """The requested branch has no extremal joining the endpoints."""


class NonConvergenceError(QuarticActionError):
    """An iterative solve stopped without meeting its tolerance."""

    def __init__(self, message: str, residuals: tuple[float, ...] = ()):
        super().__init__(message)
        self.residuals = residuals


class PoleError(QuarticActionError):
    """An equivalent action form was evaluated at one of its poles."""


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise DegenerateInputError(f"{name} must be finite and > 0, got {value!r}")
    return value


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DegenerateInputError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class OscillatorParams:
    """Quartic oscillator ``L = m v**2 / 2 - k4 y**4 / 4``."""

    m: float = 1.0
    k4: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "m", _positive("m", self.m))
        object.__setattr__(self, "k4", _positive("k4", self.k4))

    @property
    def n(self) -> int:
        return 2

    @property
    def k(self) -> float:
        return self.k4


@dataclass(frozen=True)
class HierarchyParams:
    """Member ``V(y) = k2n y**(2n) / (2n)`` of the even-power hierarchy."""

    n: int = 2
    m: float = 1.0
    k2n: float = 1.0

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise DegenerateInputError(f"n must be an integer >= 1, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "m", _positive("m", self.m))
        object.__setattr__(self, "k2n", _positive("k2n", self.k2n))

    @property
    def k(self) -> float:
        return self.k2n


Params = Union[OscillatorParams, HierarchyParams]


@dataclass(frozen=True)
class ExtremalChart:
    """One extremal in the angle parametrization.

    ``y = 0`` with positive velocity at ``theta = theta0``, reached at time ``t0``.
    """

    params: Params
    E: float
    theta0: float = 0.0
    t0: float = 0.0

    def __post_init__(self):
        if not isinstance(self.params, (OscillatorParams, HierarchyParams)):
            raise TypeError(f"unsupported params type {type(self.params).__name__}")
        E = float(self.E)
        if E == 0.0:
            raise DegenerateInputError(
                "E = 0 is the rest solution; the angle parametrization is undefined"
            )
        object.__setattr__(self, "E", _positive("E", E))
        object.__setattr__(self, "theta0", _finite("theta0", self.theta0))
        object.__setattr__(self, "t0", _finite("t0", self.t0))


@dataclass(frozen=True)
class HierarchyChart(ExtremalChart):
    """`ExtremalChart` restricted to a hierarchy member."""

    def __post_init__(self):
        if not isinstance(self.params, HierarchyParams):
            raise TypeError("HierarchyChart requires HierarchyParams")
        super().__post_init__()


@dataclass(frozen=True)
class SpacetimePoint:
    t: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "t", _finite("t", self.t))
        object.__setattr__(self, "y", _finite("y", self.y))


@dataclass(frozen=True)
class PhasePoint:
    t: float
    y: float
    v: float
    p: float

    @classmethod
    def from_state(cls, m: float, t: float, y: float, v: float) -> "PhasePoint":
        return cls(t=t, y=y, v=v, p=m * v)


@dataclass(frozen=True)
class BoundaryData:
    a: SpacetimePoint
    b: SpacetimePoint

    def __post_init__(self):
        if not self.b.t > self.a.t:
            raise DegenerateInputError(
                f"endpoint times must satisfy t_b > t_a, got {self.a.t!r}, {self.b.t!r}"
            )

    @classmethod
    def of(cls, t_a: float, y_a: float, t_b: float, y_b: float) -> "BoundaryData":
        return cls(SpacetimePoint(t_a, y_a), SpacetimePoint(t_b, y_b))

    @property
    def duration(self) -> float:
        return self.b.t - self.a.t


@dataclass(frozen=True)
class BranchSelector:
    """Discrete label picking one of the extremals that join two endpoints.

    ``crossings`` counts zeros of ``y`` strictly inside ``(t_a, t_b)``.
    ``rising_at_a`` / ``rising_at_b`` fix the velocity signs at the endpoints;
    ``None`` leaves that sign free. ``rising_at_b`` defaults to free.
    """

    crossings: int = 0
    rising_at_a: bool | None = True
    rising_at_b: bool | None = None

    def __post_init__(self):
        if isinstance(self.crossings, bool) or int(self.crossings) != self.crossings:
            raise DegenerateInputError(f"crossings must be an integer, got {self.crossings!r}")
        if self.crossings < 0:
            raise DegenerateInputError(f"crossings must be >= 0, got {self.crossings!r}")
        object.__setattr__(self, "crossings", int(self.crossings))


@dataclass(frozen=True)
class ActionBreakdown:
    """Momentum integral, energy term and boundary terms of one segment.

    ``total == momentum_integral - energy_term`` where ``energy_term = E*(t_b - t_a)``.
    The momentum integral is ``c*E*(t_b - t_a) + boundary_term_b - boundary_term_a``
    with ``c = 2n/(n+1)`` (4/3 for the quartic oscillator).
    """

    momentum_integral: float
    energy_term: float
    boundary_term_b: float
    boundary_term_a: float
    total: float

    def as_dict(self) -> dict[str, float]:
        return {
            "momentum_integral": self.momentum_integral,
            "energy_term": self.energy_term,
            "boundary_term_b": self.boundary_term_b,
            "boundary_term_a": self.boundary_term_a,
            "total": self.total,
        }


def amplitude(chart: ExtremalChart) -> float:
    """Turning-point displacement ``y_max`` where ``V(y_max) = E``.

    For the quartic oscillator this is ``(4E/k4)**(1/4)``; a hierarchy member
    gives ``(2nE/k2n)**(1/(2n))``.
    """
    params = chart.params
    n = params.n
    if n == 2:
        return (4.0 * chart.E / params.k) ** 0.25
    return (2 * n * chart.E / params.k) ** (1.0 / (2 * n))
