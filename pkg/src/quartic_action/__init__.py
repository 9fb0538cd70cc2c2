"""Classical action of the quartic oscillator from spacetime endpoint data.

The extremal through two endpoints is found in an angle parametrization where
position, velocity and time are elementary or single quadratures; the action
then has a closed form in the endpoint variables. The even-power hierarchy
``V = k y**(2n) / (2n)`` is handled by the same machinery.
"""

from . import action, bvp, extremal, hierarchy, oracle, quadrature
from .action import ActionForm, endpoint_derivatives, momentum_integral
from .bvp import BvpSolution, segment, solve, solve_all, solve_minimal
from .core import (
    ActionBreakdown,
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
    PhasePoint,
    PoleError,
    QuarticActionError,
    SpacetimePoint,
    amplitude,
)

__all__ = [
    "ActionBreakdown",
    "ActionForm",
    "BoundaryData",
    "BranchSelector",
    "BvpSolution",
    "DegenerateInputError",
    "DegenerateSeparationError",
    "ExtremalChart",
    "HierarchyChart",
    "HierarchyParams",
    "NoSolutionError",
    "NonConvergenceError",
    "OscillatorParams",
    "PhasePoint",
    "PoleError",
    "QuarticActionError",
    "SpacetimePoint",
    "action",
    "amplitude",
    "bvp",
    "endpoint_derivatives",
    "extremal",
    "hierarchy",
    "momentum_integral",
    "oracle",
    "quadrature",
    "segment",
    "solve",
    "solve_all",
    "solve_minimal",
]

__version__ = "0.1.0"
