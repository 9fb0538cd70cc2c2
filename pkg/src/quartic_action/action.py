"""Closed-form action of the quartic oscillator in endpoint variables.

On a solved segment with ``phi = theta - theta0`` and ``C = sqrt(m k4 / 2) / 3``:

    momentum integral = 4E/3 * dt + C [|y|**3 cot(phi)]_a^b
    action            = C [|y|**3 cot(phi)]_a^b + E/3 * dt

``|y|**3 cot(phi)`` has a removable 0/0 at every zero crossing and is evaluated
as ``y_max**3 sign(sin phi) |sin phi|**(1/2) cos(phi)``.

Two rewritings anchored at a turning angle ``theta_max`` take the same value
on extremals but have poles of their own (see `ActionForm`).
"""

from __future__ import annotations

import enum
import math
from typing import NamedTuple

from .bvp import BvpSolution
from .core import ActionBreakdown, OscillatorParams, PoleError, amplitude

POLE_TOL = 1e-10


class ActionForm(enum.Enum):
    """Equivalent expressions for the action.

    PRIMARY uses ``cot(theta - theta0)`` (regular everywhere after the
    regularization). VARIANT_MAX replaces it by ``-tan(theta - theta_max)`` and
    has poles at zero crossings. VARIANT_MAX_EXPANDED further expands the
    ``1/cos`` parts through ``y_max``; it also has 0/0 points at ``theta_max``.
    """

    PRIMARY = "primary"
    VARIANT_MAX = "variant-max"
    VARIANT_MAX_EXPANDED = "variant-max-expanded"


class EndpointDerivatives(NamedTuple):
    p_a: float
    p_b: float
    H_a: float
    H_b: float

    @property
    def dS_dy_a(self) -> float:
        return -self.p_a

    @property
    def dS_dy_b(self) -> float:
        return self.p_b

    @property
    def dS_dt_a(self) -> float:
        return self.H_a

    @property
    def dS_dt_b(self) -> float:
        return -self.H_b


def _quartic(sol: BvpSolution) -> OscillatorParams:
    params = sol.chart.params
    if params.n != 2:
        raise TypeError("closed-form quartic action needs n = 2; use hierarchy.h_breakdown")
    return params


def prefactor(sol: BvpSolution) -> float:
    params = _quartic(sol)
    return math.sqrt(params.m * params.k / 2.0) / 3.0


def regularized_cubic_cot(sol: BvpSolution, theta: float) -> float:
    """``|y|**3 cot(theta - theta0)`` without the 0/0 at zero crossings."""
    phi = theta - sol.chart.theta0
    s = math.sin(phi)
    return amplitude(sol.chart) ** 3 * math.copysign(math.sqrt(abs(s)), s) * math.cos(phi)


def theta_max(sol: BvpSolution) -> float:
    """Turning angle ``theta0 + pi/2 + j*pi`` nearest the segment midpoint."""
    theta0 = sol.chart.theta0
    mid = 0.5 * (sol.theta_a + sol.theta_b)
    j = round((mid - theta0 - 0.5 * math.pi) / math.pi)
    return theta0 + 0.5 * math.pi + j * math.pi


def y_max_signed(sol: BvpSolution) -> float:
    """Position at `theta_max`, ``+-y_max`` depending on the lobe."""
    j = round((theta_max(sol) - sol.chart.theta0 - 0.5 * math.pi) / math.pi)
    return amplitude(sol.chart) * (1.0 if j % 2 == 0 else -1.0)


def _check_pole(value: float, what: str) -> None:
    if abs(value) < POLE_TOL:
        raise PoleError(f"{what} vanishes at an endpoint; this action form has a pole there")


def _variant_term(y: float, psi: float) -> float:
    c = math.cos(psi)
    _check_pole(c, "cos(theta - theta_max)")
    return -abs(y) ** 3 * math.tan(psi)


def expanded_inverse_cos_term(y: float, y_max: float, psi: float) -> float:
    """Right-hand side of ``-|y|**3/cos(psi) = -3 y y_max|y_max| + 2|y_max|**3 |cos psi|**(3/2)/cos psi``."""
    c = math.cos(psi)
    _check_pole(c, "cos(theta - theta_max)")
    return -3.0 * y * y_max * abs(y_max) + 2.0 * abs(y_max) ** 3 * abs(c) ** 1.5 / c


def inverse_cos_identity_residual(y: float, y_max: float, psi: float) -> float:
    """Relative residual of the ``y_max`` expansion of ``-|y|**3/cos(psi)``."""
    c = math.cos(psi)
    _check_pole(c, "cos(theta - theta_max)")
    lhs = -abs(y) ** 3 / c
    rhs = expanded_inverse_cos_term(y, y_max, psi)
    return abs(lhs - rhs) / max(abs(lhs), abs(y_max) ** 3)


def _expanded_term(y: float, y_max: float, psi: float) -> float:
    s = math.sin(psi)
    _check_pole(s, "sin(theta - theta_max)")
    return (abs(y) ** 3 * math.cos(psi) + expanded_inverse_cos_term(y, y_max, psi)) / s


def _boundary_terms(sol: BvpSolution, form: ActionForm) -> tuple[float, float]:
    C = prefactor(sol)
    if form is ActionForm.PRIMARY:
        return (
            C * regularized_cubic_cot(sol, sol.theta_b),
            C * regularized_cubic_cot(sol, sol.theta_a),
        )
    anchor = theta_max(sol)
    psi_b = sol.theta_b - anchor
    psi_a = sol.theta_a - anchor
    ya, yb = sol.data.a.y, sol.data.b.y
    if form is ActionForm.VARIANT_MAX:
        return C * _variant_term(yb, psi_b), C * _variant_term(ya, psi_a)
    if form is ActionForm.VARIANT_MAX_EXPANDED:
        y_max = y_max_signed(sol)
        return C * _expanded_term(yb, y_max, psi_b), C * _expanded_term(ya, y_max, psi_a)
    raise ValueError(f"unknown action form {form!r}")


def action(sol: BvpSolution, form: ActionForm = ActionForm.PRIMARY) -> ActionBreakdown:
    """Action of a solved segment in the requested form.

    Raises
    ------
    PoleError
        A variant form evaluated where its trigonometric factor vanishes.
    """
    term_b, term_a = _boundary_terms(sol, form)
    energy_term = sol.chart.E * sol.duration
    momentum = 4.0 / 3.0 * energy_term + term_b - term_a
    return ActionBreakdown(
        momentum_integral=momentum,
        energy_term=energy_term,
        boundary_term_b=term_b,
        boundary_term_a=term_a,
        total=momentum - energy_term,
    )


def momentum_integral(sol: BvpSolution) -> float:
    """``integral of m v dy`` along the segment, in closed form."""
    return action(sol, ActionForm.PRIMARY).momentum_integral


def endpoint_derivatives(sol: BvpSolution) -> EndpointDerivatives:
    chart = sol.chart
    scale = math.sqrt(2.0 * chart.params.m * chart.E)
    return EndpointDerivatives(
        p_a=scale * math.cos(sol.theta_a - chart.theta0),
        p_b=scale * math.cos(sol.theta_b - chart.theta0),
        H_a=chart.E,
        H_b=chart.E,
    )
