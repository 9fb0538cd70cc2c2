"""Singular sine-power quadrature behind every time integral.

The elapsed time along an extremal of ``V ~ y**(2n)`` is proportional to

    I_n(lo, hi) = integral of |sin(u)|**(1/n - 1) du  over [lo, hi],

which has integrable singularities at every multiple of pi for n >= 2. The
range is split at multiples of pi/2, so each piece has at most one singular
endpoint (the nearer zero of sin). Writing the distance to that zero as
``x = s**n`` turns the piece into the integral of

    n * (sin(s**n) / s**n)**(1/n - 1)

which is analytic on [0, (pi/2)**(1/n)]. That smooth integrand is handled by
an adaptive Gauss-Legendre pair.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .core import NonConvergenceError

HALF_PI = 0.5 * math.pi

_LOW_ORDER = 20
_HIGH_ORDER = 40
_RTOL = 1e-14
_MAX_DEPTH = 40


@lru_cache(maxsize=None)
def _legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def _integrand(s: np.ndarray, n: int) -> np.ndarray:
    if n == 1:
        return np.ones_like(s)
    x = s**n
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(x > 0.0, np.sin(x) / x, 1.0)
    return n * ratio ** (1.0 / n - 1.0)


def _rule(lo: float, hi: float, n: int, order: int) -> float:
    nodes, weights = _legendre(order)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    return half * float(np.dot(weights, _integrand(mid + half * nodes, n)))


def _adaptive(lo: float, hi: float, n: int, depth: int = 0) -> float:
    coarse = _rule(lo, hi, n, _LOW_ORDER)
    fine = _rule(lo, hi, n, _HIGH_ORDER)
    if abs(fine - coarse) <= _RTOL * abs(fine) or depth >= _MAX_DEPTH:
        return fine
    mid = 0.5 * (lo + hi)
    return _adaptive(lo, mid, n, depth + 1) + _adaptive(mid, hi, n, depth + 1)


def from_zero(x1: float, x2: float, n: int) -> float:
    """Integral of ``sin(u)**(1/n - 1)`` over ``[x1, x2]`` inside ``[0, pi/2]``."""
    if x2 <= x1:
        return 0.0
    if n == 1:
        return x2 - x1
    p = 1.0 / n
    return _adaptive(max(x1, 0.0) ** p, min(x2, HALF_PI) ** p, n)


@lru_cache(maxsize=None)
def quarter_integral(n: int) -> float:
    """``I_n`` over one quarter period, ``[0, pi/2]``."""
    return from_zero(0.0, HALF_PI, n)


def _piece(a: float, b: float, q: int, n: int) -> float:
    # [a, b] lies inside quarter q; even quarters start at a zero of sin,
    # odd quarters end at one.
    if q % 2 == 0:
        base = q * HALF_PI
        return from_zero(a - base, b - base, n)
    top = (q + 1) * HALF_PI
    return from_zero(top - b, top - a, n)


def sine_power_integral(lo: float, hi: float, n: int) -> float:
    """Signed ``I_n(lo, hi)`` with angles measured from a zero of sin.

    Additive over adjacent intervals, including across singular points.
    """
    if hi < lo:
        return -sine_power_integral(hi, lo, n)
    if hi == lo:
        return 0.0
    if n == 1:
        return hi - lo
    q_lo = math.floor(lo / HALF_PI)
    q_hi = math.floor(hi / HALF_PI)
    if q_hi * HALF_PI == hi:
        q_hi -= 1
    if q_lo == q_hi:
        return _piece(lo, hi, q_lo, n)
    total = _piece(lo, (q_lo + 1) * HALF_PI, q_lo, n)
    total += (q_hi - q_lo - 1) * quarter_integral(n)
    total += _piece(q_hi * HALF_PI, hi, q_hi, n)
    return total


def _invert_from_zero(target: float, n: int) -> float:
    """Solve ``from_zero(0, x, n) = target`` for x in ``[0, pi/2]``.

    Safeguarded Newton in the smooth variable ``s = x**(1/n)``: steps that leave
    the current bracket are replaced by bisection.
    """
    quarter = quarter_integral(n)
    if target <= 0.0:
        return 0.0
    if target >= quarter:
        return HALF_PI
    if n == 1:
        return target
    p = 1.0 / n
    lo, hi = 0.0, HALF_PI**p
    s = min(target / n, hi)
    residual = math.inf
    for _ in range(200):
        g = _adaptive(0.0, s, n) if s > 0.0 else 0.0
        residual = g - target
        if residual > 0.0:
            hi = s
        else:
            lo = s
        slope = float(_integrand(np.array([s]), n)[0])
        step = residual / slope
        s_new = s - step
        if not lo < s_new < hi:
            s_new = 0.5 * (lo + hi)
        if abs(s_new - s) <= 4e-16 * HALF_PI**p or hi - lo <= 4e-16 * HALF_PI**p:
            return min(s_new**n, HALF_PI)
        s = s_new
    raise NonConvergenceError(
        f"angle inversion did not converge (residual {residual:.3e})", (residual,)
    )


def invert_sine_power_integral(elapsed: float, n: int) -> float:
    """Angle ``phi`` with ``sine_power_integral(0, phi, n) == elapsed``.

    Monotone in ``elapsed``; negative values give negative angles.
    """
    return invert_with_zero_offset(elapsed, n)[0]


def invert_with_zero_offset(elapsed: float, n: int) -> tuple[float, float, float]:
    """`invert_sine_power_integral` plus ``(x, sign)`` with ``sin(phi) = sign * sin(x)``.

    ``x`` in ``[0, pi/2]`` is the distance from ``phi`` to the zero of sin that
    bounds its quarter, computed without forming ``phi`` first. Near a zero
    crossing ``|sin(phi)|**(1/n)`` built from ``x`` keeps full relative
    accuracy, which ``sin(phi)`` of a large ``phi`` cannot.
    """
    if n == 1:
        r = math.remainder(elapsed, math.pi)
        return elapsed, abs(r), math.copysign(1.0, math.sin(elapsed))
    quarter = quarter_integral(n)
    q = math.floor(elapsed / quarter)
    rest = elapsed - q * quarter
    if q % 2 == 0:
        x = _invert_from_zero(rest, n)
        sign = -1.0 if (q // 2) % 2 else 1.0
        return q * HALF_PI + x, x, sign
    x = _invert_from_zero(quarter - rest, n)
    sign = 1.0 if ((q + 1) // 2) % 2 else -1.0
    return (q + 1) * HALF_PI - x, x, sign
