import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quartic_action.core import NonConvergenceError
from quartic_action.quadrature import (
    HALF_PI,
    from_zero,
    invert_sine_power_integral,
    quarter_integral,
    sine_power_integral,
)

# (1/2) B(1/(2n), 1/2), evaluated once at 30 digits
QUARTER_N2 = 2.622057554292119810464839589891119413682754951431623162816821703


@pytest.mark.parametrize("n", range(1, 21))
def test_quarter_integral_beta(n):
    with mpmath.workdps(30):
        ref = mpmath.beta(mpmath.mpf(1) / (2 * n), mpmath.mpf(1) / 2) / 2
    assert quarter_integral(n) == pytest.approx(float(ref), rel=1e-14)


def test_quarter_integral_frozen():
    assert quarter_integral(2) == pytest.approx(QUARTER_N2, rel=2e-16)


@pytest.mark.parametrize("x", [1e-12, 1e-6, 0.01, 0.4, 1.0, 1.5])
def test_partial_from_zero_against_mpmath(x):
    with mpmath.workdps(30):
        ref = mpmath.quad(lambda u: mpmath.sin(u) ** mpmath.mpf(-0.5), [0, x])
    assert from_zero(0.0, x, 2) == pytest.approx(float(ref), rel=1e-13)


def test_signed_and_additive():
    assert sine_power_integral(1.0, 0.2, 2) == -sine_power_integral(0.2, 1.0, 2)
    total = sine_power_integral(-0.3, 7.0, 2)
    split = sine_power_integral(-0.3, math.pi, 2) + sine_power_integral(math.pi, 7.0, 2)
    assert total == pytest.approx(split, rel=1e-14)


def test_full_period_is_four_quarters():
    assert sine_power_integral(0.0, 4 * HALF_PI, 3) == pytest.approx(4 * quarter_integral(3), rel=1e-14)
    assert sine_power_integral(0.5, 0.5 + 2 * math.pi, 2) == pytest.approx(
        4 * quarter_integral(2), rel=1e-13
    )


def test_harmonic_case_is_identity():
    assert sine_power_integral(0.3, 5.0, 1) == pytest.approx(4.7)
    assert invert_sine_power_integral(2.5, 1) == 2.5


@settings(max_examples=150, deadline=None)
@given(st.floats(-40.0, 40.0), st.integers(2, 6))
def test_inversion_round_trip(phi, n):
    elapsed = sine_power_integral(0.0, phi, n)
    assert invert_sine_power_integral(elapsed, n) == pytest.approx(phi, abs=1e-11)


@settings(max_examples=100, deadline=None)
@given(st.floats(-10.0, 10.0), st.floats(1e-3, 5.0))
def test_monotone(lo, width):
    assert sine_power_integral(lo, lo + width, 2) > 0.0


def test_nonconvergence_type_carries_residuals():
    exc = NonConvergenceError("x", (1.0,))
    assert exc.residuals == (1.0,)
