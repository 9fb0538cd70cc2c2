import math

import mpmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quartic_action import (
    ActionForm,
    BoundaryData,
    BranchSelector,
    ExtremalChart,
    OscillatorParams,
    PoleError,
    bvp,
)
from quartic_action import action as act
from quartic_action import extremal as ex

QUARTER_TIME = 0.9270373386506859


def _lagrangian_by_angle(seg):
    """Independent check: tanh-sinh integral of L (dt/dtheta) over theta."""
    chart = seg.chart
    m, k, E = (mpmath.mpf(x) for x in (chart.params.m, chart.params.k, chart.E))
    theta0 = mpmath.mpf(chart.theta0)
    with mpmath.workdps(30):
        amp = (4 * E / k) ** mpmath.mpf(0.25)
        scale = (k * E) ** mpmath.mpf(-0.25) * mpmath.sqrt(m) / 2

        def integrand(theta):
            s = mpmath.sin(theta - theta0)
            y4 = amp**4 * s * s
            v2 = 2 * E / m * mpmath.cos(theta - theta0) ** 2
            return (m * v2 / 2 - k * y4 / 4) * scale / mpmath.sqrt(abs(s))

        zeros = [theta0 + j * mpmath.pi for j in range(-4, 8)]
        a, b = mpmath.mpf(seg.theta_a), mpmath.mpf(seg.theta_b)
        edges = [a, *[z for z in zeros if a < z < b], b]
        return float(mpmath.quad(integrand, edges))


def test_quarter_segment_frozen(unit_chart):
    seg = bvp.segment(unit_chart, 0.0, math.pi / 2)
    parts = act.action(seg)
    # both boundary terms vanish, leaving E*dt/3
    assert parts.total == pytest.approx(QUARTER_TIME / 3, rel=1e-14)
    assert parts.momentum_integral == pytest.approx(4 * QUARTER_TIME / 3, rel=1e-14)
    assert parts.total == pytest.approx(0.30901244621689530, rel=1e-13)


@pytest.mark.parametrize("span", [(0.3, 1.2), (0.4, 3.9), (-1.0, 4.5), (2.0, 8.1)])
def test_against_independent_quadrature(params, span):
    seg = bvp.segment(ExtremalChart(params, 2.3, 0.1), *span)
    assert act.action(seg).total == pytest.approx(_lagrangian_by_angle(seg), rel=1e-10)


def test_momentum_integral_is_action_plus_energy_term(params):
    seg = bvp.segment(ExtremalChart(params, 0.8), 0.2, 2.7)
    parts = act.action(seg)
    assert parts.momentum_integral - parts.energy_term == parts.total
    assert act.momentum_integral(seg) == parts.momentum_integral


@settings(max_examples=80, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(-3.0, 3.0), st.floats(0.1, 2 * math.pi - 0.1))
def test_forms_agree(E, phi_a, span):
    params = OscillatorParams(1.0, 4.0)
    seg = bvp.segment(ExtremalChart(params, E), phi_a, phi_a + span)
    anchor = act.theta_max(seg)
    for psi in (seg.theta_a - anchor, seg.theta_b - anchor):
        r = psi - (math.pi / 2) * round(psi / (math.pi / 2))
        if abs(r) < 0.05:
            return
    totals = [act.action(seg, f).total for f in ActionForm]
    scale = max(abs(totals[0]), 1e-3)
    assert max(totals) - min(totals) < 1e-10 * scale


def test_regularized_boundary_finite_at_crossings(unit_chart):
    seg = bvp.segment(unit_chart, 0.0, math.pi)
    parts = act.action(seg)
    assert math.isfinite(parts.total)
    assert abs(parts.boundary_term_a) < 1e-15
    assert abs(parts.boundary_term_b) < 1e-7
    assert act.regularized_cubic_cot(seg, 0.5) == pytest.approx(
        abs(ex.position(unit_chart, 0.5)) ** 3 / math.tan(0.5), rel=1e-14
    )


def test_variant_poles(unit_chart):
    crossing = bvp.segment(unit_chart, 0.0, 1.0)
    with pytest.raises(PoleError):
        act.action(crossing, ActionForm.VARIANT_MAX)
    turning = bvp.segment(unit_chart, 0.4, math.pi / 2)
    with pytest.raises(PoleError):
        act.action(turning, ActionForm.VARIANT_MAX_EXPANDED)
    assert math.isfinite(act.action(turning).total)


@settings(max_examples=100, deadline=None)
@given(st.floats(-1.5, 1.5).filter(lambda p: abs(p) < 1.55), st.floats(0.2, 3.0), st.booleans())
def test_inverse_cos_identity(psi, y_max, upper):
    # on the extremal y = y_max_signed * sign * |cos psi|**(1/2)
    ym = y_max if upper else -y_max
    y = ym * math.sqrt(abs(math.cos(psi)))
    assert act.inverse_cos_identity_residual(y, ym, psi) < 1e-12


def test_endpoint_derivatives_quarter(unit_chart):
    seg = bvp.segment(unit_chart, 0.0, math.pi / 2)
    d = act.endpoint_derivatives(seg)
    assert d.p_a == pytest.approx(math.sqrt(2.0))
    assert d.dS_dy_a == -d.p_a
    assert abs(d.p_b) < 1e-15
    assert (d.dS_dt_a, d.dS_dt_b) == (1.0, -1.0)


def test_theta_max_and_y_max(unit_chart):
    seg = bvp.segment(unit_chart, 3.3, 5.0)
    assert act.theta_max(seg) == pytest.approx(1.5 * math.pi)
    assert act.y_max_signed(seg) == -1.0


@pytest.mark.parametrize("lam", [2.0, 5.0])
def test_scaling_law(params, lam):
    # y -> lam*y, t -> t/lam, E -> lam**4 E scales the action by lam**3
    seg = bvp.segment(ExtremalChart(params, 0.7, 0.2, 0.1), 0.5, 2.6)
    d = seg.data
    scaled = BoundaryData.of(d.a.t / lam, lam * d.a.y, d.b.t / lam, lam * d.b.y)
    sol = bvp.solve(params, scaled, bvp.branch_of(seg), 1e-12, energy_guess=lam**4 * 0.7)
    assert sol.chart.E == pytest.approx(lam**4 * 0.7, rel=1e-10)
    assert act.action(sol).total == pytest.approx(lam**3 * act.action(seg).total, rel=1e-10)


def test_additivity(params):
    chart = ExtremalChart(params, 1.9, 0.3, -0.4)
    whole = act.action(bvp.segment(chart, 0.6, 4.4)).total
    left = act.action(bvp.segment(chart, 0.6, 2.2)).total
    right = act.action(bvp.segment(chart, 2.2, 4.4)).total
    assert left + right == pytest.approx(whole, rel=1e-10)


def test_mirror_symmetry(params):
    d = BoundaryData.of(0.0, 0.3, 1.2, -0.5)
    mirrored = BoundaryData.of(0.0, -0.3, 1.2, 0.5)
    s1 = bvp.solve(params, d, BranchSelector(1, None))
    s2 = bvp.solve(params, mirrored, BranchSelector(1, None))
    assert act.action(s2).total == pytest.approx(act.action(s1).total, rel=1e-10)


def test_coincident_limit(unit_chart):
    T = ex.period(unit_chart)
    theta_a = 0.7
    t_a = ex.elapsed_time(unit_chart, 0.0, theta_a)
    theta_b = ex.theta_of_time(unit_chart, t_a + 1e-6 * T)
    S = act.action(bvp.segment(unit_chart, theta_a, theta_b)).total
    assert abs(S) < 1e-5 * unit_chart.E * T


def test_momenta_equal_mass_times_velocity():
    params = OscillatorParams(2.5, 1.5)
    seg = bvp.segment(ExtremalChart(params, 1.1, 0.4), 1.0, 3.0)
    d = act.endpoint_derivatives(seg)
    assert d.p_a == pytest.approx(2.5 * ex.velocity(seg.chart, seg.theta_a), rel=1e-12)
    assert d.p_b == pytest.approx(2.5 * ex.velocity(seg.chart, seg.theta_b), rel=1e-12)
