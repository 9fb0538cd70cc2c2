import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quartic_action import (
    BoundaryData,
    BranchSelector,
    DegenerateSeparationError,
    ExtremalChart,
    NoSolutionError,
    OscillatorParams,
    bvp,
)
from quartic_action import extremal as ex

QUARTER_TIME = 0.9270373386506859


def test_quarter_segment_recovers_unit_energy(params):
    data = BoundaryData.of(0.0, 0.0, QUARTER_TIME, 1.0)
    sol = bvp.solve(params, data, BranchSelector(0, True))
    assert sol.chart.E == pytest.approx(1.0, rel=1e-10)
    assert sol.theta_b - sol.theta_a == pytest.approx(math.pi / 2, abs=1e-6)
    assert max(abs(r) for r in sol.residuals) < 1e-10


def test_zero_to_zero_over_a_period(params):
    # half a period of the E/16 extremal equals the full period of E=1
    T = 4 * QUARTER_TIME
    sol = bvp.solve(params, BoundaryData.of(0.0, 0.0, T, 0.0), BranchSelector(0, True))
    assert sol.chart.E == pytest.approx(1.0 / 16.0, rel=1e-9)
    assert bvp.branch_of(sol).crossings == 0


def test_sign_mismatch_without_crossing_is_infeasible(params):
    data = BoundaryData.of(0.0, 0.5, 1.0, -0.5)
    with pytest.raises(NoSolutionError):
        bvp.solve(params, data, BranchSelector(0, None))


def test_solve_all_sorted_and_solve_picks_lowest(params):
    chart = ExtremalChart(params, 3.0, 0.1)
    seg = bvp.segment(chart, 0.9, 5.9)
    sols = bvp.solve_all(params, seg.data, bvp.branch_of(seg), 1e-12)
    energies = [s.chart.E for s in sols]
    assert energies == sorted(energies)
    assert any(abs(E - 3.0) < 1e-9 for E in energies)
    assert bvp.solve(params, seg.data, bvp.branch_of(seg), 1e-12).chart.E == energies[0]
    near = bvp.solve(params, seg.data, bvp.branch_of(seg), 1e-12, energy_guess=3.1)
    assert near.chart.E == pytest.approx(3.0, rel=1e-9)


def test_minimal_crossing(params):
    sol = bvp.solve_minimal(params, BoundaryData.of(0.0, 0.3, 1.2, -0.5))
    assert bvp.branch_of(sol).crossings == 1


@settings(max_examples=40, deadline=None)
@given(
    st.floats(0.1, 10.0),
    st.floats(0.0, 2 * math.pi),
    st.floats(-math.pi, math.pi),
    st.floats(0.1, 2 * math.pi - 0.1),
)
def test_round_trip(E, theta0, phi_a, span):
    half = math.pi / 2
    for phi in (phi_a, phi_a + span):
        if abs(phi - half * round(phi / half)) < 0.05:
            return
    if abs(span - math.pi) < 0.05:
        return
    params = OscillatorParams(1.0, 4.0)
    seg = bvp.segment(ExtremalChart(params, E, theta0), theta0 + phi_a, theta0 + phi_a + span)
    sols = bvp.solve_all(params, seg.data, bvp.branch_of(seg), 1e-12)
    best = min(sols, key=lambda s: abs(s.chart.E - E))
    assert best.chart.E == pytest.approx(E, rel=1e-8)
    assert bvp.amplitude_identity_residual(best) < 1e-10
    # theta0 from endpoint data alone
    recovered = bvp.theta0_from_endpoints(best)
    delta = (recovered - best.chart.theta0) % (2 * math.pi)
    assert min(delta, 2 * math.pi - delta) < 1e-8


def test_anchored_sin_cos_and_interpolation(params):
    chart = ExtremalChart(params, 2.0, 0.3, -0.2)
    seg = bvp.segment(chart, 1.0, 3.5)
    for theta in np.linspace(1.0, 3.5, 7):
        s, c = bvp.anchored_sin_cos(seg, theta)
        assert s == pytest.approx(math.sin(theta - 0.3), abs=1e-12)
        assert c == pytest.approx(math.cos(theta - 0.3), abs=1e-12)
    for t in np.linspace(seg.data.a.t, seg.data.b.t, 9):
        assert bvp.interpolate(seg, float(t)) == pytest.approx(ex.theta_of_time(chart, float(t)), abs=1e-11)


def test_half_period_separation_is_degenerate(params):
    seg = bvp.segment(ExtremalChart(params, 1.0), 0.3, 0.3 + math.pi)
    with pytest.raises(DegenerateSeparationError):
        bvp.anchored_sin_cos(seg, 1.0)
    with pytest.raises(DegenerateSeparationError):
        bvp.theta0_from_endpoints(seg)
    with pytest.raises(DegenerateSeparationError):
        bvp.amplitude_identity_residual(seg)


def test_count_crossings():
    assert bvp.count_crossings(0.0, math.pi) == 0
    assert bvp.count_crossings(0.1, math.pi + 0.1) == 1
    assert bvp.count_crossings(-0.1, 2 * math.pi + 0.1) == 3


def test_tolerance_domain(params):
    with pytest.raises(ValueError):
        bvp.solve(params, BoundaryData.of(0, 0, 1, 1), BranchSelector(0), tol=0.0)


def test_turning_to_turning_full_period(params):
    chart = ExtremalChart(params, 2.0)
    seg = bvp.segment(chart, math.pi / 2, 2.5 * math.pi)
    assert seg.data.a.y == seg.data.b.y
    sol = bvp.solve(params, seg.data, BranchSelector(2, None), 1e-12)
    assert sol.chart.E == pytest.approx(2.0, rel=1e-9)


def test_angle_span_recovered(params):
    rng = np.random.default_rng(11)
    for _ in range(20):
        E = float(rng.uniform(0.2, 5.0))
        phi_a = float(rng.uniform(-1.4, 1.4))
        span = float(rng.uniform(0.2, 1.4))
        seg = bvp.segment(ExtremalChart(params, E, 0.5), 0.5 + phi_a, 0.5 + phi_a + span)
        sols = bvp.solve_all(params, seg.data, bvp.branch_of(seg), 1e-12)
        best = min(sols, key=lambda s: abs(s.chart.E - E))
        assert best.theta_b - best.theta_a == pytest.approx(span, abs=1e-8)


def test_branch_matches_oracle_crossings(params):
    from quartic_action import oracle

    for a, b in [(0.4, 2.8), (0.4, 3.9), (0.4, 7.0)]:
        seg = bvp.segment(ExtremalChart(params, 1.3), a, b)
        sol = bvp.solve(params, seg.data, bvp.branch_of(seg), 1e-12, energy_guess=1.3)
        traj = oracle.trajectory_for(sol)
        found = oracle.count_zero_crossings(traj, sol.data.a.t, sol.data.b.t)
        assert found == bvp.branch_of(sol).crossings == bvp.branch_of(seg).crossings


def test_interpolate_midpoint_against_oracle(params):
    from quartic_action import oracle

    sol = bvp.solve(params, BoundaryData.of(0.0, 0.0, QUARTER_TIME, 1.0), BranchSelector(0, True))
    mid = 0.5 * QUARTER_TIME
    y_ode, _ = oracle.trajectory_for(sol)(mid)
    assert ex.position(sol.chart, bvp.interpolate(sol, mid)) == pytest.approx(float(y_ode), abs=1e-8)
    assert bvp.interpolate(sol, 0.0) == sol.theta_a
    assert bvp.interpolate(sol, QUARTER_TIME) == sol.theta_b
