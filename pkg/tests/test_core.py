import math

import pytest

from quartic_action import (
    ActionBreakdown,
    BoundaryData,
    BranchSelector,
    DegenerateInputError,
    ExtremalChart,
    HierarchyChart,
    HierarchyParams,
    OscillatorParams,
    PhasePoint,
    amplitude,
)


def test_params_defaults_and_properties():
    p = OscillatorParams()
    assert (p.m, p.k4, p.n, p.k) == (1.0, 1.0, 2, 1.0)
    h = HierarchyParams(3, 2.0, 5.0)
    assert (h.n, h.m, h.k) == (3, 2.0, 5.0)


@pytest.mark.parametrize("m,k4", [(0.0, 1.0), (1.0, -1.0), (math.nan, 1.0), (1.0, math.inf)])
def test_params_reject_nonpositive(m, k4):
    with pytest.raises(DegenerateInputError):
        OscillatorParams(m, k4)


@pytest.mark.parametrize("n", [0, -1, 2.5, True])
def test_hierarchy_rejects_bad_n(n):
    with pytest.raises(DegenerateInputError):
        HierarchyParams(n)


def test_zero_energy_rejected(params):
    with pytest.raises(DegenerateInputError, match="rest solution"):
        ExtremalChart(params, 0.0)
    with pytest.raises(DegenerateInputError):
        ExtremalChart(params, -1.0)


def test_hierarchy_chart_needs_hierarchy_params(params):
    with pytest.raises(TypeError):
        HierarchyChart(params, 1.0)
    assert HierarchyChart(HierarchyParams(3), 1.0).params.n == 3


def test_amplitude_turning_point():
    chart = ExtremalChart(OscillatorParams(1.0, 4.0), 1.0)
    assert amplitude(chart) == 1.0
    for n in (1, 2, 3, 5):
        p = HierarchyParams(n, 1.0, 2.0)
        c = ExtremalChart(p, 0.7)
        A = amplitude(c)
        assert p.k * A ** (2 * n) / (2 * n) == pytest.approx(0.7, rel=1e-14)


def test_boundary_data_ordering():
    d = BoundaryData.of(0.0, 1.0, 2.5, -1.0)
    assert d.duration == 2.5
    with pytest.raises(DegenerateInputError):
        BoundaryData.of(1.0, 0.0, 1.0, 0.0)
    with pytest.raises(DegenerateInputError):
        BoundaryData.of(0.0, math.nan, 1.0, 0.0)


def test_branch_selector_validation():
    assert BranchSelector().rising_at_b is None
    with pytest.raises(DegenerateInputError):
        BranchSelector(-1)
    with pytest.raises(DegenerateInputError):
        BranchSelector(1.5)


def test_phase_point_momentum():
    assert PhasePoint.from_state(2.0, 0.0, 0.1, 3.0).p == 6.0


def test_breakdown_as_dict():
    b = ActionBreakdown(1.0, 0.5, 0.2, 0.1, 0.5)
    assert list(b.as_dict()) == [
        "momentum_integral", "energy_term", "boundary_term_b", "boundary_term_a", "total"
    ]
