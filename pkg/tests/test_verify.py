import pytest

from quartic_action import verify


def test_empty_run():
    assert verify.run_verify(42, 0) == []


def test_small_run_passes():
    results = verify.run_verify(7, 5)
    assert [r.name for r in results] == [
        "quarter_period_anchor",
        "closed_form_vs_oracle",
        "hamilton_jacobi",
        "form_equivalence",
        "bvp_round_trip",
        "hierarchy",
        "trajectory_fidelity",
        "degenerate_handling",
    ]
    assert all(r.passed for r in results), [r for r in results if not r.passed]


def test_impossible_tolerance_fails():
    results = verify.run_verify(7, 2, tol=1e-30)
    assert not all(r.passed for r in results)
    assert all(r.tolerance in (1e-30, 1.0) for r in results)


def test_deterministic_and_thread_independent(monkeypatch):
    def strip(rs):
        return [{k: v for k, v in r.as_dict().items() if k != "seconds"} for r in rs]

    monkeypatch.setenv("QO_ACTION_THREADS", "1")
    one = strip(verify.run_verify(3, 3))
    monkeypatch.setenv("QO_ACTION_THREADS", "3")
    three = strip(verify.run_verify(3, 3))
    assert one == three


def test_ordered_map_keeps_order(monkeypatch):
    monkeypatch.setenv("QO_ACTION_THREADS", "4")
    assert verify.ordered_map(lambda x: x * x, list(range(20))) == [x * x for x in range(20)]
    monkeypatch.setenv("QO_ACTION_THREADS", "junk")
    assert verify.threads() == 1
