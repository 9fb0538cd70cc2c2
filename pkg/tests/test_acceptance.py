"""Acceptance criteria, one test each.

Every test appends a ``PASS``/``FAIL`` line that is printed in the terminal
summary (see conftest.py), whatever the capture mode.
"""

import time

import pytest

from conftest import ACCEPTANCE_LINES
from quartic_action import cli, verify

SEED = 42


def _record(number, title, result, limit=None, extra=""):
    timing = f" time={result.seconds:.2f}s" + (f" (limit {limit:g}s)" if limit else "")
    ok = result.passed and (limit is None or result.seconds < limit)
    ACCEPTANCE_LINES.append(
        f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}: worst={result.worst:.3e} "
        f"tol={result.tolerance:g} cases={result.cases}{timing}{extra}"
    )
    return ok


def test_criterion_1_quarter_period_anchor():
    res = verify.check_quarter_period(1e-9)
    assert _record(1, "quarter-period anchor", res, limit=1.0), res


def test_criterion_2_closed_form_vs_oracle():
    res = verify.check_closed_form_vs_oracle(SEED, 200, 1e-8)
    assert _record(2, "closed-form action vs ODE oracle", res, limit=30.0), res


def test_criterion_3_hamilton_jacobi():
    res = verify.check_hamilton_jacobi(SEED, 20, 1e-6)
    assert _record(3, "Hamilton-Jacobi finite differences", res, limit=60.0), res


def test_criterion_4_form_equivalence():
    res = verify.check_form_equivalence(SEED, 200, 1e-10)
    extra = f" identity_worst={res.detail['identity_worst']:.3e}"
    assert _record(4, "equivalent action forms", res, extra=extra), res


def test_criterion_5_bvp_round_trip():
    res = verify.check_bvp_round_trip(SEED, 100, 1e-8, 1e-10)
    extra = f" amplitude_identity_worst={res.detail['identity_worst']:.3e}"
    assert _record(5, "endpoint solver round trip", res, extra=extra), res


def test_criterion_6_hierarchy():
    res = verify.check_hierarchy(SEED, 50, 1e-12, 1e-10, 1e-8, 1e-10)
    extra = "".join(f" {k}={v['worst']:.3e}/{v['tolerance']:g}" for k, v in res.detail.items())
    assert _record(6, "hierarchy reductions (worst as fraction of tol)", res, extra=extra), res


def test_criterion_7_trajectory_fidelity():
    res = verify.check_trajectory_fidelity(1e-7, 1e-9)
    extra = f" energy_drift={res.detail['energy_drift']:.3e}"
    assert _record(7, "trajectory vs ODE oracle", res, extra=extra), res


def test_criterion_8_degenerate_handling():
    res = verify.check_degenerate_handling()
    extra = " " + " ".join(f"{k}={v}" for k, v in res.detail.items())
    assert _record(8, "degenerate inputs", res, extra=extra), res


def test_criterion_9_full_verify_suite(tmp_path):
    limit = 180.0
    outputs, timings, codes = [], [], []
    for i in range(2):
        path = tmp_path / f"report{i}.json"
        start = time.perf_counter()
        codes.append(cli.main(["verify", "--full", "--seed", str(SEED), "--out", str(path)]))
        timings.append(time.perf_counter() - start)
        outputs.append(path.read_bytes())
    ok = codes == [0, 0] and outputs[0] == outputs[1] and max(timings) < limit
    ACCEPTANCE_LINES.append(
        f"[{'PASS' if ok else 'FAIL'}] criterion 9: full verify suite: exit codes={codes} "
        f"identical_output={outputs[0] == outputs[1]} time={max(timings):.2f}s (limit {limit:g}s)"
    )
    assert ok
