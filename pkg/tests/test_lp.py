"""LP kernel tests: pinned examples, statuses and a scipy cross-check."""

import numpy as np
import pytest
from scipy.optimize import linprog

from czest.lp import (
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    LinearProgram,
    lp_feasible,
    lp_solve,
)


def test_box_only_minimum():
    res = lp_solve([1.0, 0.0], None, None, [-1, -1], [1, 1])
    assert res.status == OPTIMAL
    assert res.value == pytest.approx(-1.0, abs=1e-9)
    assert res.x[0] == pytest.approx(-1.0, abs=1e-9)


def test_box_only_maximum():
    res = lp_solve([1.0, 0.0], None, None, [-1, -1], [1, 1], sense="max")
    assert res.status == OPTIMAL
    assert res.value == pytest.approx(1.0, abs=1e-9)


def test_fixed_variable_infeasible():
    res = lp_solve([1.0], [[1.0]], [5.0], [-1], [1])
    assert res.status == INFEASIBLE


def test_free_variable_unbounded():
    res = lp_solve([-1.0], None, None, [-np.inf], [np.inf])
    assert res.status == UNBOUNDED


def test_equality_pins_value():
    # x1 + x2 = 1 over [-1,1]^2, minimize x1 -> x1 = 0 at x2 = 1
    res = lp_solve([1.0, 0.0], [[1.0, 1.0]], [1.0], [-1, -1], [1, 1])
    assert res.status == OPTIMAL
    assert res.value == pytest.approx(0.0, abs=1e-9)
    assert res.x.sum() == pytest.approx(1.0, abs=1e-9)


def test_feasibility_probe():
    assert lp_feasible([[1.0, 1.0]], [2.0], [-1, -1], [1, 1])
    assert not lp_feasible([[1.0, 1.0]], [2.5], [-1, -1], [1, 1])


def test_degenerate_zero_width_bounds():
    res = lp_solve([1.0, 1.0], [[1.0, 0.0]], [0.0], [0, 0], [0, 0])
    assert res.status == OPTIMAL
    assert res.value == pytest.approx(0.0, abs=1e-12)


def test_no_constraints_no_variables():
    res = lp_solve(np.zeros(0), None, None, np.zeros(0), np.zeros(0))
    assert res.status == OPTIMAL
    assert res.value == 0.0


def test_free_variable_enters_both_directions():
    # the minimum needs the free variable to move negative
    res = lp_solve(
        [1.0, 0.0],
        [[1.0, 1.0]],
        [0.0],
        [-np.inf, -2.0],
        [np.inf, 2.0],
    )
    assert res.status == OPTIMAL
    assert res.value == pytest.approx(-2.0, abs=1e-9)


def test_warm_start_matches_cold_start():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((3, 7))
    xi = rng.uniform(-1, 1, 7)
    b = A @ xi
    lo, hi = -np.ones(7), np.ones(7)
    prob = LinearProgram(A, b, lo, hi)
    for trial in range(10):
        c = rng.standard_normal(7)
        warm = prob.solve(c)
        cold = LinearProgram(A, b, lo, hi).solve(c)
        assert warm.status == cold.status == OPTIMAL
        assert warm.value == pytest.approx(cold.value, abs=1e-8)


def _random_instance(rng):
    n = int(rng.integers(1, 9))
    m = int(rng.integers(0, min(n, 4) + 1))
    A = rng.standard_normal((m, n)) if m else None
    lo = np.where(rng.random(n) < 0.15, -np.inf, rng.uniform(-2, 0, n))
    hi = np.where(rng.random(n) < 0.15, np.inf, rng.uniform(0, 2, n))
    # anchor b at a point inside the box most of the time
    with np.errstate(invalid="ignore"):
        mid = np.where(
            np.isfinite(lo) & np.isfinite(hi), (lo + hi) / 2, 0.0
        ) + rng.uniform(-0.3, 0.3, n)
    if m:
        b = A @ mid if rng.random() < 0.8 else rng.standard_normal(m) * 3
    else:
        b = None
    c = rng.standard_normal(n)
    return c, A, b, lo, hi


def test_cross_check_against_scipy():
    rng = np.random.default_rng(17)
    statuses = {OPTIMAL: 0, INFEASIBLE: 0, UNBOUNDED: 0}
    for _ in range(400):
        c, A, b, lo, hi = _random_instance(rng)
        mine = lp_solve(c, A, b, lo, hi)
        ref = linprog(
            c,
            A_eq=A,
            b_eq=b,
            bounds=list(zip(lo, hi)),
            method="highs",
        )
        if ref.status == 0:
            assert mine.status == OPTIMAL, (c, A, b, lo, hi)
            assert mine.value == pytest.approx(ref.fun, abs=1e-6, rel=1e-7)
        elif ref.status == 2:
            assert mine.status == INFEASIBLE
        elif ref.status == 3:
            assert mine.status == UNBOUNDED
        statuses[mine.status] += 1
    # the generator must actually exercise all three outcomes
    assert all(v > 0 for v in statuses.values()), statuses


def test_determinism_identical_outputs():
    rng = np.random.default_rng(23)
    c, A, b, lo, hi = _random_instance(rng)
    r1 = lp_solve(c, A, b, lo, hi)
    r2 = lp_solve(c, A, b, lo, hi)
    assert r1.status == r2.status
    if r1.status == OPTIMAL:
        assert r1.value == r2.value
        assert np.array_equal(r1.x, r2.x)
