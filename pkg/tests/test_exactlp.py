import itertools

import numpy as np
import pytest

from votedim.exactlp import (Constraint, FeasibilityOutcome, LinearSystem,
                             dump_lp_text, ilp_solve, lp_feasible,
                             verify_farkas)
from votedim.rationals import Rat, rat


def _sys(num_vars, rows, lower=None, upper=None, integer=None, objective=None):
    s = LinearSystem(num_vars, [], lower, upper, integer, objective)
    for coeffs, rel, rhs in rows:
        s.add(coeffs, rel, rhs)
    return s


def test_empty_system_feasible_zero():
    out = lp_feasible(LinearSystem(3))
    assert out.status == "feasible"
    assert out.point == (rat(0), rat(0), rat(0))


def test_dimension_mismatch_rejected():
    s = LinearSystem(2)
    with pytest.raises(ValueError):
        s.add([1, 2, 3], "<=", 1)


def test_simple_feasible_interval():
    out = lp_feasible(_sys(1, [([1], ">=", 1), ([1], "<=", 2)]))
    assert out.status == "feasible"
    assert rat(1) <= out.point[0] <= rat(2)


def test_infeasible_with_verified_farkas():
    out = lp_feasible(_sys(1, [([1], ">=", 2), ([1], "<=", 1)]))
    assert out.status == "infeasible"
    assert out.farkas is not None
    s = _sys(1, [([1], ">=", 2), ([1], "<=", 1)])
    assert verify_farkas(s, out)


def test_feasible_point_satisfies_all_constraints_exactly():
    rows = [([2, 3], ">=", 7), ([1, -1], "<=", 2), ([1, 1], "==", 4)]
    s = _sys(2, rows)
    out = lp_feasible(s)
    assert out.status == "feasible"
    x = out.point
    assert 2 * x[0] + 3 * x[1] >= 7
    assert x[0] - x[1] <= 2
    assert x[0] + x[1] == 4


def test_equality_infeasible_farkas():
    s = _sys(2, [([1, 1], "==", 1), ([1, 1], "==", 2)])
    out = lp_feasible(s)
    assert out.status == "infeasible"
    assert verify_farkas(s, out)


def test_free_variables():
    s = LinearSystem(1, [], [None], [None], None, None)
    s.add([1], "<=", -5)
    out = lp_feasible(s)
    assert out.status == "feasible"
    assert out.point[0] <= -5


def test_upper_bounds_in_farkas():
    s = LinearSystem(1, [], [rat(0)], [rat(2)], None, None)
    s.add([1], ">=", 3)
    out = lp_feasible(s)
    assert out.status == "infeasible"
    assert verify_farkas(s, out)


def test_lp_objective_optimum():
    # min x+y st x+2y >= 4, 3x+y >= 6 -> vertex (8/5, 6/5), value 14/5
    s = _sys(2, [([1, 2], ">=", 4), ([3, 1], ">=", 6)],
             objective=(([1, 1]), "min"))
    s.set_objective([1, 1], "min")
    out = ilp_solve(s)
    assert out.status == "feasible"
    assert out.objective_value == rat(14, 5)


def test_lp_unbounded():
    s = _sys(1, [([1], ">=", 0)])
    s.set_objective([1], "max")
    out = ilp_solve(s)
    assert out.status == "unbounded"


def test_ilp_round_up():
    # min x1+x2 s.t. 2x1+2x2 >= 3, integers >= 0: LP bound 1.5 rounds to 2
    s = LinearSystem(2, [], [rat(0)] * 2, [rat(10)] * 2, [True, True], None)
    s.add([2, 2], ">=", 3)
    s.set_objective([1, 1], "min")
    out = ilp_solve(s)
    assert out.status == "feasible"
    assert out.objective_value == 2


def test_ilp_requires_bounds():
    s = LinearSystem(1, [], [rat(0)], [None], [True], None)
    s.add([1], ">=", 1)
    with pytest.raises(ValueError):
        ilp_solve(s)


def test_ilp_equals_lp_on_integral_vertices():
    # totally unimodular-ish: x <= 3, y <= 2, x+y <= 4, max x+2y
    s = LinearSystem(2, [], [rat(0)] * 2, [rat(5)] * 2, [True, True], None)
    s.add([1, 0], "<=", 3)
    s.add([0, 1], "<=", 2)
    s.add([1, 1], "<=", 4)
    s.set_objective([1, 2], "max")
    out = ilp_solve(s)
    relaxed = ilp_solve(LinearSystem(2, list(s.constraints), [rat(0)] * 2,
                                     [rat(5)] * 2, [False, False],
                                     (s.objective[0], "max")))
    assert out.objective_value == relaxed.objective_value == 6


def _brute_ilp(c, rows, ub, sense="min"):
    best = None
    n = len(c)
    for xs in itertools.product(range(ub + 1), repeat=n):
        ok = True
        for coeffs, rel, rhs in rows:
            v = sum(a * x for a, x in zip(coeffs, xs))
            if rel == "<=" and not v <= rhs:
                ok = False
            if rel == ">=" and not v >= rhs:
                ok = False
            if rel == "==" and not v == rhs:
                ok = False
        if not ok:
            continue
        val = sum(a * x for a, x in zip(c, xs))
        if best is None or (val < best if sense == "min" else val > best):
            best = val
    return best


def test_ilp_matches_bruteforce_random():
    rng = np.random.default_rng(3)
    for trial in range(30):
        n = int(rng.integers(2, 4))
        rows = []
        for _ in range(int(rng.integers(1, 4))):
            coeffs = [int(rng.integers(-3, 4)) for _ in range(n)]
            rel = ["<=", ">="][int(rng.integers(0, 2))]
            rhs = int(rng.integers(-4, 8))
            rows.append((coeffs, rel, rhs))
        c = [int(rng.integers(-3, 4)) for _ in range(n)]
        s = LinearSystem(n, [], [rat(0)] * n, [rat(4)] * n, [True] * n, None)
        for coeffs, rel, rhs in rows:
            s.add(coeffs, rel, rhs)
        s.set_objective(c, "min")
        out = ilp_solve(s)
        expected = _brute_ilp(c, rows, 4)
        if expected is None:
            assert out.status == "infeasible"
        else:
            assert out.status == "feasible"
            assert out.objective_value == expected, (trial, rows, c)


def test_ilp_budget_exhaustion_reports():
    s = LinearSystem(6, [], [rat(0)] * 6, [rat(1)] * 6, [True] * 6, None)
    # knapsack-ish with an awkward relaxation
    s.add([3, 5, 7, 9, 11, 13], "<=", 20)
    s.set_objective([3, 5, 7, 9, 11, 13], "max")
    out = ilp_solve(s, node_budget=2)
    assert out.status == "budget_exhausted"


def test_determinism():
    s = LinearSystem(3, [], [rat(0)] * 3, [rat(6)] * 3, [True] * 3, None)
    s.add([2, 3, 4], "<=", 11)
    s.add([1, 1, 1], ">=", 2)
    s.set_objective([1, 2, 3], "max")
    a = ilp_solve(s)
    b = ilp_solve(s)
    assert a.point == b.point and a.objective_value == b.objective_value
    assert a.nodes == b.nodes


def test_dump_lp_text_roundtrippable_shape():
    s = _sys(2, [([1, 2], ">=", rat(3, 2))])
    s.set_objective([1, 1], "min")
    txt = dump_lp_text(s)
    assert "Minimize" in txt and "Subject To" in txt and "3/2" in txt


def test_farkas_on_random_infeasible_systems():
    rng = np.random.default_rng(11)
    checked = 0
    for _ in range(200):
        n = int(rng.integers(1, 4))
        s = LinearSystem(n)
        for _ in range(int(rng.integers(2, 6))):
            coeffs = [int(rng.integers(-3, 4)) for _ in range(n)]
            rel = ["<=", ">=", "=="][int(rng.integers(0, 3))]
            s.add(coeffs, rel, int(rng.integers(-5, 6)))
        out = lp_feasible(s)
        if out.status == "infeasible":
            assert verify_farkas(s, out)
            checked += 1
        elif out.status == "feasible":
            for c in s.constraints:
                v = sum(a * x for a, x in zip(c.coeffs, out.point))
                assert (v <= c.rhs if c.rel == "<=" else
                        v >= c.rhs if c.rel == ">=" else v == c.rhs)
    assert checked >= 20
