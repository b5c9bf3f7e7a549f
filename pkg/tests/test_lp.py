import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mwcut.errors import ValidationError
from mwcut.lp import (
    LpBuilder,
    LpProblem,
    LpStatus,
    from_cplex_lp,
    read_cplex_lp,
    solve_lp,
    to_cplex_lp,
    verify_solution,
    write_cplex_lp,
)

from oracles import random_small_lp, vertex_enumeration


def small_max():
    b = LpBuilder("ex")
    x = b.add_var("x")
    y = b.add_var("y")
    b.add_constraint({x: 1, y: 1}, "<=", 4, "c1")
    b.add_constraint({x: 1, y: 3}, "<=", 6, "c2")
    b.add_constraint({x: 1}, "<=", 3, "c3")
    b.set_objective({x: 2, y: 1}, maximize=True)
    return b.build()


def test_textbook_max():
    p = small_max()
    s = solve_lp(p)
    assert s.status is LpStatus.OPTIMAL
    assert s.objective_value == pytest.approx(7.0)
    assert np.allclose(s.values, [3, 1])
    assert verify_solution(p, s).ok()


def test_infeasible_and_unbounded():
    b = LpBuilder()
    x = b.add_var("x")
    b.add_constraint({x: 1}, ">=", 2)
    b.add_constraint({x: 1}, "<=", 1)
    b.set_objective({x: 1})
    assert solve_lp(b.build()).status is LpStatus.INFEASIBLE

    b = LpBuilder()
    x = b.add_var("x")
    y = b.add_var("y", lower=-math.inf)
    b.add_constraint({x: 1, y: -1}, ">=", 0)
    b.set_objective({x: 1, y: 1}, maximize=True)
    assert solve_lp(b.build()).status is LpStatus.UNBOUNDED


def test_free_and_bounded_variables():
    b = LpBuilder()
    x = b.add_var("x", lower=-math.inf)
    y = b.add_var("y", lower=-2, upper=3)
    b.add_constraint({x: 1, y: 1}, "=", 1)
    b.add_constraint({x: 1}, ">=", -10)
    b.set_objective({x: 1, y: -1})
    s = solve_lp(b.build())
    assert s.optimal
    # x = 1 - y, so x - y = 1 - 2y is smallest at y = 3
    assert s.objective_value == pytest.approx(-5)
    assert s.values[1] == pytest.approx(3) and s.values[0] == pytest.approx(-2)


def test_iteration_limit():
    s = solve_lp(small_max(), max_iterations=1)
    assert s.status is LpStatus.ITERATION_LIMIT


def test_redundant_equalities():
    b = LpBuilder()
    x = b.add_var("x")
    y = b.add_var("y")
    b.add_constraint({x: 1, y: 1}, "=", 1)
    b.add_constraint({x: 2, y: 2}, "=", 2)
    b.set_objective({x: 1, y: 2})
    s = solve_lp(b.build())
    assert s.optimal and s.objective_value == pytest.approx(1)


def test_problem_validation():
    with pytest.raises(ValidationError):
        LpProblem([1.0], [[1.0]], ["<"], [1.0], [0.0], [1.0])
    with pytest.raises(ValidationError):
        LpProblem([1.0], [[1.0]], ["<="], [1.0], [2.0], [1.0])
    with pytest.raises(ValidationError):
        solve_lp(small_max(), rule="steepest")


@pytest.mark.parametrize("rule", ["bland", "dantzig"])
def test_random_lps_match_vertex_enumeration(rule):
    rng = np.random.default_rng(11)
    for _ in range(40):
        p = random_small_lp(rng)
        want = vertex_enumeration(p)
        s = solve_lp(p, rule=rule)
        if want is None:
            assert s.status is LpStatus.INFEASIBLE
        else:
            assert s.optimal
            assert s.objective_value == pytest.approx(want, abs=1e-6)
            assert verify_solution(p, s).ok(1e-7, 1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.randoms(use_true_random=False))
def test_row_permutation_invariance(seed, rnd):
    p = random_small_lp(np.random.default_rng(seed))
    perm = list(range(p.num_constraints))
    rnd.shuffle(perm)
    s1 = solve_lp(p)
    s2 = solve_lp(p.permuted_rows(perm))
    assert s1.status is s2.status
    if s1.optimal:
        assert s1.objective_value == pytest.approx(s2.objective_value, abs=1e-7)


def test_cplex_round_trip(tmp_path):
    p = small_max()
    text = to_cplex_lp(p)
    assert "maximize" in text.lower()
    q = from_cplex_lp(text)
    assert q.maximize and q.names == p.names
    assert np.array_equal(q.A, p.A) and np.array_equal(q.rhs, p.rhs) and q.senses == p.senses
    path = tmp_path / "p.lp"
    write_cplex_lp(p, path)
    r = read_cplex_lp(path)
    assert solve_lp(r).objective_value == pytest.approx(7.0)


def test_cplex_round_trip_bounds():
    b = LpBuilder("bounds")
    x = b.add_var("x", lower=-math.inf)
    y = b.add_var("y", lower=-2.5, upper=3.25)
    z = b.add_var("z", upper=1e-3)
    b.add_constraint({x: 1, y: -0.1, z: 1 / 3}, "=", 1, "eq")
    b.add_constraint({x: 1}, ">=", -10, "low")
    b.set_objective({x: 1, y: -1, z: 2})
    p = b.build()
    q = from_cplex_lp(to_cplex_lp(p))
    for attr in ("objective", "A", "rhs", "lower", "upper"):
        assert np.array_equal(getattr(p, attr), getattr(q, attr)), attr
    assert solve_lp(q).objective_value == pytest.approx(solve_lp(p).objective_value)


def test_cplex_round_trip_keeps_column_order():
    b = LpBuilder("order")
    u = b.add_var("u")
    v = b.add_var("v")
    b.add_constraint({u: 1, v: 2}, ">=", 1, "r")
    b.set_objective({v: 1})
    p = b.build()
    q = from_cplex_lp(to_cplex_lp(p))
    assert q.names == p.names and np.array_equal(q.A, p.A) and np.array_equal(q.objective, p.objective)
