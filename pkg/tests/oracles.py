"""Independent reference implementations used only by the tests."""

import itertools
import math

import numpy as np

from mwcut.lp import LpProblem


def vertex_enumeration(p: LpProblem, tol: float = 1e-9):
    """Optimum of a bounded LP by enumerating basic solutions.

    Every variable needs finite bounds.  Returns ``None`` when infeasible.
    """
    n = p.num_vars
    rows, rhs = [], []
    for i in range(p.num_constraints):
        rows.append(p.A[i])
        rhs.append(p.rhs[i])
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        rows += [e, e]
        rhs += [p.lower[j], p.upper[j]]
    rows = np.array(rows)
    rhs = np.array(rhs)
    best = None
    for active in itertools.combinations(range(len(rows)), n):
        B = rows[list(active)]
        if abs(np.linalg.det(B)) < 1e-10:
            continue
        x = np.linalg.solve(B, rhs[list(active)])
        if not feasible(p, x, tol):
            continue
        val = float(p.objective @ x)
        if best is None or (val > best if p.maximize else val < best):
            best = val
    return best


def feasible(p: LpProblem, x, tol: float = 1e-9) -> bool:
    if np.any(x < p.lower - tol) or np.any(x > p.upper + tol):
        return False
    ax = p.A @ x
    for v, s, b in zip(ax, p.senses, p.rhs):
        if s == "<=" and v > b + tol:
            return False
        if s == ">=" and v < b - tol:
            return False
        if s == "=" and abs(v - b) > tol:
            return False
    return True


def random_small_lp(rng: np.random.Generator, with_equalities: bool = True) -> LpProblem:
    n = int(rng.integers(2, 5))
    m = int(rng.integers(1, 5))
    A = np.round(rng.uniform(-5, 5, size=(m, n)), 1)
    rhs = np.round(rng.uniform(-5, 10, size=m), 1)
    senses = list(rng.choice(["<=", ">=", "="] if with_equalities else ["<=", ">="], size=m))
    lower = np.round(rng.uniform(-3, 0, size=n), 1)
    upper = lower + np.round(rng.uniform(0.5, 6, size=n), 1)
    c = np.round(rng.uniform(-5, 5, size=n), 1)
    return LpProblem(c, A, senses, rhs, lower, upper, bool(rng.integers(2)))


def sparc_enumeration_density(k, thresholds_cdf, slices, x, i, j):
    """Brute force over all k! orders of the sparc density formula at point x.

    ``thresholds_cdf(l, z)`` is P[threshold of terminal l <= z] and its
    density is obtained by a central difference.
    """
    total = 0.0
    h = 1e-7
    for order in itertools.permutations(range(k)):
        alive = 1.0
        for pos, l in enumerate(order):
            if pos >= slices:
                break
            if l in (i, j):
                Fp = thresholds_cdf(l, x[l] + h)
                Fm = thresholds_cdf(l, x[l] - h)
                total += alive * (Fp - Fm) / (2 * h)
            alive *= 1.0 - thresholds_cdf(l, x[l])
    return total / math.factorial(k)
