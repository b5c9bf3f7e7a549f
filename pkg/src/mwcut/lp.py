"""Dense two-phase primal simplex and the LP problem container.

The solver is deliberately small: a full tableau held in a numpy array,
Bland's rule for both entering and leaving variables, and artificial
variables for ``=`` and ``>=`` rows in phase 1.  It is meant for the
few-thousand-row problems this package generates; anything bigger should be
written out with :func:`to_cplex_lp` and handed to an external solver.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import ValidationError

SENSES = ("<=", "=", ">=")


class LpStatus(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    ITERATION_LIMIT = "IterationLimit"


def _frozen(a, dtype=float):
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LpProblem:
    """``min`` (or ``max``) ``objective @ x`` subject to ``A x (senses) rhs`` and bounds."""

    objective: np.ndarray
    A: np.ndarray
    senses: tuple
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    maximize: bool = False
    names: Optional[tuple] = None
    row_names: Optional[tuple] = None
    name: str = "problem"

    def __post_init__(self):
        n = len(self.objective)
        object.__setattr__(self, "objective", _frozen(self.objective))
        A = np.asarray(self.A, dtype=float).reshape(-1, n)
        object.__setattr__(self, "A", _frozen(A))
        object.__setattr__(self, "rhs", _frozen(self.rhs))
        object.__setattr__(self, "lower", _frozen(self.lower))
        object.__setattr__(self, "upper", _frozen(self.upper))
        object.__setattr__(self, "senses", tuple(self.senses))
        m = A.shape[0]
        if len(self.senses) != m or len(self.rhs) != m:
            raise ValidationError("senses and rhs must have one entry per constraint row")
        if any(s not in SENSES for s in self.senses):
            raise ValidationError(f"constraint senses must be among {SENSES}")
        if not np.all(np.isfinite(self.rhs)):
            raise ValidationError("right-hand sides must be finite")
        if len(self.lower) != n or len(self.upper) != n:
            raise ValidationError("bounds must have one entry per variable")
        if np.any(self.lower > self.upper):
            raise ValidationError("a lower bound exceeds its upper bound")
        if np.any(self.lower == np.inf) or np.any(self.upper == -np.inf):
            raise ValidationError("bounds must leave room for a finite value")
        if self.names is not None and len(self.names) != n:
            raise ValidationError("need one name per variable")

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    @property
    def num_constraints(self) -> int:
        return self.A.shape[0]

    def var_name(self, j: int) -> str:
        return self.names[j] if self.names is not None else f"x{j}"

    def row_name(self, i: int) -> str:
        return self.row_names[i] if self.row_names is not None else f"c{i}"

    def permuted_rows(self, perm: Sequence[int]) -> "LpProblem":
        perm = list(perm)
        return LpProblem(
            self.objective, self.A[perm], [self.senses[i] for i in perm], self.rhs[perm],
            self.lower, self.upper, self.maximize, self.names,
            None if self.row_names is None else tuple(self.row_names[i] for i in perm),
            self.name,
        )


class LpBuilder:
    """Incremental construction of an :class:`LpProblem` from sparse rows."""

    def __init__(self, name: str = "problem"):
        self.name = name
        self._names: list = []
        self._index: dict = {}
        self._lower: list = []
        self._upper: list = []
        self._rows: list = []
        self._objective: dict = {}
        self.maximize = False

    def add_var(self, name: str, lower: float = 0.0, upper: float = math.inf) -> int:
        if name in self._index:
            raise ValidationError(f"duplicate variable name {name!r}")
        self._index[name] = len(self._names)
        self._names.append(name)
        self._lower.append(float(lower))
        self._upper.append(float(upper))
        return self._index[name]

    def var(self, name: str) -> int:
        return self._index[name]

    @property
    def num_vars(self) -> int:
        return len(self._names)

    def add_constraint(self, coeffs: Mapping[int, float], sense: str, rhs: float, name=None) -> int:
        if sense not in SENSES:
            raise ValidationError(f"unknown sense {sense!r}")
        self._rows.append((dict(coeffs), sense, float(rhs), name))
        return len(self._rows) - 1

    def set_objective(self, coeffs: Mapping[int, float], maximize: bool = False) -> None:
        self._objective = dict(coeffs)
        self.maximize = maximize

    def build(self) -> LpProblem:
        n = len(self._names)
        A = np.zeros((len(self._rows), n))
        for i, (coeffs, _, _, _) in enumerate(self._rows):
            for j, v in coeffs.items():
                A[i, j] += float(v)
        c = np.zeros(n)
        for j, v in self._objective.items():
            c[j] += float(v)
        row_names = tuple(r[3] if r[3] is not None else f"c{i}" for i, r in enumerate(self._rows))
        return LpProblem(
            c, A, [r[1] for r in self._rows], [r[2] for r in self._rows],
            self._lower, self._upper, self.maximize, tuple(self._names), row_names, self.name,
        )


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: LpStatus
    objective_value: float
    values: np.ndarray
    iterations: int

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


@dataclass(frozen=True)
class LpReport:
    max_residual: float
    max_bound_violation: float
    violated_rows: tuple = field(default=())

    def ok(self, residual_tol: float = 1e-7, bound_tol: float = 1e-9) -> bool:
        return self.max_residual <= residual_tol and self.max_bound_violation <= bound_tol


def verify_solution(p: LpProblem, s: LpSolution, tol: float = 1e-7) -> LpReport:
    """Constraint residuals and bound violations of ``s.values`` for ``p``."""
    x = np.asarray(s.values, dtype=float)
    ax = p.A @ x
    res = np.zeros(p.num_constraints)
    for i, sense in enumerate(p.senses):
        if sense == "<=":
            res[i] = max(0.0, ax[i] - p.rhs[i])
        elif sense == ">=":
            res[i] = max(0.0, p.rhs[i] - ax[i])
        else:
            res[i] = abs(ax[i] - p.rhs[i])
    bound = np.maximum(p.lower - x, 0.0)
    bound = np.maximum(bound, np.maximum(x - p.upper, 0.0))
    return LpReport(
        float(res.max(initial=0.0)),
        float(bound.max(initial=0.0)),
        tuple(int(i) for i in np.nonzero(res > tol)[0]),
    )


# --- solver -----------------------------------------------------------------

_PIVOT_TOL = 1e-9
_COST_TOL = 1e-9
_FEAS_TOL = 1e-8


class _Tableau:
    """Rows ``T[:, :-1] x = T[:, -1]`` in canonical form for ``basis``."""

    def __init__(self, T, basis, max_iterations, rule):
        self.T = T
        self.basis = basis
        self.iterations = 0
        self.max_iterations = max_iterations
        self.rule = rule
        self._degenerate_run = 0

    def reduced_costs(self, c):
        cb = c[self.basis]
        d = c - cb @ self.T[:, :-1]
        return d

    def pivot(self, r, col, d):
        T = self.T
        T[r] /= T[r, col]
        colvals = T[:, col].copy()
        colvals[r] = 0.0
        nz = np.nonzero(colvals)[0]
        if len(nz):
            T[nz] -= np.outer(colvals[nz], T[r])
        d -= d[col] * T[r, :-1]
        self.basis[r] = col
        self.iterations += 1

    def _entering(self, d, allowed):
        cand = np.nonzero((d < -_COST_TOL) & allowed)[0]
        if len(cand) == 0:
            return None
        if self.rule == "dantzig" and self._degenerate_run < 50:
            return int(cand[np.argmin(d[cand])])
        return int(cand[0])

    def _leaving(self, col):
        T = self.T
        a = T[:, col]
        rows = np.nonzero(a > _PIVOT_TOL)[0]
        if len(rows) == 0:
            return None
        ratios = T[rows, -1] / a[rows]
        best = ratios.min()
        tied = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
        # Bland: smallest basic variable index among ties
        return int(tied[np.argmin(self.basis[tied])])

    def run(self, c, allowed):
        """Minimise ``c @ x``; returns "optimal", "unbounded" or "limit"."""
        d = self.reduced_costs(c)
        while True:
            col = self._entering(d, allowed)
            if col is None:
                return "optimal"
            if self.iterations >= self.max_iterations:
                return "limit"
            r = self._leaving(col)
            if r is None:
                return "unbounded"
            if self.T[r, -1] <= 1e-12:
                self._degenerate_run += 1
            else:
                self._degenerate_run = 0
            self.pivot(r, col, d)


def _standard_form(p: LpProblem):
    """Rewrite ``p`` as ``min c'y, A'y (senses) b', y >= 0``.

    Returns the pieces plus a recovery map ``x = offset + M @ y``.
    """
    n = p.num_vars
    cols = []  # (orig var, sign)
    offset = np.zeros(n)
    extra_rows = []  # (std col, upper) meaning y_col <= upper
    for j in range(n):
        lo, hi = p.lower[j], p.upper[j]
        if np.isfinite(lo):
            offset[j] = lo
            cols.append((j, 1.0))
            if np.isfinite(hi):
                extra_rows.append((len(cols) - 1, hi - lo))
        elif np.isfinite(hi):
            offset[j] = hi
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    ns = len(cols)
    M = np.zeros((n, ns))
    for s, (j, sign) in enumerate(cols):
        M[j, s] = sign
    A = p.A @ M
    b = p.rhs - p.A @ offset
    c = p.objective @ M
    if p.maximize:
        c = -c
    senses = list(p.senses)
    if extra_rows:
        E = np.zeros((len(extra_rows), ns))
        for r, (s, _) in enumerate(extra_rows):
            E[r, s] = 1.0
        A = np.vstack([A, E])
        b = np.concatenate([b, [u for _, u in extra_rows]])
        senses += ["<="] * len(extra_rows)
    return A, b, senses, c, offset, M


def solve_lp(p: LpProblem, max_iterations: int = 200_000, rule: str = "bland") -> LpSolution:
    """Solve ``p`` with the two-phase primal simplex method.

    ``rule="bland"`` (default) uses Bland's smallest-index rule throughout.
    ``rule="dantzig"`` picks the most negative reduced cost but falls back to
    Bland after a run of degenerate pivots; it is deterministic as well and
    usually needs far fewer pivots on large problems.
    """
    if rule not in ("bland", "dantzig"):
        raise ValidationError(f"unknown pivot rule {rule!r}")
    A, b, senses, c, offset, M = _standard_form(p)
    m, ns = A.shape
    neg = b < 0
    A[neg] *= -1
    b = np.where(neg, -b, b)
    senses = [
        {"<=": ">=", ">=": "<=", "=": "="}[s] if flip else s for s, flip in zip(senses, neg)
    ]
    n_slack = sum(1 for s in senses if s != "=")
    n_art = sum(1 for s in senses if s != "<=")
    width = ns + n_slack + n_art
    T = np.zeros((m, width + 1))
    T[:, :ns] = A
    T[:, -1] = b
    basis = np.zeros(m, dtype=int)
    si, ai = ns, ns + n_slack
    for r, s in enumerate(senses):
        if s == "<=":
            T[r, si] = 1.0
            basis[r] = si
            si += 1
        elif s == ">=":
            T[r, si] = -1.0
            si += 1
            T[r, ai] = 1.0
            basis[r] = ai
            ai += 1
        else:
            T[r, ai] = 1.0
            basis[r] = ai
            ai += 1
    tab = _Tableau(T, basis, max_iterations, rule)
    art_start = ns + n_slack

    def result(status, y=None):
        if y is None:
            return LpSolution(status, math.nan, np.full(p.num_vars, math.nan), tab.iterations)
        x = offset + M @ y
        return LpSolution(status, float(p.objective @ x), x, tab.iterations)

    if n_art:
        c1 = np.zeros(width)
        c1[art_start:] = 1.0
        outcome = tab.run(c1, np.ones(width, dtype=bool))
        if outcome == "limit":
            return result(LpStatus.ITERATION_LIMIT)
        infeas = float(c1[tab.basis] @ tab.T[:, -1])
        if infeas > _FEAS_TOL * max(1.0, float(np.abs(b).max(initial=0.0))):
            return result(LpStatus.INFEASIBLE)
        # drive zero-level artificials out of the basis; drop redundant rows
        keep = []
        for r in range(m):
            if tab.basis[r] >= art_start:
                row = tab.T[r, :art_start]
                cand = np.nonzero(np.abs(row) > _PIVOT_TOL)[0]
                if len(cand):
                    dummy = np.zeros(width)
                    tab.pivot(r, int(cand[0]), dummy)
                    keep.append(r)
            else:
                keep.append(r)
        tab.T = np.ascontiguousarray(tab.T[keep][:, list(range(art_start)) + [width]])
        tab.basis = tab.basis[keep]
    else:
        tab.T = np.ascontiguousarray(tab.T[:, list(range(art_start)) + [width]])
    c2 = np.zeros(art_start)
    c2[:ns] = c
    outcome = tab.run(c2, np.ones(art_start, dtype=bool))
    if outcome == "limit":
        return result(LpStatus.ITERATION_LIMIT)
    if outcome == "unbounded":
        return result(LpStatus.UNBOUNDED)
    y = np.zeros(art_start)
    y[tab.basis] = tab.T[:, -1]
    y = np.maximum(y, 0.0)
    return result(LpStatus.OPTIMAL, y[:ns])


# --- CPLEX LP text format ---------------------------------------------------

_NAME_OK = re.compile(r"^[A-Za-z!\"#$%&()/,.;?@_`'{}|~][A-Za-z0-9!\"#$%&()/,.;?@_`'{}|~]*$")


def _num(v: float) -> str:
    return repr(float(v))


def _terms(coeffs, names, per_line=6):
    parts = []
    for j, v in coeffs:
        sign = "-" if v < 0 else "+"
        parts.append(f"{sign} {_num(abs(v))} {names[j]}")
    if not parts:
        return ["0 " + names[0]] if names else ["0"]
    return [" ".join(parts[i:i + per_line]) for i in range(0, len(parts), per_line)]


def to_cplex_lp(p: LpProblem) -> str:
    """Render ``p`` in CPLEX LP text format."""
    names = [p.var_name(j) for j in range(p.num_vars)]
    for nm in names:
        if not _NAME_OK.match(nm) or len(nm) > 255:
            raise ValidationError(f"variable name {nm!r} is not valid in LP format")
    out = [f"\\Problem name: {p.name}", "", "Maximize" if p.maximize else "Minimize"]
    # every column is listed (zeros included) so a reader recovers the column order
    obj = list(enumerate(p.objective))
    lines = _terms(obj, names)
    out.append(" obj: " + lines[0])
    out += ["   " + ln for ln in lines[1:]]
    out.append("Subject To")
    for i in range(p.num_constraints):
        row = [(j, v) for j, v in enumerate(p.A[i]) if v != 0]
        lines = _terms(row, names)
        lines[-1] += f" {p.senses[i]} {_num(p.rhs[i])}"
        out.append(f" {p.row_name(i)}: " + lines[0])
        out += ["   " + ln for ln in lines[1:]]
    out.append("Bounds")
    for j, nm in enumerate(names):
        lo, hi = p.lower[j], p.upper[j]
        if lo == 0 and hi == math.inf:
            continue
        if lo == -math.inf and hi == math.inf:
            out.append(f" {nm} free")
        elif lo == hi:
            out.append(f" {nm} = {_num(lo)}")
        else:
            los = "-inf" if lo == -math.inf else _num(lo)
            his = "+inf" if hi == math.inf else _num(hi)
            out.append(f" {los} <= {nm} <= {his}")
    out.append("End")
    return "\n".join(out) + "\n"


def write_cplex_lp(p: LpProblem, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_cplex_lp(p))


def _parse_float(tok: str) -> float:
    t = tok.lower()
    if t in ("inf", "+inf", "infinity", "+infinity"):
        return math.inf
    if t in ("-inf", "-infinity"):
        return -math.inf
    return float(tok)


def _parse_linear(text: str, index: dict) -> dict:
    toks = text.split()
    coeffs: dict = {}
    sign, coef = 1.0, None
    for tok in toks:
        if tok in ("+", "-"):
            sign = 1.0 if tok == "+" else -1.0
            continue
        try:
            coef = float(tok)
            continue
        except ValueError:
            pass
        if tok not in index:
            index[tok] = len(index)
        j = index[tok]
        coeffs[j] = coeffs.get(j, 0.0) + sign * (1.0 if coef is None else coef)
        sign, coef = 1.0, None
    return coeffs


def from_cplex_lp(text: str) -> LpProblem:
    """Parse the subset of CPLEX LP format written by :func:`to_cplex_lp`."""
    name = "problem"
    section = None
    chunks: dict = {"obj": [], "rows": [], "bounds": []}
    maximize = False
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("\\"):
            m = re.match(r"\\Problem name:\s*(.*)", line)
            if m:
                name = m.group(1).strip()
            continue
        if not line:
            continue
        low = line.lower()
        if low in ("minimize", "maximize", "minimum", "maximum", "min", "max"):
            section, maximize = "obj", low.startswith("max")
            continue
        if low in ("subject to", "such that", "st", "s.t."):
            section = "rows"
            continue
        if low == "bounds":
            section = "bounds"
            continue
        if low == "end":
            break
        if section == "rows" and re.match(r"^[^\s:]+:", line):
            chunks["rows"].append(line)
        elif section == "rows" and chunks["rows"]:
            chunks["rows"][-1] += " " + line
        elif section in ("obj", "bounds"):
            if section == "obj" and chunks["obj"]:
                chunks["obj"][-1] += " " + line
            else:
                chunks[section].append(line)
    index: dict = {}
    obj_text = chunks["obj"][0] if chunks["obj"] else ""
    if ":" in obj_text:
        obj_text = obj_text.split(":", 1)[1]
    obj = _parse_linear(obj_text, index)
    rows = []
    for row in chunks["rows"]:
        rname, body = row.split(":", 1)
        m = re.match(r"(.*?)(<=|>=|=<|=>|=|<|>)\s*(\S+)\s*$", body)
        if not m:
            raise ValidationError(f"cannot parse constraint {row!r}")
        sense = {"<": "<=", "=<": "<=", ">": ">=", "=>": ">="}.get(m.group(2), m.group(2))
        rows.append((rname.strip(), _parse_linear(m.group(1), index), sense, float(m.group(3))))
    bounds = {}
    for line in chunks["bounds"]:
        toks = line.split()
        if len(toks) == 2 and toks[1].lower() == "free":
            j = index.setdefault(toks[0], len(index))
            bounds[j] = (-math.inf, math.inf)
        elif len(toks) == 5 and toks[1] == "<=" and toks[3] == "<=":
            j = index.setdefault(toks[2], len(index))
            bounds[j] = (_parse_float(toks[0]), _parse_float(toks[4]))
        elif len(toks) == 3 and toks[1] in ("=", "<=", ">="):
            j = index.setdefault(toks[0], len(index))
            v = _parse_float(toks[2])
            lo, hi = bounds.get(j, (0.0, math.inf))
            bounds[j] = {"=": (v, v), "<=": (lo, v), ">=": (v, hi)}[toks[1]]
        else:
            raise ValidationError(f"cannot parse bound {line!r}")
    n = len(index)
    names = [None] * n
    for nm, j in index.items():
        names[j] = nm
    A = np.zeros((len(rows), n))
    for i, (_, coeffs, _, _) in enumerate(rows):
        for j, v in coeffs.items():
            A[i, j] = v
    c = np.zeros(n)
    for j, v in obj.items():
        c[j] = v
    lower = np.zeros(n)
    upper = np.full(n, math.inf)
    for j, (lo, hi) in bounds.items():
        lower[j], upper[j] = lo, hi
    return LpProblem(
        c, A, [r[2] for r in rows], [r[3] for r in rows], lower, upper, maximize,
        tuple(names), tuple(r[0] for r in rows), name,
    )


def read_cplex_lp(path) -> LpProblem:
    with open(path, encoding="utf-8") as fh:
        return from_cplex_lp(fh.read())
