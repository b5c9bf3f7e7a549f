"""Densities of cutting schemes: expected cuts per unit length of a segment.

Exact evaluators work pointwise: for an (i, j)-aligned segment short enough
that no breakpoint of the scheme falls inside it, the density is a linear
function along the segment, so the midpoint value is the segment density.
Longer segments are split at breakpoints first and averaged by length.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import BreakpointAtEvaluationPoint, DomainError, StraddlesCorner, ValidationError
from .geometry import Alignment, Segment, SimplexPoint, subdivide_at_thresholds
from .schemes import (
    CKR,
    BallCorner,
    Discrete,
    IcutCorner,
    IndependentUniform,
    Mixture,
    RngState,
    _check_aligned,
    is_symmetric,
    max_threads,
    sample_batch,
)

_BP_TOL = 1e-12


@dataclass(frozen=True)
class ThresholdCdf:
    """Piecewise-uniform threshold law on [0, 1].

    ``breakpoints`` runs from 0 to 1; ``densities[p]`` applies on
    [breakpoints[p], breakpoints[p+1]].  Mass beyond the total (if it is
    below 1) means the terminal never slices.
    """

    breakpoints: tuple
    densities: tuple

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        dens = tuple(float(d) for d in self.densities)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "densities", dens)
        if len(bp) != len(dens) + 1 or bp[0] != 0.0 or bp[-1] != 1.0:
            raise ValidationError("breakpoints must run from 0 to 1 with one density per piece")
        if any(b2 <= b1 for b1, b2 in zip(bp, bp[1:])):
            raise ValidationError("breakpoints must increase")
        if any(d < 0 for d in dens):
            raise ValidationError("densities must be nonnegative")
        mass = sum(d * (b2 - b1) for d, b1, b2 in zip(dens, bp, bp[1:]))
        if mass > 1 + 1e-12:
            raise ValidationError(f"total mass {mass} exceeds 1")
        cum = [0.0]
        for d, b1, b2 in zip(dens, bp, bp[1:]):
            cum.append(cum[-1] + d * (b2 - b1))
        object.__setattr__(self, "_cum", tuple(cum))

    @classmethod
    def uniform_on(cls, c: float) -> "ThresholdCdf":
        """Uniform on [0, c]; F(z) = min(z / c, 1)."""
        c = float(c)
        if c >= 1:
            return cls((0.0, 1.0), (1.0,))
        return cls((0.0, c, 1.0), (1.0 / c, 0.0))

    @classmethod
    def uniform(cls) -> "ThresholdCdf":
        return cls((0.0, 1.0), (1.0,))

    @classmethod
    def box(cls, lo: float, hi: float) -> "ThresholdCdf":
        """Uniform on [lo, hi]."""
        bp = [0.0] + [b for b in (lo, hi) if 0.0 < b < 1.0] + [1.0]
        dens = []
        for b1, b2 in zip(bp, bp[1:]):
            dens.append(1.0 / (hi - lo) if lo <= b1 and b2 <= hi else 0.0)
        return cls(tuple(bp), tuple(dens))

    def _piece(self, z: float) -> int:
        p = int(np.searchsorted(self.breakpoints, z, side="right")) - 1
        return min(max(p, 0), len(self.densities) - 1)

    def F(self, z: float) -> float:
        if z <= 0:
            return 0.0
        if z >= 1:
            return self._cum[-1]
        p = self._piece(z)
        return self._cum[p] + self.densities[p] * (z - self.breakpoints[p])

    def dF(self, z: float) -> float:
        """Density at z; raises when z sits on a jump of the density."""
        for p, b in enumerate(self.breakpoints[1:-1], start=1):
            if abs(z - b) <= _BP_TOL and self.densities[p - 1] != self.densities[p]:
                raise BreakpointAtEvaluationPoint(f"density jumps at {b}")
        return self.densities[self._piece(z)]

    def interior_breakpoints(self) -> list:
        return [b for p, b in enumerate(self.breakpoints[1:-1], start=1) if self.densities[p - 1] != self.densities[p]]


ICUT_CDF = ThresholdCdf.uniform_on(6 / 11)


# --- independent-threshold sparcs ----------------------------------------------


@lru_cache(maxsize=None)
def _perm_table(k: int):
    perms = np.array(list(itertools.permutations(range(k))), dtype=np.int64)
    pos = np.argsort(perms, axis=1)
    return perms, pos


def _slice_count(k: int, use_last_slice: bool) -> int:
    return k if use_last_slice else k - 1


def _normalized_esp(y: np.ndarray) -> np.ndarray:
    """a[p] = e_p(y) / C(n, p): mean of products over p-subsets of y."""
    n = len(y)
    a = np.zeros(n + 1)
    a[0] = 1.0
    for m, v in enumerate(y):
        # add variable m+1: a_p <- ((m+1-p) a_p + p v a_{p-1}) / (m+1)
        p = np.arange(1, m + 2)
        new = a.copy()
        new[1 : m + 2] = ((m + 1 - p) * a[1 : m + 2] + p * v * a[0 : m + 1]) / (m + 1)
        a = new
    return a


def exact_sparc_density(k: int, Fs, use_last_slice: bool, x, al: Alignment, method: str = "permutations") -> float:
    """Density at x of an independent-threshold sparc with a uniformly random order.

    ``Fs`` is one :class:`ThresholdCdf` or a list with one per terminal.
    ``method="permutations"`` sums over all k! orders; ``"symmetric"``
    averages over the position of each aligned terminal, O(k^2).
    """
    x = tuple(float(c) for c in (x.coords if isinstance(x, SimplexPoint) else x))
    if len(x) != k:
        raise ValidationError("point has the wrong dimension")
    if isinstance(Fs, ThresholdCdf):
        Fs = [Fs] * k
    S = _slice_count(k, use_last_slice)
    y = np.array([1.0 - Fs[h].F(x[h]) for h in range(k)])
    dens = {l: Fs[l].dF(x[l]) for l in (al.i, al.j)}
    if method == "permutations":
        if k > 10:
            raise ValidationError("permutation enumeration is limited to k <= 10")
        perms, pos = _perm_table(k)
        ys = y[perms]
        before = np.ones_like(ys)
        before[:, 1:] = np.cumprod(ys[:, :-1], axis=1)
        total = 0.0
        for l in (al.i, al.j):
            p = pos[:, l]
            ok = p < S
            vals = before[np.arange(len(perms)), p]
            total += dens[l] * float(vals[ok].sum()) / len(perms)
        return total
    if method == "symmetric":
        total = 0.0
        for l in (al.i, al.j):
            rest = np.delete(y, l)
            a = _normalized_esp(rest)
            total += dens[l] * float(a[:S].sum()) / k
        return total
    raise ValidationError(f"unknown method {method!r}")


# --- analytic functions for equal tails --------------------------------------------


def c_k(x1: float, x2: float, k: int, F: ThresholdCdf = ICUT_CDF, use_last_slice: bool = True) -> float:
    """Density at (x1, x2, c, ..., c), c = (1 - x1 - x2)/(k - 2), for the 1,2-alignment.

    Conditions on q, the position of the aligned terminal, and on whether
    the other aligned terminal is among its q predecessors.
    """
    if k < 3:
        raise DomainError("c_k needs k >= 3")
    if x1 < 0 or x2 < 0 or x1 + x2 > 1 + 1e-12:
        raise DomainError("need x1, x2 >= 0 and x1 + x2 <= 1")
    c = max(0.0, 1.0 - x1 - x2) / (k - 2)
    yc = 1.0 - F.F(c)
    top = k - 1 if use_last_slice else k - 2
    q = np.arange(top + 1, dtype=float)
    frac = q / (k - 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        pw = np.power(yc, q)
        pw1 = np.where(q >= 1, np.power(yc, np.maximum(q - 1, 0)), 0.0)

    def S(y_other):
        return float(np.sum(frac * pw1 * y_other + (1 - frac) * pw)) / k

    y1, y2 = 1.0 - F.F(x1), 1.0 - F.F(x2)
    return S(y2) * F.dF(x1) + S(y1) * F.dF(x2)


def _g1(a: float) -> float:
    """(1 - e^-a)/a."""
    if a < 1e-6:
        return 1 - a / 2 + a * a / 6
    return -math.expm1(-a) / a


def _g2(a: float) -> float:
    """(1 - (1 + a) e^-a)/a^2."""
    if a < 1e-6:
        return 0.5 - a / 3 + a * a / 8
    return (1 - (1 + a) * math.exp(-a)) / (a * a)


def _dg1(a: float) -> float:
    if a < 1e-4:
        return -0.5 + a / 3
    E = math.exp(-a)
    return (a * E - 1 + E) / (a * a)


def _dg2(a: float) -> float:
    if a < 1e-4:
        return -1 / 3 + a / 4
    E = math.exp(-a)
    return (a * a * E - 2 * (1 - (1 + a) * E)) / a**3


def c_inf(x1: float, x2: float, F: ThresholdCdf = ICUT_CDF) -> float:
    """Limit of c_k as k grows, with a = (1 - x1 - x2) F'(0)."""
    if x1 < 0 or x2 < 0 or x1 + x2 > 1 + 1e-12:
        raise DomainError("need x1, x2 >= 0 and x1 + x2 <= 1")
    a = max(0.0, 1.0 - x1 - x2) * F.dF(0.0)
    f1, f2 = F.dF(x1), F.dF(x2)
    return (f1 + f2) * _g1(a) - (f1 * F.F(x2) + f2 * F.F(x1)) * _g2(a)


def c_inf_case1(a: float, corner_at: float = 6 / 11) -> float:
    """c_inf with both aligned coordinates below the corner, as a function of a."""
    c = corner_at
    return (2 / c) * _g1(a) - (1 / c) * (1 / c - a) * _g2(a)


def c_inf_case1_derivative(a: float, corner_at: float = 6 / 11) -> float:
    c = corner_at
    return (2 / c) * _dg1(a) + (1 / c) * _g2(a) - (1 / c) * (1 / c - a) * _dg2(a)


def c_inf_case2(a: float, corner_at: float = 6 / 11) -> float:
    """c_inf with one aligned coordinate above the corner."""
    return (1 / corner_at) * (_g1(a) - _g2(a))


def _golden_max(f, lo, hi, tol=1e-12):
    inv = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - inv * (b - a), a + inv * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = f(d)
    m = (a + b) / 2
    return m, f(m)


def scan_max(f, lo: float, hi: float, step: float = 1e-4, refine: bool = True):
    """Maximum of f on [lo, hi]: grid search, then golden-section around the best node."""
    n = int(round((hi - lo) / step))
    grid = [lo + i * (hi - lo) / n for i in range(n + 1)]
    vals = [f(a) for a in grid]
    i = int(np.argmax(vals))
    if not refine:
        return grid[i], vals[i]
    a0, a1 = grid[max(i - 1, 0)], grid[min(i + 1, n)]
    a, v = _golden_max(f, a0, a1)
    return (a, v) if v >= vals[i] else (grid[i], vals[i])


def c_inf_case1_peak(corner_at: float = 6 / 11, step: float = 1e-4):
    """Location and value of the Case-1 maximum over a in [0, 1/corner_at]."""
    return scan_max(lambda a: c_inf_case1(a, corner_at), 0.0, 1.0 / corner_at, step)


def c3(x1: float, x2: float, F: ThresholdCdf = ICUT_CDF) -> float:
    """k = 3 density when the third coordinate is beyond every threshold."""
    if x1 < 0 or x2 < 0:
        raise DomainError("coordinates must be nonnegative")
    if F.F(1.0 - x1 - x2) < 1.0 - 1e-15:
        raise DomainError("c3 needs the third coordinate at or above every threshold")
    f1, f2 = F.dF(x1), F.dF(x2)
    y1, y2 = 1.0 - F.F(x1), 1.0 - F.F(x2)
    return (f1 * (2 + y2) + f2 * (2 + y1)) / 6


def d_bound(x1: float, x2: float, k: int, F: ThresholdCdf = ICUT_CDF) -> float:
    """Upper bound on the density over all tails: max of c_k and (when defined) c3."""
    best = c_k(x1, x2, k, F)
    try:
        best = max(best, c3(x1, x2, F))
    except DomainError:
        pass
    return best


# --- pointwise exact densities per scheme ------------------------------------------


def ckr_point_density(x, al: Alignment) -> float:
    """Single shared threshold, random order, k-1 slices."""
    k = len(x)
    total = 0.0
    for l in (al.i, al.j):
        B = sum(1 for h in range(k) if h != l and x[h] >= x[l])
        total += 1.0 / (B + 1) - (1.0 / k if B == 0 else 0.0)
    return total


def ball_corner_point_density(x, al: Alignment, ball_prob: float = 8 / 11) -> float:
    for l in (al.i, al.j):
        if abs(x[l] - 2 / 3) <= _BP_TOL:
            raise BreakpointAtEvaluationPoint("coordinate at 2/3")
    inside = sum(1 for l in (al.i, al.j) if x[l] < 2 / 3)
    beyond = sum(1 for l in (al.i, al.j) if x[l] > 2 / 3)
    return ball_prob * 0.75 * inside + (1 - ball_prob) * 2.0 * beyond


def corner_point_density(x, al: Alignment, corner_at: float, use_last_slice: bool) -> float:
    """Joint corner cut: all thresholds equal to one rho uniform on [corner_at, 1]."""
    k = len(x)
    per = 1.0 / (1.0 - corner_at)
    if not use_last_slice:
        per *= 1.0 - 1.0 / k
    total = 0.0
    for l in (al.i, al.j):
        if abs(x[l] - corner_at) <= _BP_TOL:
            raise StraddlesCorner(f"coordinate {l} sits on the corner boundary")
        if x[l] > corner_at:
            total += per
    return total


def combined_icut_corner_density(cfg: IcutCorner, x, al: Alignment, method: str = "symmetric") -> float:
    """Mixture of the independent-threshold sparc and the joint corner cut.

    ``x`` may be a point or an aligned segment; a segment must not straddle
    ``corner_at`` in either aligned coordinate.
    """
    if isinstance(x, Segment):
        for l in (al.i, al.j):
            lo, hi = x.projection(l)
            if lo < cfg.corner_at < hi:
                raise StraddlesCorner("segment straddles the corner boundary")
        x = x.midpoint()
    x = tuple(float(c) for c in (x.coords if isinstance(x, SimplexPoint) else x))
    F = ThresholdCdf.uniform_on(cfg.corner_at)
    for l in (al.i, al.j):
        if abs(x[l] - cfg.corner_at) <= _BP_TOL:
            raise StraddlesCorner(f"coordinate {l} sits on the corner boundary")
    icut = exact_sparc_density(cfg.k, F, cfg.use_last_slice, x, al, method=method) if cfg.icut_prob > 0 else 0.0
    corner = corner_point_density(x, al, cfg.corner_at, cfg.use_last_slice) if cfg.icut_prob < 1 else 0.0
    return cfg.icut_prob * icut + (1 - cfg.icut_prob) * corner


def discrete_point_density(cfg: Discrete, x, al: Alignment) -> float:
    """Exact density of a discrete-sparc scheme (k-1 slices, boxes of width 1/N)."""
    d = cfg.distribution
    k, N = d.k, d.N
    x = tuple(float(c) for c in x)
    for l in (al.i, al.j):
        v = x[l] * N
        if abs(v - round(v)) <= 1e-9 and 0 < round(v) < N:
            raise BreakpointAtEvaluationPoint(f"coordinate {l} on a grid line")
    if cfg.order is None:
        perms, pos = _perm_table(k)
    else:
        perms = np.array([cfg.order], dtype=np.int64)
        pos = np.argsort(perms, axis=1)
    x_arr = np.array(x)
    total = 0.0
    for s, p in d.entries:
        if p == 0:
            continue
        q = np.array(s.q + (N,), dtype=float)  # position k-1 never slices
        lo = q[None, :] / N  # (1, k) by position
        # threshold of terminal perms[r, m] is uniform on [q_m/N, (q_m+1)/N]
        xs = x_arr[perms]  # (P, k) by position
        Fv = np.clip((xs - lo) * N, 0.0, 1.0)
        Fv[:, k - 1] = 0.0
        fv = ((xs > lo) & (xs < lo + 1.0 / N)).astype(float) * N
        fv[:, k - 1] = 0.0
        ys = 1.0 - Fv
        before = np.ones_like(ys)
        before[:, 1:] = np.cumprod(ys[:, :-1], axis=1)
        rows = np.arange(len(perms))
        acc = 0.0
        for l in (al.i, al.j):
            m = pos[:, l]
            acc += float((fv[rows, m] * before[rows, m]).sum())
        total += p * acc / len(perms)
    return total


def has_exact_evaluator(cfg) -> bool:
    if isinstance(cfg, Mixture):
        return all(has_exact_evaluator(c) for _, c in cfg.components)
    return isinstance(cfg, (CKR, IndependentUniform, BallCorner, IcutCorner, Discrete))


def point_density(cfg, x, al: Alignment) -> float:
    """Exact density of ``cfg`` at point x for an (i, j)-aligned infinitesimal segment."""
    x = tuple(float(c) for c in (x.coords if isinstance(x, SimplexPoint) else x))
    if isinstance(cfg, CKR):
        return ckr_point_density(x, al)
    if isinstance(cfg, IndependentUniform):
        return exact_sparc_density(cfg.k, ThresholdCdf.uniform(), False, x, al, method="symmetric")
    if isinstance(cfg, BallCorner):
        # both forms satisfy the same marginal and ray-usage laws, hence the same density
        return ball_corner_point_density(x, al, cfg.ball_prob)
    if isinstance(cfg, IcutCorner):
        return combined_icut_corner_density(cfg, x, al)
    if isinstance(cfg, Discrete):
        return discrete_point_density(cfg, x, al)
    if isinstance(cfg, Mixture):
        return sum(w * point_density(c, x, al) for w, c in cfg.components)
    raise ValidationError(f"no exact evaluator for {cfg!r}")


def scheme_breakpoints(cfg) -> list:
    """Coordinate values at which the scheme's pointwise density may jump."""
    if isinstance(cfg, BallCorner):
        return [2 / 3]
    if isinstance(cfg, IcutCorner):
        return [cfg.corner_at]
    if isinstance(cfg, Discrete):
        N = cfg.distribution.N
        return [m / N for m in range(1, N)]
    if isinstance(cfg, Mixture):
        return sorted({b for _, c in cfg.components for b in scheme_breakpoints(c)})
    return []


def split_segment(cfg, e: Segment) -> list:
    """Pieces of e free of scheme breakpoints and of coordinate ties."""
    al = _check_aligned(e)
    k = e.k
    bps = scheme_breakpoints(cfg)
    cut_values = [[] for _ in range(k)]
    a = e.a.coords
    for l in (al.i, al.j):
        cut_values[l].extend(bps)
        cut_values[l].extend(a[h] for h in range(k) if h not in (al.i, al.j))
    cut_values[al.i].append((a[al.i] + a[al.j]) / 2)
    return subdivide_at_thresholds(e, cut_values)


def segment_density(cfg, e: Segment) -> float:
    """Exact density of an aligned segment (length-weighted over breakpoint-free pieces)."""
    al = _check_aligned(e)
    total_len = float(e.length)
    acc = 0.0
    for piece in split_segment(cfg, e):
        L = float(piece.length)
        if L <= 0:
            continue
        acc += L * point_density(cfg, piece.midpoint(), al)
    return acc / total_len


# --- Monte Carlo --------------------------------------------------------------------


@dataclass(frozen=True)
class DensityEstimate:
    mean: float
    stderr: float
    trials: int
    segment: Optional[Segment] = None
    method: str = "mc"


def mc_density(cfg, e: Segment, trials: int, rng: RngState, chunk: int = 1 << 17) -> DensityEstimate:
    """Average crossings per unit length over ``trials`` sampled cuts."""
    al = _check_aligned(e)
    if trials < 100:
        raise ValidationError("need at least 100 trials")
    a = np.array([float(c) for c in e.a.coords])
    b = np.array([float(c) for c in e.b.coords])
    L = float(e.length)
    s1 = 0.0
    s2 = 0.0
    done = 0
    while done < trials:
        T = min(chunk, trials - done)
        c = sample_batch(cfg, rng, T).crossings(a, b, al).astype(float)
        s1 += c.sum()
        s2 += (c * c).sum()
        done += T
    mean = s1 / trials
    var = max(s2 / trials - mean * mean, 0.0) * trials / (trials - 1)
    return DensityEstimate(float(mean / L), math.sqrt(var / trials) / L, trials, e, "mc")


# --- scans ---------------------------------------------------------------------------


def _compositions(total: int, slots: int):
    if slots == 1:
        yield (total,)
        return
    for v in range(total + 1):
        for rest in _compositions(total - v, slots - 1):
            yield (v,) + rest


def _nondecreasing(total: int, slots: int, floor: int = 0):
    if slots == 0:
        if total == 0:
            yield ()
        return
    for v in range(floor, total // slots + 1):
        for rest in _nondecreasing(total - v, slots - 1, v):
            yield (v,) + rest


def grid_points(k: int, R: int, sorted_tail: bool = False):
    """Integer vectors of length k summing to R (optionally with nondecreasing x_2..x_{k-1})."""
    if not sorted_tail or k <= 3:
        yield from _compositions(R, k)
        return
    for a0 in range(R + 1):
        for a1 in range(R - a0 + 1):
            for tail in _nondecreasing(R - a0 - a1, k - 2):
                yield (a0, a1) + tail


def centered_segment(center, al: Alignment, eps: float) -> Optional[Segment]:
    """Aligned segment of length eps through ``center``, shifted to stay in the simplex."""
    x = [float(c) for c in center]
    s = x[al.i] + x[al.j]
    if s < eps:
        return None
    h = eps / 2
    xi = min(max(x[al.i], h), s - h)
    a = list(x)
    b = list(x)
    a[al.i], a[al.j] = xi - h, s - xi + h
    b[al.i], b[al.j] = xi + h, s - xi - h
    return Segment(SimplexPoint(tuple(a)), SimplexPoint(tuple(b)))


@dataclass(frozen=True)
class DensityEntry:
    alignment: Alignment
    center: tuple
    mean: float
    stderr: float
    method: str


@dataclass(frozen=True)
class DensityReport:
    k: int
    entries: tuple

    @property
    def max_density(self) -> float:
        return max(e.mean for e in self.entries)

    @property
    def argmax(self) -> DensityEntry:
        return max(self.entries, key=lambda e: e.mean)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["alignment"] + [f"x{l}" for l in range(self.k)] + ["mean", "stderr", "method"])
        for e in self.entries:
            w.writerow([f"{e.alignment.i}-{e.alignment.j}"] + [repr(float(c)) for c in e.center]
                       + [repr(float(e.mean)), repr(float(e.stderr)), e.method])
        return buf.getvalue()


def scan_segments(k: int, grid_res: int, eps: float, symmetric: bool):
    """(alignment, center, segment) triples for every grid point and alignment."""
    alignments = [Alignment(0, 1)] if symmetric else [Alignment(i, j) for i in range(k) for j in range(i + 1, k)]
    out = []
    for comp in grid_points(k, grid_res, sorted_tail=symmetric):
        center = tuple(c / grid_res for c in comp)
        for al in alignments:
            seg = centered_segment(center, al, eps)
            if seg is not None:
                out.append((al, center, seg))
    return out


def max_density_scan(cfg, k: int, grid_res: int, eps: float, trials: int = 0,
                     rng: Optional[RngState] = None, method: str = "auto") -> DensityReport:
    """Density of short aligned segments centered at every point of a barycentric grid.

    ``method="auto"`` uses the exact evaluator when the scheme has one and
    Monte Carlo (segment ``n`` drawing from ``rng.spawn(n)``) otherwise.
    """
    if grid_res < 4:
        raise ValidationError("grid_res must be >= 4")
    if eps > 1 / (4 * grid_res):
        raise ValidationError("eps must be at most 1/(4 grid_res)")
    if cfg.k != k:
        raise ValidationError(f"scheme has k={cfg.k}, scan asked for k={k}")
    if method == "auto":
        method = "exact" if has_exact_evaluator(cfg) else "mc"
    if method not in ("exact", "mc"):
        raise ValidationError(f"unknown method {method!r}")
    segs = scan_segments(k, grid_res, eps, is_symmetric(cfg))
    if method == "exact":
        entries = [DensityEntry(al, c, segment_density(cfg, s), 0.0, "exact") for al, c, s in segs]
    else:
        if rng is None:
            rng = RngState(0)

        def one(n):
            al, c, s = segs[n]
            est = mc_density(cfg, s, trials, rng.spawn(n))
            return DensityEntry(al, c, est.mean, est.stderr, "mc")

        workers = min(max_threads(), len(segs)) or 1
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as ex:
                entries = list(ex.map(one, range(len(segs))))
        else:
            entries = [one(n) for n in range(len(segs))]
    return DensityReport(k, tuple(entries))
