"""Points and segments of the probability simplex.

Coordinates are barycentric: a point of the k-simplex is a vector of k
nonnegative numbers summing to one, and terminal ``i`` sits at the vertex
with ``coords[i] == 1``.  Distances are half the L1 norm, so two distinct
vertices are at distance 1.

Every routine accepts either exact rationals (``fractions.Fraction`` or
``int``) or floats.  Exact inputs produce exact outputs; any float in the
input switches the computation to floating point with the tolerances below.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Optional, Sequence

from .errors import (
    DimensionMismatch,
    NegativeCoordinate,
    SumNotOne,
    UnalignedSegment,
    ValidationError,
    ZeroLengthSegment,
)

SIMPLEX_TOL = 1e-9
ALIGN_TOL = 1e-12


def is_exact(values: Iterable) -> bool:
    return all(isinstance(v, Rational) for v in values)


@dataclass(frozen=True)
class SimplexPoint:
    coords: tuple

    @property
    def k(self) -> int:
        return len(self.coords)

    @property
    def exact(self) -> bool:
        return is_exact(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def as_float(self) -> tuple:
        return tuple(float(c) for c in self.coords)

    @classmethod
    def vertex(cls, i: int, k: int) -> "SimplexPoint":
        return cls(tuple(1 if l == i else 0 for l in range(k)))


def make_point(coords: Sequence, *, tol: float = SIMPLEX_TOL) -> SimplexPoint:
    """Validate ``coords`` as a point of the simplex.

    Exact coordinates must be nonnegative and sum to exactly 1; float
    coordinates may miss either condition by at most ``tol``.
    """
    coords = tuple(coords)
    if len(coords) < 2:
        raise ValidationError("a simplex point needs at least 2 coordinates")
    if is_exact(coords):
        coords = tuple(Fraction(c) for c in coords)
        if any(c < 0 for c in coords):
            raise NegativeCoordinate(f"negative coordinate in {coords}")
        if sum(coords) != 1:
            raise SumNotOne(f"coordinates sum to {sum(coords)}")
        return SimplexPoint(coords)
    coords = tuple(float(c) for c in coords)
    if any(c < -tol for c in coords):
        raise NegativeCoordinate(f"negative coordinate in {coords}")
    if abs(sum(coords) - 1.0) > tol:
        raise SumNotOne(f"coordinates sum to {sum(coords)!r}")
    return SimplexPoint(coords)


def _check_same_k(p: SimplexPoint, q: SimplexPoint) -> None:
    if p.k != q.k:
        raise DimensionMismatch(f"points live in different simplices ({p.k} vs {q.k})")


def half_l1_distance(p: SimplexPoint, q: SimplexPoint):
    _check_same_k(p, q)
    total = sum(abs(a - b) for a, b in zip(p.coords, q.coords))
    return total / 2


@dataclass(frozen=True)
class Alignment:
    """The segment is parallel to the simplex edge between terminals i and j."""

    i: int
    j: int

    def __post_init__(self):
        if not 0 <= self.i < self.j:
            raise ValidationError(f"alignment needs 0 <= i < j, got ({self.i}, {self.j})")

    def __iter__(self):
        return iter((self.i, self.j))


@dataclass(frozen=True)
class Segment:
    a: SimplexPoint
    b: SimplexPoint

    def __post_init__(self):
        _check_same_k(self.a, self.b)

    @property
    def k(self) -> int:
        return self.a.k

    @property
    def exact(self) -> bool:
        return self.a.exact and self.b.exact

    def projection(self, l: int) -> tuple:
        """The interval ``e_l`` of values taken by coordinate ``l``."""
        x, y = self.a.coords[l], self.b.coords[l]
        return (x, y) if x <= y else (y, x)

    def width(self, l: int):
        lo, hi = self.projection(l)
        return hi - lo

    @property
    def length(self):
        return half_l1_distance(self.a, self.b)

    def point_at(self, t) -> SimplexPoint:
        """Point at parameter ``t`` in [0, 1] along the segment."""
        return SimplexPoint(tuple(x + t * (y - x) for x, y in zip(self.a.coords, self.b.coords)))

    def midpoint(self) -> SimplexPoint:
        return self.point_at(Fraction(1, 2) if self.exact else 0.5)


def alignment_of(e: Segment, *, tol: float = ALIGN_TOL) -> Optional[Alignment]:
    """Return the pair (i, j) the segment is parallel to, or ``None``."""
    length = e.length
    exact = e.exact
    if (length == 0) if exact else (length <= tol):
        raise ZeroLengthSegment("alignment is undefined for a zero-length segment")
    moving = []
    for l in range(e.k):
        w = e.width(l)
        if (w != 0) if exact else (w > tol):
            moving.append((l, w))
    if len(moving) != 2:
        return None
    (i, wi), (j, wj) = moving
    if exact:
        ok = wi == length and wj == length
    else:
        ok = abs(wi - length) <= tol and abs(wj - length) <= tol
    return Alignment(i, j) if ok else None


def decompose_aligned(e: Segment, *, tol: float = ALIGN_TOL) -> list:
    """Split ``e`` into at most k-1 aligned pieces forming a path of equal length.

    Greedy rule: move mass from the lowest-index coordinate that must
    decrease to the lowest-index coordinate that must increase, by the
    smaller of the two remaining amounts.
    """
    exact = e.exact
    zero = 0 if exact else tol
    delta = [y - x for x, y in zip(e.a.coords, e.b.coords)]
    if all(abs(d) <= zero for d in delta):
        return []
    current = list(e.a.coords)
    pieces = []
    while True:
        up = next((l for l, d in enumerate(delta) if d > zero), None)
        down = next((l for l, d in enumerate(delta) if d < -zero), None)
        if up is None or down is None:
            break
        step = min(delta[up], -delta[down])
        nxt = list(current)
        nxt[up] += step
        nxt[down] -= step
        delta[up] -= step
        delta[down] += step
        pieces.append([tuple(current), tuple(nxt)])
        current = nxt
    # float residue: pin the path end to the true endpoint
    pieces[-1][1] = e.b.coords
    return [Segment(SimplexPoint(s), SimplexPoint(t)) for s, t in pieces]


def subdivide_at_thresholds(e: Segment, cut_values: Sequence[Iterable]) -> list:
    """Split an aligned segment wherever a coordinate crosses one of its cut values.

    ``cut_values[l]`` lists the threshold values for coordinate ``l``.  The
    returned pieces are consecutive, and no piece has a threshold in the
    interior of any of its projections.
    """
    al = alignment_of(e)
    if al is None:
        raise UnalignedSegment("only aligned segments can be subdivided")
    if len(cut_values) != e.k:
        raise DimensionMismatch("need one list of cut values per coordinate")
    exact = e.exact
    ts = set()
    for l in al:
        x, y = e.a.coords[l], e.b.coords[l]
        for v in cut_values[l]:
            if exact:
                v = Fraction(v)
            lo, hi = min(x, y), max(x, y)
            if lo < v < hi:
                ts.add((v - x) / (y - x))
    if not ts:
        return [e]
    ts = sorted(ts)
    if not exact:
        # float round-off can split one crossing into near-duplicates
        merged = []
        for t in ts:
            if t > ALIGN_TOL and t < 1 - ALIGN_TOL and (not merged or t - merged[-1] > ALIGN_TOL):
                merged.append(t)
        ts = merged
        if not ts:
            return [e]
    cuts = [0] + ts + [1]
    points = [e.a] + [e.point_at(t) for t in cuts[1:-1]] + [e.b]
    return [Segment(p, q) for p, q in zip(points, points[1:])]
