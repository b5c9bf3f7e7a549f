"""Discrete sparcs on an N-grid and distributions over them."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import InvalidConfig, ValidationError


@dataclass(frozen=True)
class DiscreteSparc:
    """Slice ``m`` (m = 0..k-2) is drawn uniformly from [q[m]/N, (q[m]+1)/N]."""

    q: tuple
    N: int

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(int(x) for x in self.q))
        if self.N < 1:
            raise ValidationError("grid size N must be positive")
        if any(not 0 <= x < self.N for x in self.q):
            raise ValidationError(f"slice cells {self.q} outside [0, {self.N - 1}]")


@dataclass(frozen=True)
class CellId:
    """Grid box {x : a_l/N <= x_l <= (a_l+1)/N}."""

    a: tuple
    N: int

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(x) for x in self.a))
        if any(not 0 <= x < self.N for x in self.a):
            raise ValidationError(f"cell {self.a} outside the grid")

    def meets_simplex(self) -> bool:
        s = sum(self.a)
        return s <= self.N <= s + len(self.a)

    def has_interior_segments(self) -> bool:
        """True iff the cell contains aligned segments of positive length."""
        s = sum(self.a)
        return self.N - len(self.a) < s < self.N


@dataclass(frozen=True)
class DiscreteDistribution:
    k: int
    N: int
    entries: tuple  # of (DiscreteSparc, probability)
    bound: float = math.nan

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple((s, float(p)) for s, p in self.entries))
        if self.k < 2:
            raise InvalidConfig("need k >= 2")
        if not self.entries:
            raise InvalidConfig("distribution has no entries")
        for s, p in self.entries:
            if len(s.q) != self.k - 1 or s.N != self.N:
                raise InvalidConfig(f"sparc {s.q} does not match k={self.k}, N={self.N}")
            if p < 0:
                raise InvalidConfig("negative probability")
        total = sum(p for _, p in self.entries)
        if abs(total - 1.0) > 1e-9:
            raise InvalidConfig(f"probabilities sum to {total!r}")

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "N": self.N,
            "bound": None if math.isnan(self.bound) else self.bound,
            "entries": [{"q": list(s.q), "p": p} for s, p in self.entries],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DiscreteDistribution":
        try:
            k, N = int(d["k"]), int(d["N"])
            entries = tuple((DiscreteSparc(tuple(e["q"]), N), float(e["p"])) for e in d["entries"])
        except (KeyError, TypeError) as exc:
            raise InvalidConfig(f"malformed distribution: {exc}") from exc
        bound = d.get("bound")
        return cls(k, N, entries, math.nan if bound is None else float(bound))

    @classmethod
    def point_mass(cls, q, N: int) -> "DiscreteDistribution":
        return cls(len(q) + 1, N, ((DiscreteSparc(tuple(q), N), 1.0),))


def save_distribution(d: DiscreteDistribution, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(d.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_distribution(path) -> DiscreteDistribution:
    with open(path, encoding="utf-8") as fh:
        return DiscreteDistribution.from_dict(json.load(fh))
