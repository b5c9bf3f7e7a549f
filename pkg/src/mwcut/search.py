"""LP searches: discrete-sparc cutting schemes and worst-case mesh graphs.

Discrete search.  A discrete sparc fixes, for each of its k-1 slices, a grid
box [q/N, (q+1)/N] for the threshold; the terminal order is uniformly
random.  For every grid cell the LP bounds the density of 1,2-aligned
segments inside the cell by tau, treating a slice as capturing the whole
cell when its box lies entirely below the cell and ignoring captures by
slices that share the cell's box.  Minimizing tau over distributions gives
a certified upper bound on the scheme's maximum density.

Mesh search.  Over weights on the edges of the M-fold triangular mesh,
minimize the embedded volume subject to every 3-way cut costing at least
1, which is expressed through shortest-path distances in the planar dual.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .discrete import CellId, DiscreteDistribution, DiscreteSparc
from .errors import LpFailed, TooLarge, ValidationError
from .geometry import Alignment
from .graphs import MeshGraph, planar_dual_min_3cut
from .lp import LpBuilder, LpStatus, solve_lp
from .schemes import Discrete

MAX_SPARCS = 10**4
MAX_CONSTRAINTS = 2 * 10**4
MAX_MESH = 10


def sparc_grid(k: int, N: int) -> list:
    return [DiscreteSparc(q, N) for q in itertools.product(range(N), repeat=k - 1)]


def admissible_cells(k: int, N: int, sorted_tail: bool = True) -> list:
    """Cells that hold aligned segments of positive length, tail coordinates nondecreasing."""
    out = []
    for a in itertools.product(range(N), repeat=k):
        if sorted_tail and any(a[m] > a[m + 1] for m in range(2, k - 1)):
            continue
        c = CellId(a, N)
        if c.has_interior_segments():
            out.append(c)
    return out


def cell_coefficients(k: int, N: int, a, al: Alignment = Alignment(0, 1), order: Optional[tuple] = None) -> np.ndarray:
    """Upper bound on the density contributed by each discrete sparc inside cell ``a``.

    Returns an array over ``itertools.product(range(N), repeat=k-1)``.
    With ``order=None`` the terminal order is averaged over all k! orders.
    """
    qs = np.array(list(itertools.product(range(N), repeat=k - 1)), dtype=np.int64).reshape(-1, k - 1)
    a = np.asarray(a, dtype=np.int64)
    orders = list(itertools.permutations(range(k))) if order is None else [tuple(order)]
    coef = np.zeros(len(qs))
    for sigma in orders:
        pos = {t: m for m, t in enumerate(sigma)}
        # captured[:, m]: slice m lies wholly below the cell in its terminal's coordinate
        below = qs < a[list(sigma[: k - 1])][None, :]
        for l in (al.i, al.j):
            p = pos[l]
            if p > k - 2:
                continue
            alive = ~below[:, :p].any(axis=1) if p else np.ones(len(qs), dtype=bool)
            coef += (alive & (qs[:, p] == a[l])) * float(N)
    return coef / len(orders)


def build_discrete_lp(k: int, N: int):
    """The LP over sparc probabilities x_q and the density bound tau.

    Returns ``(problem, sparcs, cells)``.
    """
    if k < 3:
        raise ValidationError("discrete search needs k >= 3")
    if N ** (k - 1) > MAX_SPARCS:
        raise TooLarge(f"N^(k-1) = {N ** (k - 1)} sparcs exceeds {MAX_SPARCS}")
    cells = admissible_cells(k, N)
    if len(cells) + 1 > MAX_CONSTRAINTS:
        raise TooLarge(f"{len(cells)} cell constraints exceeds {MAX_CONSTRAINTS}")
    sparcs = sparc_grid(k, N)
    b = LpBuilder(f"discrete_k{k}_N{N}")
    xs = [b.add_var("x(" + ",".join(str(v) for v in s.q) + ")") for s in sparcs]
    tau = b.add_var("tau")
    b.add_constraint({x: 1.0 for x in xs}, "=", 1.0, name="total")
    for c in cells:
        coef = cell_coefficients(k, N, c.a)
        row = {xs[i]: float(v) for i, v in enumerate(coef) if v != 0}
        row[tau] = -1.0
        b.add_constraint(row, "<=", 0.0, name="cell(" + ",".join(str(v) for v in c.a) + ")")
    b.set_objective({tau: 1.0})
    return b.build(), sparcs, cells


def solve_discrete_search(k: int, N: int, prune: float = 1e-9) -> DiscreteDistribution:
    p, sparcs, _ = build_discrete_lp(k, N)
    s = solve_lp(p, rule="dantzig")
    if s.status is not LpStatus.OPTIMAL:
        raise LpFailed(s.status)
    probs = np.asarray(s.values[: len(sparcs)])
    keep = [(sp, float(v)) for sp, v in zip(sparcs, probs) if v >= prune]
    total = sum(v for _, v in keep)
    entries = tuple((sp, v / total) for sp, v in keep)
    return DiscreteDistribution(k, N, entries, float(s.values[len(sparcs)]))


def reconstruct_scheme(d: DiscreteDistribution, order: Optional[tuple] = None) -> Discrete:
    """Sampler for the distribution with a uniformly random terminal order (or a fixed one)."""
    return Discrete(d, order)


def distribution_vector(d: DiscreteDistribution) -> np.ndarray:
    """Probabilities laid out like :func:`cell_coefficients`."""
    v = np.zeros(d.N ** (d.k - 1))
    for s, p in d.entries:
        idx = 0
        for q in s.q:
            idx = idx * d.N + q
        v[idx] += p
    return v


def cell_density(d: DiscreteDistribution, a, al: Alignment = Alignment(0, 1), order: Optional[tuple] = None) -> float:
    """The LP's density bound for cell ``a`` under the given distribution."""
    return float(distribution_vector(d) @ cell_coefficients(d.k, d.N, a, al, order))


def max_cell_density(d: DiscreteDistribution, order: Optional[tuple] = None) -> float:
    """Largest cell bound over all cells and all alignments."""
    best = 0.0
    k = d.k
    for c in admissible_cells(k, d.N, sorted_tail=False):
        for i in range(k):
            for j in range(i + 1, k):
                best = max(best, cell_density(d, c.a, Alignment(i, j), order))
    return best


# --- mesh LP ---------------------------------------------------------------------


def build_mesh_lp(M: int, sources: str = "aux"):
    """LP over mesh edge weights w and dual distances d[x, y].

    ``sources="all"`` keeps a distance row for every dual node; ``"aux"``
    keeps only the three auxiliary nodes and states the three-path
    condition for a face f as d[A,f] + d[B,f] + d[C,f] >= 1 (distances in
    the dual are symmetric, so both give the same optimum).

    Returns ``(problem, mesh)``.
    """
    if M > MAX_MESH:
        raise TooLarge(f"mesh LP is limited to M <= {MAX_MESH}")
    if sources not in ("aux", "all"):
        raise ValidationError("sources must be 'aux' or 'all'")
    mesh = MeshGraph(M)
    n_dual = mesh.face_count + 3
    src = list(mesh.aux) if sources == "aux" else list(range(n_dual))
    b = LpBuilder(f"mesh_M{M}_{sources}")
    w = [b.add_var(f"w({u},{v})") for u, v in mesh.edges]
    d = {x: [b.add_var(f"d({x},{y})") for y in range(n_dual)] for x in src}
    for x in src:
        b.add_constraint({d[x][x]: 1.0}, "=", 0.0, name=f"self({x})")
        for e, (y, z) in enumerate(mesh.dual_edges):
            b.add_constraint({d[x][z]: 1.0, d[x][y]: -1.0, w[e]: -1.0}, "<=", 0.0, name=f"tri({x},{y},{z})")
            b.add_constraint({d[x][y]: 1.0, d[x][z]: -1.0, w[e]: -1.0}, "<=", 0.0, name=f"tri({x},{z},{y})")
    A, B, C = mesh.aux
    for X in mesh.aux:
        Y, Z = [t for t in mesh.aux if t != X]
        b.add_constraint({d[X][Y]: 1.0, d[X][Z]: 1.0}, ">=", 1.0, name=f"pair({X})")
    for f in range(mesh.face_count):
        if sources == "aux":
            row = {d[A][f]: 1.0, d[B][f]: 1.0, d[C][f]: 1.0}
        else:
            row = {d[f][A]: 1.0, d[f][B]: 1.0, d[f][C]: 1.0}
        b.add_constraint(row, ">=", 1.0, name=f"star({f})")
    # each mesh edge has length 1/M, so the volume is sum(w)/M
    b.set_objective({we: 1.0 / M for we in w})
    return b.build(), mesh


@dataclass(frozen=True)
class GapCertificate:
    M: int
    weights: tuple  # (u, v, w) per mesh edge, primal node ids
    W: float
    min_cut: float

    @property
    def gap_lower_bound(self) -> float:
        return 1.0 / self.W

    def mesh(self) -> MeshGraph:
        return MeshGraph(self.M, [w for _, _, w in self.weights])

    def to_dict(self) -> dict:
        return {"M": self.M, "W": self.W, "gap": self.gap_lower_bound, "min_cut": self.min_cut,
                "weights": [[u, v, w] for u, v, w in self.weights]}

    @classmethod
    def from_dict(cls, d: dict) -> "GapCertificate":
        return cls(int(d["M"]), tuple((int(u), int(v), float(w)) for u, v, w in d["weights"]),
                   float(d["W"]), float(d["min_cut"]))


def solve_mesh_lp(M: int, sources: str = "aux", return_solution: bool = False):
    p, mesh = build_mesh_lp(M, sources)
    s = solve_lp(p, rule="dantzig")
    if s.status is not LpStatus.OPTIMAL:
        raise LpFailed(s.status)
    ws = np.clip(np.asarray(s.values[: len(mesh.edges)]), 0.0, None)
    weighted = MeshGraph(M, [float(v) for v in ws])
    cut, _ = planar_dual_min_3cut(weighted)
    cert = GapCertificate(M, tuple((u, v, float(x)) for (u, v), x in zip(mesh.edges, ws)), float(s.objective_value), float(cut))
    if return_solution:
        return cert, p, s
    return cert


def save_certificate(c: GapCertificate, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(c.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_certificate(path) -> GapCertificate:
    with open(path, encoding="utf-8") as fh:
        return GapCertificate.from_dict(json.load(fh))
