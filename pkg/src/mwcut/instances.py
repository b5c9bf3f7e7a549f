"""The lower-bound family G_N and a few small named graphs.

G_N lives on the triangular grid of spacing 1/(3N).  For every pair of
terminals (i, j) with third terminal l it overlays paths p(i, j, m): from
vertex i straight towards vertex l for m grid steps, then parallel to side
ij for 3N - m steps, then straight to vertex j.  There are N copies of the
side path (m = 0) and one path for each m = 1..2N.  An edge's weight is the
number of paths running over it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import TooLarge, ValidationError
from .geometry import SimplexPoint
from .graphs import MeshGraph, WeightedGraph, brute_force_min_cut, is_multiway_cut, planar_dual_min_3cut
from .relaxation import Embedding, volume

MAX_VERIFY_N = 30


@dataclass(frozen=True)
class GridPath:
    i: int
    j: int
    m: int  # offset towards the third terminal, in grid steps
    nodes: tuple  # integer triples visited, one grid step apart

    @property
    def steps(self) -> int:
        return len(self.nodes) - 1


@dataclass(frozen=True)
class LowerBoundInstance:
    N: int
    mesh: MeshGraph
    graph: WeightedGraph  # mesh nodes, zero-weight edges omitted
    embedding: Embedding
    volume: Fraction
    paths: tuple


def _walk(start, src, dst, steps):
    """Grid nodes from ``start`` moving ``steps`` units from coordinate src to dst."""
    out = []
    cur = list(start)
    for _ in range(steps):
        cur[src] -= 1
        cur[dst] += 1
        out.append(tuple(cur))
    return out


def grid_path(M: int, i: int, j: int, m: int) -> GridPath:
    l = 3 - i - j
    start = tuple(M if t == i else 0 for t in range(3))
    nodes = [start]
    nodes += _walk(nodes[-1], i, l, m)
    nodes += _walk(nodes[-1], i, j, M - m)
    nodes += _walk(nodes[-1], l, j, m)
    return GridPath(i, j, m, tuple(nodes))


def generate_gn(N: int) -> LowerBoundInstance:
    if N < 1:
        raise ValidationError("G_N needs N >= 1")
    M = 3 * N
    mesh = MeshGraph(M)
    counts = [0] * len(mesh.edges)
    paths = []
    for i, j in ((0, 1), (0, 2), (1, 2)):
        specs = [0] * N + list(range(1, 2 * N + 1))
        for m in specs:
            p = grid_path(M, i, j, m)
            paths.append(p)
            for a, b in zip(p.nodes, p.nodes[1:]):
                counts[mesh.edge_index[(mesh.node_index[a], mesh.node_index[b])]] += 1
    mesh = mesh.with_weights(counts)
    graph = mesh.to_weighted_graph(drop_zero=True)
    emb = Embedding(tuple(SimplexPoint(mesh.point(v)) for v in range(len(mesh.nodes))))
    vol = volume(graph, emb)
    return LowerBoundInstance(N, mesh, graph, emb, Fraction(vol), tuple(paths))


@dataclass(frozen=True)
class GnReport:
    N: int
    volume: Fraction
    min_cut: int
    ratio: Fraction
    witness_cost: object
    witness_valid: bool


def verify_gn(N: int) -> GnReport:
    """Volume, exact minimum 3-way cut and integrality ratio of G_N."""
    if N > MAX_VERIFY_N:
        raise TooLarge(f"verify_gn is limited to N <= {MAX_VERIFY_N}")
    inst = generate_gn(N)
    best, witness = planar_dual_min_3cut(inst.mesh)
    full = inst.mesh.to_weighted_graph()
    wcost = sum(inst.mesh.weights[e] for e in witness.edges)
    valid = is_multiway_cut(full, witness.edges)
    if N == 1:
        bf, _ = brute_force_min_cut(inst.graph)
        if bf != best:
            raise AssertionError(f"planar dual ({best}) and brute force ({bf}) disagree")
    return GnReport(N, inst.volume, best, Fraction(best) / inst.volume, wcost, valid)


def triangle_graph(weight=1) -> WeightedGraph:
    return WeightedGraph(3, 3, (0, 1, 2), ((0, 1, weight), (1, 2, weight), (0, 2, weight)))


def star_graph(k: int = 3, weight=1) -> WeightedGraph:
    """Center node 0 joined to k terminal leaves 1..k."""
    return WeightedGraph(k, k + 1, tuple(range(1, k + 1)), tuple((0, t, weight) for t in range(1, k + 1)))
