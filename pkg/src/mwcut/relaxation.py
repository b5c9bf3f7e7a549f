"""Minimum-volume simplex embedding of a terminal graph.

Each node gets a point of the (k-1)-simplex, terminal i sits at vertex i,
and an edge costs its weight times its half-L1 length.  The optimum is a
lower bound on the minimum multiway cut.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import LpFailed, MissingPoint, ValidationError
from .geometry import Segment, SimplexPoint, alignment_of, decompose_aligned, half_l1_distance, make_point
from .graphs import WeightedGraph, format_number, parse_number
from .lp import LpBuilder, LpProblem, LpStatus, solve_lp


@dataclass(frozen=True)
class Embedding:
    points: tuple  # SimplexPoint per node, or None where unknown

    @property
    def k(self) -> int:
        return next(p.k for p in self.points if p is not None)

    def __getitem__(self, v) -> SimplexPoint:
        return self.points[v]

    def __len__(self):
        return len(self.points)


def check_embedding(g: WeightedGraph, emb: Embedding) -> None:
    if len(emb) < g.node_count or any(emb[v] is None for v in range(g.node_count)):
        raise MissingPoint("embedding lacks a point for some node")
    for v in range(g.node_count):
        if emb[v].k != g.k:
            raise ValidationError(f"node {v} embedded in the wrong simplex")
    for i, t in enumerate(g.terminals):
        if tuple(emb[t].coords) != tuple(1 if l == i else 0 for l in range(g.k)):
            raise ValidationError(f"terminal {i} is not at vertex {i}")


def terminal_embedding(g: WeightedGraph, labels) -> Embedding:
    """Place every node at the vertex of its label (an integral solution)."""
    return Embedding(tuple(SimplexPoint.vertex(int(x), g.k) for x in labels))


def volume(g: WeightedGraph, emb: Embedding):
    """Sum over edges of weight times embedded half-L1 length."""
    if len(emb) < g.node_count or any(emb[v] is None for v in range(g.node_count)):
        raise MissingPoint("embedding lacks a point for some node")
    return sum((w * half_l1_distance(emb[u], emb[v]) for u, v, w in g.edges), 0)


def build_embedding_lp(g: WeightedGraph) -> LpProblem:
    """LP over node coordinates y[v,l] and per-coordinate edge widths z[e,l]."""
    b = LpBuilder("embedding")
    k = g.k
    y = [[b.add_var(f"y({v},{l})") for l in range(k)] for v in range(g.node_count)]
    z = [[b.add_var(f"z({e},{l})") for l in range(k)] for e in range(g.edge_count)]
    for v in range(g.node_count):
        b.add_constraint({y[v][l]: 1.0 for l in range(k)}, "=", 1.0, name=f"sum({v})")
    for i, t in enumerate(g.terminals):
        for l in range(k):
            b.add_constraint({y[t][l]: 1.0}, "=", 1.0 if l == i else 0.0, name=f"term({i},{l})")
    for e, (u, v, _) in enumerate(g.edges):
        for l in range(k):
            b.add_constraint({z[e][l]: 1.0, y[u][l]: -1.0, y[v][l]: 1.0}, ">=", 0.0, name=f"zp({e},{l})")
            b.add_constraint({z[e][l]: 1.0, y[u][l]: 1.0, y[v][l]: -1.0}, ">=", 0.0, name=f"zm({e},{l})")
    obj = {}
    for e, (_, _, w) in enumerate(g.edges):
        for l in range(k):
            obj[z[e][l]] = 0.5 * float(w)
    b.set_objective(obj)
    return b.build()


def solve_relaxation(g: WeightedGraph, max_iterations: int = 200_000):
    """Optimal embedding and its volume (the LP objective)."""
    p = build_embedding_lp(g)
    s = solve_lp(p, max_iterations=max_iterations)
    if s.status is not LpStatus.OPTIMAL:
        raise LpFailed(s.status)
    k = g.k
    ys = np.asarray(s.values[: g.node_count * k]).reshape(g.node_count, k)
    ys = np.clip(ys, 0.0, None)
    ys = ys / ys.sum(axis=1, keepdims=True)
    points = [SimplexPoint(tuple(float(c) for c in row)) for row in ys]
    for i, t in enumerate(g.terminals):
        points[t] = SimplexPoint.vertex(i, k)
    return Embedding(tuple(points)), s.objective_value


@dataclass(frozen=True)
class AlignedEdge:
    u: int  # index into AlignedInstance.points
    v: int
    segment: Segment
    weight: object
    parent: int  # edge id in the base graph


@dataclass(frozen=True)
class AlignedInstance:
    graph: WeightedGraph
    points: tuple  # original nodes first, then path waypoints
    edges: tuple  # of AlignedEdge

    def total_weighted_length(self):
        return sum((e.weight * e.segment.length for e in self.edges), 0)


def align_embedding(g: WeightedGraph, emb: Embedding) -> AlignedInstance:
    """Replace each embedded edge by a path of aligned segments of equal total length."""
    check_embedding(g, emb)
    points = list(emb.points[: g.node_count])
    out = []
    for eid, (u, v, w) in enumerate(g.edges):
        pieces = decompose_aligned(Segment(emb[u], emb[v]))
        prev = u
        for n, seg in enumerate(pieces):
            if n == len(pieces) - 1:
                nxt = v
            else:
                points.append(seg.b)
                nxt = len(points) - 1
            out.append(AlignedEdge(prev, nxt, seg, w, eid))
            prev = nxt
    return AlignedInstance(g, tuple(points), tuple(out))


def is_aligned_instance_valid(inst: AlignedInstance, emb: Embedding, tol: float = 1e-9) -> bool:
    by_parent: dict = {}
    for e in inst.edges:
        if alignment_of(e.segment) is None:
            return False
        by_parent[e.parent] = by_parent.get(e.parent, 0) + e.segment.length
    for eid, (u, v, _) in enumerate(inst.graph.edges):
        want = half_l1_distance(emb[u], emb[v])
        got = by_parent.get(eid, 0)
        if abs(got - want) > tol:
            return False
    return True


# --- file format -------------------------------------------------------------


def embedding_to_text(emb: Embedding) -> str:
    lines = ["mwc-embedding 1", f"k {emb.k}"]
    for v, p in enumerate(emb.points):
        if p is not None:
            lines.append(f"point {v} " + " ".join(format_number(c) for c in p.coords))
    return "\n".join(lines) + "\n"


def embedding_from_text(text: str, node_count: Optional[int] = None) -> Embedding:
    k = None
    pts: dict = {}
    header = False
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if not header:
            if toks != ["mwc-embedding", "1"]:
                raise ValidationError(f"bad embedding header {line!r}")
            header = True
        elif toks[0] == "k":
            k = int(toks[1])
        elif toks[0] == "point":
            coords = [parse_number(t) for t in toks[2:]]
            if k is not None and len(coords) != k:
                raise ValidationError(f"point {toks[1]} has {len(coords)} coordinates, expected {k}")
            pts[int(toks[1])] = make_point(coords)
        else:
            raise ValidationError(f"cannot parse embedding line {line!r}")
    if k is None:
        raise ValidationError("embedding file is missing k")
    n = node_count if node_count is not None else (max(pts) + 1 if pts else 0)
    return Embedding(tuple(pts.get(v) for v in range(n)))


def save_embedding(emb: Embedding, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(embedding_to_text(emb))


def load_embedding(path, node_count: Optional[int] = None) -> Embedding:
    with open(path, encoding="utf-8") as fh:
        return embedding_from_text(fh.read(), node_count)
