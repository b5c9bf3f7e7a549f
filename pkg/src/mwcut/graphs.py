"""Terminal graphs, k-way cuts as labelings, and exact min-cut oracles."""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable

import numpy as np

from .errors import (
    InvalidLabeling,
    NegativeWeight,
    TooLarge,
    UnknownEdge,
    ValidationError,
)

BRUTE_FORCE_LIMIT = 10**7


def _check_weight(w):
    if isinstance(w, bool) or not isinstance(w, (Rational, float, np.floating)):
        raise ValidationError(f"edge weight must be a number, got {w!r}")
    if isinstance(w, float) and not math.isfinite(w):
        raise ValidationError("edge weights must be finite")
    if w < 0:
        raise NegativeWeight(f"negative edge weight {w}")


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph with k terminals; ``terminals[i]`` is the node of terminal i."""

    k: int
    node_count: int
    terminals: tuple
    edges: tuple  # of (u, v, weight)

    def __post_init__(self):
        object.__setattr__(self, "terminals", tuple(int(t) for t in self.terminals))
        object.__setattr__(self, "edges", tuple((int(u), int(v), w) for u, v, w in self.edges))
        if self.k < 2:
            raise ValidationError("need at least 2 terminals")
        if len(self.terminals) != self.k:
            raise ValidationError(f"expected {self.k} terminals, got {len(self.terminals)}")
        if len(set(self.terminals)) != self.k:
            raise ValidationError("terminals must be distinct")
        for t in self.terminals:
            if not 0 <= t < self.node_count:
                raise ValidationError(f"terminal {t} out of range")
        for u, v, w in self.edges:
            if u == v:
                raise ValidationError(f"self-loop at node {u}")
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise ValidationError(f"edge ({u}, {v}) has an endpoint out of range")
            _check_weight(w)

    @property
    def exact(self) -> bool:
        return all(isinstance(w, Rational) for _, _, w in self.edges)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def non_terminals(self) -> list:
        ts = set(self.terminals)
        return [v for v in range(self.node_count) if v not in ts]

    def endpoints(self) -> tuple:
        """Arrays (us, vs) of edge endpoints."""
        us = np.array([e[0] for e in self.edges], dtype=np.int64)
        vs = np.array([e[1] for e in self.edges], dtype=np.int64)
        return us, vs


@dataclass(frozen=True)
class Labeling:
    """A k-way cut as a node partition: ``label[v]`` is the terminal owning v."""

    label: tuple

    def __post_init__(self):
        object.__setattr__(self, "label", tuple(int(x) for x in self.label))

    def __getitem__(self, v):
        return self.label[v]

    def __len__(self):
        return len(self.label)


def check_labeling(g: WeightedGraph, lab: Labeling) -> None:
    if len(lab) != g.node_count:
        raise InvalidLabeling(f"labeling has {len(lab)} entries for {g.node_count} nodes")
    for x in lab.label:
        if not 0 <= x < g.k:
            raise InvalidLabeling(f"label {x} outside [0, {g.k})")
    for i, t in enumerate(g.terminals):
        if lab[t] != i:
            raise InvalidLabeling(f"terminal {i} (node {t}) labeled {lab[t]}")


def cut_cost(g: WeightedGraph, lab: Labeling):
    """Total weight of edges whose endpoints carry different labels."""
    check_labeling(g, lab)
    return sum((w for u, v, w in g.edges if lab[u] != lab[v]), 0)


def cut_edges(g: WeightedGraph, lab: Labeling) -> list:
    check_labeling(g, lab)
    return [i for i, (u, v, _) in enumerate(g.edges) if lab[u] != lab[v]]


class DisjointSet:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


def is_multiway_cut(g: WeightedGraph, edge_subset: Iterable[int]) -> bool:
    """True iff deleting the given edge indices separates every pair of terminals."""
    removed = set()
    for i in edge_subset:
        if isinstance(i, bool) or not isinstance(i, (int, np.integer)) or not 0 <= i < g.edge_count:
            raise UnknownEdge(f"edge {i!r} is not an edge of the graph")
        removed.add(int(i))
    ds = DisjointSet(g.node_count)
    for i, (u, v, _) in enumerate(g.edges):
        if i not in removed:
            ds.union(u, v)
    roots = {ds.find(t) for t in g.terminals}
    return len(roots) == g.k


def _integer_weights(g: WeightedGraph):
    """Exact weights scaled to a common integer denominator, or None on overflow."""
    ws = [Fraction(w) for _, _, w in g.edges]
    den = 1
    for w in ws:
        den = den * w.denominator // math.gcd(den, w.denominator)
    ints = [int(w * den) for w in ws]
    if sum(ints) >= 2**62:
        return None, den
    return np.array(ints, dtype=np.int64), den


def brute_force_min_cut(g: WeightedGraph, chunk: int = 1 << 18):
    """Minimum cut over all labelings of the non-terminal nodes.

    Labelings are scanned in lexicographic order of the full label vector, so
    among tied minima the lexicographically smallest one is returned.  Exact
    weights are compared exactly (scaled to integers).
    """
    free = g.non_terminals()
    n_free = len(free)
    total = g.k**n_free
    if total > BRUTE_FORCE_LIMIT:
        raise TooLarge(f"{g.k}^{n_free} labelings exceeds {BRUTE_FORCE_LIMIT}")
    base = np.zeros(g.node_count, dtype=np.int64)
    for i, t in enumerate(g.terminals):
        base[t] = i
    us, vs = g.endpoints()
    exact = g.exact
    iw = None
    if exact:
        iw, den = _integer_weights(g)
        if iw is None:
            # scaled weights overflow int64: fall back to exact Python arithmetic
            return _exact_brute_force(g)
    else:
        fw = np.array([float(w) for _, _, w in g.edges])
        tol = 1e-9 * max(1.0, float(fw.sum()))
    best_cost = None
    best_idx = -1
    free_arr = np.array(free, dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        labs = np.broadcast_to(base, (len(idx), g.node_count)).copy()
        rem = idx.copy()
        # most significant digit goes to the lowest-numbered free node
        for pos in range(n_free - 1, -1, -1):
            labs[:, free_arr[pos]] = rem % g.k
            rem //= g.k
        diff = labs[:, us] != labs[:, vs]
        if iw is not None:
            costs = diff.astype(np.int64) @ iw if len(iw) else np.zeros(len(idx), dtype=np.int64)
            j = int(np.argmin(costs))
            if best_cost is None or costs[j] < best_cost:
                best_cost, best_idx = costs[j], int(idx[j])
        else:
            costs = diff.astype(float) @ fw if len(fw) else np.zeros(len(idx))
            m = costs.min()
            if best_cost is None or m < best_cost - tol:
                j = int(np.nonzero(costs <= m + tol)[0][0])
                best_cost, best_idx = m, int(idx[j])
    lab = base.copy()
    rem = best_idx
    for pos in range(n_free - 1, -1, -1):
        lab[free[pos]] = rem % g.k
        rem //= g.k
    labeling = Labeling(tuple(int(x) for x in lab))
    return cut_cost(g, labeling), labeling


def _exact_brute_force(g: WeightedGraph):
    free = g.non_terminals()
    lab = [0] * g.node_count
    for i, t in enumerate(g.terminals):
        lab[t] = i
    best = None
    for combo in itertools.product(range(g.k), repeat=len(free)):
        for v, x in zip(free, combo):
            lab[v] = x
        c = sum((w for u, v, w in g.edges if lab[u] != lab[v]), 0)
        if best is None or c < best[0]:
            best = (c, tuple(lab))
    return best[0], Labeling(best[1])


# --- triangular mesh and its planar dual ------------------------------------

_UNITS = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def _add(p, q, s=1):
    return tuple(a + s * b for a, b in zip(p, q))


class MeshGraph:
    """The M-fold triangular subdivision of the 3-simplex with edge weights.

    Primal nodes are integer triples (a, b, c) with a+b+c = M (the point
    (a, b, c)/M).  Terminal i is the node M*e_i.  The dual has one node per
    triangular face plus one auxiliary node per side; auxiliary node l sits
    beyond the side x_l = 0.  Every primal edge is crossed by exactly one
    dual edge: between its two faces, or between its single face and the
    auxiliary node of the side it lies on.
    """

    def __init__(self, M: int, weights=None):
        if M < 1:
            raise ValidationError("mesh needs M >= 1")
        self.M = M
        self.nodes = [(a, b, M - a - b) for a in range(M + 1) for b in range(M - a + 1)]
        self.node_index = {p: i for i, p in enumerate(self.nodes)}
        self.terminals = tuple(self.node_index[tuple(M if l == i else 0 for l in range(3))] for i in range(3))
        edges = []
        for p in self.nodes:
            for i, j in ((0, 1), (0, 2), (1, 2)):
                # step from p moving one unit from coordinate j to i
                if p[j] > 0:
                    q = list(p)
                    q[i] += 1
                    q[j] -= 1
                    edges.append((self.node_index[p], self.node_index[tuple(q)]))
        self.edges = edges
        self.edge_index = {}
        for e, (u, v) in enumerate(edges):
            self.edge_index[(u, v)] = e
            self.edge_index[(v, u)] = e
        self._build_dual()
        if weights is None:
            weights = [1] * len(edges)
        elif callable(weights):
            weights = [weights(self.nodes[u], self.nodes[v]) for u, v in edges]
        weights = list(weights)
        if len(weights) != len(edges):
            raise ValidationError(f"expected {len(edges)} weights, got {len(weights)}")
        for w in weights:
            _check_weight(w)
        self.weights = weights

    def _build_dual(self):
        M = self.M
        faces = []
        for a in range(M):
            for b in range(M - a):
                w = (a, b, M - 1 - a - b)
                faces.append(("up", w))
        for a in range(1, M + 1):
            for b in range(1, M + 1 - a):
                c = M + 1 - a - b
                if c >= 1:
                    faces.append(("down", (a, b, c)))
        self.faces = faces
        face_index = {f: i for i, f in enumerate(faces)}
        F = len(faces)
        self.aux = (F, F + 1, F + 2)
        dual = []  # dual edge per primal edge: (face, face-or-aux)
        for u, v in self.edges:
            p, q = self.nodes[u], self.nodes[v]
            d = _add(q, p, -1)
            i = d.index(1)
            j = d.index(-1)
            h = 3 - i - j
            up = face_index[("up", _add(p, _UNITS[j], -1))]
            top = _add(p, _UNITS[i])
            if top[h] >= 1:
                other = face_index[("down", top)]
            else:
                other = self.aux[h]
            dual.append((up, other))
        self.dual_edges = dual
        adj = [[] for _ in range(F + 3)]
        for e, (f, g) in enumerate(dual):
            adj[f].append((g, e))
            adj[g].append((f, e))
        self.dual_adj = adj

    @property
    def face_count(self) -> int:
        return len(self.faces)

    def point(self, node: int) -> tuple:
        return tuple(Fraction(x, self.M) for x in self.nodes[node])

    def to_weighted_graph(self, drop_zero: bool = False) -> WeightedGraph:
        edges = [(u, v, w) for (u, v), w in zip(self.edges, self.weights) if not (drop_zero and w == 0)]
        return WeightedGraph(3, len(self.nodes), self.terminals, edges)

    def with_weights(self, weights) -> "MeshGraph":
        return MeshGraph(self.M, weights)


@dataclass(frozen=True)
class DualCutWitness:
    """How the planar-dual minimum was attained.

    ``case`` is "aux" (two paths leaving auxiliary node ``apex``) or
    "interior" (three paths meeting at face ``apex``).  ``edges`` lists the
    primal edges crossed by the paths.
    """

    case: str
    apex: int
    edges: tuple = field(default=())


def _dijkstra(adj, weights, source):
    n = len(adj)
    dist = [None] * n
    pred = [None] * n  # (previous node, primal edge)
    dist[source] = 0
    counter = itertools.count()
    heap = [(0, next(counter), source)]
    done = [False] * n
    while heap:
        d, _, x = heapq.heappop(heap)
        if done[x]:
            continue
        done[x] = True
        for y, e in adj[x]:
            nd = d + weights[e]
            if dist[y] is None or nd < dist[y]:
                dist[y] = nd
                pred[y] = (x, e)
                heapq.heappush(heap, (nd, next(counter), y))
    return dist, pred


def _path_edges(pred, target):
    out = []
    while pred[target] is not None:
        target, e = pred[target]
        out.append(e)
    return out


def planar_dual_min_3cut(mesh: MeshGraph):
    """Minimum 3-way cut of a weighted mesh via shortest paths in the dual."""
    for w in mesh.weights:
        if w < 0:
            raise NegativeWeight(f"negative edge weight {w}")
    runs = [_dijkstra(mesh.dual_adj, mesh.weights, a) for a in mesh.aux]
    dists = [r[0] for r in runs]
    best, witness = None, None
    for x in range(3):
        others = [y for y in range(3) if y != x]
        val = sum(dists[x][mesh.aux[y]] for y in others)
        if best is None or val < best:
            edges = set()
            for y in others:
                edges.update(_path_edges(runs[x][1], mesh.aux[y]))
            best, witness = val, DualCutWitness("aux", x, tuple(sorted(edges)))
    for f in range(mesh.face_count):
        val = dists[0][f] + dists[1][f] + dists[2][f]
        if val < best:
            edges = set()
            for x in range(3):
                edges.update(_path_edges(runs[x][1], f))
            best, witness = val, DualCutWitness("interior", f, tuple(sorted(edges)))
    return best, witness


# --- file format -------------------------------------------------------------


def format_number(w) -> str:
    if isinstance(w, Fraction):
        return f"{w.numerator}/{w.denominator}"
    if isinstance(w, (int, np.integer)):
        return str(int(w))
    return repr(float(w))


def parse_number(tok: str):
    if "/" in tok:
        p, q = tok.split("/")
        return Fraction(int(p), int(q))
    try:
        return int(tok)
    except ValueError:
        return float(tok)


def graph_to_text(g: WeightedGraph) -> str:
    lines = ["mwc-graph 1", f"k {g.k}", f"nodes {g.node_count}",
             "terminals " + " ".join(str(t) for t in g.terminals)]
    lines += [f"edge {u} {v} {format_number(w)}" for u, v, w in g.edges]
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> WeightedGraph:
    k = nodes = terminals = None
    edges = []
    header = False
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if not header:
            if toks != ["mwc-graph", "1"]:
                raise ValidationError(f"bad graph header {line!r}")
            header = True
        elif toks[0] == "k":
            k = int(toks[1])
        elif toks[0] == "nodes":
            nodes = int(toks[1])
        elif toks[0] == "terminals":
            terminals = [int(t) for t in toks[1:]]
        elif toks[0] == "edge" and len(toks) == 4:
            edges.append((int(toks[1]), int(toks[2]), parse_number(toks[3])))
        else:
            raise ValidationError(f"cannot parse graph line {line!r}")
    if not header or k is None or nodes is None or terminals is None:
        raise ValidationError("graph file is missing k, nodes or terminals")
    return WeightedGraph(k, nodes, tuple(terminals), tuple(edges))


def save_graph(g: WeightedGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(graph_to_text(g))


def load_graph(path) -> WeightedGraph:
    with open(path, encoding="utf-8") as fh:
        return graph_from_text(fh.read())
