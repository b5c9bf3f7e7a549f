from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mwcut.errors import InvalidLabeling, NegativeWeight, TooLarge, UnknownEdge, ValidationError
from mwcut.graphs import (
    DisjointSet,
    Labeling,
    MeshGraph,
    WeightedGraph,
    brute_force_min_cut,
    check_labeling,
    cut_cost,
    cut_edges,
    graph_from_text,
    graph_to_text,
    is_multiway_cut,
    load_graph,
    planar_dual_min_3cut,
    save_graph,
)
from mwcut.instances import star_graph, triangle_graph


def test_triangle_and_star():
    assert brute_force_min_cut(triangle_graph())[0] == 3
    cost, lab = brute_force_min_cut(star_graph(3))
    assert cost == 2
    check_labeling(star_graph(3), lab)
    assert brute_force_min_cut(star_graph(5))[0] == 4


def test_labeling_validation():
    g = triangle_graph()
    with pytest.raises(InvalidLabeling):
        check_labeling(g, Labeling((0, 0, 2)))
    with pytest.raises(InvalidLabeling):
        check_labeling(g, Labeling((0, 1)))
    with pytest.raises(InvalidLabeling):
        check_labeling(g, Labeling((0, 1, 3)))
    assert cut_cost(g, Labeling((0, 1, 2))) == 3
    assert cut_edges(g, Labeling((0, 1, 2))) == [0, 1, 2]


def test_graph_validation():
    with pytest.raises(ValidationError):
        WeightedGraph(3, 3, (0, 1, 1), ())
    with pytest.raises(ValidationError):
        WeightedGraph(3, 3, (0, 1, 2), ((0, 0, 1),))
    with pytest.raises(NegativeWeight):
        WeightedGraph(3, 3, (0, 1, 2), ((0, 1, -1),))


def test_is_multiway_cut():
    g = star_graph(3)
    assert not is_multiway_cut(g, [0])
    assert is_multiway_cut(g, [0, 1])
    with pytest.raises(UnknownEdge):
        is_multiway_cut(g, [7])


def test_disjoint_set():
    ds = DisjointSet(5)
    assert ds.union(0, 1) and ds.union(3, 4) and not ds.union(1, 0)
    assert ds.find(0) == ds.find(1) and ds.find(2) != ds.find(3)


def test_brute_force_too_large():
    g = WeightedGraph(3, 18, (0, 1, 2), ((0, 3, 1),))
    with pytest.raises(TooLarge):
        brute_force_min_cut(g)


def test_brute_force_exact_weights():
    g = WeightedGraph(3, 4, (0, 1, 2), ((0, 3, F(1, 3)), (1, 3, F(1, 3)), (2, 3, F(1, 2))))
    cost, _ = brute_force_min_cut(g)
    assert cost == F(2, 3) and isinstance(cost, F)


def test_mesh_counts():
    for M in range(1, 6):
        m = MeshGraph(M)
        assert len(m.nodes) == (M + 1) * (M + 2) // 2
        assert len(m.edges) == 3 * M * (M + 1) // 2
        assert m.face_count == M * M
        assert len(m.dual_edges) == len(m.edges)
        # every face has three sides
        deg = [len(m.dual_adj[f]) for f in range(m.face_count)]
        assert all(d == 3 for d in deg)
        assert sum(len(m.dual_adj[a]) for a in m.aux) == 3 * M


def test_uniform_mesh_min_cut():
    # M=1: the triangle; isolating two terminals costs 2 edges each, one shared: 3 in total
    assert planar_dual_min_3cut(MeshGraph(1))[0] == 3
    for M in (2, 3):
        best, _ = planar_dual_min_3cut(MeshGraph(M))
        assert best == brute_force_min_cut(MeshGraph(M).to_weighted_graph())[0] == 4


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3).flatmap(
    lambda M: st.tuples(st.just(M), st.lists(st.integers(0, 5), min_size=3 * M * (M + 1) // 2,
                                               max_size=3 * M * (M + 1) // 2))))
def test_planar_dual_matches_brute_force(Mw):
    M, ws = Mw
    mesh = MeshGraph(M, ws)
    best, witness = planar_dual_min_3cut(mesh)
    bf, _ = brute_force_min_cut(mesh.to_weighted_graph())
    assert best == bf
    g = mesh.to_weighted_graph()
    assert is_multiway_cut(g, witness.edges)
    assert sum(mesh.weights[e] for e in witness.edges) == best


def test_text_round_trip(tmp_path):
    g = WeightedGraph(3, 5, (4, 0, 2), ((0, 1, F(1, 3)), (1, 2, 2), (3, 4, 0.25), (1, 3, 0)))
    assert graph_from_text(graph_to_text(g)) == g
    path = tmp_path / "g.txt"
    save_graph(g, path)
    assert load_graph(path) == g
    with pytest.raises(ValidationError):
        graph_from_text("mwc-graph 1\nk 3\n")
    with pytest.raises(ValidationError):
        graph_from_text("graph\n")


@settings(max_examples=50, deadline=None)
@given(st.integers(3, 4).flatmap(lambda k: st.tuples(
    st.just(k), st.integers(0, 4),
    st.lists(st.tuples(st.integers(0, 7), st.integers(0, 7), st.fractions(0, 5, max_denominator=7)), max_size=12))))
def test_brute_force_is_minimal_and_valid(data):
    k, extra, raw = data
    n = k + extra
    edges = tuple((u % n, v % n, w) for u, v, w in raw if u % n != v % n)
    g = WeightedGraph(k, n, tuple(range(k)), edges)
    cost, lab = brute_force_min_cut(g)
    check_labeling(g, lab)
    assert cost == cut_cost(g, lab)
    removed = cut_edges(g, lab)
    assert is_multiway_cut(g, removed)
    rng = np.random.default_rng(0)
    for _ in range(20):
        labs = list(range(k)) + [int(x) for x in rng.integers(0, k, size=extra)]
        assert cost <= cut_cost(g, Labeling(tuple(labs)))
