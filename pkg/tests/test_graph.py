import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ensemblectl.graph import (
    PatternError,
    SparsityPattern,
    reachable_from_controls,
    strong_components,
    weakly_connected_components,
)
from ensemblectl.io import load_fixture

from oracles import closure, strong_classes
from strategies import patterns


def test_names_round_trip():
    G = SparsityPattern.from_names(2, 1, [("b1", "a1"), ("a1", "a2")])
    assert G.edges == {(2, 0), (0, 1)}
    assert G.named_edges() == [("a1", "a2"), ("b1", "a1")]
    assert G.index_of("b1") == 2 and G.node_name(1) == "a2"


@pytest.mark.parametrize(
    "edges, message",
    [
        ([("a1", "b1")], "edge into control-node"),
        ([("a1", "a3")], "a3"),
        ([("c1", "a1")], "c1"),
    ],
)
def test_rejects_bad_edges(edges, message):
    with pytest.raises(PatternError, match=message):
        SparsityPattern.from_names(2, 1, edges)


def test_rejects_duplicate_edge():
    with pytest.raises(PatternError, match="duplicate"):
        SparsityPattern(2, 1, [(0, 1), (0, 1)])


def test_matrices_orientation():
    G = SparsityPattern.from_names(2, 1, [("b1", "a1"), ("a1", "a2")])
    A, B = G.matrices()
    # edge u -> v marks A[v, u]
    assert A.tolist() == [[False, False], [True, False]]
    assert B.tolist() == [[True], [False]]


def test_four_state_fixture_shape():
    G = load_fixture("four_state").pattern
    assert (G.n, G.m, len(G.edges)) == (4, 2, 9)
    scc = strong_components(G)
    comps = sorted(sorted(G.node_name(v) for v in c) for c in scc.components)
    assert comps == [["a1", "a3"], ["a2"], ["a4"], ["b1"], ["b2"]]


def test_empty_pattern():
    G = SparsityPattern(0, 1)
    assert reachable_from_controls(G) == frozenset()
    assert strong_components(G).components == (frozenset({0}),)


@given(patterns())
@settings(max_examples=300, deadline=None)
def test_scc_matches_mutual_reachability(G):
    scc = strong_components(G)
    assert {frozenset(c) for c in scc.components} == strong_classes(G)


@given(patterns())
@settings(max_examples=200, deadline=None)
def test_skeleton_is_acyclic_and_bundles_partition_cross_edges(G):
    scc = strong_components(G)
    order = scc.topological_order()
    pos = {c: k for k, c in enumerate(order)}
    for i, j in scc.skeleton_edges:
        assert pos[i] < pos[j]
    cross = {(u, v) for u, v in G.edges if scc.component_of[u] != scc.component_of[v]}
    bundled = set().union(*scc.bundles.values()) if scc.bundles else set()
    assert bundled == cross


@given(patterns())
@settings(max_examples=200, deadline=None)
def test_reachability_matches_closure(G):
    R = closure(G)
    expected = {v for v in range(G.n) if R[G.n:, v].any()} if G.m else set()
    assert reachable_from_controls(G) == expected


@given(patterns())
@settings(max_examples=100, deadline=None)
def test_weak_components_partition_nodes(G):
    parts = weakly_connected_components(G)
    seen = [p.source_of(v) for p in parts for v in range(p.num_nodes)]
    assert sorted(seen) == list(range(G.num_nodes))
    assert sum(len(p.edges) for p in parts) == len(G.edges)


@given(patterns(), st.randoms(use_true_random=False))
@settings(max_examples=100, deadline=None)
def test_relabel_preserves_structure(G, rnd):
    ps = list(range(G.n))
    pc = list(range(G.n, G.num_nodes))
    rnd.shuffle(ps)
    rnd.shuffle(pc)
    perm = tuple(ps + pc)
    H = G.relabel(perm)
    assert {(perm[u], perm[v]) for u, v in G.edges} == H.edges
    for v in range(G.num_nodes):
        assert H.source_of(perm[v]) == v
    A, _ = G.matrices()
    assert np.sort(A.sum(axis=0)).tolist() == np.sort(H.matrices()[0].sum(axis=0)).tolist()


def test_relabel_rejects_type_mixing():
    G = SparsityPattern(1, 1, [(1, 0)])
    with pytest.raises(PatternError):
        G.relabel((1, 0))
