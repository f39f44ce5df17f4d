import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ensemblectl.analysis import check_condition_B, is_minimal
from ensemblectl.graph import SparsityPattern
from ensemblectl.io import load_fixture
from ensemblectl.reduction import (
    NotStructurallyControllable,
    canonical_relabel,
    partition_by_control,
    reduce_to_minimal,
)

from oracles import edge_minimal, random_condition_A


def kept_edges(parts):
    return frozenset(
        (K.base.source_of(u), K.base.source_of(v)) for K in parts for u, v in K.base.edges
    )


def named(G, edges):
    return {(G.node_name(u), G.node_name(v)) for u, v in edges}


@pytest.fixture(scope="module")
def four_state():
    return load_fixture("four_state").pattern


def test_default_reduction_is_two_by_two(four_state):
    parts = reduce_to_minimal(four_state)
    assert sorted((K.base.n, K.base.m) for K in parts) == [(2, 1), (2, 1)]
    removed = set(four_state.edges) - kept_edges(parts)
    assert named(four_state, removed) == {("b2", "a3"), ("a4", "a1")}


def test_seed_one_gives_lopsided_reduction(four_state):
    parts = reduce_to_minimal(four_state, seed=1)
    assert sorted((K.base.n, K.base.m) for K in parts) == [(0, 1), (4, 1)]
    removed = set(four_state.edges) - kept_edges(parts)
    assert named(four_state, removed) == {("b1", "a1"), ("b2", "a3")}
    big = next(K for K in parts if K.n == 4)
    assert big.cycle_sizes == (1, 1, 2) and big.depths == (1, 2, 3)


def test_seeds_reach_every_minimal_subpattern(four_state):
    G = four_state
    E = G.sorted_edges
    expected = set()
    for r in range(len(E) + 1):
        for S in itertools.combinations(E, r):
            if edge_minimal(SparsityPattern(G.n, G.m, S)):
                expected.add(frozenset(S))
    seen = {kept_edges(reduce_to_minimal(G, seed=s)) for s in range(200)}
    assert seen == expected
    assert len(expected) == 3


def test_reduction_is_deterministic(four_state):
    for seed in (None, 3):
        a = [K.base for K in reduce_to_minimal(four_state, seed)]
        b = [K.base for K in reduce_to_minimal(four_state, seed)]
        assert a == b


def test_rejects_non_controllable():
    with pytest.raises(NotStructurallyControllable):
        reduce_to_minimal(load_fixture("path3").pattern)


def test_partition_order_must_be_permutation(four_state):
    with pytest.raises(ValueError):
        partition_by_control(four_state, order=[4, 4])


def test_canonical_relabel_rejects_non_minimal(four_state):
    with pytest.raises(ValueError):
        canonical_relabel(four_state.induced([0, 1, 2, 3, 4]))


def assert_canonical(K):
    A, B = K.base.matrices()
    offsets, sizes = K.offsets, K.cycle_sizes
    for i, (s, k) in enumerate(zip(offsets, sizes)):
        for j in range(k):
            assert A[s + (j + 1) % k, s + j]
    # lower block triangular: edges never go to an earlier block
    for u, v in K.base.edges:
        if u < K.n:
            assert K.block_of(v) >= K.block_of(u)
    assert B[:, 0].sum() == sum(1 for p, _, _ in K.parents if p == -1)
    assert list(K.depths) == sorted(K.depths)
    assert K.partial_sums[-1:] in ((), (K.n,))


@given(st.integers(0, 10_000), st.one_of(st.none(), st.integers(0, 50)))
@settings(max_examples=150, deadline=None)
def test_reduction_properties(graph_seed, seed):
    G = random_condition_A(random.Random(graph_seed), n_max=5, m_max=3)
    parts = reduce_to_minimal(G, seed=seed)
    assert len(parts) == G.m
    assert kept_edges(parts) <= G.edges
    nodes = sorted(K.base.source_of(v) for K in parts for v in range(K.base.num_nodes))
    assert nodes == list(range(G.num_nodes))
    for K in parts:
        assert K.base.m == 1
        assert check_condition_B(K.base)
        assert_canonical(K)
    union = SparsityPattern(G.n, G.m, kept_edges(parts))
    assert is_minimal(union)
    if G.n <= 4:
        assert edge_minimal(union)


def test_labeling_maps_into_base():
    G = SparsityPattern.from_names(
        3, 1, [("b1", "a3"), ("a3", "a1"), ("a1", "a3"), ("a1", "a2"), ("a2", "a2")]
    )
    K = canonical_relabel(G)
    assert K.cycle_sizes == (2, 1)
    for u, v in G.edges:
        assert (K.labeling[u], K.labeling[v]) in K.base.edges
    A, _ = K.base.matrices()
    assert np.array_equal(A, np.array([[0, 1, 0], [1, 0, 0], [0, 1, 1]], dtype=bool))
