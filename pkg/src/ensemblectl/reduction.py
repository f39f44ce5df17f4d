"""Edge reduction of condition-A patterns into disjoint minimal patterns.

Also holds the canonical relabeling that puts a minimal pattern into lower
block triangular form with one cyclic block per cycle component.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass

from .analysis import (
    _condition_B_connected,
    find_hamiltonian_decomposition,
    satisfies_condition_A,
)
from .graph import SparsityPattern, reachable_from, strong_components, weakly_connected_components

__all__ = [
    "NotStructurallyControllable",
    "MinimalPattern",
    "partition_by_control",
    "reduce_to_minimal",
    "canonical_relabel",
]


class NotStructurallyControllable(ValueError):
    """The input pattern violates condition-A."""


@dataclass(frozen=True)
class MinimalPattern:
    """A minimal pattern in canonical block form.

    ``base`` is relabeled so that cycle ``i`` (0-based, sorted by skeleton
    depth) occupies state indices ``offsets[i] .. offsets[i] + cycle_sizes[i] - 1``
    and runs ``s -> s+1 -> ... -> s+n_i-1 -> s``.  ``parents[i]`` is
    ``(parent_block, parent_node, entry_node)`` with ``parent_block = -1`` for
    the control-node.  ``labeling[v]`` is the canonical index of node ``v`` of
    the pattern handed to :func:`canonical_relabel`; ``base.origin`` goes all
    the way back to the pattern that was reduced.
    """

    base: SparsityPattern
    cycle_sizes: tuple
    depths: tuple
    parents: tuple
    labeling: tuple

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def offsets(self) -> tuple:
        out, s = [], 0
        for size in self.cycle_sizes:
            out.append(s)
            s += size
        return tuple(out)

    @property
    def partial_sums(self) -> tuple:
        out, s = [], 0
        for size in self.cycle_sizes:
            s += size
            out.append(s)
        return tuple(out)

    def block_of(self, v: int) -> int:
        for i, (off, size) in enumerate(zip(self.offsets, self.cycle_sizes)):
            if off <= v < off + size:
                return i
        raise IndexError(v)

    def connector_edges(self) -> list:
        """Edges entering each block from outside it, in block order."""
        return [(pnode, entry) for _, pnode, entry in self.parents]


def _check_condition_A(G: SparsityPattern) -> None:
    if not satisfies_condition_A(G):
        raise NotStructurallyControllable("pattern violates condition-A")


def partition_by_control(G: SparsityPattern, order=None) -> list:
    """Split ``G`` into one condition-A part per control-node.

    Control ``k`` (in ``order``, ascending by default) takes every node it
    reaches that no earlier control reached.  Parts carry an ``origin`` map
    into ``G``.
    """
    _check_condition_A(G)
    controls = list(G.controls) if order is None else list(order)
    if sorted(controls) != list(G.controls):
        raise ValueError("order must be a permutation of the control-nodes")
    if G.m == 1:
        return [G.induced(range(G.num_nodes))]
    taken: set = set()
    parts = []
    for c in controls:
        reach = reachable_from(G, c)
        own = reach - taken
        taken |= reach
        parts.append(G.induced(own))
    return parts


def _random_arborescence(num: int, root: int, out_edges: dict, rng: random.Random | None) -> dict:
    """Spanning arborescence of the condensed digraph as ``child -> parent``.

    Without ``rng`` this is the BFS tree with ascending tie-breaks; with one,
    each step attaches a uniformly random frontier edge.
    """
    parent = {}
    if rng is None:
        seen = {root}
        queue = deque([root])
        while queue:
            i = queue.popleft()
            for j in sorted(out_edges.get(i, ())):
                if j not in seen:
                    seen.add(j)
                    parent[j] = i
                    queue.append(j)
    else:
        seen = {root}
        frontier = [(root, j) for j in sorted(out_edges.get(root, ()))]
        while frontier:
            i, j = frontier.pop(rng.randrange(len(frontier)))
            if j in seen:
                continue
            seen.add(j)
            parent[j] = i
            frontier.extend((j, k) for k in sorted(out_edges.get(j, ())) if k not in seen)
    if len(seen) != num:
        raise NotStructurallyControllable("condensed digraph is not rooted at the control-node")
    return parent


def _reduce_part(part: SparsityPattern, rng: random.Random | None) -> SparsityPattern:
    control = part.n
    order = None
    if rng is not None:
        order = list(part.states)
        rng.shuffle(order)
    ham = find_hamiltonian_decomposition(part, order)
    if ham is None:
        raise NotStructurallyControllable("no cycle cover")
    group = {control: 0}
    for i, cyc in enumerate(ham.cycles, start=1):
        for v in cyc:
            group[v] = i
    bundles: dict = {}
    for u, v in part.sorted_edges:
        gi, gj = group[u], group[v]
        if gi != gj:
            bundles.setdefault((gi, gj), []).append((u, v))
    out_edges: dict = {}
    for gi, gj in bundles:
        out_edges.setdefault(gi, set()).add(gj)
    parent = _random_arborescence(len(ham.cycles) + 1, 0, out_edges, rng)
    kept = set(ham.edges())
    for child, par in parent.items():
        candidates = bundles[(par, child)]
        kept.add(candidates[0] if rng is None else rng.choice(candidates))
    return SparsityPattern(part.n, part.m, kept, part.origin)


def reduce_to_minimal(G: SparsityPattern, seed: int | None = None) -> list:
    """Trim ``G`` into disjoint minimal patterns, one per control-node.

    ``seed=None`` uses fixed choices: ascending control order, BFS spanning
    trees and the smallest edge of each bundle.  An integer seed randomises
    the control order, the cycle cover, the spanning tree and the kept bundle
    edges, so different seeds give different valid reductions.
    """
    _check_condition_A(G)
    rng = None if seed is None else random.Random(seed)
    order = None
    if rng is not None:
        order = list(G.controls)
        rng.shuffle(order)
    return [canonical_relabel(_reduce_part(part, rng)) for part in partition_by_control(G, order)]


def canonical_relabel(K: SparsityPattern) -> MinimalPattern:
    """Relabel a condition-B pattern into canonical block order."""
    if len(weakly_connected_components(K)) != 1 or not _condition_B_connected(K):
        raise ValueError("canonical_relabel needs a weakly connected pattern meeting condition-B")
    control = K.n
    scc = strong_components(K)
    root = scc.component_of[control]
    succ = scc.skeleton_successors()
    depth = {root: 0}
    queue = deque([root])
    while queue:
        i = queue.popleft()
        for j in succ[i]:
            depth[j] = depth[i] + 1
            queue.append(j)
    entry_edge = {j: next(iter(b)) for (i, j), b in scc.bundles.items()}
    blocks = sorted(
        (i for i in range(len(scc.components)) if i != root),
        key=lambda i: (depth[i], min(scc.components[i])),
    )
    new_index = {control: K.n}
    block_index = {root: -1}
    sizes, depths = [], []
    s = 0
    for b, comp_id in enumerate(blocks):
        comp = scc.components[comp_id]
        _, entry = entry_edge[comp_id]
        v = entry
        for k in range(len(comp)):
            new_index[v] = s + k
            v = next(w for w in K.successors[v] if w in comp)
        block_index[comp_id] = b
        sizes.append(len(comp))
        depths.append(depth[comp_id])
        s += len(comp)
    parents = []
    for comp_id in blocks:
        u, v = entry_edge[comp_id]
        parents.append((block_index[scc.component_of[u]], new_index[u], new_index[v]))
    labeling = tuple(new_index[v] for v in range(K.num_nodes))
    return MinimalPattern(
        base=K.relabel(labeling),
        cycle_sizes=tuple(sizes),
        depths=tuple(depths),
        parents=tuple(parents),
        labeling=labeling,
    )
