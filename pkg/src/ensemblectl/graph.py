"""Typed digraphs for sparsity patterns and the basic graph algorithms on them.

Nodes use one index space: state-nodes are ``0 .. n-1`` and control-nodes are
``n .. n+m-1``.  An edge ``(u, v)`` means entry ``(v, u)`` of ``A`` (or of
``B`` when ``u`` is a control-node) may be nonzero.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "PatternError",
    "SparsityPattern",
    "SccDecomposition",
    "strong_components",
    "reachable_from_controls",
    "weakly_connected_components",
]

_NAME_RE = re.compile(r"^([ab])([1-9][0-9]*)$")


class PatternError(ValueError):
    """Raised when edges or node names do not describe a valid pattern."""


@dataclass(frozen=True)
class SparsityPattern:
    """Digraph with ``n`` state-nodes and ``m`` control-nodes.

    ``origin`` optionally maps each node of this pattern to a node of the
    pattern it was cut out of; it does not take part in equality.
    """

    n: int
    m: int
    edges: frozenset = frozenset()
    origin: tuple | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.n < 0 or self.m < 0:
            raise PatternError(f"negative node count (n={self.n}, m={self.m})")
        raw = list(self.edges)
        edges = frozenset((int(u), int(v)) for u, v in raw)
        if len(edges) != len(raw):
            raise PatternError("duplicate edge")
        total = self.n + self.m
        for u, v in edges:
            if not (0 <= u < total and 0 <= v < total):
                raise PatternError(f"edge {(u, v)} references a missing node")
            if v >= self.n:
                raise PatternError(
                    f"edge {self.node_name(u)}->{self.node_name(v)}: edge into control-node"
                )
        object.__setattr__(self, "edges", edges)
        if self.origin is not None:
            origin = tuple(int(x) for x in self.origin)
            if len(origin) != total:
                raise PatternError("origin map must cover every node")
            object.__setattr__(self, "origin", origin)

    # -- construction -----------------------------------------------------

    @classmethod
    def from_names(cls, n: int, m: int, pairs: Iterable[tuple[str, str]]) -> "SparsityPattern":
        """Build from ``("b1", "a2")``-style node-name pairs."""
        edges = []
        for src, dst in pairs:
            edges.append((cls._index(src, n, m), cls._index(dst, n, m)))
        return cls(n, m, edges)

    @staticmethod
    def _index(name: str, n: int, m: int) -> int:
        match = _NAME_RE.match(name)
        if match is None:
            raise PatternError(f"unknown node name {name!r}")
        kind, num = match.group(1), int(match.group(2))
        if kind == "a":
            if num > n:
                raise PatternError(f"unknown node name {name!r} (n={n})")
            return num - 1
        if num > m:
            raise PatternError(f"unknown node name {name!r} (m={m})")
        return n + num - 1

    def index_of(self, name: str) -> int:
        return self._index(name, self.n, self.m)

    def node_name(self, v: int) -> str:
        return f"a{v + 1}" if v < self.n else f"b{v - self.n + 1}"

    # -- basic views --------------------------------------------------------

    @property
    def num_nodes(self) -> int:
        return self.n + self.m

    @property
    def states(self) -> range:
        return range(self.n)

    @property
    def controls(self) -> range:
        return range(self.n, self.n + self.m)

    def is_state(self, v: int) -> bool:
        return v < self.n

    @cached_property
    def successors(self) -> tuple:
        out = [[] for _ in range(self.num_nodes)]
        for u, v in sorted(self.edges):
            out[u].append(v)
        return tuple(tuple(x) for x in out)

    @cached_property
    def predecessors(self) -> tuple:
        inn = [[] for _ in range(self.num_nodes)]
        for u, v in sorted(self.edges):
            inn[v].append(u)
        return tuple(tuple(x) for x in inn)

    @cached_property
    def sorted_edges(self) -> tuple:
        return tuple(sorted(self.edges))

    def named_edges(self) -> list:
        return [(self.node_name(u), self.node_name(v)) for u, v in self.sorted_edges]

    def source_of(self, v: int) -> int:
        """Node index in the parent pattern (identity when there is no parent)."""
        return v if self.origin is None else self.origin[v]

    def matrices(self) -> tuple[np.ndarray, np.ndarray]:
        """Boolean star-masks ``(A_mask, B_mask)`` of shapes ``(n, n)`` and ``(n, m)``."""
        a_mask = np.zeros((self.n, self.n), dtype=bool)
        b_mask = np.zeros((self.n, self.m), dtype=bool)
        for u, v in self.edges:
            if u < self.n:
                a_mask[v, u] = True
            else:
                b_mask[v, u - self.n] = True
        return a_mask, b_mask

    # -- edits --------------------------------------------------------------

    def with_edge(self, u: int, v: int) -> "SparsityPattern":
        if (u, v) in self.edges:
            return self
        return SparsityPattern(self.n, self.m, self.edges | {(u, v)}, self.origin)

    def without_edge(self, u: int, v: int) -> "SparsityPattern":
        return SparsityPattern(self.n, self.m, self.edges - {(u, v)}, self.origin)

    def addable_edges(self) -> list:
        """Every edge that could be added without breaking the pattern invariants."""
        return [
            (u, v)
            for u in range(self.num_nodes)
            for v in range(self.n)
            if (u, v) not in self.edges
        ]

    def induced(self, nodes: Iterable[int]) -> "SparsityPattern":
        """Induced sub-pattern on ``nodes``, re-indexed with an ``origin`` map.

        State-nodes keep their relative order, as do control-nodes.  The
        ``origin`` map points at this pattern's own parent when it has one.
        """
        keep = set(nodes)
        states = sorted(v for v in keep if v < self.n)
        controls = sorted(v for v in keep if v >= self.n)
        order = states + controls
        new_index = {v: i for i, v in enumerate(order)}
        edges = [
            (new_index[u], new_index[v])
            for u, v in self.edges
            if u in new_index and v in new_index
        ]
        origin = tuple(self.source_of(v) for v in order)
        return SparsityPattern(len(states), len(controls), edges, origin)

    def relabel(self, perm: Mapping[int, int] | tuple) -> "SparsityPattern":
        """Apply a type-respecting node permutation ``old -> new``."""
        total = self.num_nodes
        mapping = [perm[v] for v in range(total)]
        if sorted(mapping) != list(range(total)):
            raise PatternError("relabeling is not a permutation")
        for v in range(total):
            if (v < self.n) != (mapping[v] < self.n):
                raise PatternError("relabeling mixes state- and control-nodes")
        edges = [(mapping[u], mapping[v]) for u, v in self.edges]
        origin = [0] * total
        for v in range(total):
            origin[mapping[v]] = self.source_of(v)
        return SparsityPattern(self.n, self.m, edges, tuple(origin))


@dataclass(frozen=True)
class SccDecomposition:
    """Strong components, the skeleton digraph between them, and edge bundles."""

    components: tuple
    skeleton_edges: frozenset
    bundles: Mapping

    @cached_property
    def component_of(self) -> dict:
        return {v: i for i, comp in enumerate(self.components) for v in comp}

    def skeleton_successors(self) -> list:
        out = [[] for _ in self.components]
        for i, j in sorted(self.skeleton_edges):
            out[i].append(j)
        return out

    def skeleton_in_degree(self) -> list:
        deg = [0] * len(self.components)
        for _, j in self.skeleton_edges:
            deg[j] += 1
        return deg

    def topological_order(self) -> list:
        """Kahn's algorithm; raises if the skeleton has a cycle."""
        deg = self.skeleton_in_degree()
        succ = self.skeleton_successors()
        queue = deque(i for i, d in enumerate(deg) if d == 0)
        order = []
        while queue:
            i = queue.popleft()
            order.append(i)
            for j in succ[i]:
                deg[j] -= 1
                if deg[j] == 0:
                    queue.append(j)
        if len(order) != len(self.components):
            raise ValueError("skeleton digraph is not acyclic")
        return order


def _tarjan(num_nodes: int, successors) -> list:
    """Iterative Tarjan; returns components as lists of nodes."""
    index = [-1] * num_nodes
    low = [0] * num_nodes
    on_stack = [False] * num_nodes
    stack: list[int] = []
    comps = []
    counter = 0
    for root in range(num_nodes):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pos = work.pop()
            if pos == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            succ = successors[v]
            while pos < len(succ):
                w = succ[pos]
                pos += 1
                if index[w] == -1:
                    work.append((v, pos))
                    work.append((w, 0))
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            else:
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        comp.append(w)
                        if w == v:
                            break
                    comps.append(comp)
                if work:
                    parent = work[-1][0]
                    low[parent] = min(low[parent], low[v])
    return comps


def strong_components(G: SparsityPattern) -> SccDecomposition:
    """Strong component decomposition of ``G`` with skeleton and bundles.

    Components are ordered by their smallest node index.  Every control-node
    ends up as a singleton since nothing points into it.
    """
    comps = sorted((frozenset(c) for c in _tarjan(G.num_nodes, G.successors)), key=min)
    where = {v: i for i, comp in enumerate(comps) for v in comp}
    bundles: dict = {}
    for u, v in G.sorted_edges:
        i, j = where[u], where[v]
        if i != j:
            bundles.setdefault((i, j), []).append((u, v))
    bundles = {k: frozenset(v) for k, v in bundles.items()}
    return SccDecomposition(tuple(comps), frozenset(bundles), bundles)


def _reach(G: SparsityPattern, sources: Iterable[int]) -> set:
    seen = set(sources)
    queue = deque(seen)
    while queue:
        u = queue.popleft()
        for v in G.successors[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def reachable_from_controls(G: SparsityPattern) -> frozenset:
    """State-nodes reachable by a directed path from some control-node."""
    return frozenset(v for v in _reach(G, G.controls) if v < G.n)


def reachable_from(G: SparsityPattern, source: int) -> frozenset:
    return frozenset(_reach(G, [source]))


def weakly_connected_components(G: SparsityPattern) -> list:
    """Maximal weakly connected sub-patterns, ordered by smallest node index.

    Each part carries an ``origin`` map back into ``G``.
    """
    neighbours = [set() for _ in range(G.num_nodes)]
    for u, v in G.edges:
        neighbours[u].add(v)
        neighbours[v].add(u)
    seen = [False] * G.num_nodes
    parts = []
    for start in range(G.num_nodes):
        if seen[start]:
            continue
        seen[start] = True
        group = [start]
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for w in neighbours[u]:
                if not seen[w]:
                    seen[w] = True
                    group.append(w)
                    queue.append(w)
        parts.append(G.induced(group))
    return parts
