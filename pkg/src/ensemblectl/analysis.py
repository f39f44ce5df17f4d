"""Decision procedures for ensemble and classical structural controllability."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .graph import (
    SparsityPattern,
    reachable_from_controls,
    strong_components,
    weakly_connected_components,
)
from .matching import maximum_matching

__all__ = [
    "HamiltonianDecomposition",
    "AnalysisReport",
    "check_accessible",
    "find_hamiltonian_decomposition",
    "check_condition_A",
    "check_finite_structural",
    "check_condition_B",
    "is_minimal",
    "is_minimal_by_structure",
    "satisfies_condition_A",
]


@dataclass(frozen=True)
class HamiltonianDecomposition:
    """Node-disjoint directed cycles covering every state-node."""

    cycles: tuple

    def successor(self) -> dict:
        succ = {}
        for cyc in self.cycles:
            for k, v in enumerate(cyc):
                succ[v] = cyc[(k + 1) % len(cyc)]
        return succ

    def edges(self) -> frozenset:
        return frozenset(self.successor().items())

    def is_valid_for(self, G: SparsityPattern) -> bool:
        covered = [v for cyc in self.cycles for v in cyc]
        if sorted(covered) != list(G.states):
            return False
        return all(e in G.edges for e in self.edges())

    def to_names(self, G: SparsityPattern) -> list:
        return [[G.node_name(v) for v in cyc] for cyc in self.cycles]


def check_accessible(G: SparsityPattern) -> tuple[bool, frozenset]:
    """Whether every state-node is reachable from a control-node, plus the failures."""
    missing = frozenset(G.states) - reachable_from_controls(G)
    return not missing, missing


def _cycle_cover(G: SparsityPattern, order: Sequence[int] | None = None) -> dict | None:
    # left vertex k = out-role of order[k], right vertex v = in-role of state v
    order = list(G.states) if order is None else list(order)
    adj = [[v for v in G.successors[u] if v < G.n] for u in order]
    match_right = maximum_matching(G.n, G.n, adj)
    if any(x == -1 for x in match_right):
        return None
    return {order[k]: right for right, k in enumerate(match_right)}


def find_hamiltonian_decomposition(
    G: SparsityPattern, order: Sequence[int] | None = None
) -> HamiltonianDecomposition | None:
    """Disjoint cycle cover of the state subgraph, or ``None`` if none exists.

    A perfect matching between out-roles and in-roles of the state-nodes is a
    successor permutation whose orbits are the cycles.  ``order`` permutes the
    state-nodes to steer which cover is found.
    """
    succ = _cycle_cover(G, order)
    if succ is None:
        return None
    seen = set()
    cycles = []
    for start in range(G.n):
        if start in seen:
            continue
        cyc = [start]
        seen.add(start)
        v = succ[start]
        while v != start:
            cyc.append(v)
            seen.add(v)
            v = succ[v]
        cycles.append(tuple(cyc))
    return HamiltonianDecomposition(tuple(cycles))


def satisfies_condition_A(G: SparsityPattern) -> bool:
    """Boolean-only condition-A test used in tight loops."""
    if len(reachable_from_controls(G)) != G.n:
        return False
    return _cycle_cover(G) is not None


def _hall_matching(G: SparsityPattern) -> bool:
    # left = every node in its out-role (controls included), right = state in-roles
    adj = [[v for v in G.successors[u] if v < G.n] for u in range(G.num_nodes)]
    match_right = maximum_matching(G.num_nodes, G.n, adj)
    return all(x != -1 for x in match_right)


def check_finite_structural(G: SparsityPattern) -> bool:
    """Classical (finite-dimensional) structural controllability.

    Accessibility plus ``|N_in(V')| >= |V'|`` for every set of state-nodes,
    which by Hall's theorem holds iff some matching saturates every state-node
    on the in-role side.
    """
    return check_accessible(G)[0] and _hall_matching(G)


def _is_simple_cycle(G: SparsityPattern, comp) -> bool:
    inner = [(u, v) for u, v in G.edges if u in comp and v in comp]
    # strongly connected with |comp| edges is exactly one Hamiltonian cycle
    return len(inner) == len(comp)


def _condition_B_connected(G: SparsityPattern) -> bool:
    if G.m != 1:
        return False
    scc = strong_components(G)
    root = scc.component_of[G.n]
    indeg = scc.skeleton_in_degree()
    if any(d != 1 for i, d in enumerate(indeg) if i != root):
        return False
    # weakly connected, acyclic, in-degrees 1 off the root: arborescence at root
    if any(len(b) != 1 for b in scc.bundles.values()):
        return False
    return all(_is_simple_cycle(G, comp) for i, comp in enumerate(scc.components) if i != root)


def check_condition_B(G: SparsityPattern) -> bool:
    """Single control, arborescence skeleton, singleton bundles, cycle components.

    Only defined for weakly connected patterns; split first otherwise.
    """
    if len(weakly_connected_components(G)) != 1:
        raise ValueError("condition-B is only defined for weakly connected patterns")
    return _condition_B_connected(G)


def is_minimal(G: SparsityPattern) -> bool:
    """Condition-A holds and deleting any single edge breaks it."""
    if not satisfies_condition_A(G):
        return False
    return not any(satisfies_condition_A(G.without_edge(*e)) for e in G.sorted_edges)


def is_minimal_by_structure(G: SparsityPattern) -> bool:
    """Minimality via the structural characterisation: every component meets condition-B."""
    return all(_condition_B_connected(part) for part in weakly_connected_components(G))


@dataclass
class AnalysisReport:
    """Verdicts for one pattern; node indices refer to ``pattern``."""

    pattern: SparsityPattern = field(repr=False)
    nodes: tuple
    accessible: bool
    inaccessible: frozenset
    hamiltonian: HamiltonianDecomposition | None
    condition_A: bool
    condition_A_finite: bool
    condition_B: bool
    minimal: bool
    per_component: list = field(default_factory=list)

    def to_dict(self) -> dict:
        name = self.pattern.node_name
        n = sum(1 for v in self.nodes if v < self.pattern.n)
        return {
            "nodes": [name(v) for v in self.nodes],
            "n": n,
            "m": len(self.nodes) - n,
            "accessible": self.accessible,
            "inaccessible": [name(v) for v in sorted(self.inaccessible)],
            "hamiltonian": None
            if self.hamiltonian is None
            else [[name(v) for v in cyc] for cyc in self.hamiltonian.cycles],
            "condition_A": self.condition_A,
            "condition_A_finite": self.condition_A_finite,
            "condition_B": self.condition_B,
            "minimal": self.minimal,
            "per_component": [c.to_dict() for c in self.per_component],
        }


def _lift(ham: HamiltonianDecomposition | None, part: SparsityPattern):
    if ham is None:
        return None
    return HamiltonianDecomposition(tuple(tuple(part.source_of(v) for v in c) for c in ham.cycles))


def _component_report(part: SparsityPattern, G: SparsityPattern) -> AnalysisReport:
    accessible, missing = check_accessible(part)
    ham = find_hamiltonian_decomposition(part)
    cond_b = _condition_B_connected(part)
    return AnalysisReport(
        pattern=G,
        nodes=tuple(sorted(part.source_of(v) for v in range(part.num_nodes))),
        accessible=accessible,
        inaccessible=frozenset(part.source_of(v) for v in missing),
        hamiltonian=_lift(ham, part),
        condition_A=accessible and ham is not None,
        condition_A_finite=accessible and _hall_matching(part),
        condition_B=cond_b,
        minimal=cond_b,
    )


def check_condition_A(G: SparsityPattern) -> AnalysisReport:
    """Full report: condition-A per weakly connected component, conjoined.

    ``condition_B`` on the whole report means every component meets
    condition-B, i.e. ``G`` is a disjoint union of minimal patterns.
    ``minimal`` is decided by single-edge deletion.
    """
    per = [_component_report(part, G) for part in weakly_connected_components(G)]
    accessible, missing = check_accessible(G)
    return AnalysisReport(
        pattern=G,
        nodes=tuple(range(G.num_nodes)),
        accessible=accessible,
        inaccessible=missing,
        hamiltonian=find_hamiltonian_decomposition(G),
        condition_A=all(c.condition_A for c in per),
        condition_A_finite=check_finite_structural(G),
        condition_B=all(c.condition_B for c in per),
        minimal=is_minimal(G),
        per_component=per,
    )
