"""Catalogue of minimal patterns up to type-respecting isomorphism.

A minimal pattern is a tree of cycles hanging off one control-node.  Each
non-root cycle is entered at a distinguished node (the head of its single
incoming edge), so a pattern is fully described by a nested code::

    cycle code = (size, (children at offset 0, ..., children at offset size-1))
    root code  = children of the control-node

where each "children" entry is a sorted tuple of cycle codes and offsets
count along the cycle from the entry node.  Equal codes mean isomorphic
patterns, so generating every code once lists every class exactly once.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .graph import SparsityPattern
from .reduction import MinimalPattern, canonical_relabel

__all__ = [
    "CatalogEntry",
    "enumerate_minimal",
    "are_isomorphic",
    "canonical_form",
    "structure_code",
    "DEFAULT_N_MAX",
]

DEFAULT_N_MAX = 7
ISOMORPHISM_NODE_LIMIT = 12


@dataclass(frozen=True)
class CatalogEntry:
    pattern: MinimalPattern
    cycle_partition: tuple
    skeleton_shape: tuple
    attachment: tuple

    def to_dict(self) -> dict:
        base = self.pattern.base
        return {
            "n": base.n,
            "m": base.m,
            "edges": [list(e) for e in base.named_edges()],
            "cycle_sizes": list(self.pattern.cycle_sizes),
            "cycle_partition": list(self.cycle_partition),
            "skeleton_parents": list(self.skeleton_shape),
            "attachment": [list(a) for a in self.attachment],
        }


def _size(code) -> int:
    k, slots = code
    return k + sum(_size(c) for slot in slots for c in slot)


@lru_cache(maxsize=None)
def _cycle_codes(total: int) -> tuple:
    """All cycle codes using exactly ``total`` state-nodes."""
    out = []
    for k in range(1, total + 1):
        rest = total - k
        for split in _compositions(rest, k):
            choices = [_forests(t) for t in split]
            for slots in itertools.product(*choices):
                out.append((k, tuple(slots)))
    return tuple(sorted(out))


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _forests(total: int, floor=None) -> tuple:
    """Multisets (sorted tuples) of cycle codes whose sizes sum to ``total``.

    ``floor`` is a lower bound ``(size, code)`` on the first element, which
    keeps every multiset in non-decreasing order exactly once.
    """
    if total == 0:
        return ((),)
    out = []
    for size in range(1, total + 1):
        for code in _cycle_codes(size):
            key = (size, code)
            if floor is not None and key < floor:
                continue
            for rest in _forests(total - size, key):
                out.append((code,) + rest)
    return tuple(out)


def _build(root_children) -> SparsityPattern:
    edges = []
    counter = itertools.count()
    pending = [(None, c) for c in root_children]
    nodes_made = []

    def place(parent_node, code):
        k, slots = code
        cycle = [next(counter) for _ in range(k)]
        nodes_made.extend(cycle)
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            edges.append((a, b))
        edges.append((parent_node, cycle[0]))
        for node, slot in zip(cycle, slots):
            for child in slot:
                place(node, child)

    # control-node index is only known once n is; use a sentinel first
    CONTROL = -1
    for _, code in pending:
        place(CONTROL, code)
    n = len(nodes_made)
    fixed = [(n if u == CONTROL else u, v) for u, v in edges]
    return SparsityPattern(n, 1, fixed)


def structure_code(K: MinimalPattern) -> tuple:
    """Nested code of a canonical minimal pattern (a complete isomorphism invariant)."""
    children: dict = {}
    for b, (pblock, pnode, _) in enumerate(K.parents):
        children.setdefault(pnode, []).append(b)
    offsets = K.offsets

    def code(b):
        k = K.cycle_sizes[b]
        slots = []
        for j in range(k):
            node = offsets[b] + j
            slots.append(tuple(sorted(code(c) for c in children.get(node, ()))))
        return (k, tuple(slots))

    return tuple(sorted(code(c) for c in children.get(K.base.n, ())))


def _entry(K: MinimalPattern) -> CatalogEntry:
    offsets = K.offsets
    attachment = []
    for pblock, pnode, entry in K.parents:
        parent_offset = 0 if pblock < 0 else pnode - offsets[pblock]
        attachment.append((pblock + 1, parent_offset, entry - offsets[K.block_of(entry)]))
    return CatalogEntry(
        pattern=K,
        cycle_partition=tuple(sorted(K.cycle_sizes, reverse=True)),
        skeleton_shape=tuple(p + 1 for p, _, _ in K.parents),
        attachment=tuple(attachment),
    )


def enumerate_minimal(n: int, n_max: int = DEFAULT_N_MAX) -> list:
    """Every minimal pattern with ``n`` state-nodes, one per isomorphism class.

    ``skeleton_shape[i]`` is the parent of block ``i + 1`` in the skeleton
    (0 is the control-node); ``attachment[i]`` is ``(parent, parent_offset,
    child_offset)``.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > n_max:
        raise ValueError(f"n={n} exceeds n_max={n_max}")
    return [_entry(canonical_relabel(_build(forest))) for forest in _forests(n)]


# -- general isomorphism --------------------------------------------------------


def _degree_signature(G: SparsityPattern) -> list:
    indeg = [0] * G.num_nodes
    loops = [0] * G.num_nodes
    for u, v in G.edges:
        indeg[v] += 1
        if u == v:
            loops[u] = 1
    return [
        (G.is_state(v), len(G.successors[v]), indeg[v], loops[v]) for v in range(G.num_nodes)
    ]


def are_isomorphic(G1: SparsityPattern, G2: SparsityPattern, limit: int = ISOMORPHISM_NODE_LIMIT) -> bool:
    """Type-respecting isomorphism by backtracking with degree pruning."""
    if (G1.n, G1.m, len(G1.edges)) != (G2.n, G2.m, len(G2.edges)):
        return False
    if G1.num_nodes > limit:
        raise ValueError(f"isomorphism test limited to {limit} nodes")
    sig1, sig2 = _degree_signature(G1), _degree_signature(G2)
    if sorted(sig1) != sorted(sig2):
        return False
    total = G1.num_nodes
    # most constrained nodes first
    order = sorted(range(total), key=lambda v: (-len(G1.successors[v]) - len(G1.predecessors[v]), v))
    mapping: dict = {}
    used = [False] * total

    def consistent(v, w):
        for x in G1.successors[v]:
            if x in mapping and (w, mapping[x]) not in G2.edges:
                return False
        for x in G1.predecessors[v]:
            if x in mapping and (mapping[x], w) not in G2.edges:
                return False
        if ((v, v) in G1.edges) != ((w, w) in G2.edges):
            return False
        return True

    def extend(pos):
        if pos == total:
            return True
        v = order[pos]
        for w in range(total):
            if used[w] or sig2[w] != sig1[v] or not consistent(v, w):
                continue
            mapping[v] = w
            used[w] = True
            if extend(pos + 1):
                return True
            del mapping[v]
            used[w] = False
        return False

    return extend(0)


@lru_cache(maxsize=4096)
def canonical_form(G: SparsityPattern) -> tuple:
    """Lexicographically smallest sorted edge list over type-respecting relabelings.

    Exhaustive over state and control permutations, so only for small
    patterns.
    """
    if G.num_nodes > ISOMORPHISM_NODE_LIMIT:
        raise ValueError("canonical_form limited to small patterns")
    best = None
    for ps in itertools.permutations(range(G.n)):
        for pc in itertools.permutations(range(G.n, G.num_nodes)):
            perm = ps + pc
            enc = tuple(sorted((perm[u], perm[v]) for u, v in G.edges))
            if best is None or enc < best:
                best = enc
    return (G.n, G.m, best)
