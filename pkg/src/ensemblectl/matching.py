"""Maximum bipartite matching by augmenting paths."""
from __future__ import annotations

from collections import deque
from typing import Sequence


def maximum_matching(num_left: int, num_right: int, adj: Sequence[Sequence[int]]) -> list:
    """Return ``match_right`` where ``match_right[r]`` is the left partner or -1.

    ``adj[l]`` lists the right vertices adjacent to left vertex ``l``; the
    order of ``adj`` and of each list fixes which maximum matching is found.
    Each phase grows one BFS forest of alternating paths from a free left
    vertex.
    """
    match_left = [-1] * num_left
    match_right = [-1] * num_right
    for start in range(num_left):
        parent_right = {}
        queue = deque([start])
        found = -1
        while queue and found < 0:
            left = queue.popleft()
            for right in adj[left]:
                if right in parent_right:
                    continue
                parent_right[right] = left
                if match_right[right] == -1:
                    found = right
                    break
                queue.append(match_right[right])
        if found < 0:
            continue
        right = found
        while right != -1:
            left = parent_right[right]
            nxt = match_left[left]
            match_left[left] = right
            match_right[right] = left
            right = nxt
    return match_right
