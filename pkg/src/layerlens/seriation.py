"""Distance-matrix row/column orderings for the matrix views.

Three deterministic families: dendrogram leaf order, nearest-neighbor
chaining, and greedy path assembly by ascending pair distance. All three
depend only on the rank order of distances.
"""

from __future__ import annotations

import numpy as np

from .cluster import Dendrogram, Linkage, build_dendrogram, check_distance_matrix


def leaf_order(dendrogram: Dendrogram) -> list[int]:
    """Left-to-right leaves; at each merge the subtree containing the
    smaller minimum leaf id comes first."""
    n = dendrogram.n_leaves
    members: dict[int, list[int]] = {i: [i] for i in range(n)}
    mins: dict[int, int] = {i: i for i in range(n)}
    for t, (left, right, _) in enumerate(dendrogram.merges):
        lo = min(mins[left], mins[right])
        if mins[left] <= mins[right]:
            seq = members.pop(left) + members.pop(right)
        else:
            seq = members.pop(right) + members.pop(left)
        node = n + t
        members[node] = seq
        mins[node] = lo
    (order,) = members.values()
    return order


def order_linkage(dist: np.ndarray, linkage: Linkage) -> list[int]:
    d = check_distance_matrix(dist)
    if d.shape[0] == 1:
        return [0]
    return leaf_order(build_dendrogram(d, linkage))


def order_nn_heuristic(dist: np.ndarray) -> list[int]:
    """Chain from id 0, always hopping to the nearest unvisited point."""
    d = check_distance_matrix(dist)
    n = d.shape[0]
    visited = np.zeros(n, dtype=bool)
    order = [0]
    visited[0] = True
    for _ in range(n - 1):
        row = d[order[-1]].copy()
        row[visited] = np.inf
        nxt = int(np.argmin(row))  # argmin takes the lowest id on ties
        order.append(nxt)
        visited[nxt] = True
    return order


def order_greedy(dist: np.ndarray) -> list[int]:
    """Assemble a path from the globally cheapest pairs.

    Pairs are scanned in ascending (distance, i, j); a pair is accepted if
    both endpoints still have path degree < 2 and the edge closes no cycle.
    The finished Hamiltonian path is read off from its lower-id endpoint.
    """
    d = check_distance_matrix(dist)
    n = d.shape[0]
    if n == 1:
        return [0]
    iu, ju = np.triu_indices(n, 1)
    order = np.lexsort((ju, iu, d[iu, ju]))
    degree = np.zeros(n, dtype=np.int64)
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    adjacency: dict[int, list[int]] = {i: [] for i in range(n)}
    accepted = 0
    for e in order:
        u, v = int(iu[e]), int(ju[e])
        if degree[u] >= 2 or degree[v] >= 2:
            continue
        ru, rv = find(u), find(v)
        if ru == rv:
            continue
        parent[ru] = rv
        degree[u] += 1
        degree[v] += 1
        adjacency[u].append(v)
        adjacency[v].append(u)
        accepted += 1
        if accepted == n - 1:
            break
    start = min(i for i in range(n) if degree[i] <= 1)
    path = [start]
    prev = -1
    while len(path) < n:
        here = path[-1]
        nxt = [x for x in adjacency[here] if x != prev]
        prev = here
        path.append(nxt[0])
    return path
