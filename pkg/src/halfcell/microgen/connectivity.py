"""Connectivity graph on tessellation cells: spanning tree plus facet-biased extras."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from ..errors import GeometryError
from .laguerre import LaguerreDiagram


@dataclass
class ConnectivityGraph:
    """Which particles must touch. Edges are unordered cell index pairs."""

    n_nodes: int
    edges: set[tuple[int, int]]
    mst_edges: set[tuple[int, int]] = field(default_factory=set)

    def neighbors(self, i: int) -> list[int]:
        out = [b if a == i else a for a, b in self.edges if i in (a, b)]
        return sorted(out)

    def is_connected(self) -> bool:
        if self.n_nodes == 0:
            return False
        adj = {i: [] for i in range(self.n_nodes)}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        seen = {0}
        stack = [0]
        while stack:
            for m in adj[stack.pop()]:
                if m not in seen:
                    seen.add(m)
                    stack.append(m)
        return len(seen) == self.n_nodes


def minimum_spanning_tree(n_nodes: int, weighted_edges) -> set[tuple[int, int]]:
    """Prim's algorithm. ``weighted_edges`` yields (i, j, weight).

    Ties are broken by the lexicographically smallest (weight, i, j) heap key,
    i.e. by the lowest index pair.
    """
    adj: dict[int, list[tuple[float, int]]] = {i: [] for i in range(n_nodes)}
    for i, j, w in weighted_edges:
        adj[i].append((w, j))
        adj[j].append((w, i))

    in_tree = [False] * n_nodes
    in_tree[0] = True
    heap: list[tuple[float, int, int]] = []
    for w, j in adj[0]:
        heapq.heappush(heap, (w, min(0, j), max(0, j)))
    tree: set[tuple[int, int]] = set()
    # heap keys are (weight, lo, hi): pops are deterministic under weight ties
    tree_nodes = 1
    while heap and tree_nodes < n_nodes:
        w, a, b = heapq.heappop(heap)
        if in_tree[a] and in_tree[b]:
            continue
        new = b if in_tree[a] else a
        in_tree[new] = True
        tree.add((a, b))
        tree_nodes += 1
        for w2, j in adj[new]:
            if not in_tree[j]:
                heapq.heappush(heap, (w2, min(new, j), max(new, j)))
    if tree_nodes != n_nodes:
        raise GeometryError("adjacency graph is disconnected; no spanning tree exists")
    return tree


def build_connectivity(diagram: LaguerreDiagram, beta: float,
                       rng: np.random.Generator) -> ConnectivityGraph:
    """Spanning tree of the facet-weighted adjacency graph plus random extra edges.

    Edge weights are 1/facet_area, so the tree prefers large shared facets.
    Every non-tree adjacency pair (i, j) is added independently with
    probability ``1 - exp(-beta * facet_area / mean_facet_area)``.
    """
    n = diagram.n_cells
    if n == 1:
        return ConnectivityGraph(1, set(), set())
    pairs = [(i, j, area) for i, j, area in diagram.adjacency if area > 0]
    if not pairs:
        raise GeometryError("tessellation has no positive-area facets")

    mst = minimum_spanning_tree(n, [(i, j, 1.0 / area) for i, j, area in pairs])
    edges = set(mst)

    mean_area = float(np.mean([a for _, _, a in pairs]))
    for i, j, area in pairs:
        key = (min(i, j), max(i, j))
        if key in mst:
            continue
        p = 1.0 - np.exp(-beta * area / mean_area)
        if rng.random() < p:
            edges.add(key)
    return ConnectivityGraph(n, edges, mst)
