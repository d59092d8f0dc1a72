import numpy as np
import pytest

from halfcell import GeometryError
from halfcell.microgen import LaguerreDiagram, SeedSphere, build_connectivity, minimum_spanning_tree


def kruskal_weight(n, weighted_edges):
    """Independent MST total weight: Kruskal with union-find."""
    parent = list(range(n))

    def root(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    total, used = 0.0, 0
    for i, j, w in sorted(weighted_edges, key=lambda e: (e[2], e[0], e[1])):
        ri, rj = root(i), root(j)
        if ri != rj:
            parent[ri] = rj
            total += w
            used += 1
    assert used == n - 1, "input graph disconnected"
    return total


def fake_diagram(n, adjacency):
    seeds = [SeedSphere((float(i), 0.0, 0.0), 1.0) for i in range(n)]
    return LaguerreDiagram(seeds, np.zeros((1, 1, n), dtype=np.int32),
                           adjacency, np.ones(n), 1.0)


def test_triangle_mst_two_smallest_edges():
    # weights 1/area: areas (1, 1/2, 1/3) -> weights (1, 2, 3)
    tree = minimum_spanning_tree(3, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0)])
    assert tree == {(0, 1), (1, 2)}


def test_beta_zero_gives_exactly_mst():
    adj = [(0, 1, 4.0), (1, 2, 2.0), (0, 2, 1.0), (2, 3, 5.0), (1, 3, 0.5)]
    diag = fake_diagram(4, adj)
    g = build_connectivity(diag, 0.0, np.random.default_rng(0))
    assert g.edges == g.mst_edges
    assert kruskal_weight(4, [(i, j, 1.0 / a) for i, j, a in adj]) == pytest.approx(
        sum(1.0 / dict(((i, j), a) for i, j, a in adj)[e] for e in g.mst_edges))


def test_mst_weight_matches_kruskal_on_random_graphs():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        n = int(rng.integers(3, 51))
        # random connected graph: a random spanning chain plus extras
        edges = {}
        order = rng.permutation(n)
        for a, b in zip(order[:-1], order[1:]):
            i, j = min(a, b), max(a, b)
            edges[(i, j)] = float(rng.random() + 0.01)
        for _ in range(2 * n):
            a, b = rng.integers(0, n, 2)
            if a != b:
                i, j = min(a, b), max(a, b)
                edges.setdefault((i, j), float(rng.random() + 0.01))
        wedges = [(i, j, w) for (i, j), w in edges.items()]
        tree = minimum_spanning_tree(n, wedges)
        total = sum(edges[e] for e in tree)
        assert total == pytest.approx(kruskal_weight(n, wedges), rel=1e-12)


def test_extra_edges_monotone_and_deterministic():
    rng = np.random.default_rng(5)
    adj = []
    n = 12
    for i in range(n - 1):
        adj.append((i, i + 1, 1.0 + rng.random()))
    for _ in range(20):
        a, b = rng.integers(0, n, 2)
        if a != b and (min(a, b), max(a, b)) not in [(x, y) for x, y, _ in adj]:
            adj.append((min(a, b), max(a, b), 0.2 + 3.0 * rng.random()))
    diag = fake_diagram(n, adj)
    g1 = build_connectivity(diag, 2.0, np.random.default_rng(9))
    g2 = build_connectivity(diag, 2.0, np.random.default_rng(9))
    assert g1.edges == g2.edges
    assert g1.mst_edges <= g1.edges
    assert g1.is_connected()


def test_disconnected_adjacency_raises():
    adj = [(0, 1, 1.0), (2, 3, 1.0)]
    diag = fake_diagram(4, adj)
    with pytest.raises(GeometryError):
        build_connectivity(diag, 0.0, np.random.default_rng(0))
