from itertools import combinations

import networkx as nx
import numpy as np
import pytest

from unitdist.errors import DidNotDecide, PreconditionViolated
from unitdist.graph import (
    Graph,
    clique_number,
    complement_matching,
    decompose_degree2,
    degeneracy,
    find_forbidden,
    k33_components,
    max_degree,
    peel_exact_degree3,
    peel_min_degree,
)

from graphs import complete_minus, cube, cycle, has_k33_component, k33, path, random_max_degree


def gnp(n, p, seed):
    return Graph.from_networkx(nx.gnp_random_graph(n, p, seed=seed))


def test_graph_rejects_bad_adjacency():
    with pytest.raises(PreconditionViolated):
        Graph(2, (frozenset({1}), frozenset()))
    with pytest.raises(PreconditionViolated):
        Graph.from_edges(2, [(0, 0)])
    with pytest.raises(PreconditionViolated):
        Graph.from_edges(2, [(0, 2)])


def test_edge_count_is_half_degree_sum():
    G = cube()
    assert G.m == 12
    assert sum(G.degree(v) for v in G.vertices()) == 2 * G.m


def test_max_degree():
    assert max_degree(Graph.empty(3)) == 0
    assert max_degree(cycle(5)) == 2
    assert max_degree(Graph.complete(4)) == 3


def test_induced_and_complement():
    H, labels = cycle(6).induced([1, 2, 3, 5])
    assert labels == (1, 2, 3, 5)
    assert H.edges() == [(0, 1), (1, 2)]
    assert Graph.complete(4).complement().m == 0


def test_peel_path_is_one_degenerate():
    peel = peel_min_degree(path(4), 1)
    assert sorted(peel.order) == [0, 1, 2, 3]
    assert not peel.core


def test_peel_keeps_k4():
    peel = peel_min_degree(Graph.complete(4), 2)
    assert peel.order == ()
    assert peel.core == frozenset(range(4))


def test_peel_removes_pendant_from_k4():
    G = Graph.from_edges(5, [*combinations(range(4), 2), (3, 4)])
    peel = peel_min_degree(G, 2)
    assert peel.order == (4,)
    assert peel.core == frozenset(range(4))
    assert peel.removed_neighbors[4] == frozenset({3})


def test_peel_replay_reproduces_core():
    G = complete_minus(6, [(0, 1)]).disjoint_union(cycle(5))
    peel = peel_min_degree(G, 2)
    alive = set(range(G.n))
    for v in peel.order:
        assert G.adj[v] & alive == peel.removed_neighbors[v]
        alive.remove(v)
    assert alive == peel.core
    assert all(G.degree_in(v, peel.core) > 2 for v in peel.core)


def test_degeneracy():
    assert degeneracy(Graph.empty(3)) == 0
    assert degeneracy(path(5)) == 1
    assert degeneracy(cycle(7)) == 2
    assert degeneracy(Graph.complete(5)) == 4
    assert degeneracy(cube()) == 3


def test_peel_exact_degree3_cycle():
    peel = peel_exact_degree3(cycle(6))
    assert peel.order == ()
    assert peel.core == frozenset(range(6))


def test_peel_exact_degree3_k4():
    peel = peel_exact_degree3(Graph.complete(4))
    assert peel.order == (0,)
    assert max_degree(Graph.complete(4), peel.core) == 2


def test_peel_exact_degree3_cube():
    G = cube()
    peel = peel_exact_degree3(G)
    W = set(peel.order)
    assert len(W) == 4
    assert not any(G.adj[w] & W for w in W)
    assert all(G.adj[w] <= peel.core for w in W)
    assert max_degree(G, peel.core) <= 2


def test_peel_exact_degree3_rejects_degree4():
    with pytest.raises(PreconditionViolated):
        peel_exact_degree3(Graph.complete(5))


def test_decompose_paths_and_cycles():
    G = cycle(4).disjoint_union(path(3))
    dec = decompose_degree2(G)
    assert [(c.kind, len(c)) for c in dec.components] == [("cycle", 4), ("path", 3)]
    for comp in dec.components:
        assert all(G.has_edge(u, v) for u, v in comp.edges())


def test_decompose_isolated_and_triangle():
    dec = decompose_degree2(Graph.empty(2))
    assert [(c.kind, c.vertices) for c in dec.components] == [("path", (0,)), ("path", (1,))]
    (tri,) = decompose_degree2(cycle(3)).components
    assert tri.kind == "cycle" and sorted(tri.vertices) == [0, 1, 2]


def test_decompose_rejects_degree3():
    with pytest.raises(PreconditionViolated):
        decompose_degree2(Graph.complete(4))


def test_find_forbidden_clique():
    found = find_forbidden(Graph.complete(5), 4)
    assert found.clique == (0, 1, 2, 3, 4)
    assert found.any


def test_find_forbidden_near_clique():
    G = complete_minus(6, [(3, 4), (3, 5), (4, 5)])
    found = find_forbidden(G, 4)
    assert found.clique is None
    assert found.near_clique == (0, 1, 2, 3, 4, 5)


def test_find_forbidden_nothing_in_cycle():
    found = find_forbidden(cycle(6), 3)
    assert not found.any
    assert found.describe() == []


def test_find_forbidden_reports_k33():
    found = find_forbidden(k33().disjoint_union(path(2)), 3)
    assert found.k33 == (0, 1, 2, 3, 4, 5)
    assert not found.any
    assert k33_components(cube()) == []


def test_find_forbidden_node_cap():
    with pytest.raises(DidNotDecide):
        find_forbidden(Graph.complete(8), 7, node_cap=3)


def test_clique_number():
    assert clique_number(Graph.empty(0)) == 0
    assert clique_number(Graph.empty(3)) == 1
    assert clique_number(cube()) == 2
    assert clique_number(Graph.complete(4).disjoint_union(cycle(5))) == 4


def test_complement_matching_c4():
    assert complement_matching(cycle(4), 2) == [(0, 2), (1, 3)]


def test_complement_matching_absent_in_clique():
    assert complement_matching(Graph.complete(4), 1) is None


def test_complement_matching_petersen():
    G = Graph.from_networkx(nx.petersen_graph())
    pairs = complement_matching(G, 5)
    assert len(pairs) == 5
    assert len({v for p in pairs for v in p}) == 10
    assert not any(G.has_edge(u, v) for u, v in pairs)


@pytest.mark.parametrize("seed", range(45))
def test_peel_agrees_with_core_numbers(seed):
    G = gnp(5 + seed, [0.05, 0.15, 0.3][seed % 3], seed)
    k = max(nx.core_number(G.to_networkx()).values())
    assert degeneracy(G) == k
    assert not peel_min_degree(G, k).core
    if k:
        core = peel_min_degree(G, k - 1).core
        assert core
        assert all(G.degree_in(v, core) >= k for v in core)


def test_peel_exact_degree3_random_subcubic():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        G = random_max_degree(int(rng.integers(4, 40)), 3, rng)
        peel = peel_exact_degree3(G)
        W = set(peel.order)
        assert W | peel.core == set(range(G.n))
        assert not any(G.adj[w] & W for w in W)
        for w in W:
            assert len(peel.removed_neighbors[w]) == 3
            assert peel.removed_neighbors[w] <= peel.core
        assert max_degree(G, peel.core) <= 2


def _brute_forbidden(G, d):
    def complete_except(S, T=()):
        return all(G.has_edge(u, v) for u, v in combinations(S, 2) if not (u in T and v in T))

    clique = any(complete_except(S) for S in combinations(range(G.n), d + 1))
    near = any(complete_except(S, T) for S in combinations(range(G.n), d + 2) for T in combinations(S, 3))
    return clique, near


@pytest.mark.parametrize("seed", range(60))
def test_find_forbidden_matches_subset_enumeration(seed):
    n, d = 5 + seed % 5, 2 + seed % 3
    G = gnp(n, 0.35 + 0.1 * (seed % 4), seed)
    found = find_forbidden(G, d)
    clique, near = _brute_forbidden(G, d)
    assert (found.clique is not None) == clique
    assert (found.near_clique is not None) == near
    if found.clique:
        assert len(found.clique) == d + 1
        assert len(G.edges(found.clique)) == d * (d + 1) // 2
    if found.near_clique:
        assert len(found.near_clique) == d + 2
        assert len(G.edges(found.near_clique)) >= (d + 2) * (d + 1) // 2 - 3
    assert (found.k33 is not None) == has_k33_component(G)
