from itertools import combinations

import numpy as np
import pytest

from unitdist.embedding import SPHERE_RADIUS, Embedding
from unitdist.errors import (
    ForbiddenSubgraphForSphere,
    K33Excluded,
    PreconditionViolated,
    TooManyEdges,
    UnreachableByTheorem,
)
from unitdist.euclid import (
    edge_threshold,
    embed_d3,
    embed_edge_bounded,
    embed_even,
    embed_max_degree,
    embed_odd,
    odd_conflicts,
    place_on_loci,
)
from unitdist.geom import glued_simplices
from unitdist.graph import Graph, find_forbidden
from unitdist.verify import Tolerances, check_embedding, lsq_realize, verify_edges, verify_sphere

from graphs import (
    circulant,
    complete_minus,
    cube,
    cycle,
    has_k33_component,
    k33,
    path,
    random_edges,
    random_max_degree,
    random_regular,
)

R = SPHERE_RADIUS


def assert_realized(G, E, d):
    assert E.dim == d
    assert len(E) == G.n
    assert verify_edges(G, E).passed
    check_embedding(G, E)


def test_edge_threshold():
    assert edge_threshold(2) == 3
    assert edge_threshold(3) == 8
    assert edge_threshold(4) == 14
    assert edge_threshold(5) == 20
    with pytest.raises(PreconditionViolated):
        edge_threshold(1)


def test_line_and_plane(rng):
    G = Graph.from_edges(5, [(0, 1), (2, 3)])
    assert_realized(G, embed_max_degree(G, 1, rng), 1)
    H = cycle(5).disjoint_union(path(4)).disjoint_union(cycle(3))
    assert_realized(H, embed_max_degree(H, 2, rng), 2)


def test_max_degree_k5_in_4_space(rng):
    G = Graph.complete(5)
    E = embed_max_degree(G, 4, rng)
    assert_realized(G, E, 4)
    assert E.meta["strategy"] == "max-degree"


def test_max_degree_rejects_k33_and_high_degree(rng):
    with pytest.raises(K33Excluded):
        embed_max_degree(k33(), 3, rng)
    with pytest.raises(PreconditionViolated):
        embed_max_degree(Graph.complete(5), 3, rng)


def test_k33_embeds_in_4_space(rng):
    assert_realized(k33(), embed_max_degree(k33(), 4, rng), 4)


def test_d3_cube(rng):
    G = cube()
    E = embed_d3(G, rng)
    assert_realized(G, E, 3)
    assert G.m == 12


def test_d3_k4_one_apex(rng):
    G = Graph.complete(4)
    E = embed_d3(G, rng)
    assert_realized(G, E, 3)
    assert sum(np.isclose(np.linalg.norm(E[v]), R) for v in range(4)) == 3


def test_d3_cycle_stays_on_sphere(rng):
    E = embed_d3(cycle(6), rng)
    assert verify_sphere(E).passed
    assert_realized(cycle(6), E, 3)


def test_d3_k33_next_to_other_components(rng):
    with pytest.raises(K33Excluded):
        embed_d3(k33().disjoint_union(cube()), rng)


@pytest.mark.parametrize("seed", range(4))
def test_d3_random_cubic(seed, rng):
    G = random_regular(16, 3, seed)
    if has_k33_component(G):
        pytest.skip("K_3,3 component")
    assert_realized(G, embed_d3(G, rng), 3)


def test_d3_random_subcubic(rng):
    for _ in range(4):
        G = random_max_degree(18, 3, rng)
        if not has_k33_component(G):
            assert_realized(G, embed_d3(G, rng), 3)


def test_even_circulant(rng):
    G = circulant(8, [1, 2])
    E = embed_even(G, 4, rng)
    assert G.m == 16
    assert_realized(G, E, 4)


def test_even_two_k5(rng):
    G = Graph.complete(5).disjoint_union(Graph.complete(5))
    assert_realized(G, embed_even(G, 4, rng), 4)


def test_even_perfect_matching(rng):
    G = Graph.from_edges(8, [(0, 1), (2, 3), (4, 5), (6, 7)])
    E = embed_even(G, 4, rng)
    assert_realized(G, E, 4)
    assert verify_sphere(E).passed


@pytest.mark.parametrize("d", [4, 6, 8])
def test_even_random(rng, d):
    G = random_max_degree(24, d, rng)
    assert_realized(G, embed_even(G, d, rng), d)


def test_even_rejects_odd_dimension(rng):
    with pytest.raises(PreconditionViolated):
        embed_even(cycle(4), 5, rng)


def test_odd_circulant(rng):
    G = circulant(12, [1, 2, 3])
    E = embed_odd(G, 5, rng)
    assert G.m == 30
    assert_realized(G, E, 5)


def test_odd_random_regular(rng):
    G = random_regular(20, 5, seed=7)
    assert_realized(G, embed_odd(G, 5, rng), 5)


def test_odd_accepts_lower_degree(rng):
    G = random_max_degree(20, 4, rng)
    assert_realized(G, embed_odd(G, 5, rng), 5)


@pytest.mark.parametrize("d", [5, 7])
def test_odd_random(rng, d):
    for _ in range(2):
        G = random_max_degree(24, d, rng)
        assert_realized(G, embed_max_degree(G, d, rng), d)


def test_odd_rejects_even_dimension(rng):
    with pytest.raises(PreconditionViolated):
        embed_odd(cycle(4), 6, rng)


def test_odd_conflicts_group_shared_great_circles():
    # sphere part: 0,2 antipodal; 1 and 3 elsewhere; 3 is the antipode of 4
    G = Graph.from_edges(9, [
        (5, 0), (5, 2), (5, 1),
        (6, 0), (6, 2), (6, 1),
        (7, 0), (7, 2), (7, 1),
        (8, 0), (8, 2), (8, 3),
    ])
    conflicts = odd_conflicts(G, [5, 6, 7, 8], frozenset(range(5)), [(0, 2), (3, 4)])
    assert len(conflicts) == 1
    assert conflicts[0].members == frozenset({5, 6, 7})
    assert conflicts[0].kind == "triple"


def test_odd_conflicts_ignore_non_antipodal_neighbours():
    G = Graph.from_edges(6, [(4, 0), (4, 1), (4, 2), (5, 0), (5, 1), (5, 2)])
    assert odd_conflicts(G, [4, 5], frozenset(range(4)), []) == []


def test_place_on_loci(rng):
    G = Graph.from_edges(4, [(0, 2), (1, 2), (2, 3), (0, 3)])
    pos = {0: np.zeros(3), 1: np.array([1.0, 0, 0])}
    place_on_loci(G, pos, [2, 3], 3, rng)
    assert_realized(G, Embedding(3, pos), 3)


def test_place_on_loci_unreachable(rng):
    G = Graph.from_edges(3, [(0, 2), (1, 2)])
    pos = {0: np.zeros(2), 1: np.array([5.0, 0])}
    with pytest.raises(UnreachableByTheorem):
        place_on_loci(G, pos, [2], 2, rng)


def test_edge_bounded_glued(rng):
    G = complete_minus(6, [(0, 1)])
    assert G.m == edge_threshold(4)
    E = embed_edge_bounded(G, 4, "euclid", rng)
    assert_realized(G, E, 4)
    assert E.meta["case"] == "glued-simplices"


def test_edge_bounded_clique_with_pendants(rng):
    G = Graph.from_edges(7, [*combinations(range(5), 2), (0, 5), (1, 6)])
    E = embed_edge_bounded(G, 4, "euclid", rng)
    assert_realized(G, E, 4)
    assert E.meta["case"] == "clique-apex"


def test_edge_bounded_triangle_in_plane(rng):
    G = Graph.complete(3).disjoint_union(Graph.empty(2))
    assert_realized(G, embed_edge_bounded(G, 2, "euclid", rng), 2)


def test_edge_bounded_star_in_plane(rng):
    G = Graph.from_edges(5, [(0, 1), (0, 2), (0, 3)])
    assert_realized(G, embed_edge_bounded(G, 2, "euclid", rng), 2)


def test_edge_bounded_too_many_edges(rng):
    with pytest.raises(TooManyEdges):
        embed_edge_bounded(Graph.complete(6), 4, "euclid", rng)


def test_edge_bounded_sphere_forbidden(rng):
    with pytest.raises(ForbiddenSubgraphForSphere):
        embed_edge_bounded(Graph.complete(5), 4, "sphere", rng)
    with pytest.raises(ForbiddenSubgraphForSphere):
        embed_edge_bounded(complete_minus(6, [(3, 4), (3, 5), (4, 5)]), 4, "sphere", rng)


def test_edge_bounded_sphere_cube(rng):
    G = cube()
    E = embed_edge_bounded(G, 4, "sphere", rng)
    assert_realized(G, E, 4)
    assert verify_sphere(E).passed


@pytest.mark.parametrize("d", [3, 4, 5])
def test_edge_bounded_random_euclid(rng, d):
    for _ in range(6):
        G = random_edges(2 * d + 2, edge_threshold(d), rng)
        assert_realized(G, embed_edge_bounded(G, d, "euclid", rng), d)


@pytest.mark.parametrize("d", [3, 4, 5])
def test_edge_bounded_random_sphere(rng, d):
    done = 0
    while done < 4:
        G = random_edges(2 * d + 1, edge_threshold(d), rng)
        if find_forbidden(G, d).any:
            continue
        E = embed_edge_bounded(G, d, "sphere", rng)
        assert_realized(G, E, d)
        assert verify_sphere(E).passed
        done += 1


def test_glued_simplices_realize_k_minus_edge():
    E = glued_simplices(4)
    assert verify_edges(complete_minus(6, [(4, 5)]), E).passed


def _bounded_degree_graph(n, d, rng):
    while True:
        G = random_max_degree(n, d, rng)
        if d != 3 or not has_k33_component(G):
            return G


@pytest.mark.slow
@pytest.mark.parametrize("d", range(1, 9))
def test_max_degree_many_random(d):
    rng = np.random.default_rng(400 + d)
    for _ in range(50):
        G = _bounded_degree_graph(int(rng.integers(2, 101)), d, rng)
        E = embed_max_degree(G, d, rng)
        assert_realized(G, E, d)
        assert verify_edges(G, E).max_edge_deviation <= 1e-9


@pytest.mark.slow
@pytest.mark.parametrize("d", [4, 5])
def test_edge_bounded_many_random(d):
    rng = np.random.default_rng(500 + d)
    g = edge_threshold(d)
    for _ in range(200):
        n = int(rng.integers(d + 2, 3 * d + 1))
        G = random_edges(n, int(rng.integers(0, g + 1)), rng)
        E = embed_edge_bounded(G, d, "euclid", rng)
        assert_realized(G, E, d)


@pytest.mark.slow
def test_least_squares_agrees_with_constructions():
    rng = np.random.default_rng(600)
    for i in range(50):
        d = 2 + i % 3
        G = _bounded_degree_graph(int(rng.integers(d + 1, 13)), d, rng)
        assert_realized(G, embed_max_degree(G, d, rng), d)
        E = lsq_realize(G, d, rng)
        assert E is not None
        assert verify_edges(G, E, Tolerances(eps_edge=1e-7)).passed
