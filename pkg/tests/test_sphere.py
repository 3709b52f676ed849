from itertools import combinations

import networkx as nx
import numpy as np
import pytest

from unitdist.embedding import SPHERE_RADIUS, Embedding
from unitdist.errors import NotDegenerate, NotOnSphere, PreconditionViolated
from unitdist.geom import Frame
from unitdist.graph import Component, Graph, decompose_degree2
from unitdist.sphere import (
    embed_chains_on_circle,
    embed_cross_polytope,
    embed_degenerate_sphere,
    embed_gp_s2,
    embed_matchings_on_circles,
    embed_max_degree_sphere,
    place_chains,
    place_peeled_vertex,
)
from unitdist.verify import verify_edges, verify_gp, verify_sphere

from graphs import cycle, path, random_degenerate, random_max_degree

R = SPHERE_RADIUS


def assert_on_sphere(G, E):
    assert verify_edges(G, E).passed
    assert verify_sphere(E).passed
    assert len(E) == G.n


def test_single_edge_on_circle(rng):
    G = Graph.from_edges(2, [(0, 1)])
    E = embed_matchings_on_circles(G, [{0, 1}], 2, rng)
    assert_on_sphere(G, E)


def test_isolated_pair_on_circle(rng):
    E = embed_matchings_on_circles(Graph.empty(2), [{0, 1}], 2, rng)
    assert np.linalg.norm(E[0] - E[1]) > 1e-6
    assert np.linalg.norm(E[0] + E[1]) > 1e-6


def test_two_circles_are_orthogonal(rng):
    G = Graph.from_edges(4, [(0, 1), (2, 3)])
    E = embed_matchings_on_circles(G, [{0, 1}, {2, 3}], 4, rng)
    for u, v in combinations(range(4), 2):
        assert np.isclose(np.linalg.norm(E[u] - E[v]), 1)


def test_matchings_reject_paths_and_overflow(rng):
    with pytest.raises(PreconditionViolated):
        embed_matchings_on_circles(path(3), [{0, 1, 2}], 2, rng)
    with pytest.raises(PreconditionViolated):
        embed_matchings_on_circles(Graph.empty(2), [{0}, {1}], 3, rng)


def test_place_chains_quarter_turns(rng):
    pos = place_chains([(0, 1, 2, 3), (4,)], Frame.standard(2), rng)
    for u, v in [(0, 1), (1, 2), (2, 3), (3, 0)]:
        assert np.isclose(np.linalg.norm(pos[u] - pos[v]), 1)
    for v in range(4):
        assert min(np.linalg.norm(pos[4] - pos[v]), np.linalg.norm(pos[4] + pos[v])) > 1e-6


def test_chains_on_circle_rejects_long_pieces(rng):
    G = path(5)
    with pytest.raises(PreconditionViolated):
        embed_chains_on_circle(G, decompose_degree2(G).components, Frame.standard(2), rng)
    with pytest.raises(PreconditionViolated):
        embed_chains_on_circle(G, [Component("path", (0, 2))], Frame.standard(2), rng)


def test_chains_on_circle_square_and_path(rng):
    G = cycle(4).disjoint_union(path(3))
    pos = embed_chains_on_circle(G, decompose_degree2(G).components, Frame.standard(2), rng)
    assert verify_edges(G, Embedding(2, pos)).passed


def test_gp_single_edge(rng):
    G = Graph.from_edges(2, [(0, 1)])
    E, cert = embed_gp_s2(G, Frame.standard(3), rng)
    assert abs(E[0] @ E[1]) < 1e-12
    assert_on_sphere(G, E)


def test_gp_triangle_is_orthogonal(rng):
    E, _ = embed_gp_s2(cycle(3), Frame.standard(3), rng)
    for u, v in combinations(range(3), 2):
        assert np.isclose(np.linalg.norm(E[u] - E[v]), 1)


def test_gp_square_has_one_antipodal_pair(rng):
    G = cycle(4)
    E, cert = embed_gp_s2(G, Frame.standard(3), rng)
    assert cert.antipodal_pairs == [(0, 2)]
    assert np.allclose(E[0], -E[2])
    assert_on_sphere(G, E)
    assert verify_gp(E, cert.antipodal_pairs).passed


def test_gp_mixed_components(rng):
    G = cycle(4).disjoint_union(cycle(5)).disjoint_union(path(4)).disjoint_union(cycle(4))
    E, cert = embed_gp_s2(G, Frame.standard(3), rng)
    assert_on_sphere(G, E)
    assert len(cert.antipodal_pairs) == 2
    assert cert.passed


def test_gp_without_check_only_separates(rng):
    E, cert = embed_gp_s2(cycle(6), Frame.standard(3), rng, check_gp=False)
    assert_on_sphere(cycle(6), E)
    assert cert.offenders == []


def test_gp_rejects_bad_input(rng):
    with pytest.raises(PreconditionViolated):
        embed_gp_s2(cycle(3), Frame.standard(2), rng)
    with pytest.raises(PreconditionViolated):
        embed_gp_s2(Graph.complete(4), Frame.standard(3), rng)


def test_max_degree_sphere_k2(rng):
    G = Graph.from_edges(2, [(0, 1)])
    E = embed_max_degree_sphere(G, 2, rng)
    assert np.isclose(E[0] @ E[1], 0)


def test_max_degree_sphere_c5(rng):
    E = embed_max_degree_sphere(cycle(5), 3, rng)
    assert_on_sphere(cycle(5), E)


def test_max_degree_sphere_petersen(rng):
    G = Graph.from_networkx(nx.petersen_graph())
    E = embed_max_degree_sphere(G, 4, rng)
    assert_on_sphere(G, E)
    assert G.m == 15


@pytest.mark.parametrize("d", [4, 5, 6, 7])
def test_max_degree_sphere_random(rng, d):
    G = random_max_degree(20, d - 1, rng)
    assert_on_sphere(G, embed_max_degree_sphere(G, d, rng))


def test_max_degree_sphere_rejects_high_degree(rng):
    with pytest.raises(PreconditionViolated):
        embed_max_degree_sphere(Graph.complete(4), 3, rng)


def test_peeled_vertex_orthogonal_to_neighbour(rng):
    E = Embedding(3, {0: [R, 0, 0]})
    p = place_peeled_vertex(E, [0], rng)
    assert abs(p[0]) < 1e-12
    assert np.isclose(np.linalg.norm(p), R)


def test_peeled_vertex_two_neighbours(rng):
    E = Embedding(4, {0: [R, 0, 0, 0], 1: [0, R, 0, 0]})
    p = place_peeled_vertex(E, [0, 1], rng)
    assert np.allclose(p[:2], 0, atol=1e-12)
    assert np.isclose(np.linalg.norm(p), R)


def test_peeled_vertex_no_neighbours(rng):
    E = Embedding(2, {0: [R, 0]})
    p = place_peeled_vertex(E, [], rng)
    assert np.linalg.norm(p - E[0]) > 1e-6


def test_peeled_vertex_errors(rng):
    E = Embedding(3, {0: [R, 0, 0], 1: [0, R, 0], 2: [1.0, 1.0, 1.0]})
    with pytest.raises(PreconditionViolated):
        place_peeled_vertex(E, [0, 1], rng)
    with pytest.raises(NotOnSphere):
        place_peeled_vertex(E, [2], rng)


def test_degenerate_tree(rng):
    G = Graph.from_networkx(nx.random_labeled_tree(15, seed=3))
    assert_on_sphere(G, embed_degenerate_sphere(G, 3, rng))


def test_degenerate_rejects_cycle_at_d3(rng):
    with pytest.raises(NotDegenerate):
        embed_degenerate_sphere(cycle(4), 3, rng)


@pytest.mark.parametrize("d", [3, 4, 5])
def test_degenerate_clique(rng, d):
    G = Graph.complete(d)
    assert_on_sphere(G, embed_degenerate_sphere(G, d + 2, rng))


@pytest.mark.parametrize("t", [1, 2, 3])
def test_degenerate_random(rng, t):
    G = random_degenerate(25, t, rng)
    assert_on_sphere(G, embed_degenerate_sphere(G, t + 2, rng))


def test_cross_polytope_square():
    E = embed_cross_polytope(cycle(4), [(0, 2), (1, 3)], 2)
    assert np.allclose(E.points(), [[R, 0], [0, R], [-R, 0], [0, -R]])


def test_cross_polytope_graph_d4():
    G = Graph.from_edges(8, [(u, v) for u, v in combinations(range(8), 2) if v != u + 4])
    E = embed_cross_polytope(G, [(i, i + 4) for i in range(4)], 4)
    assert G.m == 2 * 4 * 3
    assert_on_sphere(G, E)


def test_cross_polytope_without_pairs_is_orthobasis():
    E = embed_cross_polytope(Graph.complete(3), [], 3)
    assert np.allclose(E.points(), R * np.eye(3))


def test_cross_polytope_rejects_edges_and_overflow():
    with pytest.raises(PreconditionViolated):
        embed_cross_polytope(cycle(4), [(0, 1)], 2)
    with pytest.raises(PreconditionViolated):
        embed_cross_polytope(Graph.complete(4), [], 3)


def test_gp_many_random_runs():
    rng = np.random.default_rng(7)
    retries = []
    for _ in range(200):
        G = random_max_degree(int(rng.integers(3, 31)), 2, rng)
        E, cert = embed_gp_s2(G, Frame.standard(3), rng)
        assert_on_sphere(G, E)
        assert cert.passed
        assert verify_gp(E, cert.antipodal_pairs).passed
        retries.append(E.meta["retries"])
    assert np.median(retries) <= 2
    assert max(retries) <= 50


@pytest.mark.slow
@pytest.mark.parametrize("d", range(2, 9))
def test_max_degree_sphere_many_random(d):
    rng = np.random.default_rng(200 + d)
    for _ in range(50):
        G = random_max_degree(int(rng.integers(2, 60)), d - 1, rng)
        E = embed_max_degree_sphere(G, d, rng)
        assert E.dim == d
        assert_on_sphere(G, E)


@pytest.mark.slow
@pytest.mark.parametrize("d", range(3, 9))
def test_degenerate_many_random(d):
    rng = np.random.default_rng(300 + d)
    for _ in range(100):
        G = random_degenerate(int(rng.integers(2, 40)), d - 2, rng)
        E = embed_degenerate_sphere(G, d, rng)
        assert E.dim == d
        assert_on_sphere(G, E)
