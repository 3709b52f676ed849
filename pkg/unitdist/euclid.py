"""Euclidean embeddings: bounded maximum degree and bounded edge count."""

from __future__ import annotations

from collections import defaultdict
from itertools import combinations
from math import comb
from typing import Literal
import logging

import numpy as np

from .embedding import SPHERE_RADIUS, Embedding
from .errors import (
    ForbiddenSubgraphForSphere,
    GeometryError,
    InternalAssertionFailed,
    K33Excluded,
    PreconditionViolated,
    ResampleExceeded,
    TooManyEdges,
    UnreachableByTheorem,
)
from .geom import Frame, apex_points, glued_simplices, orthobasis_clique, sample_locus
from .graph import (
    SEARCH_NODE_CAP,
    Graph,
    PeelResult,
    complement_matching,
    decompose_degree2,
    find_forbidden,
    k33_components,
    max_degree,
    peel_exact_degree3,
    peel_min_degree,
)
from .helpers import retry_resample
from .partition import REFINE_ROUNDS, ConflictSet, refined_partition, select_W_conflict_free, select_W_even, split_path_cycle
from .sphere import (
    GP_MAX_ATTEMPTS,
    MAX_RETRIES,
    embed_chains_on_circle,
    embed_cross_polytope,
    embed_gp_s2,
    embed_matchings_on_circles,
    embed_max_degree_sphere,
    place_peeled,
)
from .verify import Tolerances, check_embedding

logger = logging.getLogger(__name__)

Mode = Literal["euclid", "sphere"]


def edge_threshold(d: int) -> int:
    """Largest edge count the edge-bounded induction handles in dimension d."""
    if d < 2:
        raise PreconditionViolated(f"edge threshold is defined for d >= 2, got {d}")
    return {2: 3, 3: 8}.get(d, comb(d + 2, 2) - 1)


def _place_apex(G: Graph, E: Embedding, w: int, tol: Tolerances) -> bool:
    """Put *w* at whichever apex of its neighbours is farther from placed points."""
    try:
        p_plus, p_minus, on_sphere = apex_points(E.points(sorted(G.adj[w])), E.dim)
    except GeometryError as exc:
        raise ResampleExceeded(f"neighbours of {w} are degenerate: {exc}") from exc
    placed = E.points()

    def clearance(p):
        return float(np.min(np.linalg.norm(placed - p, axis=1))) if len(placed) else np.inf

    best = max((p_plus, p_minus), key=clearance)
    if clearance(best) <= tol.eps_distinct:
        raise ResampleExceeded(f"both apexes for {w} are taken")
    E.place(w, best)
    return on_sphere


# ---------------------------------------------------------------------------
# d <= 2
# ---------------------------------------------------------------------------


def _embed_line(G: Graph) -> Embedding:
    pos = {}
    for i, comp in enumerate(G.components()):
        for j, v in enumerate(comp):
            pos[v] = np.array([3.0 * i + j])
    return Embedding(1, pos, {"strategy": "max-degree", "case": "line"})


def _embed_plane(G: Graph, rng: np.random.Generator) -> Embedding:
    """Paths as x-monotone unit chains and cycles as unit-side regular polygons, side by side."""
    pos: dict[int, np.ndarray] = {}
    x0 = 0.0
    for comp in decompose_degree2(G).components:
        k = len(comp)
        if comp.kind == "cycle":
            R = 1 / (2 * np.sin(np.pi / k))
            angles = rng.uniform(0, 2 * np.pi) + 2 * np.pi * np.arange(k) / k
            pts = R * np.column_stack([np.cos(angles), np.sin(angles)])
        else:
            steps = rng.uniform(-np.pi / 3, np.pi / 3, size=k - 1)
            moves = np.column_stack([np.cos(steps), np.sin(steps)])
            pts = np.vstack([np.zeros(2), np.cumsum(moves, axis=0)])
        pts = pts - [pts[:, 0].min() - x0, 0.0]
        pos.update(zip(comp.vertices, pts))
        x0 = pts[:, 0].max() + 2.0
    return Embedding(2, pos, {"strategy": "max-degree", "case": "plane"})


def _embed_plane_star(G: Graph, rng: np.random.Generator) -> Embedding:
    """At most three edges with a degree-3 vertex: a star, all other vertices isolated."""
    center = next(v for v in G.vertices() if G.degree(v) == 3)
    theta = rng.uniform(0, 2 * np.pi)
    pos = {center: np.zeros(2)}
    for j, leaf in enumerate(sorted(G.adj[center])):
        a = theta + 2 * np.pi * j / 3
        pos[leaf] = np.array([np.cos(a), np.sin(a)])
    x = 3.0
    for v in G.vertices():
        if v not in pos:
            pos[v] = np.array([x, 0.0])
            x += 3.0
    return Embedding(2, pos, {"strategy": "edge-bounded", "case": "star"})


# ---------------------------------------------------------------------------
# Max degree d in d-space
# ---------------------------------------------------------------------------


def embed_max_degree(G: Graph, d: int, rng: np.random.Generator, tol: Tolerances = Tolerances(),
                     max_retries: int = MAX_RETRIES, gp_max_attempts: int = GP_MAX_ATTEMPTS,
                     partition_rounds: int = REFINE_ROUNDS) -> Embedding:
    """Realize a graph of maximum degree <= d in d-space."""
    if d < 1:
        raise PreconditionViolated(f"dimension must be >= 1, got {d}")
    if max_degree(G) > d:
        raise PreconditionViolated(f"max degree {max_degree(G)} > {d}")
    if d == 1:
        E = _embed_line(G)
    elif d == 2:
        E = _embed_plane(G, rng)
    elif d == 3:
        E = embed_d3(G, rng, tol, max_retries, gp_max_attempts)
    elif d % 2 == 0:
        E = embed_even(G, d, rng, tol, max_retries, partition_rounds)
    else:
        E = embed_odd(G, d, rng, tol, max_retries, gp_max_attempts, partition_rounds)
    check_embedding(G, E, tol)
    E.meta["strategy"] = "max-degree"
    return E


def embed_d3(G: Graph, rng: np.random.Generator, tol: Tolerances = Tolerances(),
             max_retries: int = MAX_RETRIES, gp_max_attempts: int = GP_MAX_ATTEMPTS) -> Embedding:
    """Degree-3 vertices over the circles through their neighbours on a 2-sphere."""
    if max_degree(G) > 3:
        raise PreconditionViolated(f"max degree {max_degree(G)} > 3")
    k33 = k33_components(G)
    if k33:
        raise K33Excluded(f"K_3,3 component on {list(k33[0])} has no unit-distance realization in 3-space")
    peel = peel_exact_degree3(G)
    frame = Frame.standard(3)

    def build(_attempt: int) -> Embedding:
        S, cert = embed_gp_s2(G, frame, rng, peel.core, tol=tol, max_attempts=gp_max_attempts)
        if cert.redraw_flagged:
            raise ResampleExceeded(f"{cert.redraw_flagged} flagged quadruples on the core sphere")
        E = Embedding(3, S.pos, {"case": "d3", "gp_attempts": cert.attempts})
        for w in peel.order:
            _place_apex(G, E, w, tol)
        check_embedding(G, E, tol)
        return E

    E, retries = retry_resample(build, max_retries, logger, "max-degree d=3")
    E.meta["retries"] = retries
    E.trace(f"core {len(peel.core)} on the 2-sphere, {len(peel.order)} apex vertices")
    return E


def embed_even(G: Graph, d: int, rng: np.random.Generator, tol: Tolerances = Tolerances(),
               max_retries: int = MAX_RETRIES, partition_rounds: int = REFINE_ROUNDS) -> Embedding:
    """d/2 orthogonal circles of matchings plus apex vertices over 2 neighbours per circle."""
    if d < 4 or d % 2:
        raise PreconditionViolated(f"embed_even needs an even d >= 4, got {d}")
    P = refined_partition(G, d, rounds=partition_rounds)
    W = select_W_even(G, P.parts[-1])
    circles = P.parts[:-1] + [P.parts[-1] - W]
    for w in W:
        counts = [G.degree_in(w, c) for c in circles]
        if any(c != 2 for c in counts):
            raise InternalAssertionFailed(f"W vertex {w} has circle neighbour counts {counts}")

    def build(_attempt: int) -> Embedding:
        E = embed_matchings_on_circles(G, circles, d, rng, tol=tol)
        for w in sorted(W):
            if _place_apex(G, E, w, tol):
                raise InternalAssertionFailed(f"neighbours of {w} span a hyperplane through the origin")
        check_embedding(G, E, tol)
        return E

    E, retries = retry_resample(build, max_retries, logger, f"max-degree d={d}")
    E.meta.update(retries=retries, case="even")
    E.trace(f"{len(circles)} circles, {len(W)} apex vertices")
    return E


def odd_conflicts(G: Graph, candidates, sphere_part, antipodal_pairs) -> list[ConflictSet]:
    """Group candidates whose sphere neighbours span the same great circle.

    Three sphere points lie on a great circle only through an antipodal pair;
    the circle is then fixed by the pair and the third point (plus its own
    antipode, if it has one).
    """
    partner = {}
    for a, b in antipodal_pairs:
        partner[a], partner[b] = b, a
    groups: dict[frozenset[int], list[int]] = defaultdict(list)
    for w in sorted(candidates):
        N1 = G.adj[w] & sphere_part
        pair = next(((a, partner[a]) for a in sorted(N1) if partner.get(a) in N1), None)
        if pair is None:
            continue
        key = set(N1)
        for c in N1 - set(pair):
            if c in partner:
                key.add(partner[c])
        groups[frozenset(key)].append(w)
    conflicts = []
    for key, ws in sorted(groups.items(), key=lambda kv: min(kv[1])):
        if len(ws) > 4:
            raise InternalAssertionFailed(f"{len(ws)} vertices share the great circle of {sorted(key)}")
        if len(ws) >= 3:
            conflicts.append(ConflictSet(frozenset(ws), "triple" if len(ws) == 3 else "fourTuple", key))
    return conflicts


def embed_odd(G: Graph, d: int, rng: np.random.Generator, tol: Tolerances = Tolerances(),
              max_retries: int = MAX_RETRIES, gp_max_attempts: int = GP_MAX_ATTEMPTS,
              partition_rounds: int = REFINE_ROUNDS) -> Embedding:
    """Circles, a general-position 2-sphere S and a circle C, then apex vertices.

    Coordinates ``0..d-6`` carry the matching circles, ``d-5..d-3`` the
    sphere S and the last two the circle C.
    """
    if d < 5 or d % 2 == 0:
        raise PreconditionViolated(f"embed_odd needs an odd d >= 5, got {d}")
    P = refined_partition(G, d, rounds=partition_rounds)
    q = len(P.parts)
    plain, s1, s2 = P.parts[: q - 2], P.parts[q - 2], P.parts[q - 1]
    frame = Frame.standard(d)
    circle_frame, sphere_frame, c_plane = frame.sub(range(d - 5)), frame.sub(range(d - 5, d - 2)), frame.sub(range(d - 2, d))

    splits = []
    for comp in decompose_degree2(G, s1).components:
        if (comp.kind == "path" and len(comp) <= 4) or (comp.kind == "cycle" and len(comp) == 4):
            continue
        splits.append(split_path_cycle(comp))
    M = set().union(*(s.B for s in splits)) if splits else set()
    pairs = [p for s in splits for p in s.pairs]
    candidates = [v for v in s1 if G.degree_in(v, s1) == 2]

    def build(_attempt: int) -> Embedding:
        E = embed_matchings_on_circles(G, plain, d, rng, circle_frame, tol)
        S, cert = embed_gp_s2(G, sphere_frame, rng, s2, tol=tol, max_attempts=gp_max_attempts)
        E.update(S.pos)
        conflicts = odd_conflicts(G, candidates, s2, cert.antipodal_pairs)
        W = select_W_conflict_free(M, pairs, conflicts)
        pieces = decompose_degree2(G, s1 - W).components
        E.update(embed_chains_on_circle(G, pieces, c_plane, rng))
        for w in sorted(W):
            _place_apex(G, E, w, tol)
        check_embedding(G, E, tol)
        E.meta["conflicts"] = len(conflicts)
        E.meta["apex_vertices"] = len(W)
        return E

    E, retries = retry_resample(build, max_retries, logger, f"max-degree d={d}")
    E.meta.update(retries=retries, case="odd")
    E.trace(f"{len(plain)} circles, sphere part {len(s2)}, circle part {len(s1)}")
    return E


# ---------------------------------------------------------------------------
# Fewer than C(d+2, 2) edges
# ---------------------------------------------------------------------------


def place_on_loci(G: Graph, pos: dict[int, np.ndarray], vertices, d: int, rng: np.random.Generator,
                  tol: Tolerances = Tolerances()) -> None:
    """Place *vertices* one at a time at unit distance from their placed neighbours.

    The vertex with most placed neighbours goes first (ties: smallest id).
    """
    remaining = sorted(vertices)
    while remaining:
        v = max(remaining, key=lambda u: sum(1 for w in G.adj[u] if w in pos))
        nbrs = [pos[u] for u in sorted(G.adj[v]) if u in pos]
        avoid = np.stack(list(pos.values())) if pos else None
        try:
            pos[v] = sample_locus(nbrs, d, rng, avoid, min_sep=tol.eps_distinct)
        except GeometryError as exc:
            raise UnreachableByTheorem(f"vertex {v} has no unit-distance locus: {exc}") from exc
        remaining.remove(v)


class _SphereInduction:
    """Edge-bounded induction on the sphere of a k-frame, one dimension per level."""

    def __init__(self, G: Graph, d: int, rng: np.random.Generator, tol: Tolerances, node_cap: int):
        self.G = G
        self.d = d
        self.rng = rng
        self.tol = tol
        self.node_cap = node_cap

    def _hypothesis(self, vs, k: int) -> bool:
        if len(self.G.edges(vs)) > edge_threshold(k):
            return False
        return not find_forbidden(self.G, k, vs, self.node_cap).any

    def embed(self, vs, frame: Frame, depth: int = 0) -> dict[int, np.ndarray]:
        vs = sorted(vs)
        k = frame.k
        if k != self.d - depth or k < 2:
            raise InternalAssertionFailed(f"recursion at depth {depth} reached a {k}-frame")
        if not vs:
            return {}
        if not self._hypothesis(vs, k):
            raise UnreachableByTheorem(f"sub-problem on {vs} violates the level-{k} hypothesis")
        if k == 2:
            try:
                return embed_chains_on_circle(self.G, decompose_degree2(self.G, vs).components, frame, self.rng)
            except PreconditionViolated as exc:
                raise UnreachableByTheorem(f"circle level: {exc}") from exc
        peel = peel_min_degree(self.G, k - 2, vs)
        E = Embedding(frame.ambient)
        if peel.core:
            E.update(self._core(sorted(peel.core), frame, depth))
        place_peeled(E, peel, self.rng, frame)
        return E.pos

    def _cross(self, H: list[int], frame: Frame, size: int) -> dict[int, np.ndarray]:
        pairs = complement_matching(self.G, size, H)
        if pairs is None:
            raise UnreachableByTheorem(f"no {size} disjoint non-adjacent pairs in {H}")
        return embed_cross_polytope(self.G, pairs, frame.ambient, H, frame, self.tol).pos

    def _poles(self, rest, frame: Frame, depth: int, top: int, bottom: int | None = None) -> dict[int, np.ndarray]:
        sub, normal = frame.drop_last()
        pos = self.embed(rest, sub, depth + 1)
        pos[top] = SPHERE_RADIUS * normal
        if bottom is not None:
            pos[bottom] = -SPHERE_RADIUS * normal
        return pos

    def _core(self, H: list[int], frame: Frame, depth: int) -> dict[int, np.ndarray]:
        G, k, h = self.G, frame.k, len(H)
        if h <= k + 1:
            return self._cross(H, frame, max(0, h - k))
        if h == k + 2:
            return self._cross(H, frame, 2)

        Hset = frozenset(H)
        deg = {v: G.degree_in(v, Hset) for v in H}
        delta = max(deg.values())
        tops = [v for v in H if deg[v] == delta]
        if delta == h - 1:
            v = tops[0]
            return self._poles(Hset - {v}, frame, depth, v)
        if delta < k:
            return embed_max_degree_sphere(G, frame.ambient, self.rng, H, frame, self.tol).pos
        for v in tops:
            for w in sorted(Hset - G.adj[v] - {v}):
                rest = Hset - {v, w}
                if self._hypothesis(rest, k - 1):
                    return self._poles(rest, frame, depth, v, w)
        return self._special_pair(H, frame, tops)

    def _special_pair(self, H: list[int], frame: Frame, tops: list[int]) -> dict[int, np.ndarray]:
        """H - v - w is K_{k+1} minus a triangle for a max-degree v and a non-neighbour w."""
        G, k = self.G, frame.k
        Hset = frozenset(H)
        for v in tops:
            for w in sorted(Hset - G.adj[v] - {v}):
                rest = sorted(Hset - {v, w})
                missing = [(a, b) for a, b in combinations(rest, 2) if not G.has_edge(a, b)]
                triangle = sorted({x for e in missing for x in e})
                if len(rest) != k + 1 or len(missing) != 3 or len(triangle) != 3:
                    continue
                if sum(G.has_edge(v, t) for t in triangle) <= 2 and sum(G.has_edge(w, t) for t in triangle) <= 1:
                    special = [v, w, *triangle]
                    plane, ortho = frame.split([2, k - 2])
                    try:
                        pos = embed_chains_on_circle(G, decompose_degree2(G, special).components, plane, self.rng)
                    except PreconditionViolated:
                        pos = None
                    if pos is not None:
                        clique = [u for u in rest if u not in triangle]
                        pos.update(zip(clique, orthobasis_clique(len(clique), frame.ambient, ortho)))
                        return pos
                if len(H) - 3 <= k and complement_matching(G, 3, H) is not None:
                    return self._cross(H, frame, 3)
        raise UnreachableByTheorem(f"no case of the edge-bound induction applies to the core {H}")


def _glued_branch(G: Graph, core: list[int], d: int, rng: np.random.Generator, tol: Tolerances) -> dict:
    if len(core) != d + 2:
        raise UnreachableByTheorem(f"core with K_{d + 2}-K_3 has {len(core)} vertices, expected {d + 2}")
    x, y = next(((a, b) for a, b in combinations(core, 2) if not G.has_edge(a, b)), (None, None))
    if x is None:
        raise UnreachableByTheorem(f"core is K_{d + 2}")
    facet = [v for v in core if v not in (x, y)]
    glued = glued_simplices(d)
    pos = {v: glued.pos[i] for i, v in enumerate(facet)}
    pos[x], pos[y] = glued.pos[d], glued.pos[d + 1]
    place_on_loci(G, pos, [v for v in G.vertices() if v not in pos], d, rng, tol)
    return pos


def _clique_branch(G: Graph, core: list[int], peel: PeelResult, d: int, rng: np.random.Generator,
                   tol: Tolerances) -> dict:
    core_set = frozenset(core)
    if len(core) != d + 1 or len(G.edges(core)) != comb(d + 1, 2):
        raise UnreachableByTheorem(f"core containing K_{d + 1} is not exactly K_{d + 1}")
    v = next((u for u in core if not (G.adj[u] - core_set)), None)
    if v is None:
        raise UnreachableByTheorem(f"every vertex of the K_{d + 1} core has an outside neighbour")
    K = [u for u in core if u != v]
    E = Embedding(d, dict(zip(K, orthobasis_clique(d, d))))
    place_peeled(E, peel, rng, Frame.standard(d))
    _place_apex(G, E, v, tol)
    return E.pos


def embed_edge_bounded(G: Graph, d: int, mode: Mode, rng: np.random.Generator, tol: Tolerances = Tolerances(),
                       max_retries: int = MAX_RETRIES, node_cap: int = SEARCH_NODE_CAP) -> Embedding:
    """Realize a graph with at most g(d) edges in d-space, or on the sphere in sphere mode."""
    if mode not in ("euclid", "sphere"):
        raise PreconditionViolated(f"unknown mode {mode!r}")
    g = edge_threshold(d)
    if G.m > g:
        raise TooManyEdges(f"{G.m} edges exceed the threshold {g} for d={d}")
    if mode == "sphere":
        found = find_forbidden(G, d, node_cap=node_cap)
        if found.any:
            raise ForbiddenSubgraphForSphere(f"contains {', '.join(found.describe())}")
    frame = Frame.standard(d)

    def build(_attempt: int) -> Embedding:
        if mode == "sphere":
            E = Embedding(d, _SphereInduction(G, d, rng, tol, node_cap).embed(range(G.n), frame))
            E.meta["case"] = "sphere-induction"
        elif d == 2:
            E = _embed_plane(G, rng) if max_degree(G) <= 2 else _embed_plane_star(G, rng)
        else:
            E = _euclid_edge_bounded(G, d, rng, tol, node_cap)
        check_embedding(G, E, tol, sphere=mode == "sphere")
        return E

    E, retries = retry_resample(build, max_retries, logger, f"edge-bounded d={d}")
    E.meta.update(strategy="edge-bounded", retries=retries)
    return E


def _euclid_edge_bounded(G: Graph, d: int, rng: np.random.Generator, tol: Tolerances, node_cap: int) -> Embedding:
    frame = Frame.standard(d)
    peel = peel_min_degree(G, d - 2)
    core = sorted(peel.core)
    if not core:
        E = Embedding(d, meta={"case": "degenerate"})
        place_peeled(E, peel, rng, frame)
        return E
    found = find_forbidden(G, d, core, node_cap)
    if found.near_clique:
        return Embedding(d, _glued_branch(G, core, d, rng, tol), {"case": "glued-simplices"})
    if found.clique:
        return Embedding(d, _clique_branch(G, core, peel, d, rng, tol), {"case": "clique-apex"})
    E = Embedding(d, _SphereInduction(G, d, rng, tol, node_cap).embed(core, frame), {"case": "sphere-induction"})
    place_peeled(E, peel, rng, frame)
    return E
