"""Two-colourings of complete graphs: embed one colour class."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import ceil, comb
from typing import Iterable, Literal, Mapping
import logging

import numpy as np

from .embedding import SPHERE_RADIUS, Embedding
from .errors import PreconditionViolated
from .geom import Frame, orthobasis_clique, sample_locus
from .graph import Graph, max_degree
from .helpers import retry_resample
from .sphere import MAX_RETRIES, embed_matchings_on_circles, embed_max_degree_sphere, place_peeled_vertex
from .verify import Tolerances, check_embedding

logger = logging.getLogger(__name__)

Color = Literal["r", "b"]
COLORS: tuple[Color, Color] = ("r", "b")


@dataclass(frozen=True)
class Coloring:
    """Red/blue colouring of the edges of K_s; pairs not in ``red`` are blue."""
    s: int
    red: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        if self.s < 0:
            raise PreconditionViolated(f"vertex count must be >= 0, got {self.s}")
        norm = frozenset(tuple(sorted(p)) for p in self.red)
        for u, v in norm:
            if u == v or not (0 <= u < self.s and 0 <= v < self.s):
                raise PreconditionViolated(f"pair ({u}, {v}) is not an edge of K_{self.s}")
        object.__setattr__(self, "red", norm)

    @classmethod
    def from_map(cls, s: int, colors: Mapping[tuple[int, int], str]) -> "Coloring":
        pairs = {tuple(sorted(p)): c for p, c in colors.items()}
        missing = [p for p in combinations(range(s), 2) if p not in pairs]
        if missing:
            raise PreconditionViolated(f"{len(missing)} pairs are uncoloured, first {missing[0]}")
        bad = sorted({c for c in pairs.values() if c not in COLORS})
        if bad:
            raise PreconditionViolated(f"unknown colours {bad}")
        return cls(s, frozenset(p for p, c in pairs.items() if c == "r"))

    def color(self, u: int, v: int) -> Color:
        if u == v:
            raise PreconditionViolated("a vertex has no colour with itself")
        return "r" if (min(u, v), max(u, v)) in self.red else "b"

    def graph(self, c: Color) -> Graph:
        edges = self.red if c == "r" else [p for p in combinations(range(self.s), 2) if p not in self.red]
        return Graph.from_edges(self.s, edges)

    def pairs(self) -> Iterable[tuple[int, int, Color]]:
        for u, v in combinations(range(self.s), 2):
            yield u, v, self.color(u, v)


def coloring_from_index(s: int, index: int) -> Coloring:
    """Colouring number *index* of K_s: bit i set means the i-th pair (lexicographic) is red."""
    total = comb(s, 2)
    if not 0 <= index < 2**total:
        raise PreconditionViolated(f"index {index} outside [0, 2^{total})")
    return Coloring(s, frozenset(p for i, p in enumerate(combinations(range(s), 2)) if index >> i & 1))


def ramsey_bounds(s: int) -> dict[str, int]:
    """Exact spherical value and the Euclidean bracket for colourings of K_s."""
    if s < 1:
        raise PreconditionViolated(f"s must be >= 1, got {s}")
    return {
        "spherical": ceil((s + 1) / 2),
        "euclidean_lower": ceil((s - 1) / 2),
        "euclidean_upper": ceil(s / 2),
    }


def witness(mode: Literal["spherical", "euclidean"], d: int) -> Graph:
    """Graph on 2d (spherical) or 2d+2 (euclidean) vertices with neither it nor its complement realizable."""
    if d < 1:
        raise PreconditionViolated(f"d must be >= 1, got {d}")
    if mode == "spherical":
        clique, isolated = d + 1, d - 1
    elif mode == "euclidean":
        clique, isolated = d + 2, d
    else:
        raise PreconditionViolated(f"unknown witness mode {mode!r}")
    return Graph.complete(clique).disjoint_union(Graph.empty(isolated))


# ---------------------------------------------------------------------------
# Spherical
# ---------------------------------------------------------------------------


class _SphericalRamsey:
    def __init__(self, col: Coloring, rng: np.random.Generator, tol: Tolerances):
        self.col = col
        self.rng = rng
        self.tol = tol
        self.graphs = {c: col.graph(c) for c in COLORS}

    def _degrees(self, c: Color, vs: list[int]) -> dict[int, int]:
        part = frozenset(vs)
        return {v: self.graphs[c].degree_in(v, part) for v in vs}

    def _pick(self, c: Color, vs: list[int]) -> int:
        deg = self._degrees(c, vs)
        return min(vs, key=lambda v: (-deg[v], v))

    def embed(self, vs: list[int], frame: Frame) -> tuple[Color, dict[int, np.ndarray]]:
        k = frame.k
        if len(vs) > 2 * k - 1:
            raise PreconditionViolated(f"{len(vs)} vertices exceed 2k-1 for a {k}-frame")
        if k == 1:
            return "r", {v: SPHERE_RADIUS * frame.basis[0] for v in vs}
        for c in COLORS:
            if max_degree(self.graphs[c], vs) <= k - 1:
                if k == 2:
                    return c, embed_matchings_on_circles(self.graphs[c], [set(vs)], frame.ambient, self.rng,
                                                         frame, self.tol).pos
                return c, embed_max_degree_sphere(self.graphs[c], frame.ambient, self.rng, vs, frame, self.tol).pos

        v_r, v_b = self._pick("r", vs), self._pick("b", vs)
        sub, normal = frame.drop_last()
        c, pos = self.embed([v for v in vs if v not in (v_r, v_b)], sub)
        top, other = (v_r, v_b) if c == "r" else (v_b, v_r)
        pos[top] = SPHERE_RADIUS * normal
        if self.col.color(v_r, v_b) != c:
            pos[other] = -SPHERE_RADIUS * normal
            logger.debug(f"k={k}: {v_r} and {v_b} at the poles")
        else:
            E = Embedding(frame.ambient, {v: p for v, p in pos.items() if v != top})
            nbrs = sorted(self.graphs[c].adj[other] & E.pos.keys())
            pos[other] = place_peeled_vertex(E, nbrs, self.rng, sub, self.tol.eps_distinct)
            logger.debug(f"k={k}: {other} on the subsphere, {top} at the pole")
        return c, pos


def ramsey_spherical(col: Coloring, rng: np.random.Generator, tol: Tolerances = Tolerances(),
                     max_retries: int = MAX_RETRIES) -> tuple[Color, Embedding]:
    """Embed the red or the blue graph on the sphere in ceil((s+1)/2)-space."""
    d = max(1, ceil((col.s + 1) / 2))
    search = _SphericalRamsey(col, rng, tol)

    def build(_attempt: int) -> tuple[Color, Embedding]:
        c, pos = search.embed(list(range(col.s)), Frame.standard(d))
        E = Embedding(d, pos, {"strategy": "ramsey-spherical", "color": c})
        check_embedding(search.graphs[c], E, tol, sphere=True)
        return c, E

    (c, E), retries = retry_resample(build, max_retries, logger, f"spherical colouring of K_{col.s}")
    E.meta["retries"] = retries
    return c, E


# ---------------------------------------------------------------------------
# Euclidean
# ---------------------------------------------------------------------------


def ramsey_euclidean(col: Coloring, rng: np.random.Generator, tol: Tolerances = Tolerances(),
                     max_retries: int = MAX_RETRIES) -> tuple[Color, Embedding]:
    """Embed the red or the blue graph in ceil(s/2)-space.

    High-degree vertices (at most d of them) sit on an orthogonal clique of
    the sphere. Low-degree vertices with a low-degree neighbour join the
    sphere one at a time; the rest go on their unit-distance loci.
    """
    s = col.s
    d = max(1, ceil(s / 2))
    graphs = {c: col.graph(c) for c in COLORS}
    if s == 2:
        # either class is a unit segment or two points on the line
        E = Embedding(1, {0: np.zeros(1), 1: np.ones(1)},
                      {"strategy": "ramsey-euclidean", "color": "r", "sphere_vertices": 0, "retries": 0})
        check_embedding(graphs["r"], E, tol)
        return "r", E
    high = {c: [v for v in range(s) if graphs[c].degree(v) > d - 1] for c in COLORS}
    c: Color = "r" if len(high["r"]) <= d else "b"
    G = graphs[c]
    if len(high[c]) > d:
        raise PreconditionViolated(f"both colours have more than {d} high-degree vertices")

    def build(_attempt: int) -> Embedding:
        E = Embedding(d, dict(zip(high[c], orthobasis_clique(len(high[c]), d))))
        W = [v for v in range(s) if v not in E]
        while True:
            w = next((u for u in W if G.adj[u] & set(W)), None)
            if w is None:
                break
            W.remove(w)
            E.place(w, place_peeled_vertex(E, sorted(G.adj[w] & E.pos.keys()), rng, min_sep=tol.eps_distinct))
        for w in W:
            E.place(w, sample_locus(E.points(sorted(G.adj[w])), d, rng, E.points(), tol.eps_distinct))
        E.meta.update(strategy="ramsey-euclidean", color=c, sphere_vertices=s - len(W))
        check_embedding(G, E, tol)
        return E

    E, retries = retry_resample(build, max_retries, logger, f"euclidean colouring of K_{s}")
    E.meta["retries"] = retries
    return c, E
