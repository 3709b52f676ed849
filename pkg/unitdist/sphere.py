"""Constructions on the sphere of radius 1/sqrt(2) centred at the origin."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable
import logging

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .embedding import SPHERE_RADIUS, Embedding
from .errors import NotDegenerate, NotOnSphere, PreconditionViolated, ResampleExceeded
from .geom import MAX_TRIES, MIN_SEPARATION, Frame, SphereSpec, circle_point, sample_subsphere
from .graph import Component, Graph, PeelResult, decompose_degree2, max_degree, peel_min_degree
from .helpers import retry_resample
from .partition import lovasz_partition
from .verify import GPCertificate, Tolerances, check_embedding, gp_certificate

logger = logging.getLogger(__name__)

MAX_RETRIES = 100
GP_MAX_ATTEMPTS = 1000
ANGLE_DELTA = 1e-4


def _vertex_list(G: Graph, vertices: Iterable[int] | None) -> list[int]:
    return sorted(range(G.n) if vertices is None else vertices)


# ---------------------------------------------------------------------------
# Circles
# ---------------------------------------------------------------------------


def _angle_clash(a: float, b: float, delta: float) -> bool:
    """True when the angles are within *delta* of coinciding or of being opposite."""
    diff = np.mod(a - b, np.pi)
    return diff < delta or np.pi - diff < delta


def place_chains(chains: list[tuple[int, ...]], plane: Frame, rng: np.random.Generator,
                 delta: float = ANGLE_DELTA, tries: int = MAX_TRIES) -> dict[int, np.ndarray]:
    """Place each chain at quarter-turn steps from a random start angle.

    Points of different chains are never coincident or antipodal.
    """
    taken: list[float] = []
    pos: dict[int, np.ndarray] = {}
    for chain in chains:
        offsets = np.arange(len(chain)) * (np.pi / 2)
        for _ in range(tries):
            angles = rng.uniform(0.0, 2 * np.pi) + offsets
            if not any(_angle_clash(a, b, delta) for a in angles for b in taken):
                break
        else:
            raise ResampleExceeded(f"no generic angle for chain {list(chain)} after {tries} draws")
        taken.extend(angles)
        for v, a in zip(chain, angles):
            pos[v] = circle_point(plane, SPHERE_RADIUS, a)
    return pos


def embed_matchings_on_circles(G: Graph, parts: list[set[int]], d: int, rng: np.random.Generator,
                               frame: Frame | None = None, tol: Tolerances = Tolerances()) -> Embedding:
    """Part ``i`` on the circle spanned by frame rows ``2i, 2i+1``; matched pairs a quarter turn apart."""
    frame = frame or Frame.standard(d)
    if frame.ambient != d:
        raise PreconditionViolated(f"frame lives in {frame.ambient}-space, expected {d}")
    if 2 * len(parts) > frame.k:
        raise PreconditionViolated(f"{len(parts)} circles do not fit in a {frame.k}-frame")
    pos: dict[int, np.ndarray] = {}
    for part, plane in zip(parts, frame.split([2] * len(parts))):
        if max_degree(G, part) > 1:
            raise PreconditionViolated("a circle part must induce a matching")
        chains = [tuple(c) for c in G.components(part)]
        pos.update(place_chains(chains, plane, rng))
    E = Embedding(d, pos, {"strategy": "matchings-on-circles"})
    check_embedding(G, E, tol, pos.keys(), sphere=True)
    return E


def embed_chains_on_circle(G: Graph, components: Iterable[Component], plane: Frame,
                           rng: np.random.Generator) -> dict[int, np.ndarray]:
    """Paths of at most 4 vertices and 4-cycles as quarter-turn chains on one circle."""
    chains = []
    for c in components:
        if (c.kind == "path" and len(c) > 4) or (c.kind == "cycle" and len(c) != 4):
            raise PreconditionViolated(f"{c.kind} on {len(c)} vertices does not fit on a circle")
        if any(not G.has_edge(u, v) for u, v in c.edges()):
            raise PreconditionViolated(f"component {list(c.vertices)} does not follow graph edges")
        chains.append(c.vertices)
    return place_chains(chains, plane, rng)


# ---------------------------------------------------------------------------
# General position on a 2-sphere
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _ComponentPlan:
    order: tuple[int, ...]
    reinsert: tuple[int, int] | None = None


def _plan(component: Component) -> _ComponentPlan:
    seq = list(component.vertices)
    if component.kind == "cycle" and len(seq) == 4:
        r = min(seq)
        i = seq.index(r)
        rot = seq[i:] + seq[:i]
        return _ComponentPlan(tuple(rot[1:]), (r, rot[2]))
    return _ComponentPlan(tuple(seq))


def _sample_component(G: Graph, plan: _ComponentPlan, frame: Frame, rng: np.random.Generator) -> dict[int, np.ndarray]:
    local: dict[int, np.ndarray] = {}
    for v in plan.order:
        nbrs = [local[u] for u in G.adj[v] if u in local]
        local[v] = sample_subsphere(frame.complement(nbrs), SPHERE_RADIUS, rng)
    if plan.reinsert:
        removed, opposite = plan.reinsert
        local[removed] = -local[opposite]
    return local


def _coincident(pos: dict[int, np.ndarray], eps: float) -> list[tuple[int, ...]]:
    labels = sorted(pos)
    if len(labels) < 2:
        return []
    dist = squareform(pdist(np.stack([pos[v] for v in labels])))
    close = np.argwhere(np.triu(dist <= eps, k=1))
    return [(labels[i], labels[j]) for i, j in close]


def embed_gp_s2(G: Graph, frame: Frame, rng: np.random.Generator, vertices: Iterable[int] | None = None,
                check_gp: bool = True, tol: Tolerances = Tolerances(),
                max_attempts: int = GP_MAX_ATTEMPTS) -> tuple[Embedding, GPCertificate]:
    """Embed a max-degree-2 graph on the 2-sphere of *frame* in general position.

    One vertex per 4-cycle is left out, every other vertex is drawn uniformly
    from the sphere orthogonal to its placed neighbours, and the left-out
    vertex becomes the antipode of its opposite vertex. Components involved
    in a degeneracy are redrawn. Above 30 vertices redraws use a tighter
    threshold than ``eps_gp``, so the certificate may still list offenders.
    """
    if frame.k != 3:
        raise PreconditionViolated(f"embed_gp_s2 needs a 3-frame, got {frame.k}")
    vs = _vertex_list(G, vertices)
    if max_degree(G, vs) > 2:
        raise PreconditionViolated(f"max degree {max_degree(G, vs)} > 2")
    plans = [_plan(c) for c in decompose_degree2(G, vs).components]
    pairs = [p.reinsert for p in plans if p.reinsert]
    owner = {v: i for i, p in enumerate(plans) for v in (*p.order, *(p.reinsert or ()))}

    pos: dict[int, np.ndarray] = {}
    for p in plans:
        pos.update(_sample_component(G, p, frame, rng))
    for attempt in range(1, max_attempts + 1):
        E = Embedding(frame.ambient, pos, {"strategy": "gp-2-sphere"})
        if check_gp:
            cert = gp_certificate(E, pairs, tol, vs)
            bad = cert.redraw
        else:
            cert = GPCertificate(antipodal_pairs=[tuple(sorted(p)) for p in pairs])
            bad = _coincident(pos, tol.eps_distinct)
        if not bad:
            cert.attempts = attempt
            E.meta["retries"] = attempt - 1
            E.meta["antipodal_pairs"] = cert.antipodal_pairs
            check_embedding(G, E, tol, vs, sphere=True)
            return E, cert
        redo = sorted({owner[v] for group in bad for v in group})
        logger.debug(f"gp attempt {attempt}: {len(bad)} degeneracies, redrawing components {redo}")
        for i in redo:
            pos.update(_sample_component(G, plans[i], frame, rng))
    raise ResampleExceeded(f"no general-position draw after {max_attempts} attempts")


# ---------------------------------------------------------------------------
# Max degree d-1 on the (d-1)-sphere
# ---------------------------------------------------------------------------


def _max_degree_sphere(G: Graph, vs: list[int], frame: Frame, rng: np.random.Generator,
                       tol: Tolerances) -> dict[int, np.ndarray]:
    if not vs:
        return {}
    k = frame.k
    if k == 2:
        return embed_matchings_on_circles(G, [set(vs)], frame.ambient, rng, frame, tol).pos
    if k == 3:
        return embed_gp_s2(G, frame, rng, vs, check_gp=False, tol=tol)[0].pos
    k1, k2 = (k - 2) // 2, (k - 1) // 2
    P = lovasz_partition(G, [k1, k2], vs)
    f1, f2 = frame.split([k1 + 1, k2 + 1])
    pos = _max_degree_sphere(G, sorted(P.parts[0]), f1, rng, tol)
    pos.update(_max_degree_sphere(G, sorted(P.parts[1]), f2, rng, tol))
    return pos


def embed_max_degree_sphere(G: Graph, d: int, rng: np.random.Generator, vertices: Iterable[int] | None = None,
                            frame: Frame | None = None, tol: Tolerances = Tolerances(),
                            max_retries: int = MAX_RETRIES) -> Embedding:
    """Max degree <= k-1 on the sphere of a k-frame by recursive orthogonal splitting."""
    frame = frame or Frame.standard(d)
    vs = _vertex_list(G, vertices)
    if frame.k < 2:
        raise PreconditionViolated(f"need a frame of dimension >= 2, got {frame.k}")
    if max_degree(G, vs) > frame.k - 1:
        raise PreconditionViolated(f"max degree {max_degree(G, vs)} > {frame.k - 1}")

    def build(_attempt: int) -> Embedding:
        E = Embedding(frame.ambient, _max_degree_sphere(G, vs, frame, rng, tol), {"strategy": "sphere-max-degree"})
        check_embedding(G, E, tol, vs, sphere=True)
        return E

    E, retries = retry_resample(build, max_retries, logger, "sphere max-degree")
    E.meta["retries"] = retries
    return E


# ---------------------------------------------------------------------------
# Peeling placements
# ---------------------------------------------------------------------------


def place_peeled_vertex(E: Embedding, neighbors: Iterable[int], rng: np.random.Generator,
                        frame: Frame | None = None, min_sep: float = MIN_SEPARATION,
                        tries: int = MAX_TRIES) -> np.ndarray:
    """Point of the sphere orthogonal to every neighbour, away from placed vertices."""
    frame = frame or Frame.standard(E.dim)
    nbrs = [E[u] for u in neighbors]
    if len(nbrs) > frame.k - 2:
        raise PreconditionViolated(f"{len(nbrs)} neighbours leave no great circle in a {frame.k}-frame")
    sphere = SphereSpec()
    if any(not sphere.contains(p) for p in nbrs):
        raise NotOnSphere("a neighbour of a peeled vertex is off the sphere")
    sub = frame.complement(nbrs)
    avoid = E.points()
    for _ in range(tries):
        p = sample_subsphere(sub, SPHERE_RADIUS, rng)
        if len(avoid) == 0 or np.min(np.linalg.norm(avoid - p, axis=1)) > min_sep:
            return p
    raise ResampleExceeded(f"no free point for a peeled vertex after {tries} draws")


def place_peeled(E: Embedding, peel: PeelResult, rng: np.random.Generator, frame: Frame | None = None,
                 skip: Iterable[int] = ()) -> None:
    """Re-insert peeled vertices in reverse removal order."""
    skip = set(skip)
    for v in reversed(peel.order):
        if v not in skip:
            E.place(v, place_peeled_vertex(E, sorted(peel.removed_neighbors[v] - skip), rng, frame))


def embed_degenerate_sphere(G: Graph, d: int, rng: np.random.Generator, vertices: Iterable[int] | None = None,
                            frame: Frame | None = None, tol: Tolerances = Tolerances(),
                            max_retries: int = MAX_RETRIES) -> Embedding:
    """A (k-2)-degenerate graph on the sphere of a k-frame."""
    frame = frame or Frame.standard(d)
    if frame.k < 2:
        raise PreconditionViolated(f"need a frame of dimension >= 2, got {frame.k}")
    vs = _vertex_list(G, vertices)
    peel = peel_min_degree(G, frame.k - 2, vs)
    if peel.core:
        raise NotDegenerate(f"graph is not {frame.k - 2}-degenerate: core of {len(peel.core)} vertices remains")

    def build(_attempt: int) -> Embedding:
        E = Embedding(frame.ambient, meta={"strategy": "degenerate"})
        place_peeled(E, peel, rng, frame)
        check_embedding(G, E, tol, vs, sphere=True)
        return E

    E, retries = retry_resample(build, max_retries, logger, "degenerate placement")
    E.meta["retries"] = retries
    return E


def embed_cross_polytope(G: Graph, matching: Iterable[tuple[int, int]], d: int,
                         vertices: Iterable[int] | None = None, frame: Frame | None = None,
                         tol: Tolerances = Tolerances()) -> Embedding:
    """Matched non-adjacent pairs at opposite ends of one axis, the rest on free axes."""
    frame = frame or Frame.standard(d)
    vs = _vertex_list(G, vertices)
    members = set(vs)
    pairs = sorted(tuple(sorted(p)) for p in matching)
    seen: set[int] = set()
    for a, b in pairs:
        if a == b or a in seen or b in seen:
            raise PreconditionViolated(f"pair ({a}, {b}) overlaps another pair")
        if a not in members or b not in members:
            raise PreconditionViolated(f"pair ({a}, {b}) is outside the vertex set")
        if G.has_edge(a, b):
            raise PreconditionViolated(f"pair ({a}, {b}) is an edge")
        seen |= {a, b}
    unmatched = [v for v in vs if v not in seen]
    if len(pairs) + len(unmatched) > frame.k:
        raise PreconditionViolated(f"{len(pairs) + len(unmatched)} axes needed, frame has {frame.k}")

    axes = SPHERE_RADIUS * frame.basis
    pos: dict[int, np.ndarray] = {}
    for i, (a, b) in enumerate(pairs):
        pos[a], pos[b] = axes[i], -axes[i]
    for j, v in enumerate(unmatched, start=len(pairs)):
        pos[v] = axes[j]
    E = Embedding(frame.ambient, pos, {"strategy": "cross-polytope"})
    check_embedding(G, E, tol, vs, sphere=True)
    return E
