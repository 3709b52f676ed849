"""Vertex partitions with per-part degree bounds and independent-set selection."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Literal
import logging

import networkx as nx
import numpy as np

from .errors import InternalAssertionFailed, PreconditionViolated
from .graph import Component, Graph, max_degree

logger = logging.getLogger(__name__)

REFINE_ROUNDS = 100


@dataclass
class Partition:
    parts: list[set[int]]
    caps: list[int]
    moves: int = 0

    def index_of(self) -> dict[int, int]:
        return {v: i for i, part in enumerate(self.parts) for v in part}

    def max_degrees(self, G: Graph) -> list[int]:
        return [max_degree(G, p) for p in self.parts]

    def check(self, G: Graph, vertices: Iterable[int] | None = None) -> None:
        expected = set(range(G.n) if vertices is None else vertices)
        seen: set[int] = set()
        for p in self.parts:
            if seen & p:
                raise InternalAssertionFailed("partition parts overlap")
            seen |= p
        if seen != expected:
            raise InternalAssertionFailed("partition does not cover the vertex set")
        for i, (deg, cap) in enumerate(zip(self.max_degrees(G), self.caps)):
            if deg > cap:
                raise InternalAssertionFailed(f"part {i} has max degree {deg} > cap {cap}")


def _potential(G: Graph, parts: list[set[int]], caps: list[int]) -> int:
    return sum(len(G.edges(p)) - k * len(p) for p, k in zip(parts, caps))


def _initial_parts(vertices: list[int], count: int, rng: np.random.Generator | None) -> list[set[int]]:
    parts: list[set[int]] = [set() for _ in range(count)]
    if rng is None:
        for i, v in enumerate(vertices):
            parts[i % count].add(v)
    else:
        for v, j in zip(vertices, rng.integers(0, count, size=len(vertices))):
            parts[int(j)].add(v)
    return parts


def lovasz_partition(G: Graph, caps: list[int], vertices: Iterable[int] | None = None,
                     rng: np.random.Generator | None = None) -> Partition:
    """Split the vertices into parts whose induced max degree is at most ``caps[i]``.

    Requires ``sum(caps) >= Δ - len(caps) + 1`` so that an overfull vertex
    always has a part to move to.
    """
    if not caps or any(k < 0 for k in caps):
        raise PreconditionViolated(f"caps must be a non-empty list of non-negative integers, got {caps}")
    vs = sorted(range(G.n) if vertices is None else vertices)
    delta = max_degree(G, vs)
    if sum(caps) < delta - len(caps) + 1:
        raise PreconditionViolated(f"caps {caps} too small for max degree {delta}")

    parts = _initial_parts(vs, len(caps), rng)
    where = {v: i for i, p in enumerate(parts) for v in p}
    phi = _potential(G, parts, caps)
    moves = 0
    while True:
        bad = next((v for v in vs if G.degree_in(v, parts[where[v]]) > caps[where[v]]), None)
        if bad is None:
            break
        options = [(G.degree_in(bad, parts[j]), j) for j in range(len(caps)) if j != where[bad]]
        options = [(deg, j) for deg, j in options if deg <= caps[j]]
        if not options:
            raise InternalAssertionFailed(f"vertex {bad} has no part within its cap")
        _, j = min(options)
        parts[where[bad]].remove(bad)
        parts[j].add(bad)
        where[bad] = j
        moves += 1
        new_phi = _potential(G, parts, caps)
        if new_phi >= phi:
            raise InternalAssertionFailed(f"potential did not decrease ({phi} -> {new_phi})")
        phi = new_phi

    result = Partition(parts, list(caps), moves)
    result.check(G, vs)
    logger.debug(f"lovasz_partition caps={caps}: {moves} moves")
    return result


# ---------------------------------------------------------------------------
# Refined partition for the even and odd max-degree constructions
# ---------------------------------------------------------------------------


@dataclass
class RefinedPartition(Partition):
    d: int = 0

    @property
    def odd(self) -> bool:
        return self.d % 2 == 1

    @property
    def plain(self) -> list[set[int]]:
        """Parts inducing a matching."""
        return self.parts[: len(self.parts) - (2 if self.odd else 1)]


def _descent_move(G: Graph, parts: list[set[int]], where: dict[int, int]):
    for v in sorted(where):
        own = G.degree_in(v, parts[where[v]])
        best = min((G.degree_in(v, parts[j]), j) for j in range(len(parts)))
        if best[0] < own:
            return v, best[1]
    return None


def _migration_move(G: Graph, parts: list[set[int]], where: dict[int, int], odd: bool):
    q = len(parts)
    if not odd:
        for v in sorted(where):
            if where[v] < q - 1 and G.degree_in(v, parts[where[v]]) == 2:
                return v, q - 1
        return None
    s1, s2 = q - 2, q - 1
    for v in sorted(where):
        if where[v] < s1 and G.degree_in(v, parts[where[v]]) == 2:
            return v, (s1 if G.degree_in(v, parts[s1]) == 2 else s2)
    for v in sorted(where):
        if where[v] == s1 and G.degree_in(v, parts[s1]) == 2 and G.degree_in(v, parts[s2]) == 2:
            return v, s2
    return None


def refined_partition(G: Graph, d: int, vertices: Iterable[int] | None = None,
                      rounds: int = REFINE_ROUNDS) -> RefinedPartition:
    """Partition for the even/odd max-degree embeddings.

    Even d: d/2 parts, all but the last inducing a matching, the last of max
    degree 2 with every degree-2 vertex having exactly 2 neighbours in each
    part. Odd d: (d-1)/2 parts whose last two are the special parts S1, S2.
    """
    if d < 4:
        raise PreconditionViolated(f"refined partition needs d >= 4, got {d}")
    vs = sorted(range(G.n) if vertices is None else vertices)
    if max_degree(G, vs) > d:
        raise PreconditionViolated(f"max degree {max_degree(G, vs)} exceeds d={d}")
    odd = d % 2 == 1
    q = (d - 1) // 2 if odd else d // 2
    parts = _initial_parts(vs, q, None)
    where = {v: i for i, p in enumerate(parts) for v in p}

    moves = 0
    limit = rounds * max(1, len(vs)) * q
    while True:
        move = _descent_move(G, parts, where) or _migration_move(G, parts, where, odd)
        if move is None:
            break
        v, j = move
        parts[where[v]].remove(v)
        parts[j].add(v)
        where[v] = j
        moves += 1
        if moves > limit:
            raise InternalAssertionFailed(f"refined partition did not settle within {limit} moves")

    caps = [1] * q
    caps[-1] = 2
    if odd:
        caps[-2] = 2
    result = RefinedPartition(parts, caps, moves, d)
    result.check(G, vs)
    check_refined(G, result)
    logger.debug(f"refined_partition d={d}: {moves} moves")
    return result


def check_refined(G: Graph, P: RefinedPartition) -> None:
    """Assert every neighbour-count clause of the refined partition."""
    parts = P.parts
    q = len(parts)
    if not P.odd:
        last = parts[-1]
        for v in last:
            if G.degree_in(v, last) == 2:
                counts = [G.degree_in(v, p) for p in parts]
                if any(c != 2 for c in counts):
                    raise InternalAssertionFailed(f"vertex {v} has neighbour counts {counts}")
        return
    s1, s2 = parts[q - 2], parts[q - 1]
    for v in s1:
        if G.degree_in(v, s1) == 2:
            counts = [G.degree_in(v, p) for p in parts[: q - 2]]
            if any(c != 2 for c in counts) or G.degree_in(v, s2) != 3:
                raise InternalAssertionFailed(f"S1 vertex {v} has neighbour counts {counts} / {G.degree_in(v, s2)}")
    for v in s2:
        if G.degree_in(v, s2) == 2:
            counts = [G.degree_in(v, p) for p in parts[: q - 1]]
            if any(c < 2 for c in counts) or G.degree_in(v, s1) > 3:
                raise InternalAssertionFailed(f"S2 vertex {v} has neighbour counts {counts}")


# ---------------------------------------------------------------------------
# Independent sets W
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ABSplit:
    A: frozenset[int]
    B: frozenset[int]
    pairs: tuple[tuple[int, int], ...]


def _b_positions_path(L: int) -> list[int]:
    starts, b = [], 1
    while True:
        starts.append(b)
        if L - b <= 4:
            return starts
        b += 4 if L - b >= 6 else 3


def _b_positions_cycle(c: int) -> list[int]:
    if c in (3, 5):
        return [0]
    t = -(-c // 4)
    gaps = [4] * (c - 3 * t) + [3] * (4 * t - c)
    starts, b = [], 0
    for g in gaps:
        starts.append(b)
        b += g
    return starts


def split_path_cycle(H: Component) -> ABSplit:
    """Greedy A/B split: removing one end of each B-edge leaves pieces of <= 4 vertices."""
    vs = H.vertices
    if H.kind == "cycle":
        if len(vs) == 4:
            raise PreconditionViolated("4-cycles are placed whole, not split")
        starts = _b_positions_cycle(len(vs))
        pairs = tuple((vs[b], vs[(b + 1) % len(vs)]) for b in starts)
    else:
        if len(vs) < 5:
            raise PreconditionViolated(f"paths with {len(vs)} vertices are placed whole, not split")
        pairs = tuple((vs[b], vs[b + 1]) for b in _b_positions_path(len(vs) - 1))
    B = frozenset(v for p in pairs for v in p)
    return ABSplit(frozenset(vs) - B, B, pairs)


def select_W_even(G: Graph, last_part: set[int] | frozenset[int]) -> set[int]:
    """Remove current-degree-2 vertices of the last part until it induces a matching."""
    rest = set(last_part)
    if max_degree(G, rest) > 2:
        raise PreconditionViolated("last part must induce max degree <= 2")
    W: set[int] = set()
    while True:
        v = next((u for u in sorted(rest) if G.degree_in(u, rest) == 2), None)
        if v is None:
            break
        rest.remove(v)
        W.add(v)
    if any(G.adj[w] & W for w in W):
        raise InternalAssertionFailed("W is not independent")
    if any(G.degree_in(w, last_part) != 2 for w in W):
        raise InternalAssertionFailed("a W vertex lacks exactly two neighbours in the last part")
    if max_degree(G, rest) > 1:
        raise InternalAssertionFailed("remaining last part is not a matching")
    return W


@dataclass(frozen=True)
class ConflictSet:
    members: frozenset[int]
    kind: Literal["triple", "fourTuple"]
    anchor: frozenset[int] = field(default_factory=frozenset)


def _conflict_edges(members: list[int], matched: dict[int, int]) -> list[tuple[int, int]]:
    """One new edge for 3 members, two disjoint new edges for 4, avoiding matching edges."""
    if len(members) == 3:
        for a, b in combinations(members, 2):
            if matched.get(a) != b:
                return [(a, b)]
    else:
        a, b, c, e = members
        for pairing in (((a, b), (c, e)), ((a, c), (b, e)), ((a, e), (b, c))):
            if all(matched.get(x) != y for x, y in pairing):
                return list(pairing)
    raise InternalAssertionFailed(f"no conflict edges available for {members}")


def select_W_conflict_free(M: Iterable[int], pairs: Iterable[tuple[int, int]],
                           conflicts: Iterable[ConflictSet] = ()) -> set[int]:
    """One endpoint per matching edge, at most two members of each conflict set."""
    M = set(M)
    pairs = [tuple(p) for p in pairs]
    matched: dict[int, int] = {}
    for a, b in pairs:
        if a in matched or b in matched:
            raise PreconditionViolated(f"matching pairs overlap at ({a}, {b})")
        matched[a], matched[b] = b, a
    if set(matched) != M:
        raise PreconditionViolated("pairs do not perfectly match M")

    aux = nx.Graph()
    aux.add_nodes_from(M)
    aux.add_edges_from(pairs)
    used: set[int] = set()
    for cs in conflicts:
        if cs.members & used:
            raise PreconditionViolated("conflict sets overlap")
        used |= cs.members
        members = sorted(cs.members & M)
        if len(members) >= 3:
            aux.add_edges_from(_conflict_edges(members, matched))

    W: set[int] = set()
    for comp in nx.connected_components(aux):
        sub = aux.subgraph(comp)
        try:
            left, right = nx.bipartite.sets(sub)
        except nx.NetworkXError as exc:
            raise InternalAssertionFailed(f"conflict graph is not bipartite: {exc}") from exc
        W |= left if min(comp) in left else right

    if len(W) != len(pairs) or any(matched[w] in W for w in W):
        raise InternalAssertionFailed("W is not a transversal of the matching")
    for cs in conflicts:
        if len(W & cs.members) > 2:
            raise InternalAssertionFailed(f"W meets conflict set {sorted(cs.members)} three times")
    return W
