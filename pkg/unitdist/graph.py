"""Graph representation, peeling, path/cycle decomposition and subgraph search."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Literal
import heapq
import logging

import networkx as nx

from .errors import DidNotDecide, InternalAssertionFailed, PreconditionViolated

logger = logging.getLogger(__name__)

SEARCH_NODE_CAP = 10_000_000


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0..n-1``."""
    n: int
    adj: tuple[frozenset[int], ...]

    def __post_init__(self):
        if len(self.adj) != self.n:
            raise PreconditionViolated(f"adjacency has {len(self.adj)} rows for n={self.n}")
        for v, nbrs in enumerate(self.adj):
            for u in nbrs:
                if u == v:
                    raise PreconditionViolated(f"self-loop at {v}")
                if not 0 <= u < self.n:
                    raise PreconditionViolated(f"neighbour {u} of {v} out of range")
                if v not in self.adj[u]:
                    raise PreconditionViolated(f"asymmetric adjacency between {v} and {u}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise PreconditionViolated(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise PreconditionViolated(f"self-loop at {u}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(frozenset(s) for s in nbrs))

    @classmethod
    def from_networkx(cls, g: nx.Graph) -> "Graph":
        """Convert *g*, relabelling its nodes to ``0..n-1`` in sorted order."""
        nodes = sorted(g.nodes())
        index = {v: i for i, v in enumerate(nodes)}
        return cls.from_edges(len(nodes), ((index[u], index[v]) for u, v in g.edges() if u != v))

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, tuple(frozenset() for _ in range(n)))

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls.from_edges(n, combinations(range(n), 2))

    def to_networkx(self, vertices: Iterable[int] | None = None) -> nx.Graph:
        vs = range(self.n) if vertices is None else sorted(vertices)
        keep = set(vs)
        g = nx.Graph()
        g.add_nodes_from(vs)
        g.add_edges_from((u, v) for u in vs for v in self.adj[u] if u < v and v in keep)
        return g

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def vertices(self) -> range:
        return range(self.n)

    def edges(self, vertices: Iterable[int] | None = None) -> list[tuple[int, int]]:
        """Sorted edge list, optionally of the subgraph induced by *vertices*."""
        if vertices is None:
            return [(u, v) for u in range(self.n) for v in sorted(self.adj[u]) if u < v]
        keep = set(vertices)
        return [(u, v) for u in sorted(keep) for v in sorted(self.adj[u] & keep) if u < v]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def degree_in(self, v: int, part: set[int] | frozenset[int]) -> int:
        return len(self.adj[v] & part)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def induced(self, vertices: Iterable[int]) -> tuple["Graph", tuple[int, ...]]:
        """Relabelled induced subgraph and the original label of each new vertex."""
        labels = tuple(sorted(set(vertices)))
        index = {v: i for i, v in enumerate(labels)}
        adj = tuple(frozenset(index[u] for u in self.adj[v] if u in index) for v in labels)
        return Graph(len(labels), adj), labels

    def complement(self) -> "Graph":
        full = frozenset(range(self.n))
        return Graph(self.n, tuple(full - self.adj[v] - {v} for v in range(self.n)))

    def disjoint_union(self, other: "Graph") -> "Graph":
        shift = self.n
        adj = self.adj + tuple(frozenset(u + shift for u in a) for a in other.adj)
        return Graph(self.n + other.n, adj)

    def components(self, vertices: Iterable[int] | None = None) -> list[list[int]]:
        """Connected components (sorted lists, ordered by smallest vertex)."""
        keep = set(range(self.n) if vertices is None else vertices)
        seen: set[int] = set()
        comps = []
        for s in sorted(keep):
            if s in seen:
                continue
            stack, comp = [s], []
            seen.add(s)
            while stack:
                v = stack.pop()
                comp.append(v)
                for u in self.adj[v]:
                    if u in keep and u not in seen:
                        seen.add(u)
                        stack.append(u)
            comps.append(sorted(comp))
        return comps


def max_degree(G: Graph, vertices: Iterable[int] | None = None) -> int:
    if vertices is None:
        return max((len(a) for a in G.adj), default=0)
    keep = frozenset(vertices)
    return max((len(G.adj[v] & keep) for v in keep), default=0)


# ---------------------------------------------------------------------------
# Peeling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PeelResult:
    """Removal order, surviving core and each removed vertex's neighbours at removal."""
    order: tuple[int, ...]
    core: frozenset[int]
    removed_neighbors: dict[int, frozenset[int]] = field(default_factory=dict)

    def core_graph(self, G: Graph) -> tuple[Graph, tuple[int, ...]]:
        return G.induced(self.core)


def peel_min_degree(G: Graph, t: int, vertices: Iterable[int] | None = None) -> PeelResult:
    """Remove vertices of current degree <= t, smallest id first, until none is left."""
    if t < 0:
        raise PreconditionViolated(f"peel threshold must be >= 0, got {t}")
    alive = set(range(G.n) if vertices is None else vertices)
    deg = {v: len(G.adj[v] & alive) for v in alive}
    heap = [v for v in alive if deg[v] <= t]
    heapq.heapify(heap)
    queued = set(heap)
    order: list[int] = []
    removed_neighbors: dict[int, frozenset[int]] = {}
    while heap:
        v = heapq.heappop(heap)
        nbrs = frozenset(G.adj[v] & alive)
        alive.remove(v)
        order.append(v)
        removed_neighbors[v] = nbrs
        for u in nbrs:
            deg[u] -= 1
            if deg[u] <= t and u not in queued:
                queued.add(u)
                heapq.heappush(heap, u)
    return PeelResult(tuple(order), frozenset(alive), removed_neighbors)


def degeneracy(G: Graph) -> int:
    """Least t such that every subgraph has a vertex of degree at most t."""
    best = 0
    alive = set(range(G.n))
    deg = {v: len(G.adj[v]) for v in alive}
    while alive:
        v = min(alive, key=lambda u: (deg[u], u))
        best = max(best, deg[v])
        alive.remove(v)
        for u in G.adj[v] & alive:
            deg[u] -= 1
    return best


def peel_exact_degree3(G: Graph) -> PeelResult:
    """Remove vertices of current degree exactly 3 one by one (smallest id first)."""
    if max_degree(G) > 3:
        raise PreconditionViolated(f"max degree {max_degree(G)} > 3")
    alive = set(range(G.n))
    order: list[int] = []
    removed_neighbors: dict[int, frozenset[int]] = {}
    while True:
        cands = [v for v in sorted(alive) if len(G.adj[v] & alive) == 3]
        if not cands:
            break
        v = cands[0]
        removed_neighbors[v] = frozenset(G.adj[v] & alive)
        alive.remove(v)
        order.append(v)

    W = set(order)
    if any(G.adj[w] & W for w in W):
        raise InternalAssertionFailed("removed degree-3 vertices are not independent")
    if any(not G.adj[w] <= alive for w in W):
        raise InternalAssertionFailed("a removed vertex has a neighbour outside the core")
    if max_degree(G, alive) > 2:
        raise InternalAssertionFailed("core keeps a vertex of degree 3")
    return PeelResult(tuple(order), frozenset(alive), removed_neighbors)


# ---------------------------------------------------------------------------
# Paths and cycles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Component:
    kind: Literal["path", "cycle"]
    vertices: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.vertices)

    def edges(self) -> list[tuple[int, int]]:
        vs = self.vertices
        pairs = list(zip(vs, vs[1:]))
        if self.kind == "cycle":
            pairs.append((vs[-1], vs[0]))
        return pairs


@dataclass(frozen=True)
class PathCycleDecomposition:
    components: tuple[Component, ...]

    def paths(self) -> list[Component]:
        return [c for c in self.components if c.kind == "path"]

    def cycles(self) -> list[Component]:
        return [c for c in self.components if c.kind == "cycle"]


def decompose_degree2(G: Graph, vertices: Iterable[int] | None = None) -> PathCycleDecomposition:
    """Split a graph of maximum degree <= 2 into traversed paths and cycles."""
    keep = frozenset(range(G.n) if vertices is None else vertices)
    if max_degree(G, keep) > 2:
        raise PreconditionViolated(f"max degree {max_degree(G, keep)} > 2")
    comps = []
    for comp in G.components(keep):
        ends = [v for v in comp if len(G.adj[v] & keep) < 2]
        if ends:
            start, kind = ends[0], "path"
        else:
            start, kind = comp[0], "cycle"
        seq = [start]
        prev = None
        cur = start
        while True:
            nxt = sorted(u for u in G.adj[cur] & keep if u != prev and u != start)
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            seq.append(cur)
        comps.append(Component(kind, tuple(seq)))
    return PathCycleDecomposition(tuple(comps))


# ---------------------------------------------------------------------------
# Special subgraphs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FindingSet:
    """Witness vertex sets for the subgraphs driving the edge-bound case analysis."""
    d: int
    clique: tuple[int, ...] | None = None
    near_clique: tuple[int, ...] | None = None
    k33: tuple[int, ...] | None = None
    nodes: int = 0

    @property
    def any(self) -> bool:
        return self.clique is not None or self.near_clique is not None

    def describe(self) -> list[str]:
        out = []
        if self.clique:
            out.append(f"K_{self.d + 1} on {list(self.clique)}")
        if self.near_clique:
            out.append(f"K_{self.d + 2}-K_3 on {list(self.near_clique)}")
        if self.k33:
            out.append(f"K_3,3 component on {list(self.k33)}")
        return out


class _CliqueSearch:
    """Backtracking clique search with a shared node budget."""

    def __init__(self, G: Graph, keep: frozenset[int], cap: int):
        self.G = G
        self.keep = keep
        self.cap = cap
        self.nodes = 0

    def _tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.cap:
            raise DidNotDecide(f"subgraph search exceeded {self.cap} nodes")

    def cliques(self, size: int, min_degree: int):
        """Yield cliques of *size* among vertices of degree >= *min_degree*."""
        if size <= 0:
            yield ()
            return
        cand = sorted(v for v in self.keep if len(self.G.adj[v] & self.keep) >= min_degree)
        yield from self._extend((), cand, size)

    def _extend(self, chosen: tuple[int, ...], cand: list[int], size: int):
        self._tick()
        if len(chosen) == size:
            yield chosen
            return
        for i, v in enumerate(cand):
            if len(chosen) + len(cand) - i < size:
                return
            nxt = [u for u in cand[i + 1:] if u in self.G.adj[v]]
            yield from self._extend(chosen + (v,), nxt, size)


def k33_components(G: Graph, vertices: Iterable[int] | None = None) -> list[tuple[int, ...]]:
    """Connected components isomorphic to K_{3,3}."""
    target = nx.complete_bipartite_graph(3, 3)
    return [
        tuple(comp) for comp in G.components(vertices)
        if len(comp) == 6 and len(G.edges(comp)) == 9 and nx.is_isomorphic(G.to_networkx(comp), target)
    ]


def find_forbidden(G: Graph, d: int, vertices: Iterable[int] | None = None,
                   node_cap: int = SEARCH_NODE_CAP) -> FindingSet:
    """Search for K_{d+1}, K_{d+2}-K_3 and K_{3,3} components."""
    keep = frozenset(range(G.n) if vertices is None else vertices)
    search = _CliqueSearch(G, keep, node_cap)

    clique = next(search.cliques(d + 1, d), None)

    # K_{d+2}-K_3 = a (d-1)-clique Q plus three vertices joined to all of Q
    near = None
    for q in search.cliques(d - 1, d + 1):
        common = set(keep) - set(q)
        for v in q:
            common &= G.adj[v]
        if len(common) >= 3:
            near = tuple(sorted(q + tuple(sorted(common)[:3])))
            break

    k33 = next(iter(k33_components(G, keep)), None)

    logger.debug(f"find_forbidden(d={d}) visited {search.nodes} nodes")
    return FindingSet(d, clique, near, k33, search.nodes)


def clique_number(G: Graph, node_cap: int = SEARCH_NODE_CAP) -> int:
    """Size of a largest clique."""
    if G.n == 0:
        return 0
    keep = frozenset(range(G.n))
    search = _CliqueSearch(G, keep, node_cap)
    best = 1
    while next(search.cliques(best + 1, best), None) is not None:
        best += 1
    return best


def complement_matching(G: Graph, k: int, vertices: Iterable[int] | None = None) -> list[tuple[int, int]] | None:
    """Return *k* disjoint non-adjacent vertex pairs, or ``None`` if there are none."""
    if k <= 0:
        return []
    keep = sorted(range(G.n) if vertices is None else vertices)
    comp = nx.Graph()
    comp.add_nodes_from(keep)
    comp.add_edges_from((u, v) for u, v in combinations(keep, 2) if v not in G.adj[u])
    matching = nx.max_weight_matching(comp, maxcardinality=True)
    pairs = sorted(tuple(sorted(e)) for e in matching)
    if len(pairs) < k:
        return None
    return pairs[:k]
