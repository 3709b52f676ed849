"""Embedding verification, general-position predicates and a least-squares oracle."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, islice
from math import comb
import logging

import numpy as np
from scipy.linalg import orth
from scipy.optimize import least_squares
from scipy.spatial.distance import pdist

from .embedding import SPHERE_RADIUS, Embedding
from .errors import InternalAssertionFailed, PreconditionViolated, ResampleExceeded
from .graph import Graph

logger = logging.getLogger(__name__)

# constructions redraw below a threshold tightened above this many vertices so
# the expected number of near-degenerate draws stays constant; the verdict
# always uses eps_gp
GP_REFERENCE_SIZE = 30
GP_MIN_THRESHOLD = 1e-10
GP_SUBSAMPLE_ABOVE = 200
GP_SUBSAMPLE_SIZE = 200_000
_CHUNK = 200_000

LSQ_RESIDUAL_THRESHOLD = 1e-18
LSQ_VERIFY_EPS = 1e-7


@dataclass(frozen=True)
class Tolerances:
    eps_edge: float = 1e-9
    eps_sphere: float = 1e-9
    eps_gp: float = 1e-6
    eps_distinct: float = 1e-6

    def __post_init__(self):
        for name in ("eps_edge", "eps_sphere", "eps_gp", "eps_distinct"):
            if not getattr(self, name) > 0:
                raise PreconditionViolated(f"{name} must be positive, got {getattr(self, name)}")


@dataclass
class VerifyReport:
    max_edge_deviation: float = 0.0
    worst_edge: tuple[int, int] | None = None
    sphere_deviation: float | None = None
    gp_findings: list[str] = field(default_factory=list)
    distinct_min_gap: float | None = None
    retries: int = 0
    passed: bool = True

    def merge(self, other: "VerifyReport") -> "VerifyReport":
        """Combine two reports measured on the same embedding."""
        worse = other if other.max_edge_deviation > self.max_edge_deviation else self
        gaps = [g for g in (self.distinct_min_gap, other.distinct_min_gap) if g is not None]
        sph = [s for s in (self.sphere_deviation, other.sphere_deviation) if s is not None]
        return VerifyReport(
            max_edge_deviation=worse.max_edge_deviation,
            worst_edge=worse.worst_edge,
            sphere_deviation=max(sph) if sph else None,
            gp_findings=self.gp_findings + other.gp_findings,
            distinct_min_gap=min(gaps) if gaps else None,
            retries=max(self.retries, other.retries),
            passed=self.passed and other.passed,
        )


def min_gap(E: Embedding) -> float | None:
    """Smallest distance between two embedded vertices (``None`` below two vertices)."""
    if len(E) < 2:
        return None
    return float(pdist(E.points()).min())


def verify_edges(G: Graph, E: Embedding, tol: Tolerances = Tolerances()) -> VerifyReport:
    for v in G.vertices():
        E[v]
    edges = G.edges()
    report = VerifyReport(distinct_min_gap=min_gap(E), retries=E.meta.get("retries", 0))
    if edges:
        arr = np.array(edges)
        pts = E.points(range(G.n))
        dev = np.abs(np.linalg.norm(pts[arr[:, 0]] - pts[arr[:, 1]], axis=1) - 1.0)
        worst = int(np.argmax(dev))
        report.max_edge_deviation = float(dev[worst])
        report.worst_edge = edges[worst]
    report.passed = report.max_edge_deviation <= tol.eps_edge
    return report


def verify_sphere(E: Embedding, radius: float = SPHERE_RADIUS, tol: Tolerances = Tolerances(),
                  center: np.ndarray | None = None) -> VerifyReport:
    if len(E) == 0:
        return VerifyReport(sphere_deviation=0.0)
    pts = E.points()
    if center is not None:
        pts = pts - np.asarray(center, dtype=float)
    dev = float(np.max(np.abs(np.linalg.norm(pts, axis=1) - radius)))
    return VerifyReport(sphere_deviation=dev, passed=dev <= tol.eps_sphere)


def verify_distinct(E: Embedding, tol: Tolerances = Tolerances()) -> bool:
    gap = min_gap(E)
    return gap is None or gap > tol.eps_distinct


def check_embedding(G: Graph, E: Embedding, tol: Tolerances = Tolerances(), vertices=None,
                    sphere: bool = False) -> VerifyReport:
    """Re-measure a freshly built (partial) embedding before it is returned.

    Edge or sphere deviations beyond tolerance are construction bugs and raise;
    coincident vertices are random and raise ``ResampleExceeded`` so the
    caller redraws.
    """
    vs = sorted(range(G.n) if vertices is None else vertices)
    sub = Embedding(E.dim, {v: E[v] for v in vs})
    report = VerifyReport(distinct_min_gap=min_gap(sub), retries=E.meta.get("retries", 0))
    edges = G.edges(vs)
    if edges:
        dev = [abs(float(np.linalg.norm(E[u] - E[v])) - 1.0) for u, v in edges]
        worst = int(np.argmax(dev))
        report.max_edge_deviation, report.worst_edge = dev[worst], edges[worst]
    if sphere:
        report.sphere_deviation = verify_sphere(sub, tol=tol).sphere_deviation
    report.passed = report.max_edge_deviation <= tol.eps_edge and (
        not sphere or report.sphere_deviation <= tol.eps_sphere)
    if not report.passed:
        raise InternalAssertionFailed(
            f"construction off by {report.max_edge_deviation:.3e} on edge {report.worst_edge}"
            f" (sphere deviation {report.sphere_deviation})")
    if report.distinct_min_gap is not None and report.distinct_min_gap <= tol.eps_distinct:
        raise ResampleExceeded(f"two vertices within {report.distinct_min_gap:.3e}")
    return report


# ---------------------------------------------------------------------------
# General position on a 2-sphere
# ---------------------------------------------------------------------------


@dataclass
class GPCertificate:
    """Measured general-position margins of points on a 2-sphere.

    ``offenders`` and ``flagged`` are judged against ``eps_gp``. ``redraw`` and
    ``redraw_flagged`` use the size-scaled threshold that constructions
    resample on; below 31 vertices both thresholds coincide.
    """
    p1_margin: float = float("inf")
    p2_min_volume: float = float("inf")
    independence_margin: float = float("inf")
    exempt: int = 0
    flagged: list[tuple[int, ...]] = field(default_factory=list)
    offenders: list[tuple[int, ...]] = field(default_factory=list)
    redraw: list[tuple[int, ...]] = field(default_factory=list)
    redraw_flagged: int = 0
    antipodal_pairs: list[tuple[int, int]] = field(default_factory=list)
    attempts: int = 1

    @property
    def passed(self) -> bool:
        return not self.offenders


def _threshold(eps: float, n: int, k: int) -> float:
    count = comb(n, k)
    if count <= comb(GP_REFERENCE_SIZE, k):
        return eps
    return max(eps * comb(GP_REFERENCE_SIZE, k) / count, GP_MIN_THRESHOLD)


def _sphere_coords(pts: np.ndarray) -> np.ndarray:
    """Express points lying in a 3-dim linear subspace in 3 coordinates."""
    if pts.shape[1] <= 3:
        return np.pad(pts, ((0, 0), (0, 3 - pts.shape[1])))
    basis = orth(pts.T)
    if basis.shape[1] > 3:
        raise PreconditionViolated(f"points span {basis.shape[1]} dimensions, expected <= 3")
    return np.pad(pts @ basis, ((0, 0), (0, 3 - basis.shape[1])))


def _combos(n: int, k: int, rng: np.random.Generator):
    """Chunks of k-subsets of range(n); a random sample when n is large."""
    if n > GP_SUBSAMPLE_ABOVE:
        rows = rng.integers(0, n, size=(GP_SUBSAMPLE_SIZE, k))
        rows.sort(axis=1)
        rows = rows[np.all(np.diff(rows, axis=1) > 0, axis=1)]
        yield np.unique(rows, axis=0)
        return
    it = combinations(range(n), k)
    while True:
        block = list(islice(it, _CHUNK))
        if not block:
            return
        yield np.array(block, dtype=np.intp)


def _pair_count(rows: np.ndarray, partner: np.ndarray) -> np.ndarray:
    count = np.zeros(len(rows), dtype=int)
    for a, b in combinations(range(rows.shape[1]), 2):
        count += partner[rows[:, a]] == rows[:, b]
    return count


def gp_certificate(E: Embedding, exempt_pairs=(), tol: Tolerances = Tolerances(),
                   vertices=None) -> GPCertificate:
    """Measure the general-position properties of *E* restricted to *vertices*."""
    labels = sorted(E.pos) if vertices is None else sorted(vertices)
    n = len(labels)
    cert = GPCertificate(antipodal_pairs=[tuple(sorted(p)) for p in exempt_pairs])
    if n < 3:
        return cert
    index = {v: i for i, v in enumerate(labels)}
    pts = _sphere_coords(E.points(labels))
    partner = np.full(n, -1, dtype=np.intp)
    for a, b in cert.antipodal_pairs:
        if a in index and b in index:
            partner[index[a]], partner[index[b]] = index[b], index[a]
    rng = np.random.default_rng(n)

    # no vertex at distance 1 from three others
    dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
    gap = np.abs(dist - 1.0)
    np.fill_diagonal(gap, np.inf)
    third = np.partition(gap, 2, axis=1)[:, 2]
    cert.p1_margin = float(third.min())
    for i in np.flatnonzero(third < tol.eps_gp):
        near = np.flatnonzero(gap[i] < tol.eps_gp)
        cert.offenders.append(tuple(labels[j] for j in (i, *near)))
    cert.redraw.extend(cert.offenders)

    def groups(rows: np.ndarray) -> list[tuple[int, ...]]:
        return [tuple(labels[j] for j in r) for r in rows]

    # no three vertices on a great circle unless two of them are antipodal
    eps3 = _threshold(tol.eps_gp, n, 3)
    for rows in _combos(n, 3, rng):
        vol = np.abs(np.linalg.det(pts[rows]))
        keep = _pair_count(rows, partner) == 0
        if keep.any():
            cert.independence_margin = min(cert.independence_margin, float(vol[keep].min()))
        cert.offenders += groups(rows[keep & (vol < tol.eps_gp)])
        cert.redraw += groups(rows[keep & (vol < eps3)])

    if n >= 4:
        eps4 = _threshold(tol.eps_gp, n, 4)
        for rows in _combos(n, 4, rng):
            p = pts[rows]
            vol = np.abs(np.linalg.det(p[:, 1:, :] - p[:, :1, :]))
            pairs = _pair_count(rows, partner)
            cert.exempt += int(np.count_nonzero(pairs >= 2))
            keep = pairs == 0
            if keep.any():
                cert.p2_min_volume = min(cert.p2_min_volume, float(vol[keep].min()))
            cert.offenders += groups(rows[keep & (vol < tol.eps_gp)])
            cert.flagged += groups(rows[(pairs == 1) & (vol < tol.eps_gp)])
            cert.redraw += groups(rows[keep & (vol < eps4)])
            cert.redraw_flagged += int(np.count_nonzero((pairs == 1) & (vol < eps4)))
    if cert.flagged:
        logger.debug(f"{len(cert.flagged)} near-concyclic quadruples with one antipodal pair")
    return cert


def verify_gp(E: Embedding, exempt_pairs=(), tol: Tolerances = Tolerances(), vertices=None) -> VerifyReport:
    """Check both general-position properties; failures are listed in ``gp_findings``."""
    cert = gp_certificate(E, exempt_pairs, tol, vertices)
    findings = [f"degenerate: {list(o)}" for o in cert.offenders]
    findings += [f"flagged: {list(q)}" for q in cert.flagged]
    return VerifyReport(gp_findings=findings, passed=cert.passed)


# ---------------------------------------------------------------------------
# Least-squares realizability oracle
# ---------------------------------------------------------------------------


def _edge_array(G: Graph) -> np.ndarray:
    edges = G.edges()
    return np.array(edges, dtype=np.intp).reshape(-1, 2)


def lsq_residuals(X: np.ndarray, edges: np.ndarray) -> np.ndarray:
    return np.linalg.norm(X[edges[:, 0]] - X[edges[:, 1]], axis=1) - 1.0


def lsq_objective(X: np.ndarray, G: Graph) -> float:
    """Sum over edges of (|x_u - x_v| - 1)^2 for an ``(n, d)`` coordinate array."""
    r = lsq_residuals(X, _edge_array(G))
    return float(r @ r)


def lsq_gradient(X: np.ndarray, G: Graph) -> np.ndarray:
    edges = _edge_array(G)
    diff = X[edges[:, 0]] - X[edges[:, 1]]
    norm = np.linalg.norm(diff, axis=1)
    scale = np.divide(2 * (norm - 1.0), norm, out=np.zeros_like(norm), where=norm > 0)
    g = scale[:, None] * diff
    grad = np.zeros_like(X)
    np.add.at(grad, edges[:, 0], g)
    np.add.at(grad, edges[:, 1], -g)
    return grad


def _jacobian(x: np.ndarray, edges: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    X = x.reshape(shape)
    diff = X[edges[:, 0]] - X[edges[:, 1]]
    norm = np.linalg.norm(diff, axis=1)
    unit = np.divide(diff, norm[:, None], out=np.zeros_like(diff), where=norm[:, None] > 0)
    n, d = shape
    J = np.zeros((len(edges), n * d))
    rows = np.arange(len(edges))
    for k in range(d):
        J[rows, edges[:, 0] * d + k] = unit[:, k]
        J[rows, edges[:, 1] * d + k] = -unit[:, k]
    return J


def _descend(X: np.ndarray, G: Graph, iters: int) -> np.ndarray:
    """Gradient descent with Armijo backtracking."""
    f = lsq_objective(X, G)
    step = 1.0
    for _ in range(iters):
        g = lsq_gradient(X, G)
        gg = float(np.sum(g * g))
        if gg < 1e-24 or f < LSQ_RESIDUAL_THRESHOLD:
            break
        step = min(step * 2, 1.0)
        while step > 1e-12:
            Y = X - step * g
            fy = lsq_objective(Y, G)
            if fy <= f - 1e-4 * step * gg:
                break
            step *= 0.5
        else:
            break
        X, f = Y, fy
    return X


def lsq_realize(G: Graph, d: int, rng: np.random.Generator, restarts: int = 20,
                iters: int = 2000) -> Embedding | None:
    """Search numerically for a unit-distance realization; ``None`` is inconclusive."""
    if d < 1:
        raise PreconditionViolated(f"dimension must be >= 1, got {d}")
    edges = _edge_array(G)
    shape = (G.n, d)
    for attempt in range(1, restarts + 1):
        X = rng.normal(scale=0.5, size=shape)
        if len(edges):
            X = _descend(X, G, iters)
            sol = least_squares(
                lsq_residuals_flat, X.ravel(), jac=_jacobian, args=(edges, shape),
                method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=200,
            )
            X = sol.x.reshape(shape)
        residual = lsq_objective(X, G)
        if residual >= LSQ_RESIDUAL_THRESHOLD:
            logger.debug(f"oracle restart {attempt}: residual {residual:.3e}")
            continue
        E = Embedding(d, {v: X[v] for v in range(G.n)}, {"strategy": "least-squares", "retries": attempt - 1})
        if verify_edges(G, E, Tolerances(eps_edge=LSQ_VERIFY_EPS)).passed:
            return E
    return None


def lsq_residuals_flat(x: np.ndarray, edges: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    return lsq_residuals(x.reshape(shape), edges)
