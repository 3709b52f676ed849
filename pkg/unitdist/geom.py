"""Closed-form geometric primitives on spheres and affine subspaces."""

from __future__ import annotations

from dataclasses import dataclass, field
import logging

import numpy as np
from scipy.linalg import orth, qr

from .embedding import SPHERE_RADIUS, Embedding
from .errors import (
    DegenerateSpan,
    FullSpan,
    GeometryError,
    InternalAssertionFailed,
    NotOnSphere,
    PreconditionViolated,
    ResampleExceeded,
)

logger = logging.getLogger(__name__)

RANK_TOL = 1e-10
FRAME_TOL = 1e-12
APEX_TOL = 1e-10
ON_SPHERE_TOL = 1e-9
MIN_GAUSSIAN_NORM = 1e-8
MIN_SEPARATION = 1e-6
MAX_TRIES = 100


@dataclass(frozen=True)
class Frame:
    """Orthonormal basis (rows) of a linear subspace of ``ambient``-space."""
    basis: np.ndarray

    def __post_init__(self):
        b = np.atleast_2d(np.asarray(self.basis, dtype=float))
        object.__setattr__(self, "basis", b)
        if b.shape[0] and not np.allclose(b @ b.T, np.eye(b.shape[0]), atol=FRAME_TOL):
            raise PreconditionViolated("frame basis is not orthonormal")

    @classmethod
    def standard(cls, d: int) -> "Frame":
        return cls(np.eye(d))

    @property
    def k(self) -> int:
        return self.basis.shape[0]

    @property
    def ambient(self) -> int:
        return self.basis.shape[1]

    def sub(self, rows) -> "Frame":
        return Frame(self.basis[list(rows)])

    def split(self, sizes: list[int]) -> list["Frame"]:
        """Consecutive, mutually orthogonal sub-frames of the given sizes."""
        if sum(sizes) > self.k:
            raise PreconditionViolated(f"cannot split a {self.k}-frame into {sizes}")
        out, start = [], 0
        for s in sizes:
            out.append(self.sub(range(start, start + s)))
            start += s
        return out

    def drop_last(self) -> tuple["Frame", np.ndarray]:
        """Hyperplane sub-frame and the unit normal completing it."""
        return self.sub(range(self.k - 1)), self.basis[-1]

    def coords(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x) @ self.basis.T

    def lift(self, y: np.ndarray) -> np.ndarray:
        return np.asarray(y) @ self.basis

    def complement(self, vectors) -> "Frame":
        """Sub-frame of this frame orthogonal to *vectors* (ambient coordinates)."""
        vecs = [self.coords(v) for v in vectors]
        inner = orthonormal_complement(vecs, self.k)
        return Frame(inner.basis @ self.basis)


@dataclass(frozen=True)
class SphereSpec:
    radius: float = SPHERE_RADIUS
    center: np.ndarray | None = None

    def __post_init__(self):
        if not self.radius > 0:
            raise PreconditionViolated(f"sphere radius must be positive, got {self.radius}")

    def deviation(self, point: np.ndarray) -> float:
        p = np.asarray(point, dtype=float)
        if self.center is not None:
            p = p - self.center
        return abs(float(np.linalg.norm(p)) - self.radius)

    def contains(self, point: np.ndarray, tol: float = ON_SPHERE_TOL) -> bool:
        return self.deviation(point) <= tol


def orthonormal_complement(vectors, d: int, tol: float = RANK_TOL) -> Frame:
    """Orthonormal basis of the orthogonal complement of ``span(vectors)`` in d-space."""
    vecs = [np.asarray(v, dtype=float) for v in vectors]
    if not vecs:
        return Frame.standard(d)
    A = np.column_stack(vecs)
    if A.shape[0] != d:
        raise PreconditionViolated(f"vectors have dimension {A.shape[0]}, expected {d}")
    Q, R, _ = qr(A, mode="full", pivoting=True)
    diag = np.abs(np.diag(R))
    scale = max(1.0, float(diag[0])) if diag.size else 1.0
    rank = int(np.count_nonzero(diag > tol * scale))
    if rank >= d:
        raise FullSpan(f"vectors span all of {d}-space")
    return Frame(Q[:, rank:].T)


def sample_subsphere(frame: Frame, radius: float, rng: np.random.Generator) -> np.ndarray:
    """Uniform point on the radius-*radius* sphere of the subspace spanned by *frame*."""
    if frame.k == 0:
        raise PreconditionViolated("cannot sample from an empty frame")
    while True:
        g = rng.standard_normal(frame.k)
        norm = np.linalg.norm(g)
        if norm >= MIN_GAUSSIAN_NORM:
            return radius * frame.lift(g / norm)


def circle_point(plane: Frame, radius: float, theta: float) -> np.ndarray:
    if plane.k != 2:
        raise PreconditionViolated(f"circle needs a 2-frame, got {plane.k}")
    return radius * (np.cos(theta) * plane.basis[0] + np.sin(theta) * plane.basis[1])


def apex_points(N, d: int) -> tuple[np.ndarray, np.ndarray, bool]:
    """The two points at distance 1 from sphere points spanning an affine hyperplane.

    Returns ``(p_plus, p_minus, on_sphere)``; ``on_sphere`` is set when the
    hyperplane passes through the origin, in which case both points are poles
    of the sphere itself.
    """
    pts = np.atleast_2d(np.asarray(N, dtype=float))
    if pts.shape[1] != d:
        raise PreconditionViolated(f"points have dimension {pts.shape[1]}, expected {d}")
    dev = np.abs(np.linalg.norm(pts, axis=1) - SPHERE_RADIUS)
    if dev.max() > ON_SPHERE_TOL:
        raise NotOnSphere(f"point {int(np.argmax(dev))} is off the sphere by {dev.max():.3e}")
    try:
        normal = orthonormal_complement(pts[1:] - pts[0], d)
    except FullSpan:
        raise DegenerateSpan("points span all of the ambient space") from None
    if normal.k != 1:
        raise DegenerateSpan(f"points span an affine subspace of dimension {d - normal.k} < {d - 1}")

    n = normal.basis[0]
    offset = float(n @ pts[0])
    if abs(offset) < APEX_TOL:
        lead = n[np.flatnonzero(np.abs(n) > RANK_TOL)[0]]
        n = n if lead > 0 else -n
        offset = 0.0
    elif offset < 0:
        n, offset = -n, -offset
    c = offset * n
    rho2 = 0.5 - offset**2
    s = np.sqrt(1.0 - rho2)
    p_plus, p_minus = c + s * n, c - s * n

    for p in (p_plus, p_minus):
        err = np.abs(np.linalg.norm(pts - p, axis=1) - 1.0).max()
        if err > APEX_TOL:
            raise InternalAssertionFailed(f"apex point misses unit distance by {err:.3e}")
    return p_plus, p_minus, offset < APEX_TOL


# ---------------------------------------------------------------------------
# Unit-distance locus of an arbitrary point set
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Locus:
    """Sphere of points at distance 1 from a point set: centre, radius, free directions."""
    center: np.ndarray
    radius: float
    frame: Frame

    def point(self, direction: np.ndarray) -> np.ndarray:
        return self.center + self.radius * direction

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return self.center + sample_subsphere(self.frame, self.radius, rng)


def unit_distance_locus(points, d: int) -> Locus:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] == 0:
        raise PreconditionViolated("locus of an empty point set is unbounded")
    x0 = pts[0]
    D = pts[1:] - x0
    try:
        free = orthonormal_complement(list(D), d)
    except FullSpan:
        raise DegenerateSpan("points affinely span the whole space; no free direction") from None
    if len(D):
        B = orth(D.T, rcond=RANK_TOL)
        rhs = 0.5 * np.einsum("ij,ij->i", D, D)
        y, *_ = np.linalg.lstsq(D @ B, rhs, rcond=None)
        if np.abs(D @ B @ y - rhs).max() > 1e-9:
            raise DegenerateSpan("points have no common circumsphere in their affine hull")
        center = x0 + B @ y
    else:
        center = x0.copy()
    rho2 = float(np.sum((center - x0) ** 2))
    if rho2 > 1.0 + 1e-12:
        raise GeometryError(f"circumradius {np.sqrt(rho2):.6f} exceeds 1; no point at unit distance")
    return Locus(center, float(np.sqrt(max(0.0, 1.0 - rho2))), free)


def _clear_of(p: np.ndarray, avoid: np.ndarray, min_sep: float) -> bool:
    return avoid.size == 0 or float(np.min(np.linalg.norm(avoid - p, axis=1))) > min_sep


def sample_locus(points, d: int, rng: np.random.Generator, avoid: np.ndarray | None = None,
                 min_sep: float = MIN_SEPARATION, tries: int = MAX_TRIES) -> np.ndarray:
    """Random point at distance 1 from every point of *points*, away from *avoid*."""
    avoid = np.zeros((0, d)) if avoid is None else np.atleast_2d(avoid).reshape(-1, d)
    pts = np.atleast_2d(np.asarray(points, dtype=float)).reshape(-1, d)
    locus = unit_distance_locus(pts, d) if len(pts) else None
    for attempt in range(tries):
        if locus is None:
            p = rng.standard_normal(d)
        else:
            p = locus.sample(rng)
        if _clear_of(p, avoid, min_sep):
            return p
        logger.debug(f"locus sample {attempt} collided; redrawing")
    raise ResampleExceeded(f"no collision-free point on the unit-distance locus after {tries} draws")


# ---------------------------------------------------------------------------
# Simplices and orthobasis cliques
# ---------------------------------------------------------------------------


def regular_simplex(m: int, d: int, edge: float = 1.0) -> np.ndarray:
    """``m`` points with all pairwise distances ``edge`` (centroid-lift construction)."""
    if m < 0 or m > d + 1:
        raise PreconditionViolated(f"a regular simplex with {m} vertices does not fit in {d}-space")
    pts = np.zeros((m, d))
    for k in range(1, m):
        centroid = pts[:k].mean(axis=0)
        R2 = edge**2 * (k - 1) / (2 * k)
        pts[k] = centroid
        pts[k, k - 1] = np.sqrt(edge**2 - R2)
    return pts


def glued_simplices(d: int) -> Embedding:
    """Two regular unit d-simplices sharing a facet: a realization of K_{d+2} - e.

    Vertices ``0..d-1`` form the shared facet, ``d`` and ``d+1`` are the apexes.
    """
    if d < 2:
        raise PreconditionViolated(f"glued simplices need d >= 2, got {d}")
    facet = regular_simplex(d, d)
    centroid = facet.mean(axis=0)
    h = np.sqrt(1.0 - (d - 1) / (2 * d))
    up, down = centroid.copy(), centroid.copy()
    up[d - 1] += h
    down[d - 1] -= h
    apex_gap = float(np.linalg.norm(up - down))
    if not (0 < apex_gap < 2) or abs(apex_gap - 1) < 1e-9:
        raise InternalAssertionFailed(f"apex distance {apex_gap} outside (0, 2) or equal to 1")
    pos = {i: facet[i] for i in range(d)}
    pos[d], pos[d + 1] = up, down
    return Embedding(d, pos, {"strategy": "glued-simplices", "apex_distance": apex_gap})


def orthobasis_clique(m: int, d: int, frame: Frame | None = None) -> np.ndarray:
    """``m`` mutually orthogonal points of norm 1/sqrt(2): pairwise distance 1."""
    frame = frame or Frame.standard(d)
    if frame.ambient != d:
        raise PreconditionViolated(f"frame lives in {frame.ambient}-space, expected {d}")
    if m < 0 or m > frame.k:
        raise PreconditionViolated(f"cannot place {m} orthogonal points in a {frame.k}-frame")
    return SPHERE_RADIUS * frame.basis[:m]
