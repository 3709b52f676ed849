from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

import numpy as np

from .errors import MissingVertex, PreconditionViolated

SPHERE_RADIUS = 1 / np.sqrt(2)


@dataclass
class Embedding:
    """Vertex coordinates in ``dim``-space plus construction metadata."""
    dim: int
    pos: dict[int, np.ndarray] = field(default_factory=dict)
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.dim < 1:
            raise PreconditionViolated(f"embedding dimension must be >= 1, got {self.dim}")
        self.pos = {int(v): np.asarray(p, dtype=float) for v, p in self.pos.items()}
        for v, p in self.pos.items():
            self._check_point(v, p)
        self.meta.setdefault("retries", 0)
        self.meta.setdefault("trace", [])

    def _check_point(self, v: int, p: np.ndarray) -> None:
        if p.shape != (self.dim,):
            raise PreconditionViolated(f"vertex {v} has shape {p.shape}, expected ({self.dim},)")
        if not np.all(np.isfinite(p)):
            raise PreconditionViolated(f"vertex {v} has non-finite coordinates")

    def __contains__(self, v: int) -> bool:
        return v in self.pos

    def __len__(self) -> int:
        return len(self.pos)

    def __getitem__(self, v: int) -> np.ndarray:
        try:
            return self.pos[v]
        except KeyError:
            raise MissingVertex(v) from None

    def place(self, v: int, point) -> None:
        p = np.asarray(point, dtype=float)
        self._check_point(v, p)
        self.pos[int(v)] = p

    def update(self, points: Mapping[int, np.ndarray]) -> None:
        for v, p in points.items():
            self.place(v, p)

    def points(self, vertices: Iterable[int] | None = None) -> np.ndarray:
        """Stacked coordinates of *vertices* (all vertices, sorted, by default)."""
        vs = sorted(self.pos) if vertices is None else list(vertices)
        if not vs:
            return np.zeros((0, self.dim))
        return np.stack([self[v] for v in vs])

    def relabel(self, labels: tuple[int, ...]) -> "Embedding":
        """Map vertex ``i`` to ``labels[i]`` (inverse of ``Graph.induced``)."""
        return Embedding(self.dim, {labels[v]: p for v, p in self.pos.items()}, dict(self.meta))

    def trace(self, message: str) -> None:
        self.meta["trace"].append(message)
