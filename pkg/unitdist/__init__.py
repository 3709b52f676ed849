"""Unit-distance embeddings of graphs in Euclidean space and on spheres."""

__all__ = [
    "config",
    "embedding",
    "errors",
    "euclid",
    "formats",
    "geom",
    "graph",
    "helpers",
    "partition",
    "ramsey",
    "runner",
    "sphere",
    "verify",
]

__version__ = "1.0.0"
