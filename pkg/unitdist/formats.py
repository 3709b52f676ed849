"""Graph, colouring and coordinate file formats."""

from __future__ import annotations

from itertools import combinations
from pathlib import Path
from typing import Any

import numpy as np

from .embedding import Embedding
from .errors import ParseError, PreconditionViolated
from .graph import Graph
from .ramsey import COLORS, Coloring
from .verify import VerifyReport

HEADER = "# unitdist embedding"
HEADER_FIELDS = ("dim", "seed", "strategy", "mode", "color")


def _lines(text: str) -> list[tuple[int, list[str]]]:
    """Non-empty lines with comments stripped, paired with their 1-based line number."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        tokens = raw.split("#", 1)[0].split()
        if tokens:
            out.append((lineno, tokens))
    return out


def _ints(tokens: list[str], lineno: int, count: int) -> list[int]:
    if len(tokens) != count:
        raise ParseError(f"line {lineno}: expected {count} fields, got {len(tokens)}")
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"line {lineno}: expected integers, got {' '.join(tokens)!r}") from None


# ---------------------------------------------------------------------------
# Graphs
# ---------------------------------------------------------------------------


def parse_graph(text: str) -> Graph:
    """``n m`` on the first line, then m lines ``u v`` with 0-based vertices."""
    lines = _lines(text)
    if not lines:
        raise ParseError("empty graph file")
    lineno, tokens = lines[0]
    n, m = _ints(tokens, lineno, 2)
    if n < 0 or m < 0:
        raise ParseError(f"line {lineno}: negative vertex or edge count")
    body = lines[1:]
    if len(body) != m:
        raise ParseError(f"header announces {m} edges, file has {len(body)}")
    edges = []
    for lineno, tokens in body:
        u, v = _ints(tokens, lineno, 2)
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"line {lineno}: vertex out of range 0..{n - 1}")
        edges.append((u, v))
    try:
        G = Graph.from_edges(n, edges)
    except PreconditionViolated as exc:
        raise ParseError(str(exc)) from exc
    if G.m != m:
        raise ParseError(f"duplicate edges: {m} listed, {G.m} distinct")
    return G


def format_graph(G: Graph) -> str:
    rows = [f"{G.n} {G.m}"] + [f"{u} {v}" for u, v in G.edges()]
    return "\n".join(rows) + "\n"


def read_graph(path: Path) -> Graph:
    return parse_graph(Path(path).read_text())


# ---------------------------------------------------------------------------
# Colourings
# ---------------------------------------------------------------------------


def parse_coloring(text: str) -> Coloring:
    """``s`` on the first line, then one line ``u v c`` per pair, c in {r, b}."""
    lines = _lines(text)
    if not lines:
        raise ParseError("empty colouring file")
    lineno, tokens = lines[0]
    (s,) = _ints(tokens, lineno, 1)
    if s < 0:
        raise ParseError(f"line {lineno}: negative vertex count")
    colors: dict[tuple[int, int], str] = {}
    for lineno, tokens in lines[1:]:
        if len(tokens) != 3:
            raise ParseError(f"line {lineno}: expected 'u v c'")
        u, v = _ints(tokens[:2], lineno, 2)
        c = tokens[2].lower()
        if c not in COLORS:
            raise ParseError(f"line {lineno}: colour must be r or b, got {tokens[2]!r}")
        if u == v or not (0 <= u < s and 0 <= v < s):
            raise ParseError(f"line {lineno}: ({u}, {v}) is not a pair of K_{s}")
        key = (min(u, v), max(u, v))
        if key in colors:
            raise ParseError(f"line {lineno}: pair {key} coloured twice")
        colors[key] = c
    missing = [p for p in combinations(range(s), 2) if p not in colors]
    if missing:
        raise ParseError(f"{len(missing)} pairs missing, first {missing[0]}")
    return Coloring.from_map(s, colors)


def format_coloring(col: Coloring) -> str:
    rows = [str(col.s)] + [f"{u} {v} {c}" for u, v, c in col.pairs()]
    return "\n".join(rows) + "\n"


def read_coloring(path: Path) -> Coloring:
    return parse_coloring(Path(path).read_text())


# ---------------------------------------------------------------------------
# Embedding documents
# ---------------------------------------------------------------------------


def _num(x: float) -> str:
    return format(float(x), ".17g")


def format_report(report: VerifyReport) -> list[str]:
    edge = "-" if report.worst_edge is None else f"{report.worst_edge[0]} {report.worst_edge[1]}"
    rows = [
        f"report max_edge_deviation {_num(report.max_edge_deviation)}",
        f"report worst_edge {edge}",
        f"report sphere_deviation {'-' if report.sphere_deviation is None else _num(report.sphere_deviation)}",
        f"report distinct_min_gap {'-' if report.distinct_min_gap is None else _num(report.distinct_min_gap)}",
        f"report retries {report.retries}",
        f"report passed {str(report.passed).lower()}",
    ]
    rows += [f"report gp {finding}" for finding in report.gp_findings]
    return rows


def format_embedding(E: Embedding, seed: int | None = None, report: VerifyReport | None = None,
                     mode: str | None = None) -> str:
    """Stable text document: header fields, one coordinate row per vertex, then the report."""
    header: dict[str, Any] = {
        "dim": E.dim,
        "seed": seed,
        "strategy": E.meta.get("strategy"),
        "mode": mode,
        "color": E.meta.get("color"),
    }
    rows = [HEADER]
    rows += [f"{k} {v}" for k, v in header.items() if v is not None]
    rows.append(f"vertices {len(E)}")
    for v in sorted(E.pos):
        rows.append(" ".join([str(v), *(_num(x) for x in E.pos[v])]))
    if report is not None:
        rows += format_report(report)
    return "\n".join(rows) + "\n"


def parse_embedding(text: str) -> tuple[Embedding, dict[str, str]]:
    """Read the coordinates and header fields back; report lines are skipped."""
    header: dict[str, str] = {}
    pos: dict[int, np.ndarray] = {}
    expected = None
    for lineno, tokens in _lines(text):
        key = tokens[0]
        if key == "report":
            continue
        if key in HEADER_FIELDS:
            header[key] = " ".join(tokens[1:])
        elif key == "vertices":
            (expected,) = _ints(tokens[1:], lineno, 1)
        else:
            try:
                v = int(key)
                pos[v] = np.array([float(t) for t in tokens[1:]])
            except ValueError:
                raise ParseError(f"line {lineno}: unreadable coordinate row") from None
    if "dim" not in header:
        raise ParseError("coordinate file has no 'dim' field")
    try:
        dim = int(header["dim"])
    except ValueError:
        raise ParseError(f"dim must be an integer, got {header['dim']!r}") from None
    if expected is not None and expected != len(pos):
        raise ParseError(f"file announces {expected} vertices, has {len(pos)}")
    try:
        E = Embedding(dim, pos, {"strategy": header.get("strategy")})
    except PreconditionViolated as exc:
        raise ParseError(str(exc)) from exc
    return E, header


def read_embedding(path: Path) -> tuple[Embedding, dict[str, str]]:
    return parse_embedding(Path(path).read_text())
