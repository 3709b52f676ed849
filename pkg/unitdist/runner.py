from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb
from pathlib import Path
from typing import Callable, Literal
import time

from .config import Config
from .embedding import SPHERE_RADIUS, Embedding
from .errors import (
    DidNotDecide,
    HypothesisNotMet,
    NoApplicableTheorem,
    PreconditionViolated,
    StrategyNotApplicable,
    UnitDistanceError,
)
from .euclid import edge_threshold, embed_edge_bounded, embed_max_degree
from .graph import Graph, clique_number, degeneracy, find_forbidden, k33_components, max_degree
from .helpers import derive_seed, iso_timestamp, log_trace, make_rng
from .logger import setup_logger
from .ramsey import Color, Coloring, coloring_from_index, ramsey_bounds, ramsey_euclidean, ramsey_spherical
from .sphere import embed_degenerate_sphere, embed_max_degree_sphere
from .verify import VerifyReport, lsq_realize, verify_edges, verify_sphere

Mode = Literal["euclid", "sphere"]
STRATEGIES = ("max-degree", "sphere-max-degree", "degenerate", "edge-bounded")
ORACLE = "least-squares"


@dataclass
class EmbedResult:
    """Outcome of one embedding run: the chosen strategy, coordinates and report."""
    strategy: str
    mode: Mode
    dim: int
    seed: int
    embedding: Embedding
    report: VerifyReport
    color: Color | None = None
    elapsed: float = 0.0
    attempts: dict[str, str] = field(default_factory=dict)
    timestamp: str = field(default_factory=iso_timestamp)


@dataclass
class ExhaustiveSummary:
    s: int
    variant: str
    total: int
    passed: int
    colors: dict[str, int]
    failures: list[tuple[int, str]] = field(default_factory=list)
    max_retries: int = 0


class EmbeddingPipeline:
    """Strategy selection, verification and reporting around the constructions."""

    def __init__(self, config: Config, debug: bool = False, log_file: Path | None = None):
        self.config = config
        self.debug = debug
        self.logger = setup_logger("unitdist", log_file, debug)
        self.tol = config.tolerances()

    # ------------------------------------------------------------------
    # strategies
    # ------------------------------------------------------------------

    def _strategy(self, name: str, G: Graph, d: int, mode: Mode, rng) -> Embedding:
        cfg = self.config
        if name in ("max-degree", ORACLE) and mode == "sphere":
            raise StrategyNotApplicable(f"{name} places vertices off the sphere")
        if name == "max-degree":
            return embed_max_degree(G, d, rng, self.tol, cfg.max_retries, cfg.gp_max_attempts, cfg.partition_rounds)
        if name == "sphere-max-degree":
            return embed_max_degree_sphere(G, d, rng, tol=self.tol, max_retries=cfg.max_retries)
        if name == "degenerate":
            return embed_degenerate_sphere(G, d, rng, tol=self.tol, max_retries=cfg.max_retries)
        if name == "edge-bounded":
            return embed_edge_bounded(G, d, mode, rng, self.tol, cfg.max_retries, cfg.search_node_cap)
        # ORACLE; names are checked in embed
        E = lsq_realize(G, d, rng, cfg.oracle_restarts, cfg.oracle_iters)
        if E is None:
            raise DidNotDecide(f"least-squares search found no realization in {cfg.oracle_restarts} restarts")
        return E

    def verify(self, G: Graph, E: Embedding, mode: Mode = "euclid") -> VerifyReport:
        report = verify_edges(G, E, self.tol)
        if mode == "sphere":
            report = report.merge(verify_sphere(E, SPHERE_RADIUS, self.tol))
        return report

    def embed(self, G: Graph, d: int, mode: Mode = "euclid", strategy: str = "auto",
              seed: int | None = None) -> EmbedResult:
        """Run *strategy* (or every applicable one in order for ``auto``) and verify the result."""
        seed = self.config.seed if seed is None else seed
        if strategy != "auto" and strategy not in (*STRATEGIES, ORACLE):
            raise PreconditionViolated(f"unknown strategy {strategy!r}")
        names = STRATEGIES if strategy == "auto" else (strategy,)
        attempts: dict[str, str] = {}
        start = time.time()
        for name in names:
            rng = make_rng(seed)
            self.logger.info(f"Trying {name} in dimension {d} ({mode})")
            try:
                E = self._strategy(name, G, d, mode, rng)
            except (HypothesisNotMet, PreconditionViolated) as exc:
                attempts[name] = f"{type(exc).__name__}: {exc}"
                self.logger.info(f"{name} does not apply: {exc}")
                if isinstance(exc, PreconditionViolated) and strategy != "auto":
                    raise StrategyNotApplicable(f"{name} does not apply: {exc}") from exc
                if strategy != "auto":
                    raise
                continue
            except UnitDistanceError as exc:
                self.logger.error(f"{name} failed: {exc}")
                log_trace(exc)
                raise
            E.meta["strategy"] = name
            report = self.verify(G, E, mode)
            report.retries = E.meta.get("retries", 0)
            elapsed = time.time() - start
            self.logger.info(
                f"{name} succeeded: max edge deviation {report.max_edge_deviation:.3e}, "
                f"{report.retries} retries, {elapsed:.2f}s")
            return EmbedResult(name, mode, d, seed, E, report, elapsed=elapsed, attempts=attempts)
        raise NoApplicableTheorem(f"no construction applies in dimension {d} ({mode})", attempts)

    # ------------------------------------------------------------------
    # colourings
    # ------------------------------------------------------------------

    def _ramsey_fn(self, variant: str) -> Callable:
        if variant == "spherical":
            return ramsey_spherical
        if variant == "euclidean":
            return ramsey_euclidean
        raise PreconditionViolated(f"unknown ramsey variant {variant!r}")

    def ramsey(self, col: Coloring, variant: str = "spherical", seed: int | None = None) -> EmbedResult:
        seed = self.config.seed if seed is None else seed
        start = time.time()
        color, E = self._ramsey_fn(variant)(col, make_rng(seed), self.tol, self.config.max_retries)
        mode: Mode = "sphere" if variant == "spherical" else "euclid"
        report = self.verify(col.graph(color), E, mode)
        report.retries = E.meta.get("retries", 0)
        self.logger.info(f"K_{col.s} ({variant}): embedded colour {color} in dimension {E.dim}")
        return EmbedResult(f"ramsey-{variant}", mode, E.dim, seed, E, report, color, time.time() - start)

    def exhaustive(self, s: int, variant: str = "spherical", seed: int | None = None,
                   workers: int | None = None) -> ExhaustiveSummary:
        """Run every colouring of K_s; colouring i uses a seed derived from (seed, i)."""
        seed = self.config.seed if seed is None else seed
        workers = workers or self.config.workers
        fn = self._ramsey_fn(variant)
        total = 2 ** comb(s, 2)
        self.logger.info(f"Running {total} colourings of K_{s} ({variant}) on {workers} workers")
        bounds = ramsey_bounds(s) if s >= 1 else {}
        self.logger.debug(f"bounds for s={s}: {bounds}")

        def job(index: int) -> tuple[int, str | None, str | None, int]:
            col = coloring_from_index(s, index)
            try:
                color, E = fn(col, make_rng(derive_seed(seed, index)), self.tol, self.config.max_retries)
                report = self.verify(col.graph(color), E, "sphere" if variant == "spherical" else "euclid")
                if not report.passed:
                    return index, None, f"deviation {report.max_edge_deviation:.3e}", E.meta.get("retries", 0)
                return index, color, None, E.meta.get("retries", 0)
            except UnitDistanceError as exc:
                return index, None, f"{type(exc).__name__}: {exc}", 0

        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, range(total)))

        summary = ExhaustiveSummary(s, variant, total, 0, {"r": 0, "b": 0})
        for index, color, error, retries in results:
            summary.max_retries = max(summary.max_retries, retries)
            if error is None:
                summary.passed += 1
                summary.colors[color] += 1
            else:
                summary.failures.append((index, error))
                self.logger.error(f"colouring {index} failed: {error}")
        self.logger.info(f"{summary.passed}/{total} colourings verified")
        return summary

    # ------------------------------------------------------------------
    # bounds
    # ------------------------------------------------------------------

    def bounds(self, G: Graph) -> list[str]:
        """Applicable upper bounds and clique/K_3,3 lower bounds, without embedding."""
        lines: list[str] = []
        delta = max_degree(G)
        if G.m == 0:
            lines.append("edgeless => dim <= 1")
        if delta >= 1:
            if k33_components(G) and delta == 3:
                lines.append("max degree 3 with a K_3,3 component: max-degree bound does not apply in 3-space")
                lines.append("max degree 3 => dim <= 4")
            else:
                lines.append(f"max degree {delta} => dim <= {delta}")
            lines.append(f"max degree {delta} => dim_S <= {max(2, delta + 1)}")
        t = degeneracy(G)
        lines.append(f"{t}-degenerate => dim_S <= {max(2, t + 2)}")
        lines.append(self._edge_bound(G))

        omega = clique_number(G, self.config.search_node_cap)
        if omega >= 2:
            lines.append(f"contains K_{omega} => dim >= {omega - 1}, dim_S >= {omega}")
        if k33_components(G):
            lines.append("K_3,3 component => dim >= 4")
        return lines

    def _edge_bound(self, G: Graph) -> str:
        d = 2
        while edge_threshold(d) < G.m:
            d += 1
        line = f"|E|={G.m} <= g({d})={edge_threshold(d)} => dim <= {d}"
        if not find_forbidden(G, d, node_cap=self.config.search_node_cap).any:
            line += f", dim_S <= {d}"
        return line
