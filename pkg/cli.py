from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
import argparse
import sys

from unitdist import __version__
from unitdist.runner import ORACLE, STRATEGIES
from dotenv import load_dotenv


class CLI:
    """Command-line interface for unit-distance embeddings."""
    @staticmethod
    def build_parser() -> argparse.ArgumentParser:
        """Return the argument parser for the CLI."""
        parser = argparse.ArgumentParser(description="Unit-distance graph embeddings")
        parser.add_argument(
            "--version",
            action="version",
            version=f"unitdist {__version__}",
            help="Show program version and exit",
        )
        parser.add_argument("command", choices=["embed", "verify", "ramsey", "bound"])
        parser.add_argument("input", nargs="?", help="Graph file (embed/verify/bound) or colouring file (ramsey)")
        parser.add_argument("--dim", type=int, help="Target dimension")
        parser.add_argument("--mode", choices=["euclid", "sphere"], help="Euclidean space or the sphere of radius 1/sqrt(2)")
        parser.add_argument(
            "--strategy",
            choices=["auto", *STRATEGIES, ORACLE],
            default="auto",
            help="Construction to use; auto tries each in turn",
        )
        parser.add_argument("--seed", type=lambda s: int(s, 0), help="Random seed (decimal or 0x...)")
        parser.add_argument("--eps-edge", type=float, help="Edge length tolerance")
        parser.add_argument("--eps-gp", type=float, help="General-position tolerance")
        parser.add_argument("--max-retries", type=int, help="Redraws allowed per construction")
        parser.add_argument("--exhaustive", type=int, metavar="S", help="Run every colouring of K_S")
        parser.add_argument("--workers", type=int, help="Worker threads for --exhaustive")
        parser.add_argument("--coords", help="Coordinate file to verify")
        parser.add_argument("--output", help="Write the result document here instead of stdout")
        parser.add_argument("--debug", action="store_true")
        parser.add_argument("--verbose", action="store_true", help="Verbose logging")
        parser.add_argument("--log-to-file", action="store_true")
        return parser

    @staticmethod
    def parse(args=None) -> argparse.Namespace:
        """Parse command line *args* or ``sys.argv`` when ``None``."""
        parser = CLI.build_parser()
        return parser.parse_args(args)


@dataclass
class RunConfig:
    command: str
    input_path: Path | None
    output_path: Path | None
    d: int | None
    mode: str | None
    seed: int
    strategy: str = "auto"
    exhaustive: int | None = None
    workers: int = 1
    coords_path: Path | None = None


def _load_config():
    from unitdist.config import Config
    cfg_path = Path("config/config.json")
    config = Config.load(cfg_path)
    return config


def _apply_flags(args: argparse.Namespace, config) -> None:
    """Layer command-line flags over the loaded configuration."""
    if args.seed is not None:
        config.seed = args.seed
    if args.eps_edge is not None:
        config.eps_edge = args.eps_edge
    if args.eps_gp is not None:
        config.eps_gp = args.eps_gp
    if args.max_retries is not None:
        config.max_retries = args.max_retries
    if args.workers is not None:
        config.workers = args.workers


def _run_config(args: argparse.Namespace, config) -> RunConfig:
    return RunConfig(
        command=args.command,
        input_path=Path(args.input) if args.input else None,
        output_path=Path(args.output) if args.output else None,
        d=args.dim,
        mode=args.mode,
        seed=config.seed,
        strategy=args.strategy,
        exhaustive=args.exhaustive,
        workers=config.workers,
        coords_path=Path(args.coords) if args.coords else None,
    )


def _require(path: Path | None, what: str) -> Path:
    from unitdist.errors import PreconditionViolated

    if path is None:
        raise PreconditionViolated(f"{what} is required")
    return path


def _emit(cfg: RunConfig, document: str) -> None:
    if cfg.output_path:
        cfg.output_path.parent.mkdir(parents=True, exist_ok=True)
        cfg.output_path.write_text(document)
    else:
        sys.stdout.write(document)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_embed(cfg: RunConfig, pipeline) -> int:
    from unitdist.errors import PreconditionViolated
    from unitdist.formats import format_embedding, read_graph
    from unitdist.helpers import color_print

    G = read_graph(_require(cfg.input_path, "a graph file"))
    if cfg.d is None:
        raise PreconditionViolated("--dim is required for embed")
    mode = cfg.mode or "euclid"
    result = pipeline.embed(G, cfg.d, mode, cfg.strategy, cfg.seed)
    _emit(cfg, format_embedding(result.embedding, result.seed, result.report, mode))
    if not result.report.passed:
        color_print("ERROR", f"Verification failed on edge {result.report.worst_edge}")
        return 1
    color_print("SUCCESS", f"{result.strategy}: {G.m} unit edges in dimension {cfg.d} ({mode})")
    return 0


def cmd_verify(cfg: RunConfig, pipeline) -> int:
    from unitdist.formats import format_report, read_embedding, read_graph
    from unitdist.helpers import color_print

    G = read_graph(_require(cfg.input_path, "a graph file"))
    E, header = read_embedding(_require(cfg.coords_path, "--coords"))
    mode = cfg.mode or header.get("mode", "euclid")
    report = pipeline.verify(G, E, mode)
    sys.stdout.write("\n".join(format_report(report)) + "\n")
    if not report.passed:
        color_print("ERROR", f"Worst edge {report.worst_edge} off by {report.max_edge_deviation:.3e}")
        return 1
    color_print("SUCCESS", f"{G.m} edges verified ({mode})")
    return 0


def cmd_ramsey(cfg: RunConfig, pipeline) -> int:
    from unitdist.formats import format_embedding, read_coloring
    from unitdist.helpers import color_print
    from unitdist.ramsey import ramsey_bounds

    variant = "euclidean" if cfg.mode == "euclid" else "spherical"
    if cfg.exhaustive is not None:
        summary = pipeline.exhaustive(cfg.exhaustive, variant, cfg.seed, cfg.workers)
        rows = [
            f"s {summary.s}",
            f"variant {summary.variant}",
            f"colorings {summary.total}",
            f"passed {summary.passed}",
            f"red {summary.colors['r']}",
            f"blue {summary.colors['b']}",
            f"max_retries {summary.max_retries}",
        ]
        rows += [f"failed {index} {error}" for index, error in summary.failures]
        _emit(cfg, "\n".join(rows) + "\n")
        tag = "SUCCESS" if summary.passed == summary.total else "ERROR"
        color_print(tag, f"{summary.passed}/{summary.total} colourings verified")
        return 0 if summary.passed == summary.total else 1

    col = read_coloring(_require(cfg.input_path, "a colouring file"))
    if col.s >= 1:
        bounds = ramsey_bounds(col.s)
        color_print("INFO", f"s={col.s}: spherical {bounds['spherical']}, "
                            f"euclidean in [{bounds['euclidean_lower']}, {bounds['euclidean_upper']}]")
    result = pipeline.ramsey(col, variant, cfg.seed)
    _emit(cfg, format_embedding(result.embedding, result.seed, result.report, result.mode))
    if not result.report.passed:
        color_print("ERROR", f"Verification failed on edge {result.report.worst_edge}")
        return 1
    name = "red" if result.color == "r" else "blue"
    color_print("SUCCESS", f"{name} graph embedded in dimension {result.dim}")
    return 0


def cmd_bound(cfg: RunConfig, pipeline) -> int:
    from unitdist.formats import read_graph

    G = read_graph(_require(cfg.input_path, "a graph file"))
    _emit(cfg, "\n".join(pipeline.bounds(G)) + "\n")
    return 0


COMMANDS = {
    "embed": cmd_embed,
    "verify": cmd_verify,
    "ramsey": cmd_ramsey,
    "bound": cmd_bound,
}


def main(argv=None) -> int:
    """Entry point for the unitdist CLI; returns the process exit code."""
    from unitdist.errors import HypothesisNotMet, NoApplicableTheorem, UnitDistanceError
    from unitdist.helpers import color_print, log_trace
    from unitdist.logger import setup_logger
    from unitdist.runner import EmbeddingPipeline

    load_dotenv()
    args = CLI.parse(argv)
    if args.verbose:
        args.debug = True

    config = _load_config()
    log_file = Path(config.log_file) if args.log_to_file else None
    logger = setup_logger("unitdist", log_file, args.debug)
    _apply_flags(args, config)
    config.validate(logger)
    cfg = _run_config(args, config)
    color_print("INFO", f"{cfg.command}: seed {cfg.seed:#x}")

    pipeline = EmbeddingPipeline(config, debug=args.debug, log_file=log_file)
    try:
        return COMMANDS[cfg.command](cfg, pipeline)
    except HypothesisNotMet as exc:
        color_print("ERROR", f"{type(exc).__name__}: {exc}")
        if isinstance(exc, NoApplicableTheorem):
            for name, reason in exc.reasons.items():
                color_print("INFO", f"{name}: {reason}")
        return 2
    except (UnitDistanceError, OSError) as exc:
        color_print("ERROR", f"{cfg.command} failed: {exc}")
        log_trace(exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
