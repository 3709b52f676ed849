from __future__ import annotations

from datetime import datetime
from pathlib import Path
from typing import Callable, TextIO, TypeVar
import logging
import sys
import traceback

import numpy as np

from .errors import ResampleExceeded

T = TypeVar("T")


def iso_timestamp() -> str:
    return datetime.now().isoformat(timespec="seconds")


def make_rng(seed: int | None) -> np.random.Generator:
    """Return a numpy generator for *seed* (fresh entropy when ``None``)."""
    return np.random.default_rng(seed)


def derive_seed(seed: int, index: int) -> int:
    """Seed for the *index*-th independent job of a run seeded with *seed*."""
    ss = np.random.SeedSequence([seed, index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def retry_resample(build: Callable[[int], T], attempts: int, logger: logging.Logger, what: str) -> tuple[T, int]:
    """Call ``build(attempt)`` until it stops raising ``ResampleExceeded``.

    Returns the result and the number of failed attempts before it.
    """
    last: Exception | None = None
    for attempt in range(attempts):
        try:
            return build(attempt), attempt
        except ResampleExceeded as exc:
            logger.debug(f"{what}: attempt {attempt + 1} resampling ({exc})")
            last = exc
    raise ResampleExceeded(f"{what}: no valid draw in {attempts} attempts ({last})")


# ---------------------------------------------------------------------------
# Utility functions for CLI feedback
# ---------------------------------------------------------------------------

RESET = "\033[0m"
COLORS = {
    "INFO": "\033[36m",
    "ERROR": "\033[31m",
    "SUCCESS": "\033[32m",
}


def color_print(tag: str, message: str, file: TextIO | None = None) -> None:
    """CLI status line on stderr, e.g. ``[INFO] embedded 8 vertices``."""
    stream = file or sys.stderr
    color = COLORS.get(tag.upper(), "") if stream.isatty() else ""
    reset = RESET if color else ""
    print(f"{color}[{tag.upper()}]{reset} {message}", file=stream)


LOG_DIR = Path("logs")
ERROR_TRACE_FILE = LOG_DIR / "error_trace.txt"


def log_trace(exc: BaseException) -> None:
    """Keep the traceback of a failed construction in logs/error_trace.txt."""
    LOG_DIR.mkdir(exist_ok=True)
    trace = "".join(traceback.format_exception(type(exc), exc, exc.__traceback__))
    with open(ERROR_TRACE_FILE, "a") as f:
        f.write(f"{iso_timestamp()} - {type(exc).__name__}: {exc}\n")
        f.write(trace + "\n")
