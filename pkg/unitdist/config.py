from __future__ import annotations

from dataclasses import dataclass, asdict, fields
from pathlib import Path
import json
import logging
import os

from .verify import Tolerances

DEFAULT_SEED = 0x5EED_0001


@dataclass
class Config:
    """Run configuration loaded from ``config.json``."""
    seed: int = DEFAULT_SEED
    eps_edge: float = 1e-9
    eps_sphere: float = 1e-9
    eps_gp: float = 1e-6
    eps_distinct: float = 1e-6
    max_retries: int = 100
    gp_max_attempts: int = 1000
    partition_rounds: int = 100
    search_node_cap: int = 10_000_000
    oracle_restarts: int = 20
    oracle_iters: int = 2000
    workers: int = 1
    log_file: str = "./logs/unitdist.log"

    @classmethod
    def load(cls, path: Path) -> "Config":
        data: dict = {}
        if path.exists():
            data = json.loads(path.read_text())
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            logging.getLogger(__name__).warning(f"Ignoring unknown config keys: {', '.join(unknown)}")
        config = cls(**{k: v for k, v in data.items() if k in known})
        config.apply_env()
        return config

    def apply_env(self) -> None:
        """Override fields from ``UNITDIST_*`` environment variables."""
        if os.getenv("UNITDIST_SEED"):
            self.seed = int(os.environ["UNITDIST_SEED"], 0)
        if os.getenv("UNITDIST_MAX_RETRIES"):
            self.max_retries = int(os.environ["UNITDIST_MAX_RETRIES"])
        if os.getenv("UNITDIST_LOG_FILE"):
            self.log_file = os.environ["UNITDIST_LOG_FILE"]

    def save(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            json.dump(asdict(self), f, indent=2)

    def validate(self, logger: logging.Logger | None = None) -> None:
        logger = logger or logging.getLogger(__name__)
        defaults = Config()
        for name in ("eps_edge", "eps_sphere", "eps_gp", "eps_distinct"):
            if getattr(self, name) <= 0:
                logger.warning(f"{name} must be > 0; using {getattr(defaults, name)}")
                setattr(self, name, getattr(defaults, name))
        for name in ("max_retries", "gp_max_attempts", "partition_rounds", "search_node_cap",
                     "oracle_restarts", "oracle_iters", "workers"):
            if getattr(self, name) < 1:
                logger.warning(f"{name} must be >= 1; using {getattr(defaults, name)}")
                setattr(self, name, getattr(defaults, name))
        if not 0 <= self.seed < 2**64:
            logger.warning(f"seed {self.seed} outside 64-bit range; using default")
            self.seed = DEFAULT_SEED
        if self.eps_gp <= self.eps_edge:
            logger.warning("eps_gp should be well above eps_edge; general-position checks may accept near-degenerate draws")

    def tolerances(self) -> Tolerances:
        return Tolerances(
            eps_edge=self.eps_edge,
            eps_sphere=self.eps_sphere,
            eps_gp=self.eps_gp,
            eps_distinct=self.eps_distinct,
        )
