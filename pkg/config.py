"""
config.py - Runtime settings for the lacuna toolkit

Defaults come from LACUNA_* environment variables (a .env file in the
working directory is loaded first). CLI flags override them per run.

    LACUNA_THREADS         worker cap for pair/triple scans
    LACUNA_MAX_VERTICES    ball memory budget (vertices)
    LACUNA_ORACLE_BUDGET   equality-oracle call budget per ball build
    LACUNA_MAX_COSETS      coset-enumeration limit
    LACUNA_EPS_BUDGET      oracle-call budget of the eps-piece search
    LACUNA_FILL_BUDGET     loop states explored by the filling search
    LACUNA_SEED            default seed for sampled scans
    LACUNA_LOG_LEVEL       DEBUG / INFO / WARNING / ERROR
"""

import logging
import os
import sys

from dotenv import load_dotenv
from pydantic import BaseModel, Field

__version__ = "0.4.0"

load_dotenv()


class Settings(BaseModel):
    """Environment-backed defaults for budgets, parallelism and logging."""

    threads: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)
    max_vertices: int = Field(default=2_000_000, ge=1)
    oracle_budget: int = Field(default=50_000_000, ge=1)
    max_cosets: int = Field(default=100_000, ge=1)
    eps_budget: int = Field(default=2_000_000, ge=1)
    fill_budget: int = Field(default=200_000, ge=1)
    seed: int = 0
    log_level: str = "WARNING"

    @classmethod
    def from_env(cls) -> "Settings":
        values = {}
        for name in cls.model_fields:
            raw = os.getenv(f"LACUNA_{name.upper()}")
            if raw is not None and raw.strip():
                values[name] = raw.strip()
        return cls(**values)


SETTINGS = Settings.from_env()


def setup_logging(level: str | int | None = None) -> None:
    """Route toolkit logging to stderr; reports own stdout."""
    level = level if level is not None else SETTINGS.log_level
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.WARNING
    logging.basicConfig(
        level=level,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
