"""Environment configuration, read from the process environment and an optional .env file."""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

load_dotenv()

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s"


@dataclass(frozen=True)
class Settings:
    seed_override: Optional[int]
    output_dir: Path
    log_level: str
    default_K: int
    regularity_iterations: int


def _int_env(name: str, default: Optional[int]) -> Optional[int]:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from exc


def get_settings() -> Settings:
    """Settings from the current environment; call again after changing it."""
    return Settings(
        seed_override=_int_env("LSQSUBDIV_SEED", None),
        output_dir=Path(os.getenv("LSQSUBDIV_OUTPUT_DIR", "results")),
        log_level=os.getenv("LSQSUBDIV_LOG_LEVEL", "INFO").upper(),
        default_K=_int_env("LSQSUBDIV_DEFAULT_K", 10),
        regularity_iterations=_int_env("LSQSUBDIV_REGULARITY_ITERATIONS", 16),
    )


def configure_logging(level: Optional[str] = None) -> None:
    logging.basicConfig(level=level or get_settings().log_level, format=LOG_FORMAT)
