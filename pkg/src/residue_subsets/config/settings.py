"""Application settings via environment variables."""
from __future__ import annotations

from pathlib import Path
from typing import List, Optional

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

DEFAULT_EPS_GRID = [0.1, 0.25, 0.4]


class AppSettings(BaseSettings):
    """Toolkit settings managed via environment variables (prefix RESIDUE_SUBSETS_)."""

    model_config = SettingsConfigDict(
        env_prefix="RESIDUE_SUBSETS_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    cache_path: Optional[Path] = None
    jobs: int = 1
    witness_cap: int = 10
    eps_grid: List[float] = list(DEFAULT_EPS_GRID)
    max_k: int = 50
    table_mode_limit: int = 2**26
    stream_chunk: int = 2**20
    range_cap: int = 2**32
    log_level: str = "WARNING"

    @field_validator("eps_grid")
    @classmethod
    def _eps_inside_open_interval(cls, values: List[float]) -> List[float]:
        for eps in values:
            if not 0.0 < eps < 0.5:
                raise ValueError(f"eps {eps} must lie strictly between 0 and 1/2")
        return sorted(set(values))

    @field_validator("jobs")
    @classmethod
    def _positive_jobs(cls, value: int) -> int:
        if value < 1:
            raise ValueError("jobs must be a positive integer")
        return value

    @field_validator("witness_cap", "max_k")
    @classmethod
    def _non_negative(cls, value: int) -> int:
        if value < 0:
            raise ValueError("value must be non-negative")
        return value


def get_settings() -> AppSettings:
    """Factory that loads settings with environment overrides."""

    return AppSettings()
