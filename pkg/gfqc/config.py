"""Codec configuration management.

This module loads and validates environment-driven defaults using
pydantic-settings. Every field can be overridden with a ``GFQC_<NAME>``
environment variable or a ``.env`` file in the working directory.
"""

from functools import lru_cache

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

LOG_LEVELS = ("CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG")


class Settings(BaseSettings):
    """Codec defaults loaded from environment variables.

    Attributes:
        log: Diagnostics verbosity (``GFQC_LOG``), a standard logging level name.
        strength: Default prior strength L used by the encoder.
        gamma0: Reinforcement schedule constant gamma0.
        gamma1: Reinforcement schedule constant gamma1.
        ell_max: Sweep cap per encoder trial.
        t_max: Restart cap for the encoder.
        epsilon: Message-stability precision.
        damping: Check-message damping for plain BP fixed-point runs.
        jobs: Default worker count for experiment sweeps.

    Example:
        >>> settings = get_settings()
        >>> settings.ell_max
        300
    """

    log: str = Field(default="WARNING", description="Logging level name")
    strength: float = Field(default=1.5, ge=0.0, description="Prior strength L")
    gamma0: float = Field(default=0.92, ge=0.0, le=1.0)
    gamma1: float = Field(default=1.0, ge=0.0, le=1.0)
    ell_max: int = Field(default=300, ge=1, description="Sweeps per trial")
    t_max: int = Field(default=5, ge=1, description="Encoder trials")
    epsilon: float = Field(default=1e-6, gt=0.0)
    damping: float = Field(default=0.5, ge=0.0, lt=1.0)
    jobs: int = Field(default=1, ge=1, le=256)

    model_config = SettingsConfigDict(
        env_prefix="GFQC_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    @field_validator("log")
    @classmethod
    def validate_log(cls, v: str) -> str:
        """Normalize and validate the logging level name.

        Raises:
            ValueError: If the level is not a standard logging level.
        """
        level = v.strip().upper()
        if level not in LOG_LEVELS:
            raise ValueError(f"GFQC_LOG must be one of {', '.join(LOG_LEVELS)}, got {v!r}")
        return level


@lru_cache()
def get_settings() -> Settings:
    """Get the cached settings instance.

    Settings are loaded once per process.
    """
    return Settings()
