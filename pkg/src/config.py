"""
Configuration management using Pydantic Settings.
Loads simulator defaults from environment variables with validation.
"""

import math
from functools import lru_cache

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="SPINSIM_",
        case_sensitive=False,
    )

    # Application
    app_name: str = Field(default="neutron-spin-sim", description="Program name in provenance headers")
    app_version: str = Field(default="1.0.0")
    debug: bool = Field(default=False, description="Per-event invariant assertions and DEBUG logs")

    # Logging
    log_level: str = Field(default="INFO")
    log_json: bool = Field(default=True, description="Render log events as JSON lines")

    # Experiment defaults
    default_events: int = Field(default=10000, ge=1, description="Messengers per setting")
    default_gamma: float = Field(default=0.999, ge=0.0, lt=1.0, description="DLM learning parameter")
    dlm_warmup_events: int = Field(default=1000, ge=0, description="Messengers each DLM processes before counting")
    dlm_initial_u: float = Field(default=0.0, ge=-1.0, le=1.0)
    default_phi_step: float = Field(default=math.pi / 24, gt=0.0)
    default_az_step: float = Field(default=0.05, gt=0.0, le=2.0)

    # Execution
    workers: int = Field(default=1, ge=1, description="Process pool width for independent runs")
    output_dir: str = Field(default="results")
    audit_max_entries: int = Field(default=100_000, ge=1, description="Audit entries kept; oldest dropped first")

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Accept stdlib level names only."""
        level = v.strip().upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"Unknown log level: {v}")
        return level

    @property
    def effective_log_level(self) -> str:
        """DEBUG whenever debug mode is on."""
        return "DEBUG" if self.debug else self.log_level


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
