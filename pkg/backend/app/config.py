"""
Configuration module for the coded caching simulator.
Uses environment variables (prefix CACHESIM_) and an optional .env file.
"""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Simulator settings using Pydantic v2 BaseSettings."""

    # Application Configuration
    app_name: str = Field(default="Multi-Server Cache Simulator", description="Application name")
    version: str = Field(default="0.1.0", description="Application version")

    # Field Configuration
    default_symbol_bits: int = Field(default=16, ge=1, le=32, description="Default symbol width m (q = 2^m)")

    # Retry Configuration
    precoder_max_retries: int = Field(default=64, ge=1, description="Random draws per constrained precoder")
    singular_max_attempts: int = Field(default=8, ge=1, description="Re-randomizations of a block with a singular decode matrix")
    ntm_max_resamples: int = Field(default=16, ge=1, description="Draws of a random NTM before giving up on full rank")

    # Guardrail Configuration
    max_users: int = Field(default=12, ge=1, description="Largest K accepted without --force")
    max_file_bits: int = Field(default=2**24, ge=1, description="Largest F accepted without --force")
    max_demand_vectors: int = Field(default=4096, ge=1, description="Largest N^K accepted for a demand sweep")

    # Sweep Configuration
    sweep_workers: int = Field(default=4, ge=1, description="Worker threads for memory sweeps")

    # Logging Configuration
    log_level: str = Field(default="INFO", description="Logging level")
    log_format: str = Field(
        default="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        description="Log format",
    )

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="CACHESIM_",
        case_sensitive=False,
        extra="ignore"
    )


settings = Settings()
