"""
Process-level settings for the weylwalk lab.
"""

from pathlib import Path

from pydantic import AliasChoices, Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Environment knobs; experiment parameters live in ExperimentConfig."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="WEYLWALK_",
        case_sensitive=False,
        extra="ignore",
    )

    # Worker processes when neither config nor flag sets them; WEYLWALK_THREADS is still read
    workers: int | None = Field(default=None, validation_alias=AliasChoices("WEYLWALK_WORKERS", "WEYLWALK_THREADS"))
    out_dir: Path | None = None
    log_level: str = "INFO"
    recipes_dir: Path | None = None  # Defaults to the repository's recipes/
