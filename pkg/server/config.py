"""Runtime settings for the steam command line."""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


def _load_env_file() -> None:
    """Load .env from the repository root if present; set variables win."""
    env_path = Path(__file__).parent.parent / ".env"
    if env_path.is_file():
        load_dotenv(env_path, override=False)


_load_env_file()


DEFAULT_APP_NAME = "steam - style and semantic memory banks for domain generalization"
DEFAULT_APP_VERSION = "0.1.0"


class Settings(BaseSettings):
    """Process-level settings, read from ``STEAM_*`` environment variables.

    Experiment hyperparameters live in ``TrainConfig`` files, not here.
    """

    model_config = SettingsConfigDict(env_prefix="STEAM_", extra="ignore")

    app_name: str = Field(default=DEFAULT_APP_NAME)
    app_version: str = Field(default=DEFAULT_APP_VERSION)

    env: str = Field(default="dev")
    log_level: str = Field(default="INFO")

    # thread fan-out for multi-run studies
    workers: int = Field(default=1, ge=1)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
