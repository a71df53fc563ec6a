"""
Runtime settings read from the environment (prefix DUALTRACK_) or a .env file.
"""
import logging
from functools import lru_cache
from pathlib import Path
from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="DUALTRACK_", env_file=".env", extra="ignore")

    database_url: str = "sqlite:///./dualtrack.db"
    output_dir: Path = Path("./results")
    log_level: str = "INFO"


@lru_cache
def get_settings() -> Settings:
    return Settings()


def configure_logging(level: Optional[str] = None) -> None:
    logging.basicConfig(
        level=(level or get_settings().log_level).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
