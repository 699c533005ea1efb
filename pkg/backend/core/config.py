"""
Core Settings for VoiceGuard
Process-level settings loaded from VOICEGUARD_* environment variables or .env
"""

from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables"""

    model_config = SettingsConfigDict(
        env_prefix="VOICEGUARD_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    seed: Optional[int] = Field(default=None, description="Seed fallback when neither flag nor config file sets one")
    config: str = Field(default="config.yaml", description="Path of the YAML configuration file")
    log_level: Optional[str] = Field(default=None, description="Overrides logging.level of the config file")


def get_settings() -> Settings:
    """Fresh settings snapshot (re-reads the environment)"""
    return Settings()

