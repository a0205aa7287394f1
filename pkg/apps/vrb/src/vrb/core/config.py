"""Viewpoint retrieval bench configuration."""

from functools import lru_cache
from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process settings with environment variable support.

    Bench sweeps are configured separately (see ``vrb.models.bench.BenchConfig``);
    these are the knobs that belong to the environment: logging and the LLM
    endpoint used by the RAG flow.
    """

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
        populate_by_name=True,
    )

    environment: Literal["development", "production", "test"] = Field(
        default="development", alias="VRB_ENV"
    )
    log_level: str = Field(default="INFO", alias="LOG_LEVEL")

    # LLM endpoint (chat-completions style)
    llm_base_url: str = Field(default="http://localhost:8000/v1", alias="VRB_LLM_BASE_URL")
    llm_model: str = Field(default="mistral-7b-instruct-v0.3", alias="VRB_LLM_MODEL")
    llm_token: str | None = Field(default=None, alias="VRB_LLM_TOKEN")
    llm_timeout: float = Field(default=60.0, alias="VRB_LLM_TIMEOUT", gt=0)
    llm_max_retries: int = Field(default=3, alias="VRB_LLM_MAX_RETRIES", ge=1)

    # Knowledge extraction job
    extraction_concurrency: int = Field(default=4, alias="VRB_EXTRACTION_CONCURRENCY", ge=1)

    default_seed: int = Field(default=0, alias="VRB_SEED")

    @property
    def is_development(self) -> bool:
        """Check if running in development mode."""
        return self.environment == "development"


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
