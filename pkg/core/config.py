"""Configuration management for the verification toolkit."""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Toolkit settings loaded from environment variables (prefix HWC_)."""

    model_config = SettingsConfigDict(
        env_prefix="HWC_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    # Logging
    log_level: str = Field(default="INFO")
    log_format: str = Field(default="json")

    # Output
    output_dir: str = Field(default="reports")

    # Defaults for runs that do not set them explicitly
    random_seed: int = Field(default=20240607)
    default_level: int = Field(default=1, ge=1)
    basis_cutoff: int = Field(default=40, ge=4)
    fd_step: float = Field(default=1e-4, gt=0)
    fd_step_mixed: float = Field(default=1e-3, gt=0)

    # Norms below this are treated as exact vanishing in fits
    residual_floor: float = Field(default=1e-13, gt=0)

    # Thread pool size for grid sweeps
    max_workers: int = Field(default=4, ge=1)


# Global settings instance
settings = Settings()


def get_settings() -> Settings:
    """Get toolkit settings."""
    return settings
