"""Settings for polytangle, read from ``POLYTANGLE_*`` environment variables.

A ``.env`` file in the working directory is read as well; the environment
wins over the file. The CLI's ``--seed`` flag writes ``POLYTANGLE_SEED`` and
calls ``reload_settings``.
"""

from fractions import Fraction
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from polytangle.utils.logger import LEVEL_NAMES


class Settings(BaseSettings):
    """Every tunable of the toolkit.

    Example:
        POLYTANGLE_LOG_LEVEL=DEBUG POLYTANGLE_SEED=7 python -m polytangle schedule --random
    """

    model_config = SettingsConfigDict(
        env_prefix="POLYTANGLE_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Identity
    app_name: str = Field("polytangle", description="Name shown in log records")
    app_version: str = Field("1.0.0", description="Version shown in log records")
    debug: bool = Field(False, description="Keep tracebacks of CLI failures in the log")

    # Randomized inputs
    seed: int = Field(20240229, description="Seed of --random inputs and label family")

    # Log sinks
    log_level: str = Field("WARNING", description="Level when neither -v nor --log-level is given")
    log_dir: str = Field("logs", description="Directory of the rotating log file")
    log_file: str = Field("polytangle.log", description="Rotating log file name")
    log_max_bytes: int = Field(10 * 1024 * 1024, description="Rotation threshold in bytes")
    log_backup_count: int = Field(5, description="Rotated log files kept")
    enable_console_logging: bool = Field(True, description="Log to stderr")
    enable_file_logging: bool = Field(False, description="Log to the rotating file")

    # Certificates
    batch_workers: int = Field(1, description="Threads for verify appendix --all-subsets")
    max_verify_n: int = Field(8, description="Largest n accepted with --all-subsets")

    # Projection
    shear_denominator: int = Field(1024, description="A degenerate projection is sheared by k/denominator")
    max_shear_attempts: int = Field(3, description="Shears tried before NonGenericProjection")

    # SVG output
    svg_scale: int = Field(24, description="SVG user units per box unit")
    svg_stroke_width: float = Field(1.5, description="Stroke width of drawn arcs")
    svg_gap: str = Field("1/8", description="Half-length of the break in an under-strand, in box units")

    # Documents
    schema_version: int = Field(1, description="Version written into and expected from documents")

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, value: str) -> str:
        level = value.upper()
        if level not in LEVEL_NAMES:
            raise ValueError(f"log_level must be one of {', '.join(LEVEL_NAMES)}, got {value!r}")
        return level

    @field_validator("batch_workers", "max_shear_attempts", "svg_scale", "max_verify_n")
    @classmethod
    def validate_positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError(f"must be at least 1, got {value}")
        return value

    @field_validator("shear_denominator")
    @classmethod
    def validate_shear_denominator(cls, value: int) -> int:
        # k/denominator must stay below 1 for k = 1
        if value < 2:
            raise ValueError(f"shear_denominator must be at least 2, got {value}")
        return value

    @field_validator("svg_gap")
    @classmethod
    def validate_svg_gap(cls, value: str) -> str:
        try:
            gap = Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"svg_gap must be a rational such as 1/8, got {value!r}") from exc
        if gap <= 0:
            raise ValueError(f"svg_gap must be positive, got {value!r}")
        return value

    @property
    def gap_fraction(self) -> Fraction:
        return Fraction(self.svg_gap)


_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """The process-wide settings, built on first use."""
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings


def reload_settings() -> Settings:
    """Rebuild the process-wide settings after the environment changed."""
    global _settings
    _settings = Settings()
    return _settings


if __name__ == "__main__":
    current = get_settings()
    for field_name in Settings.model_fields:
        print(f"POLYTANGLE_{field_name.upper()}={getattr(current, field_name)}")
