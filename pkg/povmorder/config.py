"""
Configuration settings for povmorder.
Holds numerical tolerances, search budgets and application metadata.
"""
from contextlib import contextmanager
from contextvars import ContextVar
from pathlib import Path
from typing import Any, Iterator, Optional

from pydantic import BaseModel, ConfigDict, Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Tolerances(BaseModel):
    """Numerical tolerances shared by every service."""

    model_config = ConfigDict(frozen=True)

    herm: float = Field(1e-10, ge=0)           # entrywise A - A^dagger
    trace: float = Field(1e-10, ge=0)          # trace and sum-to-identity checks
    psd: float = Field(1e-9, ge=0)             # negative eigenvalue slack
    span: float = Field(1e-9, ge=0)            # relative to Hilbert-Schmidt norm
    prop: float = Field(1e-8, ge=0)            # 1 - cos(angle) between normalized elements
    vol: float = Field(1e-8, ge=0)             # atom volume matching
    stoch: float = Field(1e-8, ge=0)           # LP feasibility
    margin: float = Field(1e-7, ge=0)          # witness acceptance
    zero: float = Field(1e-14, ge=0)           # probabilities treated as exact zeros
    moment_separation: float = Field(1e-6, ge=0)  # relative to the direction's norm

    def with_overrides(self, **overrides: Any) -> "Tolerances":
        """Return a copy with the non-None overrides applied."""
        update = {key: value for key, value in overrides.items() if value is not None}
        return self.model_copy(update=update)


class Settings(BaseSettings):
    """Application settings with environment variable support."""

    model_config = SettingsConfigDict(
        env_prefix="POVMORDER_",
        env_file=Path(__file__).parent.parent / ".env",
        extra="ignore",
    )

    # App settings
    APP_NAME: str = "POVM Ordering Toolkit"
    APP_VERSION: str = "1.0.0"
    DEBUG: bool = False
    LOG_LEVEL: str = "INFO"

    # Server settings
    HOST: str = "127.0.0.1"
    PORT: int = 8000

    # Storage settings
    BASE_DIR: Path = Path(__file__).parent
    FIXTURES_DIR: Path = BASE_DIR / "fixtures" / "v1"

    # Tolerances
    TOL_HERM: float = 1e-10
    TOL_TRACE: float = 1e-10
    TOL_PSD: float = 1e-9
    TOL_SPAN: float = 1e-9
    TOL_PROP: float = 1e-8
    TOL_VOL: float = 1e-8
    TOL_STOCH: float = 1e-8
    TOL_MARGIN: float = 1e-7
    TOL_ZERO: float = 1e-14
    TOL_MOMENT_SEPARATION: float = 1e-6

    # Entropy units: "2" (bits) or "e" (nats)
    LOG_BASE: str = "2"

    # Falsification search
    SEED: int = 0
    SEARCH_SAMPLES: int = 20_000
    SEARCH_REFINE_STEPS: int = 200
    SEARCH_CHUNK_SIZE: int = 1_000
    SEARCH_WORKERS: int = 1

    # Equivalence moment test
    MOMENT_TRIALS: int = 3
    MOMENT_ORDER_SLACK: int = 2

    # Fixture value regression tolerance
    REPRODUCE_TOLERANCE: float = 1e-9

    def tolerances(self) -> Tolerances:
        """Tolerances built from the settings values."""
        return Tolerances(
            herm=self.TOL_HERM,
            trace=self.TOL_TRACE,
            psd=self.TOL_PSD,
            span=self.TOL_SPAN,
            prop=self.TOL_PROP,
            vol=self.TOL_VOL,
            stoch=self.TOL_STOCH,
            margin=self.TOL_MARGIN,
            zero=self.TOL_ZERO,
            moment_separation=self.TOL_MOMENT_SEPARATION,
        )


settings = Settings()

# Tolerances used by value objects (operators, states, POVMs) at construction.
_active_tolerances: ContextVar[Optional[Tolerances]] = ContextVar("povmorder_tolerances", default=None)


def active_tolerances() -> Tolerances:
    """Tolerances in force for model checks: the innermost `use_tolerances`, else settings."""
    return _active_tolerances.get() or settings.tolerances()


@contextmanager
def use_tolerances(tolerances: Tolerances) -> Iterator[Tolerances]:
    """Apply `tolerances` to every model built inside the block."""
    token = _active_tolerances.set(tolerances)
    try:
        yield tolerances
    finally:
        _active_tolerances.reset(token)
