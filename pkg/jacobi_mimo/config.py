"""
Configuration settings for the library and CLI.

This module provides configuration management using Pydantic's BaseSettings
for environment variables and numeric defaults shared by every module.
"""

from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Application settings.

    Loads configuration from environment variables (prefix ``JACOBI_MIMO_``)
    or a ``.env`` file, with fallback to default values.
    """
    # CORE SETTINGS
    ENV: str = Field(default="development", description="Environment (development, testing, production)")
    DEBUG: bool = Field(default=False, description="Debug mode")
    LOG_LEVEL: str = Field(default="INFO", description="Root log level for the CLI")

    # SERIES SETTINGS
    SERIES_REL_TOL: float = Field(default=1e-13, description="Relative tolerance of hypergeometric series")
    SERIES_MAX_TERMS: int = Field(default=10_000, description="Default term budget of a hypergeometric series")
    KERNEL_SERIES_REL_TOL: float = Field(
        default=1e-15,
        description="Relative tolerance of the MGF kernel series (smooth in kappa for differentiation)",
    )
    KERNEL_SERIES_MAX_TERMS: int = Field(
        default=250_000,
        description="Term budget used by the MGF kernels (large q needs long series)",
    )

    # KERNEL SETTINGS
    KERNEL_CROSS_CHECK: bool = Field(default=True, description="Check every kernel against quadrature")
    KERNEL_AGREEMENT_TOL: float = Field(default=1e-10, description="Kernel route disagreement that is logged")
    KERNEL_RAISE_TOL: float = Field(default=1e-8, description="Kernel route disagreement that raises")

    # DETERMINANT SETTINGS
    DUPLICATE_REL_GAP: float = Field(default=1e-8, description="Relative gap below which q values are duplicates")
    SPREAD_REL_STEP: float = Field(default=1e-6, description="Relative step used to spread duplicate q values")
    HIGH_PRECISION_THRESHOLD: float = Field(
        default=1e-4,
        description="Conditioning below which determinants are assembled in extended precision",
    )
    CONDITIONING_THRESHOLD: float = Field(default=1e-10, description="Conditioning below which a warning is logged")
    NORMALISATION_TOL: float = Field(
        default=1e-11,
        description="Double-precision |M(0) - 1| above which determinants are assembled in extended precision",
    )

    # MOMENT SETTINGS
    MOMENT_STEP: float = Field(default=1e-2, description="Finite-difference step along kappa")
    MOMENT_RESIDUE_TOL: float = Field(default=1e-7, description="Allowed imaginary residue of a moment")

    # GRID SETTINGS
    CUTOFF_THRESHOLD: float = Field(default=1e-3, description="|M(L)| target of the automatic cut-off search")
    INVERSION_CUTOFF_THRESHOLD: float = Field(
        default=1e-5,
        description="|M(L)| target of the cut-off search used before Fourier inversion",
    )
    CUTOFF_START: float = Field(default=1.0, description="First cut-off tried by the doubling search")
    CUTOFF_MAX: float = Field(default=500.0, description="Largest admissible cut-off")
    CUTOFF_RESOLUTION: float = Field(default=0.01, description="Bisection resolution of the cut-off search")
    CUTOFF_TAIL_STEP: float = Field(default=0.25, description="Spacing of the tail samples checked beyond a cut-off")
    DEFAULT_DKAPPA: float = Field(default=0.05, description="Default kappa step")

    # INVERSION SETTINGS
    INVERSION_POINTS: int = Field(default=600, description="Points of the default rate grid")
    INVERSION_SIGMAS: float = Field(default=6.0, description="Half-width of the default rate grid in sigmas")
    RINGING_TOL: float = Field(default=1e-4, description="Most negative raw PDF value accepted")
    INVERSION_RESIDUE_TOL: float = Field(default=1e-6, description="Allowed imaginary residue of an inverted value")
    MONOTONE_TOL: float = Field(default=1e-3, description="Allowed decrease of an inverted CDF")

    # MONTE CARLO SETTINGS
    MC_SAMPLES: int = Field(default=200_000, description="Default Monte Carlo sample count")
    MC_SEED: int = Field(default=20210531, description="Default master seed")
    MC_CHUNK_SIZE: int = Field(default=10_000, description="Samples per independently seeded chunk")
    WORKERS: int = Field(default=1, description="Worker threads for grids and ensembles")

    # ANALYSIS SETTINGS
    KL_MASK_THRESHOLD: float = Field(default=1e-2, description="Reference density below which KL terms are masked")
    KL_DELTA_I: float = Field(default=0.02, description="Histogram bin width in nats")
    SKEWNESS_ADVISORY_THRESHOLD: float = Field(
        default=0.25,
        description="|skewness| below which the Gaussian approximation is advised",
    )

    @field_validator("LOG_LEVEL")
    @classmethod
    def normalize_log_level(cls, v: str) -> str:
        """Upper-case the log level name."""
        return v.upper()

    @field_validator("WORKERS", "MC_CHUNK_SIZE", "MC_SAMPLES", "INVERSION_POINTS")
    @classmethod
    def check_positive(cls, v: int) -> int:
        """Reject non-positive counts."""
        if v < 1:
            raise ValueError("must be at least 1")
        return v

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="JACOBI_MIMO_",
        case_sensitive=True,
        extra="ignore",
    )


def workers_or_default(workers: Optional[int]) -> int:
    """Resolve an optional worker count against the settings."""
    return settings.WORKERS if workers is None else max(1, int(workers))


# Create a global settings instance
settings = Settings()
