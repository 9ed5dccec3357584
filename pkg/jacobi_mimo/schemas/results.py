"""
Result schemas.

This module provides Pydantic schemas for the quantities computed by the
library: MGF grids, moments, fitted parameters, distribution curves, Monte
Carlo ensembles, comparison reports and run manifests.
"""

import math
from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from jacobi_mimo.config import settings
from jacobi_mimo.schemas.channel import ChannelConfig

LN2 = math.log(2.0)


class CurveKind(str, Enum):
    """Tabulated function of a distribution curve."""
    PDF = "pdf"
    CDF = "cdf"
    SF = "sf"


class CurveMethod(str, Enum):
    """How a distribution curve was obtained."""
    GAUSSIAN = "gaussian"
    WEIBULL = "weibull"
    FOURIER = "fourier"
    MONTE_CARLO = "monte-carlo"


# PUBLIC_INTERFACE
class MgfGrid(BaseModel):
    """
    Sampled MGF on a symmetric kappa grid.

    ``kappas`` runs from ``-cutoff_L`` to ``cutoff_L`` in steps of
    ``step_dk`` and contains zero at the centre index. ``cfg`` is empty for
    grids of analytic test transforms.
    """
    cfg: Optional[ChannelConfig] = None
    cutoff_L: float = Field(..., description="Cut-off length L", gt=0)
    step_dk: float = Field(..., description="Grid step in kappa", gt=0)
    kappas: np.ndarray
    values: np.ndarray

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @model_validator(mode="after")
    def check_shape(self) -> "MgfGrid":
        """Grid and values must match and be symmetric about zero."""
        if self.kappas.shape != self.values.shape or self.kappas.size % 2 != 1:
            raise ValueError("kappas and values must have the same odd length")
        if self.kappas[self.kappas.size // 2] != 0.0:
            raise ValueError("kappa grid must contain 0 at its centre")
        return self


# PUBLIC_INTERFACE
class MomentSet(BaseModel):
    """
    Raw moments of the mutual information with derived spread and skewness.

    All quantities are in nats (powers of nats for higher moments).
    """
    mu1: float = Field(..., description="Mean, the ergodic capacity")
    mu2: float = Field(..., description="Second raw moment")
    mu3: float = Field(..., description="Third raw moment")
    sigma2: float = Field(..., description="Variance mu2 - mu1^2", gt=0)
    skewness: float = Field(..., description="Standardised third central moment")

    model_config = ConfigDict(frozen=True)

    @classmethod
    def from_raw(cls, mu1: float, mu2: float, mu3: float) -> "MomentSet":
        """
        Derive variance and skewness from raw moments.

        Args:
            mu1: First raw moment
            mu2: Second raw moment
            mu3: Third raw moment

        Returns:
            MomentSet: The completed moment set
        """
        sigma2 = mu2 - mu1 * mu1
        central3 = mu3 - 3.0 * mu1 * sigma2 - mu1 ** 3
        skewness = central3 / sigma2 ** 1.5 if sigma2 > 0 else math.nan
        return cls(mu1=mu1, mu2=mu2, mu3=mu3, sigma2=sigma2, skewness=skewness)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)

    @property
    def cumulants(self) -> Tuple[float, float, float]:
        """First three cumulants (mean, variance, third central moment)."""
        return self.mu1, self.sigma2, self.skewness * self.sigma2 ** 1.5

    def in_bits(self) -> "MomentSet":
        """Same distribution measured in bits."""
        return MomentSet.from_raw(self.mu1 / LN2, self.mu2 / LN2 ** 2, self.mu3 / LN2 ** 3)


# PUBLIC_INTERFACE
class WeibullParams(BaseModel):
    """Shape and scale of a moment-matched Weibull law."""
    beta_shape: float = Field(..., description="Shape parameter", gt=0)
    lambda_scale: float = Field(..., description="Scale parameter in nats", gt=0)

    model_config = ConfigDict(frozen=True)


# PUBLIC_INTERFACE
class DistCurve(BaseModel):
    """
    Tabulated PDF, CDF or SF of the mutual information.

    Values are stored raw; ``clipped`` returns the non-negative version used
    by KL computations.
    """
    grid: np.ndarray
    values: np.ndarray
    kind: CurveKind
    method: CurveMethod
    meta: Dict[str, Any] = Field(default_factory=dict, description="Provenance (cfg, L, dkappa, ...)")

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @model_validator(mode="after")
    def check_shape(self) -> "DistCurve":
        """Grid and values must be one-dimensional and of equal length."""
        if self.grid.ndim != 1 or self.grid.shape != self.values.shape:
            raise ValueError("grid and values must be 1-d arrays of equal length")
        return self

    def clipped(self) -> "DistCurve":
        """Copy with negative values set to zero."""
        return self.model_copy(update={"values": np.clip(self.values, 0.0, None)})

    def on(self, grid: np.ndarray) -> np.ndarray:
        """Linear interpolation onto another grid, zero outside the support for PDFs."""
        if self.kind is CurveKind.PDF:
            return np.interp(grid, self.grid, self.values, left=0.0, right=0.0)
        return np.interp(grid, self.grid, self.values)

    def scaled_to_bits(self) -> "DistCurve":
        """Same curve with the rate axis in bits."""
        values = self.values * LN2 if self.kind is CurveKind.PDF else self.values
        return self.model_copy(update={"grid": self.grid / LN2, "values": values})


# PUBLIC_INTERFACE
class McEnsemble(BaseModel):
    """
    Monte Carlo mutual-information samples with provenance.

    ``(cfg, seed, count)`` fully determine ``samples``.
    """
    cfg: ChannelConfig
    seed: int = Field(..., description="Master seed", ge=0)
    count: int = Field(..., description="Number of samples", ge=1)
    samples: np.ndarray
    generator: str = Field(..., description="Bit generator name")
    numpy_version: str = Field(..., description="numpy version that produced the stream")

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @model_validator(mode="after")
    def check_samples(self) -> "McEnsemble":
        """Sample count must match and every sample must be non-negative."""
        if self.samples.shape != (self.count,):
            raise ValueError(f"expected {self.count} samples, got shape {self.samples.shape}")
        if np.any(self.samples < 0.0):
            raise ValueError("mutual-information samples must be non-negative")
        return self


# PUBLIC_INTERFACE
class EmpiricalCurve(BaseModel):
    """Histogram-based PDF, CDF or SF of a Monte Carlo ensemble."""
    bin_centers: np.ndarray
    values: np.ndarray
    kind: CurveKind
    delta_i: float = Field(..., description="Bin width in nats", gt=0)

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    def as_dist_curve(self, meta: Optional[Dict[str, Any]] = None) -> DistCurve:
        """View as a Monte Carlo DistCurve."""
        return DistCurve(
            grid=self.bin_centers,
            values=self.values,
            kind=self.kind,
            method=CurveMethod.MONTE_CARLO,
            meta=meta or {"delta_i": self.delta_i},
        )


# PUBLIC_INTERFACE
class KlReport(BaseModel):
    """Masked discrete KL divergence of a candidate PDF from a reference PDF."""
    reference: str = Field(..., description="Reference curve id")
    candidate: str = Field(..., description="Candidate curve id")
    dkl: float = Field(..., description="Divergence value", ge=0)
    mask_threshold: float = Field(default_factory=lambda: settings.KL_MASK_THRESHOLD, gt=0)
    delta_i: float = Field(default_factory=lambda: settings.KL_DELTA_I, gt=0)
    points: int = Field(..., description="Points surviving the mask", ge=1)

    model_config = ConfigDict(frozen=True)


# PUBLIC_INTERFACE
class ApproximationReport(BaseModel):
    """KL of every approximation method against Monte Carlo for one channel."""
    cfg: ChannelConfig
    moments: MomentSet
    reports: Dict[str, KlReport]
    advisory: Literal["gaussian", "weibull", "undecided"]

    model_config = ConfigDict(frozen=True)

    def dkl(self, method: str) -> float:
        return self.reports[method].dkl


# PUBLIC_INTERFACE
class SweepResult(BaseModel):
    """Ergodic capacity against total power for a fixed allocation ratio."""
    m: int = Field(..., ge=1)
    n: int = Field(..., ge=1)
    l: int = Field(..., ge=2)  # noqa: E741
    allocation_ratio: Tuple[float, ...]
    rho_db: List[float]
    capacity: List[float]
    mc_capacity: Optional[List[float]] = None
    mc_stderr: Optional[List[float]] = None

    model_config = ConfigDict(frozen=True)

    @field_validator("allocation_ratio")
    @classmethod
    def check_ratio(cls, v: Tuple[float, ...]) -> Tuple[float, ...]:
        """Ratios must be non-negative and sum to one."""
        if any(r < 0.0 for r in v) or abs(math.fsum(v) - 1.0) > 1e-12:
            raise ValueError("allocation ratios must be non-negative and sum to 1")
        return v

    @model_validator(mode="after")
    def check_lengths(self) -> "SweepResult":
        if len(self.capacity) != len(self.rho_db):
            raise ValueError("one capacity value per rho is required")
        return self


# PUBLIC_INTERFACE
class ScanRow(BaseModel):
    """One (L, dkappa) cell of a robustness scan."""
    cutoff_L: float = Field(..., gt=0)
    step_dk: float = Field(..., gt=0)
    dkl: float = Field(..., ge=0)
    min_raw: float = Field(..., description="Most negative raw PDF value on the reference grid")
    points: int = Field(..., description="Number of kappa samples", ge=1)

    model_config = ConfigDict(frozen=True)


# PUBLIC_INTERFACE
class RunOptions(BaseModel):
    """Run-level options shared by all subcommands."""
    samples: int = Field(default_factory=lambda: settings.MC_SAMPLES, description="Monte Carlo samples", ge=1)
    seed: int = Field(default_factory=lambda: settings.MC_SEED, description="Master seed", ge=0)
    cutoff: Union[Literal["auto"], float] = Field("auto", description="Cut-off L or 'auto'")
    dkappa: float = Field(default_factory=lambda: settings.DEFAULT_DKAPPA, description="Kappa step", gt=0)
    bits: bool = Field(False, description="Also report rates in bits")
    workers: int = Field(default_factory=lambda: settings.WORKERS, description="Worker threads", ge=1)
    delta_i: float = Field(default_factory=lambda: settings.KL_DELTA_I, description="Histogram bin width", gt=0)
    mask_threshold: float = Field(
        default_factory=lambda: settings.KL_MASK_THRESHOLD, description="KL mask threshold", gt=0
    )
    output: Optional[str] = Field(None, description="Output CSV path; standard output when empty")

    model_config = ConfigDict(frozen=True)

    @field_validator("cutoff", mode="before")
    @classmethod
    def parse_cutoff(cls, v: Any) -> Any:
        """Accept 'auto' or a positive number given as text."""
        if isinstance(v, str) and v.strip().lower() != "auto":
            v = float(v)
        if isinstance(v, str):
            return "auto"
        if not math.isfinite(v) or v <= 0:
            raise ValueError("cutoff must be 'auto' or a positive number")
        return v


# PUBLIC_INTERFACE
class RunManifest(BaseModel):
    """Provenance written as '#' comment lines at the top of every output file."""
    command_line: str
    config: Dict[str, Any]
    seed: Optional[int] = None
    tool_version: str
    generator: Optional[str] = None
    timestamp: str

    model_config = ConfigDict(frozen=True)

    def comment_lines(self) -> List[str]:
        """Render the manifest as '# key: value' lines."""
        lines = [f"# command: {self.command_line}"]
        for key in sorted(self.config):
            lines.append(f"# {key}: {self.config[key]}")
        if self.seed is not None:
            lines.append(f"# seed: {self.seed}")
        if self.generator is not None:
            lines.append(f"# generator: {self.generator}")
        lines.append(f"# version: {self.tool_version}")
        lines.append(f"# timestamp: {self.timestamp}")
        return lines
