"""
Numerical control schemas.

This module provides the Pydantic schema that controls series evaluation and
the lightweight carriers for signed logarithms and log-determinants.
"""

import math
from typing import NamedTuple

from pydantic import BaseModel, ConfigDict, Field

from jacobi_mimo.config import settings


# PUBLIC_INTERFACE
class SeriesControl(BaseModel):
    """
    Convergence control of a hypergeometric series.

    Defaults are read from the settings at construction time.
    """
    rel_tol: float = Field(
        default_factory=lambda: settings.SERIES_REL_TOL,
        description="Relative size of the tail at which summation stops",
        gt=0,
        le=1e-6,
    )
    max_terms: int = Field(
        default_factory=lambda: settings.SERIES_MAX_TERMS,
        description="Largest number of terms summed before giving up",
        ge=100,
    )

    model_config = ConfigDict(frozen=True)


# PUBLIC_INTERFACE
class SignedLog(NamedTuple):
    """A real number stored as ``sign * exp(log)``."""

    log: float
    sign: int

    @property
    def value(self) -> float:
        """The represented real number."""
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log)


# PUBLIC_INTERFACE
class LogDet(NamedTuple):
    """
    A determinant stored as ``exp(log_modulus) * phase``.

    ``singular`` is set when a pivot fell below the working-precision floor;
    ``log_modulus`` is then ``-inf`` and ``phase`` is 1.
    """

    log_modulus: float
    phase: complex
    singular: bool = False

    @property
    def value(self) -> complex:
        """The represented complex determinant."""
        if self.singular:
            return 0j
        return math.exp(self.log_modulus) * self.phase
