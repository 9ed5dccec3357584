"""
Channel configuration schemas.

This module provides the Pydantic schema describing a Jacobi MIMO channel and
the registry of named reference configurations.
"""

import math
from typing import Any, Dict, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


# PUBLIC_INTERFACE
class ChannelConfig(BaseModel):
    """
    Dimensions and power allocation of a Jacobi MIMO channel.

    ``m`` transmit modes, ``n`` receive modes, ``l`` fiber channels and the
    eigenvalues ``q`` of the transmit covariance. Instances are immutable and
    hashable so they can key evaluation caches.
    """
    m: int = Field(..., description="Number of excited transmit modes", ge=1)
    n: int = Field(..., description="Number of detected receive modes", ge=1)
    l: int = Field(..., description="Total number of fiber channels", ge=2)  # noqa: E741
    q: Tuple[float, ...] = Field(..., description="Eigenvalues of the transmit covariance", min_length=1)

    model_config = ConfigDict(frozen=True)

    @field_validator("q", mode="before")
    @classmethod
    def parse_q(cls, v: Any) -> Any:
        """Accept a comma separated string as well as a sequence."""
        if isinstance(v, str):
            return tuple(float(item) for item in v.split(",") if item.strip())
        return v

    @field_validator("q")
    @classmethod
    def check_q(cls, v: Tuple[float, ...]) -> Tuple[float, ...]:
        """Every power eigenvalue must be positive and finite."""
        for value in v:
            if not math.isfinite(value) or value <= 0.0:
                raise ValueError(f"every q_j must be positive and finite (got {value})")
        return v

    @model_validator(mode="after")
    def check_dimensions(self) -> "ChannelConfig":
        """Enforce l >= m + n and one eigenvalue per transmit mode."""
        if self.l < self.m + self.n:
            raise ValueError(
                f"l must satisfy l >= m + n (got l={self.l}, m + n={self.m + self.n})"
            )
        if len(self.q) != self.m:
            raise ValueError(f"q must hold m={self.m} values (got {len(self.q)})")
        return self

    @property
    def rho(self) -> float:
        """Total transmit power, the trace of Q."""
        return math.fsum(self.q)

    @property
    def is_equal_power(self) -> bool:
        """Whether all eigenvalues coincide to 1e-12 relative."""
        top = max(self.q)
        return all(abs(value - top) <= 1e-12 * top for value in self.q)

    @property
    def min_dim(self) -> int:
        """Number of non-zero eigenvalues of H^dagger H."""
        return min(self.m, self.n)

    @property
    def max_dim(self) -> int:
        return max(self.m, self.n)

    @property
    def label(self) -> str:
        """Compact ``(m,n,l)`` label."""
        return f"({self.m},{self.n},{self.l})"

    def with_q(self, q: Tuple[float, ...]) -> "ChannelConfig":
        """Return a copy carrying another power allocation."""
        return ChannelConfig(m=self.m, n=self.n, l=self.l, q=tuple(q))

    def snapshot(self) -> Dict[str, Any]:
        """Plain dictionary used in run manifests."""
        return {"m": self.m, "n": self.n, "l": self.l, "q": list(self.q)}


def _preset(m: int, n: int, l: int, q: Tuple[float, ...]) -> ChannelConfig:  # noqa: E741
    return ChannelConfig(m=m, n=n, l=l, q=q)


_Q_SMALL_TX = (8.80, 0.11, 0.09, 0.55, 1.20, 0.75, 0.28)
_Q_LARGE_TX = (11.00, 5.00, 1.50, 0.50, 0.75, 1.10, 3.30)

REFERENCE_PRESETS: Dict[str, ChannelConfig] = {
    "m3n6-strong": _preset(3, 6, 12, _Q_SMALL_TX[:3]),
    "m3n6-moderate": _preset(3, 6, 12, (6.80, 1.50, 0.70)),
    "m3n6-equal": _preset(3, 6, 12, (3.0, 3.0, 3.0)),
    "m5n7": _preset(5, 7, 16, _Q_SMALL_TX[:5]),
    "m7n8": _preset(7, 8, 17, _Q_SMALL_TX),
    "m2n1": _preset(2, 1, 6, _Q_LARGE_TX[:2]),
    "m4n3": _preset(4, 3, 10, _Q_LARGE_TX[:4]),
    "m4n3-l12": _preset(4, 3, 12, _Q_LARGE_TX[:4]),
    "m7n5": _preset(7, 5, 14, _Q_LARGE_TX),
    "m4n2-strong": _preset(4, 2, 7, (11.70, 0.15, 0.10, 0.05)),
    "m4n2-moderate": _preset(4, 2, 7, (8.00, 2.00, 0.95, 1.05)),
    "m4n2-equal": _preset(4, 2, 7, (3.0, 3.0, 3.0, 3.0)),
}
