"""
Special functions.

This module provides the complex-capable gamma-family functions and the Gauss
hypergeometric function on the non-positive real axis used by every MGF
kernel and approximation formula. Everything here is pure and thread-safe.
"""

import cmath
import logging
import math
from typing import Optional, Tuple, Union

import mpmath
import numpy as np
from mpmath.libmp import NoConvergence
from scipy import special

from jacobi_mimo import __app_name__
from jacobi_mimo.errors import (
    ConvergenceError,
    DomainError,
    NonFiniteError,
    ParameterError,
    PoleError,
)
from jacobi_mimo.schemas.numerics import SeriesControl, SignedLog


logger = logging.getLogger(__app_name__)

ComplexLike = Union[complex, float, int]

_BLOCK_START = 64
_BLOCK_MAX = 8192
# largest term / |sum| beyond which the double-precision sum is redone in mpmath
_CANCELLATION_LIMIT = 1e3


def _as_complex(value: ComplexLike, name: str) -> complex:
    try:
        z = complex(value)
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"{name} must be a number (got {value!r})") from exc
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise NonFiniteError(f"{name} is not finite ({z})")
    return z


def _is_nonpositive_integer(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def _is_nonnegative_integer(z: complex) -> bool:
    return z.imag == 0.0 and z.real >= 0.0 and z.real == math.floor(z.real)


# PUBLIC_INTERFACE
def ln_gamma(z: ComplexLike) -> complex:
    """
    Principal-branch log-gamma of a complex argument.

    Args:
        z: Argument, not a non-positive integer

    Returns:
        complex: ``log Gamma(z)`` with ``exp(ln_gamma(z)) == Gamma(z)``

    Raises:
        PoleError: If ``z`` is a non-positive integer
    """
    z = _as_complex(z, "z")
    if _is_nonpositive_integer(z):
        raise PoleError(f"Gamma has a pole at z={z.real:g}")
    return complex(special.loggamma(z))


# PUBLIC_INTERFACE
def pochhammer(a: ComplexLike, b: ComplexLike) -> complex:
    """
    Pochhammer symbol ``(a)_b = Gamma(a + b) / Gamma(a)``.

    A non-negative integer ``b`` uses the exact rising product, otherwise the
    log-gamma difference is exponentiated.

    Args:
        a: Base
        b: Order

    Returns:
        complex: The rising factorial

    Raises:
        PoleError: If the gamma ratio is undefined and ``b`` is not a
            non-negative integer

    Example:
        ```python
        pochhammer(3, 2)  # (12+0j)
        ```
    """
    a = _as_complex(a, "a")
    b = _as_complex(b, "b")
    if _is_nonnegative_integer(b):
        result = 1.0 + 0.0j
        for i in range(int(b.real)):
            result *= a + i
        return result
    if _is_nonpositive_integer(a) or _is_nonpositive_integer(a + b):
        raise PoleError(f"(a)_b undefined for a={a}, b={b}")
    return cmath.exp(ln_gamma(a + b) - ln_gamma(a))


# PUBLIC_INTERFACE
def barnes_g_int(eta: int) -> SignedLog:
    """
    Barnes G-function at a positive integer, ``G(eta) = prod_{j<eta} Gamma(j)``.

    Args:
        eta: Positive integer argument

    Returns:
        SignedLog: ``log G(eta)`` with sign +1

    Raises:
        DomainError: If ``eta`` is not a positive integer
    """
    if isinstance(eta, bool) or int(eta) != eta or eta < 1:
        raise DomainError(f"barnes_g_int needs a positive integer (got {eta!r})")
    log = float(np.sum(special.gammaln(np.arange(1, int(eta), dtype=float))))
    return SignedLog(log=log, sign=1)


def _check_positive(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value) or value <= 0.0:
            raise DomainError(f"{name} must be positive and finite (got {value})")


# PUBLIC_INTERFACE
def log_beta(a: float, b: float) -> float:
    """Logarithm of the Beta function for positive real arguments."""
    _check_positive(a=a, b=b)
    return float(special.betaln(a, b))


# PUBLIC_INTERFACE
def beta_fn(a: float, b: float) -> float:
    """
    Beta function ``B(a, b)`` through log-gamma.

    Args:
        a: Positive real
        b: Positive real

    Returns:
        float: ``Gamma(a) Gamma(b) / Gamma(a + b)``

    Raises:
        DomainError: If either argument is not positive
    """
    return math.exp(log_beta(a, b))


# PUBLIC_INTERFACE
def digamma(x: float) -> float:
    """
    Digamma function for positive real arguments.

    Raises:
        DomainError: If ``x <= 0``
    """
    _check_positive(x=x)
    return float(special.digamma(x))


# PUBLIC_INTERFACE
def erf(x: float) -> float:
    """Error function of a finite real argument."""
    if not math.isfinite(x):
        raise DomainError(f"erf needs a finite argument (got {x})")
    return float(special.erf(x))


def _canonical_pair(a: complex, b: complex) -> Tuple[complex, complex]:
    # a fixed order makes the result exactly symmetric in (a, b)
    if (a.real, a.imag) <= (b.real, b.imag):
        return a, b
    return b, a


def _terminating_degree(a: complex, b: complex) -> Optional[int]:
    degrees = [int(-p.real) for p in (a, b) if _is_nonpositive_integer(p)]
    return min(degrees) if degrees else None


def _finite_sum(a: complex, b: complex, c: complex, z: float, degree: int) -> complex:
    if degree == 0:
        return 1.0 + 0.0j
    k = np.arange(degree, dtype=float)
    ratios = (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
    return complex(1.0 + np.sum(np.cumprod(ratios)))


def _series_sum(
    a: complex, b: complex, c: complex, z: float, ctl: SeriesControl
) -> Tuple[complex, float, bool]:
    """Sum the power series in blocks; returns (sum, largest |term|, converged)."""
    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    largest = 1.0
    start = 0
    block = _BLOCK_START
    while start < ctl.max_terms:
        stop = min(start + block, ctl.max_terms)
        k = np.arange(start, stop, dtype=float)
        ratios = (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        terms = term * np.cumprod(ratios)
        total += complex(np.sum(terms))
        magnitudes = np.abs(terms)
        largest = max(largest, float(magnitudes.max()))
        term = complex(terms[-1])
        if not (math.isfinite(total.real) and math.isfinite(total.imag)):
            raise NonFiniteError(f"2F1 series overflowed at term {stop}")
        tail_ratio = abs(complex(ratios[-1]))
        if term == 0.0 or (
            tail_ratio < 1.0
            and magnitudes[-1] / (1.0 - tail_ratio) <= ctl.rel_tol * abs(total)
        ):
            return total, largest, True
        start = stop
        block = min(2 * block, _BLOCK_MAX)
    return total, largest, False


# PUBLIC_INTERFACE
def gauss_2f1_mp(
    a: ComplexLike,
    b: ComplexLike,
    c: ComplexLike,
    z: float,
    dps: int = 30,
    as_mp: bool = False,
) -> Union[complex, "mpmath.mpc"]:
    """
    Extended-precision ``2F1(a, b; c; z)`` through mpmath.

    Args:
        a: First numerator parameter
        b: Second numerator parameter
        c: Denominator parameter
        z: Real argument
        dps: Working precision in decimal digits
        as_mp: Return the mpmath value instead of a Python complex

    Returns:
        The hypergeometric value

    Raises:
        ConvergenceError: If mpmath cannot evaluate the function
    """
    with mpmath.workdps(dps):
        try:
            value = mpmath.hyp2f1(
                mpmath.mpc(complex(a)), mpmath.mpc(complex(b)), mpmath.mpc(complex(c)), mpmath.mpf(z)
            )
        except (NoConvergence, ZeroDivisionError, ValueError) as exc:
            raise ConvergenceError(f"mpmath 2F1 failed for a={a}, b={b}, c={c}, z={z}: {exc}") from exc
        if as_mp:
            return +value
        return complex(value)


def _summed(
    a: complex,
    b: complex,
    c: complex,
    z: float,
    ctl: SeriesControl,
    log_prefactor: complex,
    original: Tuple[complex, complex, complex, float],
) -> complex:
    total, largest, converged = _series_sum(a, b, c, z, ctl)
    if not converged:
        raise ConvergenceError(
            f"2F1 series did not converge within {ctl.max_terms} terms "
            f"(a={original[0]}, b={original[1]}, c={original[2]}, z={original[3]})"
        )
    magnitude = abs(total)
    loss = largest / magnitude if magnitude > 0.0 else math.inf
    if loss > _CANCELLATION_LIMIT:
        digits = int(math.ceil(math.log10(loss))) if math.isfinite(loss) else 30
        logger.debug(f"2F1 series lost {digits} digits, switching to mpmath")
        return gauss_2f1_mp(*original, dps=15 + digits + 10)
    return cmath.exp(log_prefactor) * total


# PUBLIC_INTERFACE
def gauss_2f1(
    a: ComplexLike,
    b: ComplexLike,
    c: ComplexLike,
    z: float,
    ctl: Optional[SeriesControl] = None,
) -> complex:
    """
    Gauss hypergeometric function ``2F1(a, b; c; z)`` for real ``z <= 0``.

    For ``-1 < z <= 0`` the power series is summed directly. For ``z <= -1``
    the Pfaff transformation ``(1 - z)^(-a) 2F1(a, c - b; c; z / (z - 1))``
    maps the argument into ``[1/2, 1)``; the parameter with the larger real
    part is kept so that the transformed terms do not alternate near
    ``Im(b) = 0``. Terminating parameters give the exact finite sum. When the
    summed series loses too many digits to cancellation the value is
    recomputed with mpmath at a raised precision.

    Args:
        a: First numerator parameter
        b: Second numerator parameter
        c: Denominator parameter, not a non-positive integer
        z: Non-positive real argument
        ctl: Series tolerance and term budget

    Returns:
        complex: The function value

    Raises:
        ParameterError: If ``c`` is a non-positive integer
        DomainError: If ``z > 0`` or is not finite
        ConvergenceError: If the term budget is exhausted

    Example:
        ```python
        gauss_2f1(1, 1, 2, -1.0)  # log(2)
        ```
    """
    ctl = ctl or SeriesControl()
    a = _as_complex(a, "a")
    b = _as_complex(b, "b")
    c = _as_complex(c, "c")
    if _is_nonpositive_integer(c):
        raise ParameterError(f"c must not be a non-positive integer (got {c.real:g})")
    z = float(z)
    if not math.isfinite(z) or z > 0.0:
        raise DomainError(f"gauss_2f1 supports finite z <= 0 only (got {z})")
    if z == 0.0:
        return 1.0 + 0.0j

    a, b = _canonical_pair(a, b)
    degree = _terminating_degree(a, b)
    if degree is not None:
        return _finite_sum(a, b, c, z, degree)
    if z > -1.0:
        return _summed(a, b, c, z, ctl, 0j, (a, b, c, z))

    keep, other = (a, b) if a.real >= b.real else (b, a)
    w = z / (z - 1.0)
    log_prefactor = -keep * math.log1p(-z)
    return _summed(keep, c - other, c, w, ctl, log_prefactor, (a, b, c, z))
