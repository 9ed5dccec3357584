"""
Dense determinants and Vandermonde utilities.

This module provides overflow-safe complex determinants, Vandermonde products
and an exact check of the Vandermonde derivative-limit identity used by the
rank-deficient MGF.
"""

import math
from collections import defaultdict
from itertools import combinations
from typing import Dict, Sequence, Tuple

import mpmath
import numpy as np
from scipy.linalg import lu_factor

from jacobi_mimo.core.specfun import barnes_g_int
from jacobi_mimo.errors import DimensionError, DomainError, NonFiniteError
from jacobi_mimo.schemas.numerics import LogDet, SignedLog

PIVOT_FLOOR = 1e-300
_LOG_FORM_LENGTH = 8

Monomial = Tuple[int, ...]


def _as_square(matrix: object) -> np.ndarray:
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"det_complex needs a non-empty square matrix (got shape {a.shape})")
    if not np.all(np.isfinite(a)):
        raise NonFiniteError("matrix has non-finite entries")
    return a


# PUBLIC_INTERFACE
def det_complex(matrix: object) -> LogDet:
    """
    Determinant of a complex square matrix in log-modulus / phase form.

    Uses LU factorisation with partial pivoting; a 1x1 matrix is exact.

    Args:
        matrix: Square array-like of complex entries

    Returns:
        LogDet: ``det = exp(log_modulus) * phase``; ``singular`` is set when a
        pivot modulus is below 1e-300

    Example:
        ```python
        det_complex(np.diag([2, 3j, -1])).value  # -6j
        ```
    """
    a = _as_square(matrix)
    if a.shape[0] == 1:
        entry = complex(a[0, 0])
        if abs(entry) < PIVOT_FLOOR:
            return LogDet(log_modulus=-math.inf, phase=1.0 + 0.0j, singular=True)
        return LogDet(log_modulus=math.log(abs(entry)), phase=entry / abs(entry))

    lu, piv = lu_factor(a, check_finite=False)
    pivots = np.diagonal(lu)
    moduli = np.abs(pivots)
    if np.any(moduli < PIVOT_FLOOR):
        return LogDet(log_modulus=-math.inf, phase=1.0 + 0.0j, singular=True)
    swaps = int(np.count_nonzero(piv != np.arange(piv.size)))
    phase = complex(np.prod(pivots / moduli)) * (-1.0) ** swaps
    phase /= abs(phase)
    return LogDet(log_modulus=float(np.sum(np.log(moduli))), phase=phase)


# PUBLIC_INTERFACE
def det_complex_mp(rows: Sequence[Sequence[object]], dps: int) -> "mpmath.mpc":
    """
    Extended-precision determinant of a matrix of mpmath (or Python) numbers.

    Args:
        rows: Row-major entries
        dps: Working precision in decimal digits

    Returns:
        mpmath.mpc: The determinant at the requested precision
    """
    with mpmath.workdps(dps):
        return +mpmath.det(mpmath.matrix([list(row) for row in rows]))


# PUBLIC_INTERFACE
def log_vandermonde(values: Sequence[float]) -> SignedLog:
    """
    Vandermonde product ``prod_{j<k} (v_k - v_j)`` in log / sign form.

    Args:
        values: Ordered real values

    Returns:
        SignedLog: sign 0 (and log ``-inf``) when two values coincide
    """
    v = [float(x) for x in values]
    if not v:
        raise DimensionError("vandermonde needs at least one value")
    log = 0.0
    sign = 1
    for j, k in combinations(range(len(v)), 2):
        diff = v[k] - v[j]
        if diff == 0.0:
            return SignedLog(log=-math.inf, sign=0)
        log += math.log(abs(diff))
        if diff < 0.0:
            sign = -sign
    return SignedLog(log=log, sign=sign)


# PUBLIC_INTERFACE
def vandermonde(values: Sequence[float]) -> float:
    """
    Vandermonde determinant ``prod_{j<k} (v_k - v_j)``.

    Short inputs use the direct product; more than eight values go through
    the log / sign form.

    Args:
        values: Ordered real values, at least one

    Returns:
        float: The product, exactly 0 on duplicates

    Example:
        ```python
        vandermonde([1, 2, 3])  # 2.0
        ```
    """
    v = [float(x) for x in values]
    if not v:
        raise DimensionError("vandermonde needs at least one value")
    if len(v) > _LOG_FORM_LENGTH:
        return log_vandermonde(v).value
    product = 1.0
    for j, k in combinations(range(len(v)), 2):
        product *= v[k] - v[j]
    return product


def _expand_vandermonde(m: int) -> Dict[Monomial, int]:
    """Integer-coefficient monomial expansion of prod_{j<k} (x_k - x_j)."""
    poly: Dict[Monomial, int] = {tuple([0] * m): 1}
    for j, k in combinations(range(m), 2):
        expanded: Dict[Monomial, int] = defaultdict(int)
        for exponents, coeff in poly.items():
            up_k = list(exponents)
            up_k[k] += 1
            expanded[tuple(up_k)] += coeff
            up_j = list(exponents)
            up_j[j] += 1
            expanded[tuple(up_j)] -= coeff
        poly = {mono: c for mono, c in expanded.items() if c != 0}
    return poly


# PUBLIC_INTERFACE
def vandermonde_limit_check(m: int, n: int, lam: Sequence[float]) -> Tuple[float, float]:
    """
    Both sides of the Vandermonde derivative-limit identity.

    The left side applies ``prod_{j=n+1}^{m} d^{j-n-1}/d lam_j^{j-n-1}`` to
    ``Delta_m`` by exact polynomial differentiation and sets the
    differentiated variables to zero; the right side is
    ``(-1)^{n(m-1)} G(m-n+1) prod_k lam_k^{m-n} Delta_n(lam)``.

    Args:
        m: Total number of variables, at most 6
        n: Number of free variables, ``1 <= n < m``
        lam: The ``n`` free values

    Returns:
        Tuple[float, float]: ``(lhs, rhs)``

    Raises:
        DimensionError: If ``n >= m`` or ``len(lam) != n``
    """
    if n < 1 or n >= m:
        raise DimensionError(f"vandermonde_limit_check needs 1 <= n < m (got m={m}, n={n})")
    if m > 6:
        raise DomainError(f"vandermonde_limit_check supports m <= 6 (got m={m})")
    free = [float(x) for x in lam]
    if len(free) != n:
        raise DimensionError(f"expected {n} values, got {len(free)}")

    orders = [j - n for j in range(n, m)]
    lhs = 0.0
    for exponents, coeff in _expand_vandermonde(m).items():
        # a monomial survives only if each differentiated variable carries
        # exactly the differentiation order
        if any(exponents[n + i] != order for i, order in enumerate(orders)):
            continue
        term = float(coeff) * math.prod(math.factorial(order) for order in orders)
        for i in range(n):
            term *= free[i] ** exponents[i]
        lhs += term

    g = barnes_g_int(m - n + 1).value
    rhs = (-1.0) ** (n * (m - 1)) * g * math.prod(x ** (m - n) for x in free) * vandermonde(free)
    return lhs, rhs
