"""
Exact MGF of the mutual information.

This module assembles the moment generating function ``M(kappa) =
E[exp(i kappa I)]`` of a Jacobi MIMO channel for the three regimes
(``m <= n``, ``m > n`` and equal power), and derives moments, the ergodic
capacity and the high-SNR capacity formula from it.

Every kernel is an Euler integral
``E(a, b, s; q) = int_0^1 x^(a-1) (1-x)^(b-1) (1 + q x)^s dx
= B(a, b) 2F1(a, -s; a + b; -q)``; the closed form is the production value
and Gauss-Jacobi quadrature of the same integral is its running cross-check.
"""

import cmath
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache, partial
from typing import List, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np
from mpmath.libmp import NoConvergence
from scipy.special import gammaln, roots_jacobi

from jacobi_mimo import __app_name__
from jacobi_mimo.config import settings, workers_or_default
from jacobi_mimo.core.linalg import det_complex, det_complex_mp, log_vandermonde
from jacobi_mimo.core.specfun import (
    barnes_g_int,
    digamma,
    gauss_2f1,
    log_beta,
    pochhammer,
)
from jacobi_mimo.errors import (
    ConvergenceError,
    CutoffSearchError,
    DifferentiationAccuracyError,
    DimensionError,
    DomainError,
    KernelConsistencyError,
    NonFiniteError,
    SingularMatrixError,
)
from jacobi_mimo.schemas import ChannelConfig, MgfGrid, MomentSet, SeriesControl


logger = logging.getLogger(__app_name__)

Cutoff = Union[str, float]

# 7-point central stencils on offsets -3..3
_D1 = np.array([-1 / 60, 3 / 20, -3 / 4, 0.0, 3 / 4, -3 / 20, 1 / 60])
_D2 = np.array([1 / 90, -3 / 20, 3 / 2, -49 / 18, 3 / 2, -3 / 20, 1 / 90])
_D3 = np.array([1 / 8, -1.0, 13 / 8, 0.0, -13 / 8, 1.0, -1 / 8])
_OFFSETS = np.arange(-3, 4, dtype=float)


# PUBLIC_INTERFACE
def log_prefactor_K(m: int, kappa: float) -> complex:
    """
    Logarithm of the unitary-integral prefactor ``K_m(kappa)``.

    The exponents ``i - m`` are integers, so any branch of the logarithm
    yields the same ``K_m``.
    """
    if m < 1:
        raise DimensionError(f"m must be at least 1 (got {m})")
    log = 1j * math.pi if (m * (m - 1) // 2) % 2 else 0j
    for i in range(1, m):
        base = complex(i - m, -kappa)
        log += (i - m) * (cmath.log(base) - math.log(i))
    return log


# PUBLIC_INTERFACE
def prefactor_K(m: int, kappa: float) -> complex:
    """
    Prefactor ``K_m(kappa) = (-1)^(m(m-1)/2) prod_{i<m} ((-i kappa - m + i) / i)^(i - m)``.

    Args:
        m: Number of transmit modes
        kappa: Real transform variable

    Returns:
        complex: The prefactor; 1 for ``m = 1``

    Example:
        ```python
        prefactor_K(2, 0.0)  # (1+0j)
        ```
    """
    return cmath.exp(log_prefactor_K(m, float(kappa)))


# PUBLIC_INTERFACE
def norm_C(alpha: int, beta: int, l: int) -> float:  # noqa: E741
    """
    Logarithm of the Jacobi normalisation constant ``C_{alpha,beta}``.

    ``C = prod_{i=1}^{alpha} Gamma(l-i+1) / [Gamma(i+1) Gamma(l-beta-i+1) Gamma(beta-i+1)]``.

    Args:
        alpha: Smaller dimension
        beta: Larger dimension
        l: Number of fiber channels, ``l >= alpha + beta``

    Returns:
        float: ``log C_{alpha,beta}``

    Raises:
        DomainError: If a gamma argument is not positive
    """
    if alpha < 1 or beta < 1 or l < alpha + beta:
        raise DomainError(f"norm_C needs l >= alpha + beta >= 2 (got alpha={alpha}, beta={beta}, l={l})")
    i = np.arange(1, alpha + 1, dtype=float)
    arguments = (l - i + 1, i + 1, l - beta - i + 1, beta - i + 1)
    if any(np.any(arg <= 0) for arg in arguments):
        raise DomainError(f"norm_C gamma argument not positive (alpha={alpha}, beta={beta}, l={l})")
    top, fac, low, rest = (gammaln(arg) for arg in arguments)
    return float(np.sum(top - fac - low - rest))


# PUBLIC_INTERFACE
def quadrature_nodes(l: int, m: int, kappa: float, q: float) -> int:  # noqa: E741
    """
    Gauss-Jacobi node count for an Euler-integral kernel.

    ``2 (l + m) + 40`` nodes, enlarged for oscillation (``|kappa| log(1+q)``)
    and for the singularity at ``x = -1/q`` approaching the interval.
    """
    return 2 * (l + m) + 40 + int(math.ceil(abs(kappa) * math.log1p(q))) + int(math.ceil(8.0 * math.sqrt(q)))


@lru_cache(maxsize=1024)
def _jacobi_rule(nodes: int, a: int, b: int) -> Tuple[np.ndarray, np.ndarray, float]:
    # weight x^(a-1) (1-x)^(b-1) on [0, 1] from the [-1, 1] rule
    x, w = roots_jacobi(nodes, float(b - 1), float(a - 1))
    return (1.0 + x) / 2.0, w, 2.0 ** (1.0 - a - b)


# PUBLIC_INTERFACE
def euler_integral_quadrature(a: int, b: int, s: complex, q: float, nodes: int) -> complex:
    """
    Gauss-Jacobi quadrature of ``int_0^1 x^(a-1) (1-x)^(b-1) (1 + q x)^s dx``.

    Args:
        a: Exponent offset at 0, positive integer
        b: Exponent offset at 1, positive integer
        s: Complex power of ``1 + q x``
        q: Non-negative real
        nodes: Number of quadrature nodes

    Returns:
        complex: The integral
    """
    lam, weights, scale = _jacobi_rule(int(nodes), int(a), int(b))
    values = np.exp(s * np.log1p(q * lam))
    return complex(scale * np.dot(weights, values))


def _kernel_control() -> SeriesControl:
    return SeriesControl(rel_tol=settings.KERNEL_SERIES_REL_TOL, max_terms=settings.KERNEL_SERIES_MAX_TERMS)


def _check_agreement(closed: complex, quad: complex, label: str) -> None:
    scale = max(abs(closed), abs(quad))
    if scale == 0.0:
        return
    rel = abs(closed - quad) / scale
    if rel > settings.KERNEL_RAISE_TOL:
        raise KernelConsistencyError(
            f"{label}: closed form {closed} and quadrature {quad} differ by {rel:.3e} relative"
        )
    if rel > settings.KERNEL_AGREEMENT_TOL:
        logger.warning(f"{label}: kernel routes differ by {rel:.3e} relative")


def _euler_integral(a: int, b: int, s: complex, q: float, l: int, m: int, label: str) -> complex:  # noqa: E741
    closed = math.exp(log_beta(a, b)) * gauss_2f1(a, -s, a + b, -q, _kernel_control())
    if settings.KERNEL_CROSS_CHECK:
        quad = euler_integral_quadrature(a, b, s, q, quadrature_nodes(l, m, s.imag, q))
        _check_agreement(closed, quad, label)
    return closed


def _euler_integral_mp(a: int, b: int, s: complex, q: float, dps: int) -> "mpmath.mpc":
    with mpmath.workdps(dps):
        try:
            value = mpmath.beta(a, b) * mpmath.hyp2f1(a, -mpmath.mpc(s), a + b, -mpmath.mpf(q))
        except (NoConvergence, ZeroDivisionError) as exc:
            raise ConvergenceError(f"extended-precision kernel failed (a={a}, b={b}, s={s}, q={q})") from exc
        return +value


def _check_index(name: str, value: int, upper: int) -> None:
    if not 1 <= value <= upper:
        raise DimensionError(f"{name} must lie in 1..{upper} (got {value})")


def _g_params(cfg: ChannelConfig, k: int, kappa: float) -> Tuple[int, int, complex]:
    return k + cfg.n - cfg.m, cfg.l - cfg.m - cfg.n + 1, complex(cfg.m - 1, kappa)


def _h_params(cfg: ChannelConfig, k: int, kappa: float) -> Tuple[int, int, complex]:
    return k - cfg.m + cfg.n, cfg.l - cfg.m - cfg.n + 1, complex(cfg.m - 1, kappa)


def _t_params(cfg: ChannelConfig, j: int, k: int, kappa: float) -> Tuple[int, int, complex]:
    # equal power with m > n uses the same kernel with m and n interchanged
    return j + k + abs(cfg.m - cfg.n) - 1, cfg.l - cfg.m - cfg.n + 1, complex(0.0, kappa)


# PUBLIC_INTERFACE
def kernel_g(q_j: float, k: int, kappa: float, cfg: ChannelConfig) -> complex:
    """
    Kernel ``g_{j,k}(kappa)`` of the ``m <= n`` determinant.

    ``B(k+n-m, l-m-n+1) 2F1(k+n-m, 1-m-i kappa; k+l+1-2m; -q_j)``, checked
    against Gauss-Jacobi quadrature of its Euler integral.

    Args:
        q_j: Power eigenvalue of row ``j``
        k: Column index, ``1 <= k <= m``
        kappa: Real transform variable
        cfg: Channel with ``m <= n``

    Returns:
        complex: The kernel value

    Raises:
        KernelConsistencyError: If the routes differ by more than the raise tolerance
    """
    if cfg.m > cfg.n:
        raise DimensionError("kernel_g applies to m <= n")
    _check_index("k", k, cfg.m)
    a, b, s = _g_params(cfg, k, kappa)
    return _euler_integral(a, b, s, float(q_j), cfg.l, cfg.m, f"g(q={q_j}, k={k}, kappa={kappa})")


# PUBLIC_INTERFACE
def kernel_t(j: int, k: int, kappa: float, q: float, cfg: ChannelConfig) -> complex:
    """
    Kernel ``t_{j,k}(kappa)`` of the equal-power determinant.

    ``B(j+k+|m-n|-1, l-m-n+1) 2F1(j+k+|m-n|-1, -i kappa; j+k+l-2 min(m,n); -q)``
    with ``1 <= j, k <= min(m, n)``.
    """
    _check_index("j", j, cfg.min_dim)
    _check_index("k", k, cfg.min_dim)
    a, b, s = _t_params(cfg, j, k, kappa)
    return _euler_integral(a, b, s, float(q), cfg.l, cfg.m, f"t(q={q}, j={j}, k={k}, kappa={kappa})")


# PUBLIC_INTERFACE
def kernel_h(q_j: float, k: int, kappa: float, cfg: ChannelConfig) -> complex:
    """
    Kernel ``h_{j,k}(kappa)`` of the ``m > n`` determinant.

    ``(i kappa + m - k + 1)_(k-1) q_j^(k-1)`` for ``k <= m - n``, otherwise
    ``B(k-m+n, l-m-n+1) 2F1(k-m+n, 1-m-i kappa; k+l-2m+1; -q_j)`` with the
    quadrature cross-check.
    """
    if cfg.m <= cfg.n:
        raise DimensionError("kernel_h applies to m > n")
    _check_index("k", k, cfg.m)
    if k <= cfg.m - cfg.n:
        return pochhammer(complex(cfg.m - k + 1, kappa), k - 1) * float(q_j) ** (k - 1)
    a, b, s = _h_params(cfg, k, kappa)
    return _euler_integral(a, b, s, float(q_j), cfg.l, cfg.m, f"h(q={q_j}, k={k}, kappa={kappa})")


def _kernel_mp(cfg: ChannelConfig, q_j: float, k: int, kappa: float, dps: int) -> "mpmath.mpc":
    with mpmath.workdps(dps):
        if cfg.m > cfg.n and k <= cfg.m - cfg.n:
            return mpmath.rf(mpmath.mpc(cfg.m - k + 1, kappa), k - 1) * mpmath.mpf(q_j) ** (k - 1)
    params = _h_params(cfg, k, kappa) if cfg.m > cfg.n else _g_params(cfg, k, kappa)
    value = _euler_integral_mp(*params, q=float(q_j), dps=dps)
    if settings.KERNEL_CROSS_CHECK:
        a, b, s = params
        quad = euler_integral_quadrature(a, b, s, q_j, quadrature_nodes(cfg.l, cfg.m, kappa, q_j))
        _check_agreement(complex(value), quad, f"kernel(q={q_j}, k={k}, kappa={kappa})")
    return value


# PUBLIC_INTERFACE
def spread_duplicates(q: Sequence[float]) -> Tuple[float, ...]:
    """
    Separate near-duplicate power eigenvalues.

    Values closer than ``DUPLICATE_REL_GAP`` (relative) form a group that is
    spread symmetrically about its mean in steps of ``SPREAD_REL_STEP`` times
    the mean; groups that touch after spreading are merged and spread again.

    Args:
        q: Power eigenvalues

    Returns:
        Tuple[float, ...]: Values in the original order, unchanged when no
        duplicates are present
    """
    values = [float(x) for x in q]
    gap = settings.DUPLICATE_REL_GAP
    step = settings.SPREAD_REL_STEP
    for _ in range(len(values)):
        order = sorted(range(len(values)), key=values.__getitem__)
        groups: List[List[int]] = [[order[0]]]
        for prev, idx in zip(order, order[1:]):
            if values[idx] - values[prev] < gap * max(abs(values[idx]), abs(values[prev])):
                groups[-1].append(idx)
            else:
                groups.append([idx])
        clusters = [group for group in groups if len(group) > 1]
        if not clusters:
            break
        for group in clusters:
            centre = math.fsum(values[i] for i in group) / len(group)
            half = (len(group) - 1) / 2.0
            for rank, idx in enumerate(group):
                values[idx] = centre * (1.0 + (rank - half) * step)
    return tuple(values)


# PUBLIC_INTERFACE
def conditioning(q: Sequence[float]) -> float:
    """
    Conditioning of the generic determinant, ``prod_{j<k} |q_k - q_j| / max(1, q_j, q_k)``.

    Small values mean the determinant ratio loses about ``-log10`` of this
    number in significant digits.
    """
    values = [float(x) for x in q]
    result = 1.0
    for j in range(len(values)):
        for k in range(j + 1, len(values)):
            result *= abs(values[k] - values[j]) / max(1.0, values[j], values[k])
    return result


# PUBLIC_INTERFACE
def normalisation_defect(cfg: ChannelConfig) -> float:
    """
    ``|M(0) - 1|`` of the double-precision generic determinant.

    ``M(0) = 1`` holds exactly, so the defect measures what the
    double-precision determinant loses to cancellation for this allocation.

    Args:
        cfg: Channel with an unequal power allocation

    Returns:
        float: The defect; ``inf`` when the determinant is numerically singular

    Raises:
        DomainError: For an equal power allocation
    """
    if cfg.is_equal_power:
        raise DomainError("normalisation_defect applies to unequal power allocations")
    try:
        return abs(_mgf_generic(cfg, spread_duplicates(cfg.q), 0.0) - 1.0)
    except SingularMatrixError:
        return math.inf


@lru_cache(maxsize=256)
def _prepared(cfg: ChannelConfig) -> Tuple[Tuple[float, ...], Optional[int]]:
    q = spread_duplicates(cfg.q)
    if q != cfg.q:
        logger.info(f"Spread near-duplicate q values for {cfg.label}: {cfg.q} -> {q}")
    cond = conditioning(q)
    if cond < settings.CONDITIONING_THRESHOLD:
        logger.warning(f"Ill-conditioned power allocation for {cfg.label}: conditioning {cond:.3e}")
    lost = -math.log10(cond) if cond > 0 else math.inf
    if cond >= settings.HIGH_PRECISION_THRESHOLD:
        defect = normalisation_defect(cfg)
        if defect <= settings.NORMALISATION_TOL:
            return q, None
        logger.info(f"Double-precision M(0) of {cfg.label} is off by {defect:.3e}")
        lost = math.log10(defect / np.finfo(float).eps) if math.isfinite(defect) else math.inf
    dps = 25 + int(math.ceil(lost)) if math.isfinite(lost) else 60
    logger.info(f"Using {dps}-digit arithmetic for {cfg.label} (conditioning {cond:.3e})")
    return q, dps


def _log_constant(cfg: ChannelConfig) -> float:
    if cfg.m <= cfg.n:
        return float(gammaln(cfg.m + 1)) + norm_C(cfg.m, cfg.n, cfg.l)
    return (
        float(gammaln(cfg.n + 1))
        + norm_C(cfg.n, cfg.m, cfg.l)
        - barnes_g_int(cfg.m - cfg.n + 1).log
    )


def _mgf_equal_power(cfg: ChannelConfig, kappa: float) -> complex:
    d = cfg.min_dim
    q = cfg.q[0]
    matrix = [[kernel_t(j, k, kappa, q, cfg) for k in range(1, d + 1)] for j in range(1, d + 1)]
    det = det_complex(matrix)
    if det.singular:
        raise SingularMatrixError(f"equal-power determinant singular at kappa={kappa}")
    log_mod = float(gammaln(d + 1)) + norm_C(d, cfg.max_dim, cfg.l) + det.log_modulus
    return math.exp(log_mod) * det.phase


def _mgf_generic(cfg: ChannelConfig, q: Tuple[float, ...], kappa: float) -> complex:
    kernel = kernel_g if cfg.m <= cfg.n else kernel_h
    matrix = [[kernel(q_j, k, kappa, cfg) for k in range(1, cfg.m + 1)] for q_j in q]
    det = det_complex(matrix)
    if det.singular:
        raise SingularMatrixError(f"MGF determinant singular at kappa={kappa}")
    vand = log_vandermonde(q)
    log_k = log_prefactor_K(cfg.m, kappa)
    log_mod = _log_constant(cfg) + log_k.real - vand.log + det.log_modulus
    return math.exp(log_mod) * cmath.exp(1j * log_k.imag) * vand.sign * det.phase


def _mgf_generic_mp(cfg: ChannelConfig, q: Tuple[float, ...], kappa: float, dps: int) -> complex:
    rows = [[_kernel_mp(cfg, q_j, k, kappa, dps) for k in range(1, cfg.m + 1)] for q_j in q]
    det = det_complex_mp(rows, dps)
    with mpmath.workdps(dps):
        vand = mpmath.mpf(1)
        for j in range(len(q)):
            for k in range(j + 1, len(q)):
                vand *= mpmath.mpf(q[k]) - mpmath.mpf(q[j])
        ratio = complex(det / vand)
    return ratio * cmath.exp(_log_constant(cfg) + log_prefactor_K(cfg.m, kappa))


@lru_cache(maxsize=65536)
def _mgf_cached(cfg: ChannelConfig, kappa: float) -> complex:
    if cfg.is_equal_power:
        value = _mgf_equal_power(cfg, kappa)
    else:
        q, dps = _prepared(cfg)
        if dps is None:
            value = _mgf_generic(cfg, q, kappa)
        else:
            value = _mgf_generic_mp(cfg, q, kappa, dps)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise NonFiniteError(f"M({kappa}) is not finite for {cfg.label}")
    return value


# PUBLIC_INTERFACE
def mgf_eval(cfg: ChannelConfig, kappa: float) -> complex:
    """
    Exact MGF ``M(kappa)`` of the mutual information.

    Dispatches to the equal-power determinant (with ``m`` and ``n``
    interchanged when ``m > n``), the ``m <= n`` determinant or the ``m > n``
    determinant; near-duplicate ``q`` values are spread first, and allocations whose
    double-precision ``M(0)`` misses 1 by more than ``NORMALISATION_TOL`` (or
    whose conditioning is poor) are assembled in extended precision. Results are
    cached per ``(cfg, kappa)``.

    Args:
        cfg: Channel configuration
        kappa: Real transform variable

    Returns:
        complex: ``E[exp(i kappa I)]``

    Raises:
        KernelConsistencyError: If a kernel fails its quadrature cross-check

    Example:
        ```python
        cfg = ChannelConfig(m=1, n=1, l=2, q=(2.0,))
        mgf_eval(cfg, 0.0)  # (1+0j)
        ```
    """
    kappa = float(kappa)
    if not math.isfinite(kappa):
        raise DomainError(f"kappa must be finite (got {kappa})")
    return _mgf_cached(cfg, kappa + 0.0)


# PUBLIC_INTERFACE
def clear_caches() -> None:
    """Drop memoised MGF values (needed after changing numeric settings)."""
    _mgf_cached.cache_clear()
    _prepared.cache_clear()


def _first_crossing(cfg: ChannelConfig, threshold: float, lo: float) -> float:
    # |M(lo)| >= threshold on entry
    hi = max(settings.CUTOFF_START, 2.0 * lo)
    while abs(mgf_eval(cfg, hi)) >= threshold:
        lo, hi = hi, 2.0 * hi
        if hi > settings.CUTOFF_MAX:
            raise CutoffSearchError(
                f"|M(L)| stays above {threshold:g} up to L={settings.CUTOFF_MAX:g} for {cfg.label}"
            )
    while hi - lo > settings.CUTOFF_RESOLUTION:
        mid = 0.5 * (lo + hi)
        if abs(mgf_eval(cfg, mid)) < threshold:
            hi = mid
        else:
            lo = mid
    return hi


# PUBLIC_INTERFACE
def find_cutoff(cfg: ChannelConfig, threshold: Optional[float] = None) -> float:
    """
    Automatic cut-off length ``L`` with ``|M(L)| < threshold``.

    Doubles ``L`` from ``CUTOFF_START`` until ``|M(L)|`` drops below the
    threshold and bisects back to a crossing to within ``CUTOFF_RESOLUTION``.
    ``|M|`` need not decay monotonically, so the tail ``(L, 2L]`` is then
    sampled every ``CUTOFF_TAIL_STEP``; a sample at or above the threshold
    restarts the search from there. ``L`` is therefore only resolved to the
    bisection resolution and a bump narrower than the tail step can be missed.

    Args:
        cfg: Channel configuration
        threshold: Target modulus; ``CUTOFF_THRESHOLD`` by default

    Returns:
        float: The cut-off length

    Raises:
        CutoffSearchError: If ``L`` would exceed ``CUTOFF_MAX``
    """
    threshold = settings.CUTOFF_THRESHOLD if threshold is None else float(threshold)
    step = settings.CUTOFF_TAIL_STEP
    length = _first_crossing(cfg, threshold, 0.0)
    while True:
        tail = length + step * np.arange(1, int(math.ceil(length / step)) + 1)
        loud = [float(kappa) for kappa in tail if abs(mgf_eval(cfg, float(kappa))) >= threshold]
        if not loud:
            break
        length = _first_crossing(cfg, threshold, loud[-1])
    if length > settings.CUTOFF_MAX:
        raise CutoffSearchError(f"cut-off L={length:g} exceeds {settings.CUTOFF_MAX:g} for {cfg.label}")
    logger.info(f"Cut-off for {cfg.label}: L={length:.3f} (|M(L)| < {threshold:g})")
    return length


# PUBLIC_INTERFACE
def mgf_grid(
    cfg: ChannelConfig,
    cutoff: Cutoff = "auto",
    dkappa: Optional[float] = None,
    workers: Optional[int] = None,
    threshold: Optional[float] = None,
) -> MgfGrid:
    """
    Sample the MGF on the symmetric grid ``-L, ..., -dk, 0, dk, ..., L``.

    Only ``kappa >= 0`` is evaluated; the negative half follows from
    ``M(-kappa) = conj(M(kappa))``. Evaluation is an order-preserving map, so
    the result does not depend on the number of workers.

    Args:
        cfg: Channel configuration
        cutoff: ``"auto"`` or the cut-off length ``L``
        dkappa: Grid step; ``DEFAULT_DKAPPA`` by default
        workers: Worker threads; ``WORKERS`` by default
        threshold: Modulus target of the automatic cut-off search

    Returns:
        MgfGrid: ``2 round(L / dk) + 1`` samples

    Raises:
        CutoffSearchError: If the automatic search fails
    """
    dk = settings.DEFAULT_DKAPPA if dkappa is None else float(dkappa)
    if not math.isfinite(dk) or dk <= 0.0:
        raise DomainError(f"dkappa must be positive (got {dk})")
    if isinstance(cutoff, str):
        if cutoff != "auto":
            raise DomainError(f"cutoff must be 'auto' or a number (got {cutoff!r})")
        length = find_cutoff(cfg, threshold)
    else:
        length = float(cutoff)
        if not math.isfinite(length) or length <= 0.0:
            raise DomainError(f"cutoff must be positive (got {length})")

    half = max(1, int(round(length / dk)))
    positive = dk * np.arange(0, half + 1, dtype=float)
    with ThreadPoolExecutor(max_workers=workers_or_default(workers)) as pool:
        values_pos = np.fromiter(pool.map(partial(mgf_eval, cfg), positive), dtype=complex, count=positive.size)
    kappas = np.concatenate([-positive[:0:-1], positive])
    values = np.concatenate([np.conj(values_pos[:0:-1]), values_pos])
    return MgfGrid(cfg=cfg, cutoff_L=half * dk, step_dk=dk, kappas=kappas, values=values)


def _stencil_samples(cfg: ChannelConfig, h: float) -> np.ndarray:
    return np.array([mgf_eval(cfg, offset * h) for offset in _OFFSETS])


def _derivatives(samples: np.ndarray, h: float) -> Tuple[complex, complex, complex]:
    return (
        complex(np.dot(_D1, samples)) / h,
        complex(np.dot(_D2, samples)) / h ** 2,
        complex(np.dot(_D3, samples)) / h ** 3,
    )


def _central_derivatives(cfg: ChannelConfig, h: float, shift: float) -> Tuple[complex, complex, complex]:
    coarse = _stencil_samples(cfg, h) * np.exp(-1j * shift * _OFFSETS * h)
    fine = _stencil_samples(cfg, h / 2.0) * np.exp(-1j * shift * _OFFSETS * h / 2.0)
    c1, c2, c3 = _derivatives(coarse, h)
    f1, f2, f3 = _derivatives(fine, h / 2.0)
    return (64.0 * f1 - c1) / 63.0, (64.0 * f2 - c2) / 63.0, (16.0 * f3 - c3) / 15.0


def _real_moment(value: complex, order: int, cfg: ChannelConfig) -> float:
    tol = settings.MOMENT_RESIDUE_TOL * max(1.0, abs(value.real))
    if not math.isfinite(value.real) or abs(value.imag) > tol:
        raise DifferentiationAccuracyError(
            f"moment of order {order} for {cfg.label} has imaginary residue {value.imag:.3e}"
        )
    return value.real


# PUBLIC_INTERFACE
def moments(cfg: ChannelConfig, step: Optional[float] = None) -> MomentSet:
    """
    First three moments of the mutual information.

    Central 7-point differences of ``M`` along real ``kappa`` at steps ``h``
    and ``h/2`` with one Richardson step. The derivatives are taken of
    ``exp(-i kappa mu) M(kappa)`` with ``mu`` a first estimate of the mean,
    which yields central moments without cancellation; raw moments are
    rebuilt from them. Each moment must have an imaginary residue below
    ``MOMENT_RESIDUE_TOL`` (relative to its size when above one).

    Args:
        cfg: Channel configuration
        step: Differentiation step ``h``; ``MOMENT_STEP`` by default

    Returns:
        MomentSet: ``mu1``, ``mu2``, ``mu3``, variance and skewness (nats)

    Raises:
        DifferentiationAccuracyError: On a residue violation or a
            non-positive variance
    """
    h = settings.MOMENT_STEP if step is None else float(step)
    d1, _, _ = _central_derivatives(cfg, h, 0.0)
    mean_estimate = _real_moment(-1j * d1, 1, cfg)

    c1, c2, c3 = _central_derivatives(cfg, h, mean_estimate)
    e1 = _real_moment(-1j * c1, 1, cfg)
    e2 = _real_moment(-c2, 2, cfg)
    e3 = _real_moment(1j * c3, 3, cfg)

    mu1 = mean_estimate + e1
    sigma2 = e2 - e1 * e1
    central3 = e3 - 3.0 * e1 * e2 + 2.0 * e1 ** 3
    if not sigma2 > 0.0:
        raise DifferentiationAccuracyError(f"non-positive variance {sigma2:.3e} for {cfg.label}")
    mu2 = sigma2 + mu1 * mu1
    mu3 = central3 + 3.0 * mu1 * sigma2 + mu1 ** 3
    return MomentSet(mu1=mu1, mu2=mu2, mu3=mu3, sigma2=sigma2, skewness=central3 / sigma2 ** 1.5)


# PUBLIC_INTERFACE
def ergodic_capacity(cfg: ChannelConfig) -> float:
    """Ergodic capacity, the mean mutual information in nats."""
    return moments(cfg).mu1


# PUBLIC_INTERFACE
def high_snr_capacity(cfg: ChannelConfig) -> float:
    """
    High-SNR approximation of the equal-power ergodic capacity.

    ``m ln(rho/m) + n psi(n) - l psi(l) - (n-m) psi(n-m) + (l-m) psi(l-m)``
    with ``rho`` the total power.

    Args:
        cfg: Equal-power channel with ``m < n``

    Returns:
        float: Approximate capacity in nats

    Raises:
        DomainError: If the allocation is unequal or ``m >= n``
    """
    if not cfg.is_equal_power:
        raise DomainError("high_snr_capacity requires equal power allocation")
    if cfg.m >= cfg.n:
        raise DomainError(f"high_snr_capacity requires m < n (got m={cfg.m}, n={cfg.n})")
    m, n, l = cfg.m, cfg.n, cfg.l  # noqa: E741
    return (
        m * math.log(cfg.rho / m)
        + n * digamma(n)
        - l * digamma(l)
        - (n - m) * digamma(n - m)
        + (l - m) * digamma(l - m)
    )
