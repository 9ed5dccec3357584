"""
Distribution curves of the mutual information.

This module provides the moment-matched Gaussian and Weibull approximations
and the numerical Fourier inversion of a sampled MGF into PDF, outage
probability (CDF) and survival function (SF) curves.
"""

import logging
import math
from typing import Any, Dict, Literal, Optional, Tuple

import numpy as np
from scipy import stats
from scipy.optimize import brentq
from scipy.special import gammaln

from jacobi_mimo import __app_name__
from jacobi_mimo.config import settings
from jacobi_mimo.core.mgf import Cutoff, mgf_grid, moments
from jacobi_mimo.errors import (
    DomainError,
    InadequateGridError,
    InversionResidueError,
    NoBracketError,
)
from jacobi_mimo.schemas import (
    ChannelConfig,
    CurveKind,
    CurveMethod,
    DistCurve,
    MgfGrid,
    MomentSet,
    WeibullParams,
)


logger = logging.getLogger(__app_name__)

CurveTriple = Tuple[DistCurve, DistCurve, DistCurve]

SHAPE_BRACKET = (0.1, 50.0)
SHAPE_XTOL = 1e-12
MOMENT_MATCH_TOL = 1e-10


def _as_grid(values: Any) -> np.ndarray:
    grid = np.atleast_1d(np.asarray(values, dtype=float))
    if grid.ndim != 1 or grid.size == 0 or not np.all(np.isfinite(grid)):
        raise DomainError("evaluation grid must be a non-empty 1-d array of finite values")
    return grid


# PUBLIC_INTERFACE
def default_rate_grid(mom: MomentSet, points: Optional[int] = None) -> np.ndarray:
    """
    Default evaluation grid ``[max(0, mu1 - k sigma), mu1 + k sigma]``.

    Args:
        mom: Moments of the mutual information
        points: Number of points; ``INVERSION_POINTS`` by default

    Returns:
        np.ndarray: Equally spaced rates in nats, ``k = INVERSION_SIGMAS``
    """
    points = settings.INVERSION_POINTS if points is None else int(points)
    spread = settings.INVERSION_SIGMAS * mom.sigma
    return np.linspace(max(0.0, mom.mu1 - spread), mom.mu1 + spread, points)


# PUBLIC_INTERFACE
def gaussian_curves(mu1: float, sigma2: float, grid: Any) -> CurveTriple:
    """
    Gaussian PDF, outage probability and survival function.

    Args:
        mu1: Mean in nats
        sigma2: Variance, positive
        grid: Rates at which to evaluate

    Returns:
        CurveTriple: ``(pdf, cdf, sf)`` with ``cdf + sf == 1`` exactly

    Example:
        ```python
        pdf, cdf, sf = gaussian_curves(1.0, 0.25, [1.0])
        cdf.values  # array([0.5])
        ```
    """
    if not sigma2 > 0.0:
        raise DomainError(f"sigma2 must be positive (got {sigma2})")
    rates = _as_grid(grid)
    law = stats.norm(loc=mu1, scale=math.sqrt(sigma2))
    cdf = law.cdf(rates)
    meta = {"mu1": mu1, "sigma2": sigma2}
    return (
        DistCurve(grid=rates, values=law.pdf(rates), kind=CurveKind.PDF, method=CurveMethod.GAUSSIAN, meta=meta),
        DistCurve(grid=rates, values=cdf, kind=CurveKind.CDF, method=CurveMethod.GAUSSIAN, meta=meta),
        DistCurve(grid=rates, values=1.0 - cdf, kind=CurveKind.SF, method=CurveMethod.GAUSSIAN, meta=meta),
    )


def _weibull_ratio(shape: float) -> float:
    return math.exp(2.0 * gammaln(1.0 + 1.0 / shape) - gammaln(1.0 + 2.0 / shape))


# PUBLIC_INTERFACE
def weibull_fit(mu1: float, mu2: float) -> WeibullParams:
    """
    Moment-matched Weibull parameters.

    Solves ``mu1^2 / mu2 = Gamma(1 + 1/beta)^2 / Gamma(1 + 2/beta)`` for the
    shape with Brent's method on ``[0.1, 50]`` (the ratio is monotone in
    ``beta``), then sets ``lambda = mu1 / Gamma(1 + 1/beta)``.

    Args:
        mu1: First raw moment, positive
        mu2: Second raw moment, ``mu2 > mu1^2``

    Returns:
        WeibullParams: Shape and scale

    Raises:
        DomainError: If the moments do not describe a positive variable with
            positive variance
        NoBracketError: If the target ratio is outside the bracketed range

    Example:
        ```python
        weibull_fit(1.0, 2.0)  # beta_shape=1.0, lambda_scale=1.0
        ```
    """
    if not (mu1 > 0.0 and mu2 > mu1 * mu1):
        raise DomainError(f"need 0 < mu1^2 < mu2 (got mu1={mu1}, mu2={mu2})")
    target = mu1 * mu1 / mu2
    lo, hi = SHAPE_BRACKET
    f_lo = _weibull_ratio(lo) - target
    f_hi = _weibull_ratio(hi) - target
    if f_lo * f_hi > 0.0:
        raise NoBracketError(
            f"ratio {target:.6g} outside [{_weibull_ratio(lo):.6g}, {_weibull_ratio(hi):.6g}] "
            f"reachable for shapes in [{lo}, {hi}]"
        )
    shape = float(brentq(lambda b: _weibull_ratio(b) - target, lo, hi, xtol=SHAPE_XTOL))
    if abs(_weibull_ratio(shape) - target) > MOMENT_MATCH_TOL:
        raise NoBracketError(f"Weibull shape {shape} misses the moment ratio {target:.12g}")
    scale = mu1 / math.exp(gammaln(1.0 + 1.0 / shape))
    return WeibullParams(beta_shape=shape, lambda_scale=scale)


# PUBLIC_INTERFACE
def weibull_curves(params: WeibullParams, grid: Any) -> CurveTriple:
    """
    Weibull PDF, outage probability and survival function.

    The support is ``I >= 0``: every curve is 0 (CDF, PDF) or 1 (SF) below it.

    Args:
        params: Fitted shape and scale
        grid: Rates at which to evaluate

    Returns:
        CurveTriple: ``(pdf, cdf, sf)``
    """
    rates = _as_grid(grid)
    law = stats.weibull_min(c=params.beta_shape, scale=params.lambda_scale)
    meta = {"beta_shape": params.beta_shape, "lambda_scale": params.lambda_scale}
    return (
        DistCurve(grid=rates, values=law.pdf(rates), kind=CurveKind.PDF, method=CurveMethod.WEIBULL, meta=meta),
        DistCurve(grid=rates, values=law.cdf(rates), kind=CurveKind.CDF, method=CurveMethod.WEIBULL, meta=meta),
        DistCurve(grid=rates, values=law.sf(rates), kind=CurveKind.SF, method=CurveMethod.WEIBULL, meta=meta),
    )


# PUBLIC_INTERFACE
def skewness_advisory(mom: MomentSet, threshold: Optional[float] = None) -> Literal["gaussian", "weibull", "undecided"]:
    """
    Suggest an approximation from the skewness.

    Near-zero skewness favours the Gaussian, a pronounced one the Weibull
    law; the band in between is left undecided. Advisory only: the KL
    comparison decides.

    Args:
        mom: Moments of the mutual information
        threshold: Skewness magnitude treated as near zero;
            ``SKEWNESS_ADVISORY_THRESHOLD`` by default
    """
    threshold = settings.SKEWNESS_ADVISORY_THRESHOLD if threshold is None else float(threshold)
    magnitude = abs(mom.skewness)
    if magnitude <= threshold:
        return "gaussian"
    if magnitude >= 2.0 * threshold:
        return "weibull"
    return "undecided"


# PUBLIC_INTERFACE
def inversion_grid(
    cfg: ChannelConfig,
    cutoff: Cutoff = "auto",
    dkappa: Optional[float] = None,
    workers: Optional[int] = None,
) -> MgfGrid:
    """
    MGF grid for Fourier inversion.

    Same as ``mgf_grid`` but the automatic cut-off targets
    ``INVERSION_CUTOFF_THRESHOLD``, keeping truncation ringing under the PDF
    tolerance.
    """
    return mgf_grid(cfg, cutoff, dkappa, workers, threshold=settings.INVERSION_CUTOFF_THRESHOLD)


# PUBLIC_INTERFACE
def gaussian_mgf_grid(mu: float, sigma: float, cutoff: float, dkappa: float) -> MgfGrid:
    """
    Grid of the analytic transform ``exp(i kappa mu - sigma^2 kappa^2 / 2)``.

    ``sigma = 0`` gives the pure phase ``exp(i kappa mu)`` of a point mass.
    """
    if sigma < 0.0 or cutoff <= 0.0 or dkappa <= 0.0:
        raise DomainError("need sigma >= 0, cutoff > 0 and dkappa > 0")
    half = max(1, int(round(cutoff / dkappa)))
    kappas = dkappa * np.arange(-half, half + 1, dtype=float)
    values = np.exp(1j * kappas * mu - 0.5 * (sigma * kappas) ** 2)
    return MgfGrid(cutoff_L=half * dkappa, step_dk=dkappa, kappas=kappas, values=values)


def _grid_meta(grid: MgfGrid, **extra: Any) -> Dict[str, Any]:
    meta: Dict[str, Any] = {"cutoff_L": grid.cutoff_L, "dkappa": grid.step_dk}
    if grid.cfg is not None:
        meta["cfg"] = grid.cfg.label
    meta.update(extra)
    return meta


def _resolve_rates(grid: MgfGrid, rates: Any) -> np.ndarray:
    if rates is not None:
        return _as_grid(rates)
    if grid.cfg is None:
        raise DomainError("an explicit rate grid is required for analytic MGF grids")
    return default_rate_grid(moments(grid.cfg))


def _check_residue(values: np.ndarray, what: str) -> np.ndarray:
    residue = float(np.max(np.abs(values.imag)))
    if residue >= settings.INVERSION_RESIDUE_TOL:
        raise InversionResidueError(f"{what} has imaginary residue {residue:.3e}")
    return values.real


# PUBLIC_INTERFACE
def fourier_pdf(grid: MgfGrid, rates: Any = None, strict: bool = True) -> DistCurve:
    """
    PDF by discretised Fourier inversion, ``(1/2 pi) sum exp(-i kappa I) M(kappa) dk``.

    Raw values are returned; ``DistCurve.clipped`` gives the non-negative
    version. The imaginary residue must stay below ``INVERSION_RESIDUE_TOL``.

    Args:
        grid: Sampled MGF
        rates: Evaluation points in nats; the default rate grid of the
            channel's moments when omitted
        strict: Raise on ringing below ``-RINGING_TOL``; when False the
            excursion is only logged

    Returns:
        DistCurve: PDF with ``meta["min_raw"]`` holding the smallest raw value

    Raises:
        InversionResidueError: On a residue violation
        InadequateGridError: On ringing beyond the tolerance in strict mode
    """
    rates = _resolve_rates(grid, rates)
    phases = np.exp(-1j * np.outer(rates, grid.kappas))
    values = _check_residue(phases @ grid.values * (grid.step_dk / (2.0 * math.pi)), "PDF")
    min_raw = float(values.min())
    if min_raw < -settings.RINGING_TOL:
        message = (
            f"PDF rings down to {min_raw:.3e} for L={grid.cutoff_L:g}, dkappa={grid.step_dk:g}"
        )
        if strict:
            raise InadequateGridError(message)
        logger.warning(message)
    return DistCurve(
        grid=rates,
        values=values,
        kind=CurveKind.PDF,
        method=CurveMethod.FOURIER,
        meta=_grid_meta(grid, min_raw=min_raw),
    )


def _outage(grid: MgfGrid, rates: np.ndarray) -> np.ndarray:
    kappas = grid.kappas
    centre = kappas.size // 2
    safe = np.where(kappas == 0.0, 1.0, kappas)
    factors = (np.exp(-1j * np.outer(rates, kappas)) - 1.0) / safe
    factors[:, centre] = -1j * rates
    values = 1j * (factors @ grid.values) * (grid.step_dk / (2.0 * math.pi))
    return _check_residue(values, "CDF")


def _check_cdf(values: np.ndarray, grid: MgfGrid, strict: bool) -> None:
    slack = settings.RINGING_TOL
    problems = []
    if values.min() < -slack or values.max() > 1.0 + slack:
        problems.append(f"range [{values.min():.3e}, {values.max():.6f}]")
    steps = np.diff(values)
    if steps.size and steps.min() < -settings.MONOTONE_TOL:
        problems.append(f"decrease of {-steps.min():.3e}")
    if problems:
        message = f"CDF {' and '.join(problems)} for L={grid.cutoff_L:g}, dkappa={grid.step_dk:g}"
        if strict:
            raise InadequateGridError(message)
        logger.warning(message)


# PUBLIC_INTERFACE
def fourier_cdf(grid: MgfGrid, rates: Any = None, strict: bool = True) -> DistCurve:
    """
    Outage probability by Fourier inversion.

    ``P_out(R) = (i / 2 pi) sum (exp(-i kappa R) - 1) / kappa M(kappa) dk``;
    the ``kappa = 0`` factor is replaced by its limit ``-i R``.

    Args:
        grid: Sampled MGF
        rates: Target rates in nats; the default rate grid when omitted
        strict: Raise on range or monotonicity violations

    Returns:
        DistCurve: CDF curve

    Raises:
        InversionResidueError: On a residue violation
        InadequateGridError: If values leave ``[0, 1]`` by more than
            ``RINGING_TOL`` or decrease by more than ``MONOTONE_TOL``
    """
    rates = _resolve_rates(grid, rates)
    values = _outage(grid, rates)
    _check_cdf(values, grid, strict)
    return DistCurve(grid=rates, values=values, kind=CurveKind.CDF, method=CurveMethod.FOURIER, meta=_grid_meta(grid))


# PUBLIC_INTERFACE
def fourier_sf(grid: MgfGrid, rates: Any = None, strict: bool = True) -> DistCurve:
    """Survival function ``1 - P_out(R)`` by Fourier inversion."""
    cdf = fourier_cdf(grid, rates, strict)
    return DistCurve(
        grid=cdf.grid,
        values=1.0 - cdf.values,
        kind=CurveKind.SF,
        method=CurveMethod.FOURIER,
        meta=cdf.meta,
    )


# PUBLIC_INTERFACE
def fourier_curves(grid: MgfGrid, rates: Any = None, strict: bool = True) -> CurveTriple:
    """PDF, CDF and SF by Fourier inversion on one rate grid."""
    rates = _resolve_rates(grid, rates)
    cdf = fourier_cdf(grid, rates, strict)
    sf = DistCurve(grid=rates, values=1.0 - cdf.values, kind=CurveKind.SF, method=CurveMethod.FOURIER, meta=cdf.meta)
    return fourier_pdf(grid, rates, strict), cdf, sf


# PUBLIC_INTERFACE
def approximation_curves(mom: MomentSet, grid: Any) -> Dict[str, CurveTriple]:
    """Gaussian and Weibull curve triples for one set of moments."""
    return {
        CurveMethod.GAUSSIAN.value: gaussian_curves(mom.mu1, mom.sigma2, grid),
        CurveMethod.WEIBULL.value: weibull_curves(weibull_fit(mom.mu1, mom.mu2), grid),
    }
