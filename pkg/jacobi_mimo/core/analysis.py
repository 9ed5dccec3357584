"""
Comparison metrics and experiment drivers.

This module provides the masked KL divergence used to score distribution
curves against Monte Carlo histograms and the drivers that build comparison
tables: approximation reports, capacity sweeps over total power, robustness
scans over the inversion grid, the high-SNR comparison and the fixed-trace
allocation study.
"""

import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from jacobi_mimo import __app_name__
from jacobi_mimo.config import settings
from jacobi_mimo.core.distributions import (
    approximation_curves,
    fourier_curves,
    fourier_pdf,
    inversion_grid,
    skewness_advisory,
)
from jacobi_mimo.core.mgf import (
    Cutoff,
    ergodic_capacity,
    high_snr_capacity,
    mgf_grid,
    moments,
)
from jacobi_mimo.core.montecarlo import empirical_curves, mc_capacity, run_ensemble
from jacobi_mimo.errors import DomainError, EmptyMaskError, NumericalConsistencyError
from jacobi_mimo.schemas import (
    ApproximationReport,
    ChannelConfig,
    CurveKind,
    CurveMethod,
    DistCurve,
    KlReport,
    McEnsemble,
    MomentSet,
    ScanRow,
    SweepResult,
)


logger = logging.getLogger(__app_name__)

CANDIDATE_FLOOR = 1e-300
MC_REFERENCE = CurveMethod.MONTE_CARLO.value

# per preset, (cutoff L values, dkappa values) slices of the inversion-grid study
ScanSlice = Tuple[Tuple[float, ...], Tuple[float, ...]]
ROBUSTNESS_SLICES: Dict[str, Tuple[ScanSlice, ...]] = {
    "m3n6-strong": (((25.0,), (0.05, 0.5, 1.0)), ((22.0, 28.0, 34.0), (0.05,))),
    "m4n3": (((15.0,), (0.05, 0.5, 1.0)), ((8.0, 14.0, 20.0), (0.05,))),
    "m4n3-l12": (((15.0,), (0.05, 0.5, 1.0)), ((8.0, 14.0, 20.0), (0.05,))),
}


def db_to_linear(rho_db: float) -> float:
    """Power ratio for a value in decibels, ``10^(rho_db / 10)``."""
    return 10.0 ** (float(rho_db) / 10.0)


# PUBLIC_INTERFACE
def kl_divergence(
    ref: DistCurve,
    cand: DistCurve,
    mask_threshold: Optional[float] = None,
    delta_i: Optional[float] = None,
    reference: Optional[str] = None,
    candidate: Optional[str] = None,
    generalised: bool = False,
) -> KlReport:
    """
    Masked discrete KL divergence of a candidate PDF from a reference PDF.

    Both curves are sampled on a grid of spacing ``delta_i`` spanning the
    reference; points where the reference is below ``mask_threshold`` are
    dropped. The value is ``sum p ln(p / c) delta_i`` over the mask. With
    ``generalised`` the masked-mass difference ``sum (c - p) delta_i`` is
    added, which makes every term non-negative. Candidate values are floored
    at 1e-300; a plain sum below zero (the candidate carries more mass on the
    mask than the reference) is reported as 0.

    Args:
        ref: Reference PDF, usually the Monte Carlo histogram
        cand: Candidate PDF
        mask_threshold: Reference density kept in the sum; ``KL_MASK_THRESHOLD`` by default
        delta_i: Grid spacing in nats; ``KL_DELTA_I`` by default
        reference: Reference id; the curve method by default
        candidate: Candidate id; the curve method by default
        generalised: Add the masked-mass difference to every term

    Returns:
        KlReport: The divergence and the number of masked points

    Raises:
        EmptyMaskError: If no reference value reaches the threshold
    """
    if ref.kind is not CurveKind.PDF or cand.kind is not CurveKind.PDF:
        raise DomainError("KL divergence compares PDF curves")
    threshold = settings.KL_MASK_THRESHOLD if mask_threshold is None else float(mask_threshold)
    width = settings.KL_DELTA_I if delta_i is None else float(delta_i)
    start, stop = float(ref.grid.min()), float(ref.grid.max())
    grid = start + width * np.arange(int(math.floor((stop - start) / width + 0.5)) + 1, dtype=float)

    p = ref.clipped().on(grid)
    mask = p >= threshold
    if not np.any(mask):
        raise EmptyMaskError(f"no reference density reaches {threshold:g}")
    p = p[mask]
    c = np.maximum(cand.clipped().on(grid)[mask], CANDIDATE_FLOOR)
    terms = p * np.log(p / c)
    if generalised:
        terms += c - p
    dkl = float(np.sum(terms) * width)
    if dkl < 0.0:
        logger.debug(f"Negative masked KL {dkl:.3e} for {cand.method.value} reported as 0")
    return KlReport(
        reference=reference or ref.method.value,
        candidate=candidate or cand.method.value,
        dkl=max(dkl, 0.0),
        mask_threshold=threshold,
        delta_i=width,
        points=int(mask.sum()),
    )


# PUBLIC_INTERFACE
def approximation_report(
    cfg: ChannelConfig,
    mc: McEnsemble,
    cutoff: Cutoff = "auto",
    dkappa: Optional[float] = None,
    delta_i: Optional[float] = None,
    mask_threshold: Optional[float] = None,
    workers: Optional[int] = None,
) -> ApproximationReport:
    """
    Score the Gaussian, Weibull and Fourier-inverted PDFs against Monte Carlo.

    Args:
        cfg: Channel configuration
        mc: Monte Carlo ensemble of the same channel
        cutoff: Inversion cut-off ``L`` or ``"auto"``
        dkappa: Inversion grid step
        delta_i: Histogram bin width
        mask_threshold: KL mask threshold
        workers: Worker threads for the MGF grid

    Returns:
        ApproximationReport: One KlReport per method plus the skewness advisory

    Example:
        ```python
        report = approximation_report(cfg, run_ensemble(cfg))
        report.dkl("weibull")
        ```
    """
    if mc.cfg != cfg:
        raise DomainError(f"ensemble was simulated for {mc.cfg.label}, not {cfg.label}")
    mom = moments(cfg)
    reference = empirical_curves(mc, delta_i)[0].as_dist_curve()
    rates = reference.grid

    candidates = {name: curves[0] for name, curves in approximation_curves(mom, rates).items()}
    grid = inversion_grid(cfg, cutoff, dkappa, workers)
    candidates[CurveMethod.FOURIER.value] = fourier_pdf(grid, rates)

    reports = {
        name: kl_divergence(reference, curve, mask_threshold, delta_i, MC_REFERENCE, name)
        for name, curve in candidates.items()
    }
    for name, report in reports.items():
        logger.info(f"KL(monte-carlo || {name}) for {cfg.label}: {report.dkl:.6g}")
    return ApproximationReport(cfg=cfg, moments=mom, reports=reports, advisory=skewness_advisory(mom))


def _normalised_ratios(m: int, ratios: Sequence[float]) -> Tuple[float, ...]:
    values = [float(r) for r in ratios]
    if len(values) != m:
        raise DomainError(f"expected {m} allocation ratios, got {len(values)}")
    if any(not math.isfinite(r) or r < 0.0 for r in values):
        raise DomainError("allocation ratios must be non-negative and finite")
    total = math.fsum(values)
    if total <= 0.0:
        raise DomainError("allocation ratios must not all be zero")
    return tuple(r / total for r in values)


# PUBLIC_INTERFACE
def capacity_sweep(
    m: int,
    n: int,
    l: int,  # noqa: E741
    ratios: Sequence[float],
    rho_db_grid: Sequence[float],
    mc_samples: Optional[int] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
) -> SweepResult:
    """
    Ergodic capacity against total power for a fixed allocation ratio.

    For every ``rho`` (dB, power convention) the powers are
    ``q_j = ratio_j 10^(rho / 10)``. Modes with a zero ratio are not excited
    and the channel is evaluated with the remaining transmit modes.

    Args:
        m: Transmit modes
        n: Receive modes
        l: Fiber channels
        ratios: ``m`` non-negative ratios, normalised to sum 1
        rho_db_grid: Total powers in dB, sorted before use
        mc_samples: Add Monte Carlo capacities with this many samples
        seed: Monte Carlo master seed
        workers: Monte Carlo worker threads

    Returns:
        SweepResult: Capacities in nats

    Raises:
        NumericalConsistencyError: If the capacity is not strictly increasing
    """
    ratio = _normalised_ratios(m, ratios)
    active = tuple(r for r in ratio if r > 0.0)
    if len(active) < m:
        logger.info(f"Dropping {m - len(active)} unexcited mode(s) from the sweep")
    rho_db = sorted(float(r) for r in rho_db_grid)
    if not rho_db or not all(math.isfinite(r) for r in rho_db):
        raise DomainError("rho grid must be non-empty and finite")

    capacity: List[float] = []
    mc_mean: List[float] = []
    mc_err: List[float] = []
    for value in rho_db:
        rho = db_to_linear(value)
        cfg = ChannelConfig(m=len(active), n=n, l=l, q=tuple(r * rho for r in active))
        capacity.append(ergodic_capacity(cfg))
        if mc_samples:
            mean, err = mc_capacity(run_ensemble(cfg, mc_samples, seed, workers))
            mc_mean.append(mean)
            mc_err.append(err)
        logger.debug(f"Capacity at {value:g} dB for {cfg.label}: {capacity[-1]:.10g}")

    steps = np.diff(capacity)
    if steps.size and steps.min() <= 0.0:
        raise NumericalConsistencyError(
            f"capacity not strictly increasing in rho for ratio {ratio} (smallest step {steps.min():.3e})"
        )
    return SweepResult(
        m=m,
        n=n,
        l=l,
        allocation_ratio=ratio,
        rho_db=rho_db,
        capacity=capacity,
        mc_capacity=mc_mean or None,
        mc_stderr=mc_err or None,
    )


# PUBLIC_INTERFACE
def robustness_scan(
    cfg: ChannelConfig,
    cutoffs: Sequence[float],
    dkappas: Sequence[float],
    mc: McEnsemble,
    delta_i: Optional[float] = None,
    mask_threshold: Optional[float] = None,
    workers: Optional[int] = None,
) -> List[ScanRow]:
    """
    KL of the Fourier-inverted PDF against Monte Carlo per ``(L, dkappa)``.

    Inversion runs in non-strict mode so a ringing grid is reported (via
    ``min_raw``) rather than aborting the scan.

    Args:
        cfg: Channel configuration
        cutoffs: Cut-off lengths ``L``
        dkappas: Grid steps
        mc: Monte Carlo reference ensemble
        delta_i: Histogram bin width
        mask_threshold: KL mask threshold
        workers: Worker threads for the MGF grids

    Returns:
        List[ScanRow]: One row per combination, cut-off major
    """
    reference = empirical_curves(mc, delta_i)[0].as_dist_curve()
    rows = []
    for cutoff in cutoffs:
        for dk in dkappas:
            grid = mgf_grid(cfg, float(cutoff), float(dk), workers)
            pdf = fourier_pdf(grid, reference.grid, strict=False)
            report = kl_divergence(reference, pdf, mask_threshold, delta_i, MC_REFERENCE, CurveMethod.FOURIER.value)
            rows.append(
                ScanRow(
                    cutoff_L=grid.cutoff_L,
                    step_dk=grid.step_dk,
                    dkl=report.dkl,
                    min_raw=pdf.meta["min_raw"],
                    points=grid.kappas.size,
                )
            )
            logger.info(f"Scan L={grid.cutoff_L:g}, dkappa={grid.step_dk:g}: KL={report.dkl:.6g}")
    return rows


# PUBLIC_INTERFACE
def high_snr_comparison(
    m: int, n: int, l: int, rho_db_grid: Sequence[float]  # noqa: E741
) -> List[Dict[str, float]]:
    """
    Exact equal-power capacity against the high-SNR formula.

    Returns:
        List[Dict[str, float]]: Rows with ``rho_db``, ``exact``, ``high_snr``
        and ``rel_error`` (relative to the exact value)
    """
    rows = []
    for value in sorted(float(r) for r in rho_db_grid):
        rho = db_to_linear(value)
        cfg = ChannelConfig(m=m, n=n, l=l, q=tuple([rho / m] * m))
        exact = ergodic_capacity(cfg)
        approx = high_snr_capacity(cfg)
        rows.append({"rho_db": value, "exact": exact, "high_snr": approx, "rel_error": abs(approx - exact) / exact})
    return rows


# PUBLIC_INTERFACE
def allocation_comparison(
    m: int,
    n: int,
    l: int,  # noqa: E741
    q_sets: Sequence[Sequence[float]],
    rates: Optional[Sequence[float]] = None,
    mc_samples: Optional[int] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
) -> List[Dict[str, object]]:
    """
    Fourier-inverted PDF, CDF and SF of several power allocations.

    All allocations share one rate grid (covering every allocation's default
    grid when ``rates`` is omitted) so the curves can be overlaid.

    Args:
        m: Transmit modes
        n: Receive modes
        l: Fiber channels
        q_sets: Power vectors to compare, usually with a common trace
        rates: Shared rate grid in nats
        mc_samples: Also attach Monte Carlo histograms with this many samples
        seed: Monte Carlo master seed
        workers: Worker threads

    Returns:
        List[Dict[str, object]]: Per allocation the ``cfg``, its ``moments``,
        the ``curves`` triple and, when requested, the ``mc`` curve triple
    """
    configs = [ChannelConfig(m=m, n=n, l=l, q=tuple(q)) for q in q_sets]
    stats: List[MomentSet] = [moments(cfg) for cfg in configs]
    if rates is None:
        low = min(max(0.0, s.mu1 - settings.INVERSION_SIGMAS * s.sigma) for s in stats)
        high = max(s.mu1 + settings.INVERSION_SIGMAS * s.sigma for s in stats)
        grid = np.linspace(low, high, settings.INVERSION_POINTS)
    else:
        grid = np.asarray(rates, dtype=float)

    results: List[Dict[str, object]] = []
    for cfg, mom in zip(configs, stats):
        entry: Dict[str, object] = {
            "cfg": cfg,
            "moments": mom,
            "curves": fourier_curves(inversion_grid(cfg, workers=workers), grid),
        }
        if mc_samples:
            ensemble = run_ensemble(cfg, mc_samples, seed, workers)
            entry["mc"] = tuple(curve.as_dist_curve() for curve in empirical_curves(ensemble))
        results.append(entry)
    return results
