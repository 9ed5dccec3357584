"""
Tests for comparison metrics and experiment drivers.

This module contains tests for the masked KL divergence and for the drivers
behind the comparison tables: approximation reports, capacity sweeps,
robustness scans, the high-SNR comparison and allocation studies.
"""

import numpy as np
import pytest
from scipy import stats

from jacobi_mimo.core.analysis import (
    ROBUSTNESS_SLICES,
    allocation_comparison,
    approximation_report,
    capacity_sweep,
    db_to_linear,
    high_snr_comparison,
    kl_divergence,
    robustness_scan,
)
from jacobi_mimo.core.mgf import ergodic_capacity
from jacobi_mimo.errors import DomainError, EmptyMaskError
from jacobi_mimo.schemas import REFERENCE_PRESETS, ChannelConfig, CurveKind, CurveMethod, DistCurve, McEnsemble


def _normal_pdf(loc: float, method: CurveMethod = CurveMethod.MONTE_CARLO) -> DistCurve:
    grid = np.linspace(-6.0, 6.0, 1201)
    return DistCurve(grid=grid, values=stats.norm(loc, 1.0).pdf(grid), kind=CurveKind.PDF, method=method)


def test_db_to_linear():
    """
    Test the decibel conversion.
    """
    assert db_to_linear(0.0) == 1.0
    assert db_to_linear(10.0) == pytest.approx(10.0)
    assert db_to_linear(-10.0) == pytest.approx(0.1)


def test_kl_divergence_of_identical_curves():
    """
    Test that a curve has zero divergence from itself.
    """
    curve = _normal_pdf(0.0)
    report = kl_divergence(curve, curve)
    assert report.dkl == 0.0
    assert report.reference == report.candidate == "monte-carlo"
    assert report.points > 0


def test_kl_divergence_of_shifted_gaussians():
    """
    Test the masked divergence against the unmasked value ``d^2 / 2``.

    The reference mask is symmetric, so the plain sum is ``d^2 / 2`` times
    the masked reference mass.
    """
    report = kl_divergence(_normal_pdf(0.0), _normal_pdf(0.2, CurveMethod.GAUSSIAN), delta_i=0.01)
    assert 0.01 < report.dkl <= 0.0201
    assert report.candidate == "gaussian"
    assert report.delta_i == 0.01


def test_kl_divergence_matches_discretised_closed_form():
    """
    Test the plain masked sum for unit Gaussians a tenth apart.

    On the symmetric mask ``|x| <= a`` the log ratio is ``d^2 / 2 - d x``, so
    the sum reduces to ``d^2 / 2`` times the masked reference mass.
    """
    edge = np.sqrt(-2.0 * np.log(0.01 * np.sqrt(2.0 * np.pi)))
    mass = stats.norm.cdf(edge) - stats.norm.cdf(-edge)
    report = kl_divergence(_normal_pdf(0.0), _normal_pdf(0.1, CurveMethod.GAUSSIAN), delta_i=0.01)
    assert report.dkl == pytest.approx(0.005 * mass, abs=1e-4)


def test_generalised_kl_adds_masked_mass_difference():
    """
    Test that the generalised form differs from the plain sum by the masked mass difference.
    """
    ref, cand = _normal_pdf(0.0), _normal_pdf(0.2, CurveMethod.GAUSSIAN)
    plain = kl_divergence(ref, cand, delta_i=0.01)
    generalised = kl_divergence(ref, cand, delta_i=0.01, generalised=True)
    edge = np.sqrt(-2.0 * np.log(0.01 * np.sqrt(2.0 * np.pi)))
    ref_mass = stats.norm.cdf(edge) - stats.norm.cdf(-edge)
    cand_mass = stats.norm.cdf(edge, loc=0.2) - stats.norm.cdf(-edge, loc=0.2)
    assert generalised.dkl - plain.dkl == pytest.approx(cand_mass - ref_mass, abs=3e-4)
    assert generalised.dkl < plain.dkl


def test_kl_divergence_mask_and_kind():
    """
    Test the empty-mask and curve-kind errors.
    """
    curve = _normal_pdf(0.0)
    with pytest.raises(EmptyMaskError):
        kl_divergence(curve, curve, mask_threshold=10.0)
    cdf = curve.model_copy(update={"kind": CurveKind.CDF})
    with pytest.raises(DomainError):
        kl_divergence(curve, cdf)


def test_kl_divergence_fewer_points_with_higher_threshold():
    """
    Test that raising the threshold shrinks the mask.
    """
    ref, cand = _normal_pdf(0.0), _normal_pdf(0.1)
    assert kl_divergence(ref, cand, mask_threshold=0.1).points < kl_divergence(ref, cand, mask_threshold=0.01).points


def test_approximation_report(strong_cfg: ChannelConfig, strong_ensemble: McEnsemble):
    """
    Test the report on a strongly skewed channel.

    Args:
        strong_cfg: Channel configuration
        strong_ensemble: Its seeded ensemble
    """
    report = approximation_report(strong_cfg, strong_ensemble)
    assert set(report.reports) == {"gaussian", "weibull", "fourier"}
    assert report.advisory == "weibull"
    assert report.moments.skewness < 0.0
    assert report.dkl("weibull") < report.dkl("gaussian")
    assert report.dkl("fourier") < report.dkl("gaussian")
    assert all(entry.reference == "monte-carlo" for entry in report.reports.values())


def test_approximation_report_rejects_foreign_ensemble(wide_cfg: ChannelConfig, strong_ensemble: McEnsemble):
    """
    Test that the ensemble must belong to the channel.

    Args:
        wide_cfg: Channel configuration
        strong_ensemble: Ensemble of another channel
    """
    with pytest.raises(DomainError):
        approximation_report(wide_cfg, strong_ensemble)


def test_capacity_sweep_increases():
    """
    Test that the capacity grows with power and the grid is sorted.
    """
    result = capacity_sweep(3, 6, 12, [1.0, 1.0, 1.0], [20.0, 0.0, 10.0])
    assert result.rho_db == [0.0, 10.0, 20.0]
    assert result.allocation_ratio == pytest.approx((1.0 / 3.0,) * 3)
    assert np.all(np.diff(result.capacity) > 0.0)
    assert result.mc_capacity is None


def test_capacity_sweep_drops_unexcited_modes():
    """
    Test that a zero ratio removes the mode from the channel.
    """
    result = capacity_sweep(3, 6, 12, [2.0, 0.0, 0.0], [10.0])
    assert result.allocation_ratio == (1.0, 0.0, 0.0)
    expected = ergodic_capacity(ChannelConfig(m=1, n=6, l=12, q=(10.0,)))
    assert result.capacity[0] == pytest.approx(expected, rel=1e-12)


def test_capacity_sweep_with_monte_carlo():
    """
    Test the Monte Carlo columns of a sweep.
    """
    result = capacity_sweep(2, 1, 6, [0.7, 0.3], [0.0, 10.0], mc_samples=5_000, seed=3)
    assert result.mc_capacity is not None and len(result.mc_capacity) == 2
    for exact, mean, err in zip(result.capacity, result.mc_capacity, result.mc_stderr):
        assert abs(exact - mean) <= 5.0 * err


@pytest.mark.parametrize("ratios", [[1.0, 1.0], [0.0, 0.0, 0.0], [1.0, -0.5, 0.5]])
def test_capacity_sweep_rejects_bad_ratios(ratios: list):
    """
    Test the ratio checks.

    Args:
        ratios: Invalid ratios for three modes
    """
    with pytest.raises(DomainError):
        capacity_sweep(3, 6, 12, ratios, [0.0])


def test_robustness_scan(wide_cfg: ChannelConfig, wide_ensemble: McEnsemble):
    """
    Test one row per grid combination in cut-off major order.

    Args:
        wide_cfg: Channel configuration
        wide_ensemble: Its seeded ensemble
    """
    rows = robustness_scan(wide_cfg, [15.0], [0.05, 1.0], wide_ensemble)
    assert [(row.cutoff_L, row.step_dk) for row in rows] == [(pytest.approx(15.0), 0.05), (15.0, 1.0)]
    assert rows[0].points == 601
    assert rows[1].points == 31
    assert all(row.dkl >= 0.0 for row in rows)


def test_robustness_slices_name_presets():
    """
    Test that every scan slice belongs to a reference preset.
    """
    assert set(ROBUSTNESS_SLICES) <= set(REFERENCE_PRESETS)
    for slices in ROBUSTNESS_SLICES.values():
        for cutoffs, dkappas in slices:
            assert cutoffs and dkappas


def test_high_snr_comparison():
    """
    Test row layout and ordering of the high-SNR comparison.
    """
    rows = high_snr_comparison(3, 6, 12, [30.0, 10.0])
    assert [row["rho_db"] for row in rows] == [10.0, 30.0]
    assert set(rows[0]) == {"rho_db", "exact", "high_snr", "rel_error"}
    assert rows[1]["rel_error"] < rows[0]["rel_error"]


def test_allocation_comparison():
    """
    Test that allocations with a common trace share one rate grid.
    """
    q_sets = [REFERENCE_PRESETS["m4n2-equal"].q, REFERENCE_PRESETS["m4n2-moderate"].q]
    results = allocation_comparison(4, 2, 7, q_sets, mc_samples=2_000, seed=5)
    assert len(results) == 2
    first, second = results
    np.testing.assert_array_equal(first["curves"][0].grid, second["curves"][0].grid)
    assert first["cfg"].is_equal_power and not second["cfg"].is_equal_power
    assert len(first["mc"]) == 3
    assert first["mc"][0].method is CurveMethod.MONTE_CARLO
