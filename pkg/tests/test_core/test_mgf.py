"""
Tests for the exact MGF.

This module contains tests for the prefactors and kernels, the three
determinant regimes, cut-off search and grids, and the derived moments.
"""

import math
from typing import Tuple

import numpy as np
import pytest
from scipy import integrate

from jacobi_mimo.config import settings
from jacobi_mimo.core.mgf import (
    conditioning,
    ergodic_capacity,
    euler_integral_quadrature,
    find_cutoff,
    high_snr_capacity,
    kernel_g,
    kernel_h,
    kernel_t,
    mgf_eval,
    mgf_grid,
    moments,
    norm_C,
    normalisation_defect,
    prefactor_K,
    quadrature_nodes,
    spread_duplicates,
)
from jacobi_mimo.core.montecarlo import mc_mgf
from jacobi_mimo.core.specfun import pochhammer
from jacobi_mimo.errors import (
    CutoffSearchError,
    DimensionError,
    DomainError,
    KernelConsistencyError,
)
from jacobi_mimo.schemas import REFERENCE_PRESETS, ChannelConfig, McEnsemble


def _single_mode_mgf(kappa: float) -> complex:
    s = 1.0 + 1j * kappa
    return (3.0 ** s - 1.0) / (2.0 * s)


def _complex_dblquad(func, lower: float, upper: float, inner_upper) -> complex:
    parts = []
    for part in ("real", "imag"):
        value, _ = integrate.dblquad(
            lambda y, x: getattr(func(x, y), part), lower, upper, 0.0, inner_upper, epsabs=1e-13, epsrel=1e-11
        )
        parts.append(value)
    return complex(*parts)


def test_prefactor_K():
    """
    Test the prefactor for one and two modes.
    """
    assert prefactor_K(1, 3.7) == 1
    assert prefactor_K(2, 0.0) == pytest.approx(1.0)
    assert prefactor_K(2, 0.7) == pytest.approx(1.0 / (1.0 + 0.7j), rel=1e-14)


def test_prefactor_K_at_zero_is_real():
    """
    Test that K_m(0) is real for larger m.
    """
    for m in range(1, 8):
        value = prefactor_K(m, 0.0)
        assert abs(value.imag) <= 1e-12 * abs(value.real)


def test_norm_C():
    """
    Test the normalisation constant and its domain.
    """
    assert norm_C(1, 1, 2) == pytest.approx(0.0, abs=1e-14)
    # C_{1,2} for l = 4: Gamma(4) / (Gamma(2) Gamma(2) Gamma(2)) = 6
    assert norm_C(1, 2, 4) == pytest.approx(math.log(6.0), rel=1e-14)
    with pytest.raises(DomainError):
        norm_C(3, 6, 8)


def test_euler_integral_quadrature_closed_form():
    """
    Test the quadrature route on an integral with a closed form.
    """
    kappa = 2.5
    nodes = quadrature_nodes(2, 1, kappa, 2.0)
    assert euler_integral_quadrature(1, 1, 1j * kappa, 2.0, nodes) == pytest.approx(
        _single_mode_mgf(kappa), rel=1e-13
    )


@pytest.mark.parametrize("name", sorted(REFERENCE_PRESETS))
@pytest.mark.parametrize("kappa", [-15.0, -2.0, 0.0, 0.5, 7.0, 15.0])
def test_kernel_routes_agree(name: str, kappa: float):
    """
    Test closed-form and quadrature kernels against each other.

    Args:
        name: Preset name
        kappa: Transform variable
    """
    cfg = REFERENCE_PRESETS[name]
    m, n, l = cfg.m, cfg.n, cfg.l  # noqa: E741
    b = l - m - n + 1
    cases = []
    if cfg.is_equal_power:
        d = cfg.min_dim
        for j in range(1, d + 1):
            for k in range(1, d + 1):
                closed = kernel_t(j, k, kappa, cfg.q[0], cfg)
                cases.append((closed, j + k + abs(m - n) - 1, 1j * kappa, cfg.q[0]))
    for q_j in cfg.q:
        for k in range(1, m + 1):
            if m <= n:
                closed, a = kernel_g(q_j, k, kappa, cfg), k + n - m
            elif k > m - n:
                closed, a = kernel_h(q_j, k, kappa, cfg), k - m + n
            else:
                continue
            cases.append((closed, a, complex(m - 1, kappa), q_j))
    for closed, a, s, q in cases:
        quad = euler_integral_quadrature(a, b, s, q, quadrature_nodes(l, m, kappa, q))
        assert abs(closed - quad) <= 1e-10 * max(abs(closed), abs(quad))


def test_kernel_h_polynomial_columns():
    """
    Test that the leading m - n columns of the m > n kernel are Pochhammer terms.
    """
    cfg = REFERENCE_PRESETS["m4n2-moderate"]
    kappa = 1.3
    for k in (1, 2):
        expected = pochhammer(complex(cfg.m - k + 1, kappa), k - 1) * 8.0 ** (k - 1)
        assert kernel_h(8.0, k, kappa, cfg) == expected


def test_kernels_reject_wrong_regime(strong_cfg: ChannelConfig, wide_cfg: ChannelConfig):
    """
    Test that each kernel refuses the other regime and bad indices.

    Args:
        strong_cfg: Channel with m <= n
        wide_cfg: Channel with m > n
    """
    with pytest.raises(DimensionError):
        kernel_g(1.0, 1, 0.5, wide_cfg)
    with pytest.raises(DimensionError):
        kernel_h(1.0, 1, 0.5, strong_cfg)
    with pytest.raises(DimensionError):
        kernel_g(1.0, strong_cfg.m + 1, 0.5, strong_cfg)
    with pytest.raises(DimensionError):
        kernel_t(1, wide_cfg.n + 1, 0.5, 1.0, wide_cfg)


def test_kernel_disagreement_raises(strong_cfg: ChannelConfig, monkeypatch: pytest.MonkeyPatch):
    """
    Test that a disagreement above the raise tolerance is an error.

    Args:
        strong_cfg: Channel configuration
        monkeypatch: Pytest monkeypatch fixture
    """
    monkeypatch.setattr(settings, "KERNEL_RAISE_TOL", 1e-30)
    monkeypatch.setattr(settings, "KERNEL_AGREEMENT_TOL", 1e-30)
    with pytest.raises(KernelConsistencyError):
        kernel_g(8.8, 2, 3.3, strong_cfg)


@pytest.mark.parametrize("name", sorted(REFERENCE_PRESETS))
def test_mgf_normalised(name: str):
    """
    Test M(0) = 1 for every preset.

    Args:
        name: Preset name
    """
    assert abs(mgf_eval(REFERENCE_PRESETS[name], 0.0) - 1.0) <= 1e-9


@pytest.mark.parametrize("kappa", [0.5, 1.0, 3.0, 12.0])
def test_mgf_single_mode_closed_form(single_mode: ChannelConfig, kappa: float):
    """
    Test the smallest channel against its closed form.

    Args:
        single_mode: The (1,1,2) channel
        kappa: Transform variable
    """
    assert mgf_eval(single_mode, kappa) == pytest.approx(_single_mode_mgf(kappa), rel=1e-10)


@pytest.mark.parametrize("kappa", [0.5, 1.0, 3.0])
def test_mgf_single_receive_mode_quadrature(kappa: float):
    """
    Test an m > n channel against a direct integral over the received power.

    For n = 1 the gain is ``q1 x1 + q2 x2`` with ``(x1, x2)`` the leading
    squared moduli of a uniformly random unit vector in C^l, whose density
    on the simplex is ``Gamma(l) / Gamma(l - 2) (1 - x1 - x2)^(l - 3)``.

    Args:
        kappa: Transform variable
    """
    l, q1, q2 = 4, 1.5, 0.4  # noqa: E741
    cfg = ChannelConfig(m=2, n=1, l=l, q=(q1, q2))
    density = math.gamma(l) / math.gamma(l - 2)

    def integrand(x: float, y: float) -> complex:
        return density * (1.0 - x - y) ** (l - 3) * (1.0 + q1 * x + q2 * y) ** (1j * kappa)

    expected = _complex_dblquad(integrand, 0.0, 1.0, lambda x: 1.0 - x)
    assert mgf_eval(cfg, kappa) == pytest.approx(expected, rel=1e-6)


@pytest.mark.parametrize("kappa", [0.5, 1.0, 3.0])
def test_mgf_equal_power_eigenvalue_quadrature(kappa: float):
    """
    Test a square equal-power channel against its eigenvalue-density integral.

    For (2,2,5) the eigenvalues of H^dagger H have density proportional to
    ``(x - y)^2 (1 - x) (1 - y)`` on the unit square.

    Args:
        kappa: Transform variable
    """
    q = 2.0
    cfg = ChannelConfig(m=2, n=2, l=5, q=(q, q))

    def weight(x: float, y: float) -> float:
        return (x - y) ** 2 * (1.0 - x) * (1.0 - y)

    def integrand(x: float, y: float) -> complex:
        return weight(x, y) * ((1.0 + q * x) * (1.0 + q * y)) ** (1j * kappa)

    norm, _ = integrate.dblquad(lambda y, x: weight(x, y), 0.0, 1.0, 0.0, 1.0)
    expected = _complex_dblquad(integrand, 0.0, 1.0, lambda x: 1.0) / norm
    assert mgf_eval(cfg, kappa) == pytest.approx(expected, rel=1e-6)


@pytest.mark.parametrize("kappa", [0.5, 1.0, 3.0])
def test_mgf_unequal_power_eigenvalue_quadrature(kappa: float):
    """
    Test a square unequal-power channel against an eigenvalue-density integral.

    For (2,2,5), ``H^dagger H = U diag(x, y) U^dagger`` with ``U`` Haar on
    U(2), so ``det(I + Q H^dagger H) = A + B t`` with ``t = |U_11|^2``
    uniform on [0, 1], ``A = 1 + q1 y + q2 x + q1 q2 x y`` and
    ``B = (q1 - q2)(x - y)``. The ``t`` integral is done in closed form.

    Args:
        kappa: Transform variable
    """
    q1, q2 = 1.5, 0.4
    cfg = ChannelConfig(m=2, n=2, l=5, q=(q1, q2))
    s = 1j * kappa

    def weight(x: float, y: float) -> float:
        return (x - y) ** 2 * (1.0 - x) * (1.0 - y)

    def averaged(x: float, y: float) -> complex:
        a = 1.0 + q1 * y + q2 * x + q1 * q2 * x * y
        b = (q1 - q2) * (x - y)
        if abs(b) < 1e-12:
            return a ** s
        return ((a + b) ** (s + 1.0) - a ** (s + 1.0)) / ((s + 1.0) * b)

    def integrand(x: float, y: float) -> complex:
        return weight(x, y) * averaged(x, y)

    norm, _ = integrate.dblquad(lambda y, x: weight(x, y), 0.0, 1.0, 0.0, 1.0)
    expected = _complex_dblquad(integrand, 0.0, 1.0, lambda x: 1.0) / norm
    assert mgf_eval(cfg, kappa) == pytest.approx(expected, rel=1e-6)


def test_normalisation_defect_selects_extended_precision():
    """
    Test that an allocation losing digits in double precision is still normalised.

    The (5,7,16) preset misses ``M(0) = 1`` by about 2e-9 in double
    precision and must be routed to extended precision.
    """
    cfg = REFERENCE_PRESETS["m5n7"]
    assert normalisation_defect(cfg) > settings.NORMALISATION_TOL
    assert abs(mgf_eval(cfg, 0.0) - 1.0) <= 1e-11
    small = ChannelConfig(m=2, n=2, l=5, q=(1.5, 0.4))
    assert normalisation_defect(small) <= settings.NORMALISATION_TOL
    with pytest.raises(DomainError):
        normalisation_defect(REFERENCE_PRESETS["m3n6-equal"])


@pytest.mark.parametrize("name,spread_cfg", [("m3n6-equal", (3, 6, 12)), ("m4n2-equal", (4, 2, 7))])
@pytest.mark.parametrize("kappa", [0.5, 2.0])
def test_equal_power_matches_spread_generic(name: str, spread_cfg: Tuple[int, int, int], kappa: float):
    """
    Test the equal-power determinant against the generic one with q spread by 1e-6.

    Args:
        name: Equal-power preset
        spread_cfg: Its dimensions
        kappa: Transform variable
    """
    equal = REFERENCE_PRESETS[name]
    m, n, l = spread_cfg  # noqa: E741
    q = equal.q[0]
    offsets = np.linspace(-1.0, 1.0, m) * 1e-6
    generic = ChannelConfig(m=m, n=n, l=l, q=tuple(q * (1.0 + offsets)))
    assert not generic.is_equal_power
    assert mgf_eval(generic, kappa) == pytest.approx(mgf_eval(equal, kappa), rel=1e-6)


@pytest.mark.parametrize("kappa", [0.5, 2.0, 6.0])
def test_equal_power_swap(kappa: float):
    """
    Test that equal power on (m, n) and (n, m) gives the same MGF.

    Args:
        kappa: Transform variable
    """
    wide = ChannelConfig(m=4, n=2, l=7, q=(3.0,) * 4)
    tall = ChannelConfig(m=2, n=4, l=7, q=(3.0,) * 2)
    assert mgf_eval(wide, kappa) == pytest.approx(mgf_eval(tall, kappa), rel=1e-6)


def test_mgf_symmetry_and_bound(strong_cfg: ChannelConfig):
    """
    Test M(-kappa) = conj(M(kappa)) and |M| <= 1.

    Args:
        strong_cfg: Channel configuration
    """
    for kappa in (0.3, 1.7, 9.0):
        value = mgf_eval(strong_cfg, kappa)
        assert mgf_eval(strong_cfg, -kappa) == pytest.approx(value.conjugate(), rel=1e-12)
        assert abs(value) <= 1.0 + 1e-12


def test_mgf_rejects_non_finite_kappa(strong_cfg: ChannelConfig):
    """
    Test that kappa must be finite.

    Args:
        strong_cfg: Channel configuration
    """
    with pytest.raises(DomainError):
        mgf_eval(strong_cfg, math.nan)


@pytest.mark.parametrize(
    "cfg_fixture,ensemble_fixture", [("strong_cfg", "strong_ensemble"), ("wide_cfg", "wide_ensemble")]
)
def test_mgf_matches_monte_carlo(cfg_fixture: str, ensemble_fixture: str, request: pytest.FixtureRequest):
    """
    Test the exact MGF against the Monte Carlo average within four standard errors.

    Args:
        cfg_fixture: Name of the channel fixture
        ensemble_fixture: Name of the matching ensemble fixture
        request: Pytest fixture request
    """
    cfg: ChannelConfig = request.getfixturevalue(cfg_fixture)
    ensemble: McEnsemble = request.getfixturevalue(ensemble_fixture)
    for kappa in (-4.0, -1.0, 0.5, 2.0, 6.0):
        exact = mgf_eval(cfg, kappa)
        mean, stderr = mc_mgf(ensemble, kappa)
        assert abs(exact.real - mean.real) <= 4.0 * stderr.real + 1e-12
        assert abs(exact.imag - mean.imag) <= 4.0 * stderr.imag + 1e-12


def test_spread_duplicates():
    """
    Test that near-duplicates are separated about their mean in the original order.
    """
    assert spread_duplicates((1.0, 2.0, 3.0)) == (1.0, 2.0, 3.0)
    spread = spread_duplicates((2.0, 5.0, 2.0))
    assert spread[1] == 5.0
    assert spread[0] < spread[2]
    assert math.fsum((spread[0], spread[2])) == pytest.approx(4.0, rel=1e-15)
    assert spread[2] - spread[0] == pytest.approx(2.0 * settings.SPREAD_REL_STEP, rel=1e-6)


def test_spread_duplicates_groups_of_three():
    """
    Test that a triple is spread into three distinct values.
    """
    spread = spread_duplicates((4.0, 4.0, 4.0 * (1.0 + 1e-12)))
    assert len(set(spread)) == 3
    assert conditioning(spread) > 0.0


def test_conditioning():
    """
    Test the conditioning measure.
    """
    assert conditioning((1.0,)) == 1.0
    assert conditioning((0.5, 0.25)) == pytest.approx(0.25)
    assert conditioning((8.0, 2.0)) == pytest.approx(6.0 / 8.0)


def test_find_cutoff(wide_cfg: ChannelConfig):
    """
    Test that the cut-off reaches the modulus target.

    Args:
        wide_cfg: Channel configuration
    """
    length = find_cutoff(wide_cfg)
    assert abs(mgf_eval(wide_cfg, length)) < settings.CUTOFF_THRESHOLD
    assert length <= settings.CUTOFF_MAX


def test_find_cutoff_tail_stays_below_threshold(strong_cfg: ChannelConfig):
    """
    Test that the modulus stays below the target on the sampled tail beyond the cut-off.

    Args:
        strong_cfg: Channel configuration
    """
    length = find_cutoff(strong_cfg)
    step = settings.CUTOFF_TAIL_STEP
    tail = length + step * np.arange(1, int(math.ceil(length / step)) + 1)
    assert all(abs(mgf_eval(strong_cfg, float(kappa))) < settings.CUTOFF_THRESHOLD for kappa in tail)


def test_find_cutoff_fails_for_slow_decay(single_mode: ChannelConfig):
    """
    Test that a transform decaying like 1/kappa exhausts the search.

    Args:
        single_mode: The (1,1,2) channel, whose density jumps at its edges
    """
    with pytest.raises(CutoffSearchError):
        find_cutoff(single_mode, threshold=1e-4)


def test_mgf_grid_layout(strong_cfg: ChannelConfig):
    """
    Test grid size, centre and conjugate symmetry.

    Args:
        strong_cfg: Channel configuration
    """
    grid = mgf_grid(strong_cfg, 2.0, 0.25)
    assert grid.kappas.size == 17
    assert grid.kappas[8] == 0.0
    assert grid.values[8] == pytest.approx(1.0, abs=1e-9)
    assert grid.cutoff_L == pytest.approx(2.0)
    np.testing.assert_allclose(grid.values[::-1], np.conj(grid.values), rtol=0, atol=1e-12)
    assert grid.cfg == strong_cfg


def test_mgf_grid_independent_of_workers(wide_cfg: ChannelConfig):
    """
    Test that worker threads do not change the grid.

    Args:
        wide_cfg: Channel configuration
    """
    serial = mgf_grid(wide_cfg, 3.0, 0.5, workers=1)
    parallel = mgf_grid(wide_cfg, 3.0, 0.5, workers=3)
    np.testing.assert_array_equal(serial.values, parallel.values)


def test_mgf_grid_rejects_bad_arguments(wide_cfg: ChannelConfig):
    """
    Test grid argument validation.

    Args:
        wide_cfg: Channel configuration
    """
    with pytest.raises(DomainError):
        mgf_grid(wide_cfg, 3.0, 0.0)
    with pytest.raises(DomainError):
        mgf_grid(wide_cfg, "big", 0.5)


def test_moments_single_mode(single_mode: ChannelConfig, single_mode_mean: float):
    """
    Test the moments of ln(1 + 2x) with x uniform.

    Args:
        single_mode: The (1,1,2) channel
        single_mode_mean: Its exact mean
    """
    log3 = math.log(3.0)
    mu2 = (3.0 * log3 ** 2 - 6.0 * log3 + 4.0) / 2.0
    mu3 = (3.0 * (log3 ** 3 - 3.0 * log3 ** 2 + 6.0 * log3 - 6.0) + 6.0) / 2.0
    result = moments(single_mode)
    assert result.mu1 == pytest.approx(single_mode_mean, rel=1e-8)
    assert result.mu2 == pytest.approx(mu2, rel=1e-7)
    assert result.mu3 == pytest.approx(mu3, rel=1e-5)
    assert result.sigma2 == pytest.approx(mu2 - single_mode_mean ** 2, rel=1e-6)
    assert ergodic_capacity(single_mode) == result.mu1


def test_moments_match_monte_carlo(strong_cfg: ChannelConfig, strong_ensemble: McEnsemble):
    """
    Test exact moments against sample moments.

    Args:
        strong_cfg: Channel configuration
        strong_ensemble: Its ensemble
    """
    result = moments(strong_cfg)
    samples = strong_ensemble.samples
    stderr = samples.std(ddof=1) / math.sqrt(samples.size)
    assert abs(result.mu1 - samples.mean()) <= 4.0 * stderr
    assert result.sigma2 == pytest.approx(samples.var(ddof=1), rel=0.05)
    assert result.skewness < 0.0


def test_high_snr_capacity_domain(strong_cfg: ChannelConfig, presets):
    """
    Test that the high-SNR formula needs equal power and m < n.

    Args:
        strong_cfg: Unequal-power channel
        presets: Preset registry
    """
    with pytest.raises(DomainError):
        high_snr_capacity(strong_cfg)
    with pytest.raises(DomainError):
        high_snr_capacity(presets["m4n2-equal"])
    assert math.isfinite(high_snr_capacity(presets["m3n6-equal"]))
