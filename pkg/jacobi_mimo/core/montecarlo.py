"""
Monte Carlo simulation of Jacobi MIMO channels.

This module samples channel matrices by truncating Haar-random unitary
matrices, turns them into mutual-information ensembles and derives empirical
PDF/CDF/SF curves, characteristic-function averages and capacity estimates.
Ensembles are reproducible: the master seed is split into one counter-based
stream per fixed-size chunk, so the samples do not depend on the number of
worker threads.
"""

import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, List, Literal, Optional, TextIO, Tuple

import numpy as np

from jacobi_mimo import __app_name__
from jacobi_mimo.config import settings, workers_or_default
from jacobi_mimo.errors import DegenerateEnsembleError, DimensionError, DomainError
from jacobi_mimo.schemas import ChannelConfig, CurveKind, EmpiricalCurve, McEnsemble


logger = logging.getLogger(__app_name__)

GENERATOR_NAME = "Philox"
RANK_FLOOR = 1e-12

Side = Literal["transmit", "receive"]


def _ginibre(rng: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def _phase_fixed_qr(z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    moduli = np.abs(d)
    safe = np.where(moduli > 0.0, moduli, 1.0)
    return q * (d / safe)[..., np.newaxis, :], moduli


# PUBLIC_INTERFACE
def sample_haar_unitary(l: int, rng: np.random.Generator) -> np.ndarray:  # noqa: E741
    """
    Draw one Haar-distributed ``l x l`` unitary matrix.

    A complex Ginibre matrix is QR-factorised and the columns of ``Q`` are
    rescaled by the phases of the diagonal of ``R``. Draws whose ``R``
    diagonal is numerically rank deficient are rejected and redrawn.

    Args:
        l: Matrix dimension
        rng: numpy random generator

    Returns:
        np.ndarray: Unitary matrix of shape ``(l, l)``

    Example:
        ```python
        rng = np.random.Generator(np.random.Philox(7))
        u = sample_haar_unitary(4, rng)
        ```
    """
    if l < 1:
        raise DimensionError(f"l must be at least 1 (got {l})")
    while True:
        u, moduli = _phase_fixed_qr(_ginibre(rng, (l, l)))
        if moduli.min() >= RANK_FLOOR:
            return u


# PUBLIC_INTERFACE
def sample_haar_unitaries(l: int, count: int, rng: np.random.Generator) -> np.ndarray:  # noqa: E741
    """
    Draw a batch of independent Haar unitaries with one stacked QR call.

    Args:
        l: Matrix dimension
        count: Number of matrices
        rng: numpy random generator

    Returns:
        np.ndarray: Array of shape ``(count, l, l)``
    """
    if l < 1 or count < 1:
        raise DimensionError(f"need l >= 1 and count >= 1 (got l={l}, count={count})")
    unitaries, moduli = _phase_fixed_qr(_ginibre(rng, (count, l, l)))
    bad = np.flatnonzero(moduli.min(axis=1) < RANK_FLOOR)
    for idx in bad:
        unitaries[idx] = sample_haar_unitary(l, rng)
    return unitaries


# PUBLIC_INTERFACE
def channel_from_unitary(u: np.ndarray, m: int, n: int) -> np.ndarray:
    """
    Channel matrix as the leading ``n x m`` block of a unitary (or a stack of them).

    Args:
        u: Unitary of shape ``(l, l)`` or ``(count, l, l)``
        m: Transmit modes, ``m <= l``
        n: Receive modes, ``n <= l``

    Returns:
        np.ndarray: ``H`` of shape ``(..., n, m)``

    Raises:
        DimensionError: If ``u`` is not square or ``m``, ``n`` exceed ``l``
    """
    if u.ndim < 2 or u.shape[-1] != u.shape[-2]:
        raise DimensionError(f"unitary must be square (got shape {u.shape})")
    l = u.shape[-1]  # noqa: E741
    if not (1 <= m <= l and 1 <= n <= l):
        raise DimensionError(f"need 1 <= m, n <= l (got m={m}, n={n}, l={l})")
    return u[..., :n, :m]


def _mutual_info_batch(h: np.ndarray, q: np.ndarray, side: Side) -> np.ndarray:
    if side == "transmit":
        root = np.sqrt(q)
        gram = np.conj(np.swapaxes(h, -1, -2)) @ h
        target = root[:, np.newaxis] * gram * root[np.newaxis, :]
    else:
        target = (h * q) @ np.conj(np.swapaxes(h, -1, -2))
    eigenvalues = np.clip(np.linalg.eigvalsh(target), 0.0, None)
    return np.sum(np.log1p(eigenvalues), axis=-1)


# PUBLIC_INTERFACE
def mutual_info_sample(h: np.ndarray, q: Iterable[float], side: Side = "transmit") -> float:
    """
    Mutual information ``ln det(1 + Q H^dagger H)`` of one channel draw.

    ``Q`` is diagonal with entries ``q``. ``side="receive"`` evaluates the
    Sylvester-equivalent ``ln det(1 + H Q H^dagger)`` instead.

    Args:
        h: Channel matrix of shape ``(n, m)``
        q: The ``m`` transmit powers
        side: Which determinant to evaluate

    Returns:
        float: Mutual information in nats, non-negative
    """
    powers = np.asarray(list(q), dtype=float)
    if h.ndim != 2 or powers.shape != (h.shape[1],):
        raise DimensionError(f"q must hold {h.shape[-1]} powers for H of shape {h.shape}")
    if np.any(powers < 0.0):
        raise DomainError("powers must be non-negative")
    return float(_mutual_info_batch(h, powers, side))


def _chunk_sizes(count: int, chunk_size: int) -> List[int]:
    full, rest = divmod(count, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def _simulate_chunk(cfg: ChannelConfig, size: int, seed_seq: np.random.SeedSequence) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(seed_seq))
    h = channel_from_unitary(sample_haar_unitaries(cfg.l, size, rng), cfg.m, cfg.n)
    return _mutual_info_batch(h, np.asarray(cfg.q, dtype=float), "transmit")


# PUBLIC_INTERFACE
def run_ensemble(
    cfg: ChannelConfig,
    count: Optional[int] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
) -> McEnsemble:
    """
    Simulate a mutual-information ensemble.

    The master seed is spawned into one ``SeedSequence`` child per chunk of
    ``MC_CHUNK_SIZE`` samples and every chunk draws from its own ``Philox``
    stream, so ``(cfg, seed, count)`` determines the samples bit for bit
    regardless of ``workers``.

    Args:
        cfg: Channel configuration
        count: Number of samples; ``MC_SAMPLES`` by default
        seed: Master seed; ``MC_SEED`` by default
        workers: Worker threads; ``WORKERS`` by default

    Returns:
        McEnsemble: Samples with provenance
    """
    count = settings.MC_SAMPLES if count is None else int(count)
    seed = settings.MC_SEED if seed is None else int(seed)
    if count < 1:
        raise DomainError(f"count must be at least 1 (got {count})")
    sizes = _chunk_sizes(count, settings.MC_CHUNK_SIZE)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    logger.info(f"Simulating {count} channels for {cfg.label} in {len(sizes)} chunks (seed: {seed})")

    def work(index: int) -> np.ndarray:
        block = _simulate_chunk(cfg, sizes[index], children[index])
        logger.debug(f"Chunk {index + 1}/{len(sizes)} done")
        return block

    with ThreadPoolExecutor(max_workers=workers_or_default(workers)) as pool:
        blocks = list(pool.map(work, range(len(sizes))))
    return McEnsemble(
        cfg=cfg,
        seed=seed,
        count=count,
        samples=np.concatenate(blocks),
        generator=GENERATOR_NAME,
        numpy_version=np.__version__,
    )


# PUBLIC_INTERFACE
def empirical_curves(
    ens: McEnsemble, delta_i: Optional[float] = None
) -> Tuple[EmpiricalCurve, EmpiricalCurve, EmpiricalCurve]:
    """
    Histogram PDF with cumulative CDF and SF.

    Bins of width ``delta_i`` cover ``[0, max + 3 delta_i]``; the PDF is
    trimmed to the bins between the first and last occupied one. The CDF and
    SF keep the full range and are the exact empirical fractions of samples
    at or below (above) each bin centre, so all three share one grid.

    Args:
        ens: Monte Carlo ensemble
        delta_i: Bin width in nats; ``KL_DELTA_I`` by default

    Returns:
        Tuple[EmpiricalCurve, EmpiricalCurve, EmpiricalCurve]: ``(pdf, cdf, sf)``

    Raises:
        DegenerateEnsembleError: If all samples are identical
    """
    width = settings.KL_DELTA_I if delta_i is None else float(delta_i)
    if not math.isfinite(width) or width <= 0.0:
        raise DomainError(f"delta_i must be positive (got {width})")
    samples = ens.samples
    if np.ptp(samples) == 0.0:
        raise DegenerateEnsembleError(f"all {ens.count} samples equal {samples[0]}")

    bins = int(math.ceil((float(samples.max()) + 3.0 * width) / width))
    edges = width * np.arange(bins + 1, dtype=float)
    counts, _ = np.histogram(samples, bins=edges)
    centers = 0.5 * (edges[:-1] + edges[1:])
    total = float(ens.count)

    cdf = np.searchsorted(np.sort(samples), centers, side="right") / total
    occupied = np.flatnonzero(counts)
    keep = slice(occupied[0], occupied[-1] + 1)
    pdf = counts[keep] / (total * width)
    return (
        EmpiricalCurve(bin_centers=centers[keep], values=pdf, kind=CurveKind.PDF, delta_i=width),
        EmpiricalCurve(bin_centers=centers, values=cdf, kind=CurveKind.CDF, delta_i=width),
        EmpiricalCurve(bin_centers=centers, values=1.0 - cdf, kind=CurveKind.SF, delta_i=width),
    )


# PUBLIC_INTERFACE
def mc_mgf(ens: McEnsemble, kappa: float) -> Tuple[complex, complex]:
    """
    Sample average of ``exp(i kappa I)`` with per-component standard errors.

    Args:
        ens: Monte Carlo ensemble
        kappa: Real transform variable

    Returns:
        Tuple[complex, complex]: ``(mean, stderr)`` where ``stderr.real`` and
        ``stderr.imag`` are the standard errors of the real and imaginary parts
    """
    phase = float(kappa) * ens.samples
    re = np.cos(phase)
    im = np.sin(phase)
    scale = math.sqrt(ens.count)
    ddof = 1 if ens.count > 1 else 0
    mean = complex(float(np.mean(re)), float(np.mean(im)))
    stderr = complex(float(np.std(re, ddof=ddof)) / scale, float(np.std(im, ddof=ddof)) / scale)
    return mean, stderr


# PUBLIC_INTERFACE
def mc_capacity(ens: McEnsemble) -> Tuple[float, float]:
    """Monte Carlo ergodic capacity as ``(mean, standard error)`` in nats."""
    ddof = 1 if ens.count > 1 else 0
    return float(np.mean(ens.samples)), float(np.std(ens.samples, ddof=ddof)) / math.sqrt(ens.count)


# PUBLIC_INTERFACE
def eigenvalue_samples(n: int, l: int, count: int, seed: int) -> np.ndarray:  # noqa: E741
    """
    Eigenvalue of ``H^dagger H`` for single-mode truncations (``m = 1``).

    Args:
        n: Receive modes
        l: Unitary dimension
        count: Number of draws
        seed: Master seed

    Returns:
        np.ndarray: ``count`` values in ``[0, 1]``
    """
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    h = channel_from_unitary(sample_haar_unitaries(l, count, rng), 1, n)
    return np.sum(np.abs(h[..., 0]) ** 2, axis=-1)


# PUBLIC_INTERFACE
def write_ensemble_csv(ens: McEnsemble, stream: TextIO, comments: Optional[List[str]] = None) -> None:
    """
    Write an ensemble as CSV with header ``index,I_nats``.

    Args:
        ens: Ensemble to write
        stream: Text stream opened with ``newline=""``
        comments: Leading ``#`` lines; a provenance line is written when omitted
    """
    if comments is None:
        comments = [f"# cfg: {ens.cfg.label}", f"# seed: {ens.seed}", f"# generator: {ens.generator}"]
    for line in comments:
        stream.write(line + "\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["index", "I_nats"])
    for index, value in enumerate(ens.samples):
        writer.writerow([index, format(float(value), ".17g")])


# PUBLIC_INTERFACE
def read_ensemble_csv(stream: TextIO) -> np.ndarray:
    """
    Read the samples of an ensemble CSV, skipping ``#`` comment lines.

    Returns:
        np.ndarray: The ``I_nats`` column in file order
    """
    rows = csv.DictReader(line for line in stream if not line.startswith("#"))
    if rows.fieldnames is None or "I_nats" not in rows.fieldnames:
        raise DimensionError("ensemble CSV must have an I_nats column")
    return np.array([float(row["I_nats"]) for row in rows], dtype=float)
