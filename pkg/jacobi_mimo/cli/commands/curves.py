"""
Commands for distribution curves and ensembles.

This module provides the ``dist`` subcommand (PDF, outage probability or
survival function by any method) and the ``simulate`` subcommand exporting a
Monte Carlo ensemble.
"""

import argparse
from typing import Any, Dict, Optional

import numpy as np

from jacobi_mimo.cli.options import add_channel_options, add_run_options, parse_config, parse_float_grid
from jacobi_mimo.cli.output import atomic_output, build_manifest, config_snapshot, emit
from jacobi_mimo.core.distributions import (
    default_rate_grid,
    fourier_cdf,
    fourier_pdf,
    fourier_sf,
    gaussian_curves,
    inversion_grid,
    weibull_curves,
    weibull_fit,
)
from jacobi_mimo.core.mgf import moments
from jacobi_mimo.core.montecarlo import GENERATOR_NAME, empirical_curves, run_ensemble, write_ensemble_csv
from jacobi_mimo.schemas import ChannelConfig, CurveKind, DistCurve, RunOptions

METHODS = ("gaussian", "weibull", "fourier", "mc")
KINDS = tuple(kind.value for kind in CurveKind)
_KIND_INDEX = {CurveKind.PDF: 0, CurveKind.CDF: 1, CurveKind.SF: 2}


def build_curve(
    cfg: ChannelConfig, options: RunOptions, method: str, kind: CurveKind, rates: Optional[np.ndarray]
) -> DistCurve:
    """
    Compute one distribution curve in nats.

    Args:
        cfg: Channel configuration
        options: Run options (grid, Monte Carlo and histogram settings)
        method: One of ``gaussian``, ``weibull``, ``fourier``, ``mc``
        kind: PDF, CDF or SF
        rates: Evaluation grid; the default rate grid (or the histogram bins
            for ``mc``) when None

    Returns:
        DistCurve: The requested curve
    """
    if method == "mc":
        ensemble = run_ensemble(cfg, options.samples, options.seed, options.workers)
        return empirical_curves(ensemble, options.delta_i)[_KIND_INDEX[kind]].as_dist_curve(
            {"delta_i": options.delta_i, "samples": options.samples}
        )
    if method == "fourier":
        grid = inversion_grid(cfg, options.cutoff, options.dkappa, options.workers)
        invert = {CurveKind.PDF: fourier_pdf, CurveKind.CDF: fourier_cdf, CurveKind.SF: fourier_sf}[kind]
        return invert(grid, rates)

    mom = moments(cfg)
    grid_values = default_rate_grid(mom) if rates is None else rates
    if method == "gaussian":
        curves = gaussian_curves(mom.mu1, mom.sigma2, grid_values)
    else:
        curves = weibull_curves(weibull_fit(mom.mu1, mom.mu2), grid_values)
    return curves[_KIND_INDEX[kind]]


# PUBLIC_INTERFACE
def run_dist(args: argparse.Namespace) -> None:
    """Write a distribution curve as ``I,value``."""
    cfg, options = parse_config(args)
    kind = CurveKind(args.kind)
    rates = None if args.rates is None else np.asarray(args.rates, dtype=float)
    curve = build_curve(cfg, options, args.method, kind, rates)
    if options.bits:
        curve = curve.scaled_to_bits()

    config: Dict[str, Any] = config_snapshot(cfg, options)
    config.update({"method": args.method, "kind": kind.value, "unit": "bits" if options.bits else "nats"})
    config.update({f"meta_{key}": value for key, value in curve.meta.items()})
    mc = args.method == "mc"
    rows = [(float(x), float(y)) for x, y in zip(curve.grid, curve.values)]
    emit(
        args.command_line,
        options.output,
        config,
        ["I", "value"],
        rows,
        options.seed if mc else None,
        GENERATOR_NAME if mc else None,
    )


# PUBLIC_INTERFACE
def run_simulate(args: argparse.Namespace) -> None:
    """Export a Monte Carlo ensemble as ``index,I_nats``."""
    cfg, options = parse_config(args)
    ensemble = run_ensemble(cfg, options.samples, options.seed, options.workers)
    config = config_snapshot(cfg, options)
    config["numpy_version"] = ensemble.numpy_version
    manifest = build_manifest(args.command_line, config, ensemble.seed, ensemble.generator)
    with atomic_output(options.output) as stream:
        write_ensemble_csv(ensemble, stream, manifest.comment_lines())


def register(subparsers: "argparse._SubParsersAction[argparse.ArgumentParser]") -> None:
    """Register the curve and ensemble subcommands."""
    parser = subparsers.add_parser("dist", help="PDF, outage probability or survival function")
    add_channel_options(parser)
    add_run_options(parser)
    parser.add_argument("--method", choices=METHODS, default="fourier", help="How the curve is obtained")
    parser.add_argument("--kind", choices=KINDS, default="pdf", help="Which function to tabulate")
    parser.add_argument(
        "--rates", type=parse_float_grid, help="Evaluation rates in nats (v1,v2,... or start:stop:step)"
    )
    parser.set_defaults(handler=run_dist)

    parser = subparsers.add_parser("simulate", help="Export a Monte Carlo ensemble")
    add_channel_options(parser)
    add_run_options(parser)
    parser.set_defaults(handler=run_simulate)
