"""
Commands for exact statistics.

This module provides the ``mgf``, ``moments``, ``capacity`` and ``highsnr``
subcommands, all computed from the exact MGF.
"""

import argparse
from typing import Any, Dict, List

from jacobi_mimo.cli.options import (
    add_channel_options,
    add_run_options,
    parse_config,
    parse_dimensions,
    parse_float_grid,
)
from jacobi_mimo.cli.output import config_snapshot, emit
from jacobi_mimo.core.analysis import high_snr_comparison
from jacobi_mimo.core.mgf import mgf_grid, moments
from jacobi_mimo.core.montecarlo import GENERATOR_NAME, mc_capacity, run_ensemble
from jacobi_mimo.schemas import MomentSet
from jacobi_mimo.schemas.results import LN2


# PUBLIC_INTERFACE
def run_mgf(args: argparse.Namespace) -> None:
    """Tabulate ``M(kappa)`` on the symmetric grid as ``kappa,re_M,im_M``."""
    cfg, options = parse_config(args)
    grid = mgf_grid(cfg, options.cutoff, options.dkappa, options.workers)
    rows = [(float(k), float(v.real), float(v.imag)) for k, v in zip(grid.kappas, grid.values)]
    config = config_snapshot(cfg, options)
    config["cutoff_L"] = grid.cutoff_L
    emit(args.command_line, options.output, config, ["kappa", "re_M", "im_M"], rows)


def _moment_column(mom: MomentSet) -> Dict[str, float]:
    return {
        "mu1": mom.mu1,
        "mu2": mom.mu2,
        "mu3": mom.mu3,
        "sigma2": mom.sigma2,
        "skewness": mom.skewness,
        "capacity": mom.mu1,
    }


# PUBLIC_INTERFACE
def run_moments(args: argparse.Namespace) -> None:
    """Report mean, raw moments, variance, skewness and capacity."""
    cfg, options = parse_config(args)
    mom = moments(cfg)
    header = ["quantity", "nats"]
    columns = [_moment_column(mom)]
    if options.bits:
        header.append("bits")
        columns.append(_moment_column(mom.in_bits()))
    rows = [[name] + [column[name] for column in columns] for name in columns[0]]
    emit(args.command_line, options.output, config_snapshot(cfg, options), header, rows)


# PUBLIC_INTERFACE
def run_capacity(args: argparse.Namespace) -> None:
    """Ergodic capacity, optionally with a Monte Carlo estimate and its standard error."""
    cfg, options = parse_config(args)
    capacity = moments(cfg).mu1
    header = ["m", "n", "l", "rho", "capacity"]
    row: List[Any] = [cfg.m, cfg.n, cfg.l, cfg.rho, capacity]
    seed = generator = None
    if args.mc:
        mean, stderr = mc_capacity(run_ensemble(cfg, options.samples, options.seed, options.workers))
        header += ["mc_capacity", "mc_stderr"]
        row += [mean, stderr]
        seed, generator = options.seed, GENERATOR_NAME
    if options.bits:
        header.append("capacity_bits")
        row.append(capacity / LN2)
    emit(args.command_line, options.output, config_snapshot(cfg, options), header, [row], seed, generator)


# PUBLIC_INTERFACE
def run_highsnr(args: argparse.Namespace) -> None:
    """Exact equal-power capacity against the high-SNR formula per total power."""
    m, n, l, options = parse_dimensions(args)  # noqa: E741
    rows = [
        [row["rho_db"], row["exact"], row["high_snr"], row["rel_error"]]
        for row in high_snr_comparison(m, n, l, args.rho_db)
    ]
    config = {"m": m, "n": n, "l": l, "rho_db": args.rho_db}
    emit(args.command_line, options.output, config, ["rho_db", "exact", "high_snr", "rel_error"], rows)


def register(subparsers: "argparse._SubParsersAction[argparse.ArgumentParser]") -> None:
    """Register the exact-statistics subcommands."""
    parser = subparsers.add_parser("mgf", help="Tabulate the MGF of the mutual information")
    add_channel_options(parser)
    add_run_options(parser)
    parser.set_defaults(handler=run_mgf)

    parser = subparsers.add_parser("moments", help="Moments, variance, skewness and capacity")
    add_channel_options(parser)
    add_run_options(parser)
    parser.set_defaults(handler=run_moments)

    parser = subparsers.add_parser("capacity", help="Ergodic capacity")
    add_channel_options(parser)
    add_run_options(parser)
    parser.add_argument("--mc", action="store_true", help="Add a Monte Carlo estimate")
    parser.set_defaults(handler=run_capacity)

    parser = subparsers.add_parser("highsnr", help="Exact vs high-SNR equal-power capacity")
    add_channel_options(parser, with_q=False)
    add_run_options(parser)
    parser.add_argument(
        "--rho-db", dest="rho_db", type=parse_float_grid, default="0:40:2",
        help="Total powers in dB (v1,v2,... or start:stop:step)",
    )
    parser.set_defaults(handler=run_highsnr)
