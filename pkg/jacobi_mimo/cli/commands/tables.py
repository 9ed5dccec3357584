"""
Commands for comparison tables.

This module provides the ``compare`` (approximations against Monte Carlo),
``sweep`` (capacity against total power), ``scan`` (inversion-grid
robustness) and ``allocations`` (fixed-trace allocation study) subcommands.
"""

import argparse
from typing import Any, List

from jacobi_mimo.cli.options import (
    add_channel_options,
    add_run_options,
    parse_config,
    parse_dimensions,
    parse_float_grid,
)
from jacobi_mimo.cli.output import config_snapshot, emit
from jacobi_mimo.core.analysis import (
    ROBUSTNESS_SLICES,
    allocation_comparison,
    approximation_report,
    capacity_sweep,
    robustness_scan,
)
from jacobi_mimo.core.montecarlo import GENERATOR_NAME, run_ensemble
from jacobi_mimo.errors import InvalidConfigError
from jacobi_mimo.schemas import CurveKind
from jacobi_mimo.schemas.results import LN2

_KIND_INDEX = {CurveKind.PDF: 0, CurveKind.CDF: 1, CurveKind.SF: 2}


def _ratio_label(values: Any) -> str:
    return ":".join(format(float(v), ".6g") for v in values)


# PUBLIC_INTERFACE
def run_compare(args: argparse.Namespace) -> None:
    """KL of the Gaussian, Weibull and Fourier PDFs against Monte Carlo, one row."""
    cfg, options = parse_config(args)
    ensemble = run_ensemble(cfg, options.samples, options.seed, options.workers)
    report = approximation_report(
        cfg,
        ensemble,
        options.cutoff,
        options.dkappa,
        options.delta_i,
        options.mask_threshold,
        options.workers,
    )
    header = ["m", "n", "l", "dkl_gaussian", "dkl_weibull", "dkl_fourier", "skewness", "advisory"]
    row = [
        cfg.m,
        cfg.n,
        cfg.l,
        report.dkl("gaussian"),
        report.dkl("weibull"),
        report.dkl("fourier"),
        report.moments.skewness,
        report.advisory,
    ]
    emit(args.command_line, options.output, config_snapshot(cfg, options), header, [row], options.seed, GENERATOR_NAME)


# PUBLIC_INTERFACE
def run_sweep(args: argparse.Namespace) -> None:
    """Capacity against total power for one or more allocation ratios."""
    m, n, l, options = parse_dimensions(args)  # noqa: E741
    header = ["ratio", "rho_db", "capacity"]
    if args.mc:
        header += ["mc_capacity", "mc_stderr"]
    if options.bits:
        header.append("capacity_bits")

    rows: List[List[Any]] = []
    for ratios in args.ratios:
        result = capacity_sweep(
            m, n, l, ratios, args.rho_db, options.samples if args.mc else None, options.seed, options.workers
        )
        label = _ratio_label(result.allocation_ratio)
        for i, (rho_db, capacity) in enumerate(zip(result.rho_db, result.capacity)):
            row: List[Any] = [label, rho_db, capacity]
            if result.mc_capacity and result.mc_stderr:
                row += [result.mc_capacity[i], result.mc_stderr[i]]
            if options.bits:
                row.append(capacity / LN2)
            rows.append(row)

    config = {"m": m, "n": n, "l": l, "rho_db": args.rho_db, "ratios": [list(r) for r in args.ratios]}
    seed = options.seed if args.mc else None
    emit(args.command_line, options.output, config, header, rows, seed, GENERATOR_NAME if args.mc else None)


# PUBLIC_INTERFACE
def run_scan(args: argparse.Namespace) -> None:
    """KL of Fourier-inverted PDFs against Monte Carlo over ``(L, dkappa)`` slices."""
    cfg, options = parse_config(args)
    if args.cutoffs or args.dkappas:
        slices = ((tuple(args.cutoffs or [options.cutoff]), tuple(args.dkappas or [options.dkappa])),)
    elif args.preset in ROBUSTNESS_SLICES:
        slices = ROBUSTNESS_SLICES[args.preset]
    else:
        raise InvalidConfigError("scan needs --cutoffs/--dkappas or a preset with stored slices")
    if any(cutoff == "auto" for cutoffs, _ in slices for cutoff in cutoffs):
        raise InvalidConfigError("scan needs numeric cut-off lengths")

    ensemble = run_ensemble(cfg, options.samples, options.seed, options.workers)
    rows = []
    for cutoffs, dkappas in slices:
        for entry in robustness_scan(
            cfg, cutoffs, dkappas, ensemble, options.delta_i, options.mask_threshold, options.workers
        ):
            rows.append([entry.cutoff_L, entry.step_dk, entry.dkl, entry.min_raw, entry.points])
    header = ["L", "dkappa", "dkl", "min_raw", "points"]
    emit(args.command_line, options.output, config_snapshot(cfg, options), header, rows, options.seed, GENERATOR_NAME)


# PUBLIC_INTERFACE
def run_allocations(args: argparse.Namespace) -> None:
    """Fourier-inverted curves of several power allocations on a shared rate grid."""
    m, n, l, options = parse_dimensions(args)  # noqa: E741
    kind = CurveKind(args.kind)
    results = allocation_comparison(
        m, n, l, args.q_sets, args.rates, options.samples if args.mc else None, options.seed, options.workers
    )
    header = ["allocation", "capacity", "I", "value"]
    if args.mc:
        header.append("source")
    rows: List[List[Any]] = []
    for entry in results:
        cfg = entry["cfg"]
        label = _ratio_label(cfg.q)  # type: ignore[attr-defined]
        capacity = entry["moments"].mu1  # type: ignore[attr-defined]
        curve = entry["curves"][_KIND_INDEX[kind]]  # type: ignore[index]
        for x, y in zip(curve.grid, curve.values):
            rows.append([label, capacity, float(x), float(y)] + (["fourier"] if args.mc else []))
        if args.mc:
            mc_curve = entry["mc"][_KIND_INDEX[kind]]  # type: ignore[index]
            for x, y in zip(mc_curve.grid, mc_curve.values):
                rows.append([label, capacity, float(x), float(y), "monte-carlo"])
    config = {"m": m, "n": n, "l": l, "kind": kind.value, "q_sets": [list(q) for q in args.q_sets]}
    seed = options.seed if args.mc else None
    emit(args.command_line, options.output, config, header, rows, seed, GENERATOR_NAME if args.mc else None)


def register(subparsers: "argparse._SubParsersAction[argparse.ArgumentParser]") -> None:
    """Register the comparison-table subcommands."""
    parser = subparsers.add_parser("compare", help="KL of each approximation against Monte Carlo")
    add_channel_options(parser)
    add_run_options(parser)
    parser.set_defaults(handler=run_compare)

    parser = subparsers.add_parser("sweep", help="Ergodic capacity against total power")
    add_channel_options(parser, with_q=False)
    add_run_options(parser)
    parser.add_argument(
        "--ratios", type=parse_float_grid, action="append", required=True,
        help="Allocation ratios r1,r2,... (repeat for several curves)",
    )
    parser.add_argument("--rho-db", dest="rho_db", type=parse_float_grid, default="0:30:2", help="Total powers in dB")
    parser.add_argument("--mc", action="store_true", help="Add Monte Carlo capacities")
    parser.set_defaults(handler=run_sweep)

    parser = subparsers.add_parser("scan", help="Inversion-grid robustness against Monte Carlo")
    add_channel_options(parser)
    add_run_options(parser)
    parser.add_argument("--cutoffs", type=parse_float_grid, help="Cut-off lengths L")
    parser.add_argument("--dkappas", type=parse_float_grid, help="Kappa grid steps")
    parser.set_defaults(handler=run_scan)

    parser = subparsers.add_parser("allocations", help="Curves of several power allocations")
    add_channel_options(parser, with_q=False)
    add_run_options(parser)
    parser.add_argument(
        "--q-set", dest="q_sets", type=parse_float_grid, action="append", required=True,
        help="Power allocation q1,q2,... (repeat for each allocation)",
    )
    parser.add_argument("--kind", choices=[kind.value for kind in CurveKind], default="pdf")
    parser.add_argument("--rates", type=parse_float_grid, help="Shared rate grid in nats")
    parser.add_argument("--mc", action="store_true", help="Add Monte Carlo histograms")
    parser.set_defaults(handler=run_allocations)
