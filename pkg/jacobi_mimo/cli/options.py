"""
Shared command-line options.

This module provides the option groups common to every subcommand and the
resolution of a channel configuration and run options from a named preset, a
``key = value`` config file and explicit flags, in increasing precedence.
"""

import argparse
import math
import os
from typing import Any, Dict, List, Optional, Tuple

from dotenv import dotenv_values
from pydantic import ValidationError

from jacobi_mimo.errors import InvalidConfigError
from jacobi_mimo.schemas import REFERENCE_PRESETS, ChannelConfig, RunOptions

CHANNEL_KEYS = ("m", "n", "l", "q")
RUN_KEYS = tuple(RunOptions.model_fields)
FILE_KEYS = frozenset(CHANNEL_KEYS + RUN_KEYS + ("preset",))


# PUBLIC_INTERFACE
def parse_float_grid(text: str) -> List[float]:
    """
    Parse ``v1,v2,...`` or an inclusive range ``start:stop:step``.

    Args:
        text: Grid specification

    Returns:
        List[float]: The grid values

    Raises:
        argparse.ArgumentTypeError: If the text is malformed

    Example:
        ```python
        parse_float_grid("0:30:10")  # [0.0, 10.0, 20.0, 30.0]
        ```
    """
    try:
        if ":" in text:
            start, stop, step = (float(part) for part in text.split(":"))
            if step <= 0.0 or stop < start:
                raise ValueError
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [start + i * step for i in range(count)]
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid grid {text!r}: use v1,v2,... or start:stop:step") from exc
    if not values:
        raise argparse.ArgumentTypeError("grid must not be empty")
    return values


# PUBLIC_INTERFACE
def add_channel_options(parser: argparse.ArgumentParser, with_q: bool = True) -> None:
    """
    Add ``--preset``, ``--config``, ``--m``, ``--n``, ``--l`` and optionally ``--q``.

    Args:
        parser: Subcommand parser
        with_q: Whether the command needs a power allocation
    """
    group = parser.add_argument_group("channel")
    group.add_argument("--preset", choices=sorted(REFERENCE_PRESETS), help="Named reference configuration")
    group.add_argument("--config", metavar="PATH", help="File with one 'key = value' per line")
    group.add_argument("--m", type=int, help="Number of transmit modes")
    group.add_argument("--n", type=int, help="Number of receive modes")
    group.add_argument("--l", type=int, help="Number of fiber channels")
    if with_q:
        group.add_argument("--q", metavar="Q1,Q2,...", help="Eigenvalues of the transmit covariance")


# PUBLIC_INTERFACE
def add_run_options(parser: argparse.ArgumentParser) -> None:
    """Add the run-level options shared by all subcommands."""
    group = parser.add_argument_group("run")
    group.add_argument("--samples", type=int, help="Monte Carlo samples")
    group.add_argument("--seed", type=int, help="Monte Carlo master seed")
    group.add_argument("--cutoff", help="Cut-off length L or 'auto'")
    group.add_argument("--dkappa", type=float, help="Kappa grid step")
    group.add_argument("--bits", action="store_true", default=None, help="Report rates in bits")
    group.add_argument("--workers", type=int, help="Worker threads")
    group.add_argument("--delta-i", dest="delta_i", type=float, help="Histogram bin width in nats")
    group.add_argument("--mask-threshold", dest="mask_threshold", type=float, help="KL mask threshold")
    group.add_argument("--output", "-o", metavar="PATH", help="Output CSV (standard output by default)")


# PUBLIC_INTERFACE
def read_config_file(path: str) -> Dict[str, str]:
    """
    Read a ``key = value`` config file.

    Args:
        path: File path

    Returns:
        Dict[str, str]: The non-empty entries

    Raises:
        InvalidConfigError: If the file is missing or holds unknown keys
    """
    if not os.path.isfile(path):
        raise InvalidConfigError(f"config file not found: {path}")
    values = dotenv_values(path, encoding="utf-8")
    unknown = sorted(set(values) - FILE_KEYS)
    if unknown:
        raise InvalidConfigError(f"unknown config key(s) in {path}: {', '.join(unknown)}")
    return {key: value for key, value in values.items() if value not in (None, "")}


def _preset_values(name: Optional[str]) -> Dict[str, Any]:
    if not name:
        return {}
    if name not in REFERENCE_PRESETS:
        raise InvalidConfigError(f"unknown preset {name!r}")
    return REFERENCE_PRESETS[name].snapshot()


def _layered(args: argparse.Namespace) -> Dict[str, Any]:
    file_values: Dict[str, Any] = read_config_file(args.config) if getattr(args, "config", None) else {}
    preset = getattr(args, "preset", None) or file_values.pop("preset", None)
    file_values.pop("preset", None)
    merged = _preset_values(preset)
    merged.update(file_values)
    for key in CHANNEL_KEYS + RUN_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _run_options(merged: Dict[str, Any]) -> RunOptions:
    try:
        return RunOptions(**{key: merged[key] for key in RUN_KEYS if key in merged})
    except ValidationError as exc:
        raise InvalidConfigError.from_validation_error(exc) from exc


# PUBLIC_INTERFACE
def parse_config(args: argparse.Namespace) -> Tuple[ChannelConfig, RunOptions]:
    """
    Resolve the channel configuration and run options of a command.

    Values come from ``--preset`` (or ``preset`` in the file), then the
    ``--config`` file, then explicit flags; later sources win.

    Args:
        args: Parsed command-line arguments

    Returns:
        Tuple[ChannelConfig, RunOptions]: Validated configuration and options

    Raises:
        InvalidConfigError: With a single-line diagnostic naming the violated
            field or invariant

    Example:
        ```python
        args = parser.parse_args(["moments", "--m", "3", "--n", "6", "--l", "12", "--q", "8.8,0.11,0.09"])
        cfg, options = parse_config(args)
        ```
    """
    merged = _layered(args)
    try:
        cfg = ChannelConfig(**{key: merged[key] for key in CHANNEL_KEYS if key in merged})
    except ValidationError as exc:
        raise InvalidConfigError.from_validation_error(exc) from exc
    return cfg, _run_options(merged)


# PUBLIC_INTERFACE
def parse_dimensions(args: argparse.Namespace) -> Tuple[int, int, int, RunOptions]:
    """
    Resolve ``(m, n, l)`` and run options for commands that choose the powers themselves.

    Raises:
        InvalidConfigError: If a dimension is missing or ``l < m + n``
    """
    merged = _layered(args)
    missing = [key for key in ("m", "n", "l") if key not in merged]
    if missing:
        raise InvalidConfigError(f"{', '.join(missing)}: Field required")
    try:
        m, n, l = (int(merged[key]) for key in ("m", "n", "l"))  # noqa: E741
    except (TypeError, ValueError) as exc:
        raise InvalidConfigError(f"dimensions must be integers: {exc}") from exc
    if min(m, n) < 1 or l < m + n:
        raise InvalidConfigError(f"l must satisfy l >= m + n >= 2 (got m={m}, n={n}, l={l})")
    return m, n, l, _run_options(merged)
