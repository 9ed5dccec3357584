"""
Tests for command-line option resolution.

This module contains tests for grid parsing and for the layering of presets,
config files and explicit flags into a channel configuration and run options.
"""

import argparse
from pathlib import Path

import pytest

from jacobi_mimo.cli.main import build_parser
from jacobi_mimo.cli.options import parse_config, parse_dimensions, parse_float_grid, read_config_file
from jacobi_mimo.errors import EXIT_INVALID_CONFIG, InvalidConfigError
from jacobi_mimo.schemas import REFERENCE_PRESETS


def _parse(*argv: str) -> argparse.Namespace:
    return build_parser().parse_args(list(argv))


def test_parse_float_grid():
    """
    Test list and range forms.
    """
    assert parse_float_grid("0:30:10") == [0.0, 10.0, 20.0, 30.0]
    assert parse_float_grid("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert parse_float_grid("1, 2.5") == [1.0, 2.5]


@pytest.mark.parametrize("text", ["", "a,b", "3:1:1", "0:1:0", "0:1"])
def test_parse_float_grid_rejects_malformed(text: str):
    """
    Test malformed grid specifications.

    Args:
        text: Invalid specification
    """
    with pytest.raises(argparse.ArgumentTypeError):
        parse_float_grid(text)


def test_parse_config_from_preset():
    """
    Test that a preset alone gives the registered configuration.
    """
    cfg, options = parse_config(_parse("moments", "--preset", "m4n3"))
    assert cfg == REFERENCE_PRESETS["m4n3"]
    assert options.cutoff == "auto"
    assert options.bits is False


def test_parse_config_from_flags():
    """
    Test a configuration given entirely by flags.
    """
    cfg, options = parse_config(
        _parse("moments", "--m", "2", "--n", "1", "--l", "4", "--q", "1.5,0.4", "--cutoff", "12", "--bits")
    )
    assert (cfg.m, cfg.n, cfg.l, cfg.q) == (2, 1, 4, (1.5, 0.4))
    assert options.cutoff == 12.0
    assert options.bits is True


def test_parse_config_precedence(tmp_path: Path):
    """
    Test that the config file overrides the preset and flags override both.

    Args:
        tmp_path: Temporary directory
    """
    path = tmp_path / "channel.conf"
    path.write_text("preset = m3n6-strong\nl = 14\nsamples = 1000\nseed = 4\n", encoding="utf-8")
    cfg, options = parse_config(_parse("capacity", "--config", str(path), "--seed", "9"))
    assert cfg.q == REFERENCE_PRESETS["m3n6-strong"].q
    assert cfg.l == 14
    assert options.samples == 1000
    assert options.seed == 9


def test_read_config_file_rejects_unknown_keys(tmp_path: Path):
    """
    Test unknown keys and missing files.

    Args:
        tmp_path: Temporary directory
    """
    path = tmp_path / "bad.conf"
    path.write_text("m = 2\ncolour = blue\n", encoding="utf-8")
    with pytest.raises(InvalidConfigError, match="colour"):
        read_config_file(str(path))
    with pytest.raises(InvalidConfigError):
        read_config_file(str(tmp_path / "missing.conf"))


@pytest.mark.parametrize(
    "argv,field",
    [
        (("--m", "3", "--n", "6", "--l", "8", "--q", "1,1,1"), "l must satisfy"),
        (("--m", "2", "--n", "1", "--l", "4", "--q", "1.0"), "q must hold"),
        (("--m", "2", "--n", "1", "--l", "4", "--q", "1.0,-2.0"), "positive"),
        (("--preset", "m4n3", "--samples", "0"), "samples"),
        (("--preset", "m4n3", "--cutoff", "-3"), "cutoff"),
    ],
)
def test_parse_config_invalid(argv: tuple, field: str):
    """
    Test that invalid configurations raise with a diagnostic.

    Args:
        argv: Channel and run flags
        field: Text expected in the diagnostic
    """
    with pytest.raises(InvalidConfigError, match=field) as info:
        parse_config(_parse("moments", *argv))
    assert info.value.exit_code == EXIT_INVALID_CONFIG
    assert "\n" not in info.value.detail


def test_parse_dimensions():
    """
    Test dimension-only resolution and its checks.
    """
    m, n, l, _ = parse_dimensions(_parse("highsnr", "--m", "3", "--n", "6", "--l", "12"))  # noqa: E741
    assert (m, n, l) == (3, 6, 12)
    with pytest.raises(InvalidConfigError, match="l"):
        parse_dimensions(_parse("highsnr", "--m", "3", "--n", "6"))
    with pytest.raises(InvalidConfigError):
        parse_dimensions(_parse("highsnr", "--m", "3", "--n", "6", "--l", "5"))
