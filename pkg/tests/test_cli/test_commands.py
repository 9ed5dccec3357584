"""
Tests for the command-line subcommands.

This module contains end-to-end tests of ``main``: output files with their
manifest, exit codes and diagnostics, deterministic reruns and atomic
output.
"""

import csv
from pathlib import Path
from typing import List, Tuple

import pytest

from jacobi_mimo.cli.main import main
from jacobi_mimo.cli.output import atomic_output
from jacobi_mimo.errors import EXIT_INVALID_CONFIG, EXIT_IO, EXIT_OK, OutputError
from jacobi_mimo.schemas import REFERENCE_PRESETS


def _read(path: Path) -> Tuple[List[str], List[List[str]]]:
    """Split an output file into manifest lines and CSV rows."""
    lines = path.read_text(encoding="utf-8").splitlines()
    comments = [line for line in lines if line.startswith("#")]
    rows = list(csv.reader(line for line in lines if not line.startswith("#")))
    return comments, rows


def test_moments_command(tmp_path: Path):
    """
    Test the moments table in nats and bits.

    Args:
        tmp_path: Temporary directory
    """
    target = tmp_path / "moments.csv"
    assert main(["moments", "--preset", "m4n3", "--bits", "-o", str(target)]) == EXIT_OK
    comments, rows = _read(target)
    assert comments[0] == f"# command: jacobi-mimo moments --preset m4n3 --bits -o {target}"
    assert any(line.startswith("# version: jacobi-mimo-stats ") for line in comments)
    assert any(line.startswith("# timestamp: ") for line in comments)
    assert rows[0] == ["quantity", "nats", "bits"]
    values = {row[0]: (float(row[1]), float(row[2])) for row in rows[1:]}
    assert set(values) == {"mu1", "mu2", "mu3", "sigma2", "skewness", "capacity"}
    assert values["mu1"][0] == values["capacity"][0]
    assert values["skewness"][0] == pytest.approx(values["skewness"][1], rel=1e-9)


def test_capacity_command_with_monte_carlo(tmp_path: Path):
    """
    Test the capacity row with a Monte Carlo estimate.

    Args:
        tmp_path: Temporary directory
    """
    target = tmp_path / "capacity.csv"
    argv = ["capacity", "--preset", "m2n1", "--mc", "--samples", "4000", "--seed", "3", "-o", str(target)]
    assert main(argv) == EXIT_OK
    comments, rows = _read(target)
    assert "# seed: 3" in comments
    assert "# generator: Philox" in comments
    assert rows[0] == ["m", "n", "l", "rho", "capacity", "mc_capacity", "mc_stderr"]
    capacity, mean, stderr = (float(value) for value in rows[1][4:])
    assert abs(capacity - mean) <= 5.0 * stderr


def test_mgf_command(tmp_path: Path):
    """
    Test the MGF table layout.

    Args:
        tmp_path: Temporary directory
    """
    target = tmp_path / "mgf.csv"
    assert main(["mgf", "--preset", "m4n3", "--cutoff", "2", "--dkappa", "0.5", "-o", str(target)]) == EXIT_OK
    comments, rows = _read(target)
    assert rows[0] == ["kappa", "re_M", "im_M"]
    assert len(rows) == 1 + 9
    centre = rows[1 + 4]
    assert float(centre[0]) == 0.0
    assert float(centre[1]) == pytest.approx(1.0, abs=1e-9)
    assert "# cutoff_L: 2.0" in comments


def test_dist_command(tmp_path: Path):
    """
    Test a Gaussian outage curve on explicit rates.

    Args:
        tmp_path: Temporary directory
    """
    target = tmp_path / "cdf.csv"
    argv = ["dist", "--preset", "m4n3", "--method", "gaussian", "--kind", "cdf", "--rates", "0:10:0.5"]
    assert main(argv + ["-o", str(target)]) == EXIT_OK
    comments, rows = _read(target)
    assert rows[0] == ["I", "value"]
    values = [float(row[1]) for row in rows[1:]]
    assert len(values) == 21
    assert values == sorted(values)
    assert "# method: gaussian" in comments


def test_highsnr_command(tmp_path: Path):
    """
    Test the high-SNR table.

    Args:
        tmp_path: Temporary directory
    """
    target = tmp_path / "highsnr.csv"
    assert main(["highsnr", "--m", "3", "--n", "6", "--l", "12", "--rho-db", "10,30", "-o", str(target)]) == EXIT_OK
    _, rows = _read(target)
    assert rows[0] == ["rho_db", "exact", "high_snr", "rel_error"]
    assert [float(row[0]) for row in rows[1:]] == [10.0, 30.0]


def test_sweep_command(tmp_path: Path):
    """
    Test two allocation ratios over a small power grid.

    Args:
        tmp_path: Temporary directory
    """
    target = tmp_path / "sweep.csv"
    argv = ["sweep", "--m", "3", "--n", "6", "--l", "12", "--ratios", "1,1,1", "--ratios", "8,1,1"]
    assert main(argv + ["--rho-db", "0,10,20", "-o", str(target)]) == EXIT_OK
    _, rows = _read(target)
    assert rows[0] == ["ratio", "rho_db", "capacity"]
    assert len(rows) == 1 + 6
    assert rows[1][0] == "0.333333:0.333333:0.333333"
    assert rows[4][0] == "0.8:0.1:0.1"


def test_simulate_is_deterministic(tmp_path: Path):
    """
    Test that a rerun with the same seed writes the same body.

    Args:
        tmp_path: Temporary directory
    """
    target = tmp_path / "ensemble.csv"
    argv = ["simulate", "--preset", "m3n6-strong", "--samples", "3000", "--seed", "21", "-o", str(target)]

    def body() -> List[str]:
        assert main(argv) == EXIT_OK
        lines = target.read_text(encoding="utf-8").splitlines()
        return [line for line in lines if not line.startswith("# timestamp:")]

    first = body()
    assert body() == first
    assert len([line for line in first if not line.startswith("#")]) == 1 + 3000


def test_invalid_configuration_exit_code(tmp_path: Path, capsys: pytest.CaptureFixture):
    """
    Test exit code 2 with a one-line diagnostic and no output file.

    Args:
        tmp_path: Temporary directory
        capsys: Captured output
    """
    target = tmp_path / "never.csv"
    argv = ["moments", "--m", "3", "--n", "6", "--l", "8", "--q", "1,1,1", "-o", str(target)]
    assert main(argv) == EXIT_INVALID_CONFIG
    err = capsys.readouterr().err.strip().splitlines()
    assert err[-1].startswith("jacobi-mimo moments: invalid_config: ")
    assert not target.exists()


def test_usage_error_exit_code():
    """
    Test that argparse usage errors exit with code 2.
    """
    with pytest.raises(SystemExit) as info:
        main(["dist", "--preset", "m4n3", "--method", "nonsense"])
    assert info.value.code == 2


def test_missing_output_directory_exit_code(tmp_path: Path):
    """
    Test that an unwritable target maps to the I/O exit code.

    Args:
        tmp_path: Temporary directory
    """
    target = tmp_path / "missing" / "out.csv"
    assert main(["moments", "--preset", "m4n3", "-o", str(target)]) == EXIT_IO


def test_scan_requires_numeric_cutoffs():
    """
    Test that a scan without stored slices or explicit grids is rejected.
    """
    assert main(["scan", "--preset", "m2n1", "--samples", "1000"]) == EXIT_INVALID_CONFIG


def test_atomic_output_removes_partial_file(tmp_path: Path):
    """
    Test that a failure while writing leaves nothing behind.

    Args:
        tmp_path: Temporary directory
    """
    target = tmp_path / "partial.csv"
    with pytest.raises(RuntimeError):
        with atomic_output(str(target)) as stream:
            stream.write("half a row")
            raise RuntimeError("interrupted")
    assert list(tmp_path.iterdir()) == []


def test_atomic_output_unwritable_directory(tmp_path: Path):
    """
    Test the error raised for a missing directory.

    Args:
        tmp_path: Temporary directory
    """
    with pytest.raises(OutputError):
        with atomic_output(str(tmp_path / "missing" / "out.csv")):
            pass


def test_presets_run_through_cli(tmp_path: Path):
    """
    Test that every preset name is accepted by the capacity command.

    Args:
        tmp_path: Temporary directory
    """
    for name in sorted(REFERENCE_PRESETS):
        target = tmp_path / f"{name}.csv"
        assert main(["capacity", "--preset", name, "-o", str(target)]) == EXIT_OK
        _, rows = _read(target)
        assert float(rows[1][4]) > 0.0
