"""
CSV output.

This module provides the run manifest written at the top of every file, the
atomic output target (temporary file renamed on success, removed on failure)
and the CSV table writer. Files are UTF-8 with LF line endings.
"""

import csv
import logging
import os
import sys
import tempfile
from contextlib import contextmanager
from datetime import datetime, timezone
from typing import Any, Dict, Iterable, Iterator, Optional, Sequence, TextIO

from jacobi_mimo import __app_name__, __version__
from jacobi_mimo.errors import OutputError
from jacobi_mimo.schemas import ChannelConfig, RunManifest, RunOptions


logger = logging.getLogger(__app_name__)


# PUBLIC_INTERFACE
def fmt(value: Any) -> str:
    """Render a cell: floats with 12 significant digits, anything else as text."""
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


# PUBLIC_INTERFACE
def config_snapshot(cfg: ChannelConfig, options: RunOptions) -> Dict[str, Any]:
    """Channel and run options as the configuration block of a manifest."""
    config = cfg.snapshot()
    config.update(options.model_dump(exclude={"output"}))
    return config


# PUBLIC_INTERFACE
def build_manifest(
    command_line: str,
    config: Dict[str, Any],
    seed: Optional[int] = None,
    generator: Optional[str] = None,
) -> RunManifest:
    """
    Provenance of an output file.

    Args:
        command_line: The invocation, arguments included
        config: Configuration snapshot (channel and run options)
        seed: Monte Carlo master seed when samples were drawn
        generator: Bit generator name when samples were drawn

    Returns:
        RunManifest: Manifest stamped with the tool version and UTC time
    """
    return RunManifest(
        command_line=command_line,
        config=config,
        seed=seed,
        tool_version=f"{__app_name__} {__version__}",
        generator=generator,
        timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
    )


# PUBLIC_INTERFACE
@contextmanager
def atomic_output(path: Optional[str]) -> Iterator[TextIO]:
    """
    Output stream that only materialises a complete file.

    Writes go to a temporary file next to ``path`` which replaces ``path`` on
    success and is removed on any failure. ``None`` writes to standard
    output.

    Args:
        path: Target file or None

    Yields:
        TextIO: Stream opened with ``newline=""``

    Raises:
        OutputError: If the file cannot be created or renamed
    """
    if path is None:
        yield sys.stdout
        sys.stdout.flush()
        return

    directory = os.path.dirname(os.path.abspath(path))
    try:
        handle = tempfile.NamedTemporaryFile(
            "w", encoding="utf-8", newline="", dir=directory, prefix=".partial-", suffix=".csv", delete=False
        )
    except OSError as exc:
        raise OutputError(f"cannot write to {directory}: {exc.strerror or exc}") from exc

    try:
        with handle:
            yield handle
        os.replace(handle.name, path)
    except BaseException as exc:
        if os.path.exists(handle.name):
            os.remove(handle.name)
            logger.info(f"Removed partial output for {path}")
        if isinstance(exc, OSError):
            raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc
        raise
    logger.info(f"Wrote {path}")


# PUBLIC_INTERFACE
def write_table(
    stream: TextIO,
    manifest: RunManifest,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
) -> None:
    """
    Write ``#`` manifest lines, a header and formatted rows.

    Args:
        stream: Output stream
        manifest: Provenance block
        header: Column names
        rows: Table rows
    """
    for line in manifest.comment_lines():
        stream.write(line + "\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(cell) for cell in row])


# PUBLIC_INTERFACE
def emit(
    command_line: str,
    output: Optional[str],
    config: Dict[str, Any],
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    seed: Optional[int] = None,
    generator: Optional[str] = None,
) -> None:
    """
    Write one CSV table with its manifest to ``output`` (standard output when None).

    Example:
        ```python
        emit("jacobi-mimo mgf --preset m4n3", None, cfg.snapshot(), ["kappa", "re_M", "im_M"], rows)
        ```
    """
    manifest = build_manifest(command_line, config, seed, generator)
    with atomic_output(output) as stream:
        write_table(stream, manifest, header, rows)
