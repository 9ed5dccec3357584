"""
Logging setup and run tracing.

This module provides the logging configuration of the CLI and a context
manager that logs the start, completion and failure of a command together
with a run id and timing information.
"""

import logging
import time
import uuid
from contextlib import contextmanager
from typing import Iterator, Optional

from jacobi_mimo import __app_name__
from jacobi_mimo.config import settings


logger = logging.getLogger(__app_name__)


# PUBLIC_INTERFACE
def configure_logging(level: Optional[str] = None) -> None:
    """
    Configure the root logger for command-line use.

    Args:
        level: Log level name; defaults to DEBUG in debug mode, otherwise
            to ``settings.LOG_LEVEL``
    """
    if level is None:
        level = "DEBUG" if settings.DEBUG else settings.LOG_LEVEL
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )


# PUBLIC_INTERFACE
def new_run_id() -> str:
    """Generate a run id for log correlation."""
    return str(uuid.uuid4())


# PUBLIC_INTERFACE
@contextmanager
def run_logging(command: str, run_id: Optional[str] = None) -> Iterator[str]:
    """
    Log the lifecycle of a command.

    Args:
        command: Name of the command being run
        run_id: Correlation id; generated when omitted

    Yields:
        str: The run id

    Example:
        ```python
        with run_logging("moments") as run_id:
            result = moments(cfg)
        ```
    """
    run_id = run_id or new_run_id()
    start_time = time.perf_counter()
    logger.info(f"Run started: {command} (run_id: {run_id})")
    try:
        yield run_id
    except Exception as e:
        process_time = time.perf_counter() - start_time
        logger.error(
            f"Run failed: {command} - Error: {str(e)} - Time: {process_time:.3f}s "
            f"(run_id: {run_id})",
            exc_info=settings.DEBUG,
        )
        raise
    process_time = time.perf_counter() - start_time
    logger.info(
        f"Run completed: {command} - Time: {process_time:.3f}s (run_id: {run_id})"
    )
