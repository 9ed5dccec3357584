"""
Command-line entry point.

This module builds the ``jacobi-mimo`` parser from the subcommand modules,
configures logging and maps failures to exit codes with a one-line
diagnostic on standard error.
"""

import argparse
import logging
import shlex
import sys
from typing import List, Optional, Sequence

from jacobi_mimo import __app_name__, __version__
from jacobi_mimo.cli.commands import curves, exact, tables
from jacobi_mimo.errors import EXIT_OK, describe, exit_code_for
from jacobi_mimo.tracing import configure_logging, run_logging

logger = logging.getLogger(__app_name__)

COMMAND_MODULES = (exact, curves, tables)


# PUBLIC_INTERFACE
def build_parser() -> argparse.ArgumentParser:
    """
    Build the top-level parser with every registered subcommand.

    Returns:
        argparse.ArgumentParser: Parser whose subcommands set ``handler``
    """
    parser = argparse.ArgumentParser(
        prog="jacobi-mimo",
        description="Exact and approximate mutual-information statistics of Jacobi MIMO channels",
    )
    parser.add_argument("--version", action="version", version=f"{__app_name__} {__version__}")
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        type=str.upper,
        help="Log level on standard error",
    )
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
    for module in COMMAND_MODULES:
        module.register(subparsers)
    return parser


# PUBLIC_INTERFACE
def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one subcommand.

    Args:
        argv: Arguments without the program name; ``sys.argv[1:]`` by default

    Returns:
        int: 0 on success, 2 for invalid configuration, 3 for a failed
        numerical check, 4 for an I/O failure, 1 otherwise

    Example:
        ```python
        main(["moments", "--preset", "m3n6-strong", "--bits"])
        ```
    """
    arguments: List[str] = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(arguments)
    args.command_line = "jacobi-mimo " + shlex.join(arguments)
    configure_logging(args.log_level)

    try:
        with run_logging(args.command):
            args.handler(args)
    except Exception as exc:
        print(f"jacobi-mimo {args.command}: {describe(exc)}", file=sys.stderr)
        return exit_code_for(exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
