"""
Command-line interface.

This package contains the ``jacobi-mimo`` argument parser, the shared option
handling, the CSV writers and one module per group of subcommands.
"""
