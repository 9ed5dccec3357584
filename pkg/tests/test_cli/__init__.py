"""
CLI test package.

This package contains tests for option parsing, CSV output and the
subcommands.
"""
