"""
Subcommand modules.

Each module exposes ``register(subparsers)`` adding its subcommands and their
handlers to the top-level parser.
"""
