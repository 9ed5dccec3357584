"""
Test package for the Jacobi MIMO statistics library.

This package contains all tests for the library, including unit tests of the
numerical core, command-line tests and slow reference-result checks.
"""
