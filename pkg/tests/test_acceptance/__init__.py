"""
Reference-result test package.

This package contains slow end-to-end checks against published reference
values.
"""
