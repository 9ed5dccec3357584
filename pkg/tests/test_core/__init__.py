"""
Core test package.

This package contains tests for the special functions, determinants, MGF,
Monte Carlo simulator, distribution curves and comparison drivers.
"""
