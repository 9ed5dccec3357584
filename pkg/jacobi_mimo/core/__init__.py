"""
Numerical core.

This package contains the special functions, dense linear algebra, exact MGF
assembly, Monte Carlo simulator, distribution curves and comparison drivers.
"""
