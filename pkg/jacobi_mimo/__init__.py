"""
Jacobi MIMO mutual-information statistics.

Exact and approximate statistics of the mutual information of Jacobi MIMO
optical channels under arbitrary per-mode power allocation, together with a
Monte Carlo channel simulator used to validate them.
"""

__version__ = "0.1.0"
__app_name__ = "jacobi-mimo-stats"
