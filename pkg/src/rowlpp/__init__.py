"""Last-passage percolation in row-random environments.

A simulation side (lattice DP kernels, tandem-queue oracle, Monte Carlo
estimation of the time constant, tagged-particle dynamics) and an analytic
side (exact limit shapes for Bernoulli strict-path models, the exponential
duality machinery, boundary asymptotics) that cross-validate each other.
"""

__version__ = "0.1.0"

__all__ = [
    "envmodel",
    "lppsim",
    "bernshape",
    "expshape",
    "boundary",
    "kernels",
    "__version__",
]
