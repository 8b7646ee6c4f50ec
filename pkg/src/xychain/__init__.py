"""Compressed classical simulation of the 1-D XY spin chain.

The package builds the two-qubit-gate circuit diagonalizing the chain, its
exponentially compressed orthogonal counterpart, covariance-matrix states
for thermal/excited/product preparations, and the experiment drivers
(magnetization sweeps, quench scaling fits, correlations, time traces),
all cross-validated against a dense small-n reference.
"""

__version__ = "0.1.0"
