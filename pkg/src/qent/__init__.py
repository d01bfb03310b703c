"""Monte Carlo study of two-qubit entanglement versus q-entropies."""

__version__ = "0.1.0"
