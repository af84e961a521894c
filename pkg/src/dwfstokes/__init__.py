"""Density matrix, Stokes vector and discrete Wigner function conversions for n-qubit states."""

__version__ = "0.1.0"
