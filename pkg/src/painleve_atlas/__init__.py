"""Orbifold Hamiltonian atlas of Okamoto's space for Painleve I."""

__version__ = "0.1.0"
