"""Statevector simulation of single-photon protective-measurement experiments."""

__version__ = "0.1.0"
