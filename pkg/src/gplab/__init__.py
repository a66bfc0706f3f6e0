"""Simulation laboratory for Gaussian polytopes and their intrinsic volumes."""

__version__ = "0.1.0"
