"""Simulation and closed-form analysis of an interferometric weak measurement
of photon polarization, read out through which-path detection."""

__version__ = "0.1.0"
