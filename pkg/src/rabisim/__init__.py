"""Simulation toolkit for Rabi and Dicke models on trapped-ion and circuit-QED hardware."""

__version__ = "0.1.0"
