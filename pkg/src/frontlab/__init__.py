"""Numerical laboratory for front propagation in the Lotka-Volterra competition-diffusion system."""

__version__ = "0.1.0"
