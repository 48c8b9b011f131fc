"""Exact-arithmetic workbench for Fourier-Laplace transforms of monodromic
modules, their Hodge and weight filtrations, the microlocalization map and
GKZ system construction."""

__version__ = "0.1.0"
