"""Riesz transforms for the Hermite and special Hermite operators: kernels, routes and numerical probes."""

__version__ = "0.1.0"
