"""Orthogonal polynomials, reproducing kernels and Fourier expansions on cones."""

__version__ = "0.1.0"
