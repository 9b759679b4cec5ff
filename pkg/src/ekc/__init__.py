"""Euler-Kronecker constants of ray class fields of imaginary quadratic fields."""

__version__ = "0.1.0"
