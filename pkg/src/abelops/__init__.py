"""Exact symbolic algebra for multilinear shift operators on tensor products
of differential polynomials, and the function spaces they generate on cyclic
plane curves."""

__version__ = "0.1.0"
