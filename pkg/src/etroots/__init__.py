"""Root equidistribution diagnostics for complex polynomials."""

__version__ = "0.1.0"
