"""oscint: oscillatory boundary integrals and overdetermined eigenproblems on convex domains."""

__version__ = "0.1.0"
