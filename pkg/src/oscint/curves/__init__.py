"""Reference curves and registry."""

from oscint.curves.definitions import CURVE_REGISTRY

__all__ = ["CURVE_REGISTRY"]
