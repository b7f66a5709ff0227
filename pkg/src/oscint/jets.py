"""Truncated Taylor arithmetic in one variable.

A `Jet1D` holds the Taylor coefficients c_0..c_n of a function f about a point,
f(center + s) = Σ c_k s^k + O(s^{n+1}). Coefficients may carry trailing batch
axes (shape ``(n+1, *batch)``), which lets the curve kernel differentiate a
support function at many angles at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import TYPE_CHECKING

import numpy as np

from oscint.errors import BadJetError

if TYPE_CHECKING:
    from collections.abc import Sequence

Scalar = float | complex


@dataclass(frozen=True, eq=False)
class Jet1D:
    """Taylor coefficients of a univariate function at `center`."""

    coeffs: np.ndarray
    center: float = 0.0

    __array_ufunc__ = None  # numpy scalars defer to the reflected operators

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coeffs)
        if coeffs.ndim == 0 or coeffs.shape[0] == 0:
            msg = "a jet needs at least one coefficient"
            raise BadJetError(msg)
        if not np.all(np.isfinite(coeffs)):
            msg = f"jet coefficients must be finite, got {coeffs!r}"
            raise BadJetError(msg)
        if not np.iscomplexobj(coeffs):
            coeffs = coeffs.astype(np.float64)
        object.__setattr__(self, "coeffs", coeffs)

    # -- constructors ---------------------------------------------------------

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[Scalar] | np.ndarray, center: float = 0.0) -> Jet1D:
        return cls(np.asarray(coeffs), center)

    @classmethod
    def from_derivatives(cls, derivs: np.ndarray, center: float = 0.0) -> Jet1D:
        """Build a jet from f, f', f'', ... stacked along axis 0."""
        derivs = np.asarray(derivs)
        scale = np.array([1.0 / factorial(k) for k in range(derivs.shape[0])])
        return cls(derivs * scale.reshape((-1,) + (1,) * (derivs.ndim - 1)), center)

    @classmethod
    def constant(cls, value: Scalar, order: int, center: float = 0.0) -> Jet1D:
        coeffs = np.zeros(order + 1, dtype=np.result_type(value, np.float64))
        coeffs[0] = value
        return cls(coeffs, center)

    @classmethod
    def variable(cls, order: int, center: float = 0.0) -> Jet1D:
        """The identity function x ↦ x expanded about `center`."""
        coeffs = np.zeros(order + 1)
        coeffs[0] = center
        if order >= 1:
            coeffs[1] = 1.0
        return cls(coeffs, center)

    @classmethod
    def sin_cos(cls, order: int) -> tuple[Jet1D, Jet1D]:
        """Jets of sin s and cos s about s = 0."""
        s = np.zeros(order + 1)
        c = np.zeros(order + 1)
        for k in range(order + 1):
            sign = -1.0 if (k // 2) % 2 else 1.0
            if k % 2:
                s[k] = sign / factorial(k)
            else:
                c[k] = sign / factorial(k)
        return cls(s), cls(c)

    # -- structure ------------------------------------------------------------

    @property
    def order(self) -> int:
        return int(self.coeffs.shape[0]) - 1

    @property
    def value(self) -> np.ndarray | Scalar:
        return self.coeffs[0]

    def derivative_value(self, k: int) -> np.ndarray | Scalar:
        """f^{(k)}(center)."""
        if k > self.order:
            msg = f"jet of order {self.order} has no derivative of order {k}"
            raise BadJetError(msg)
        return self.coeffs[k] * factorial(k)

    def truncate(self, order: int) -> Jet1D:
        return Jet1D(self.coeffs[: order + 1], self.center)

    def shifted(self) -> Jet1D:
        """The same jet with its constant term removed."""
        coeffs = self.coeffs.copy()
        coeffs[0] = 0
        return Jet1D(coeffs, self.center)

    def flattened_below(self, order: int) -> Jet1D:
        """Zero every coefficient of degree < `order`."""
        coeffs = self.coeffs.copy()
        coeffs[:order] = 0
        return Jet1D(coeffs, self.center)

    def derivative(self) -> Jet1D:
        """Jet of f'. The result has order one less."""
        if self.order == 0:
            return Jet1D(np.zeros_like(self.coeffs), self.center)
        k = np.arange(1, self.order + 1).reshape((-1,) + (1,) * (self.coeffs.ndim - 1))
        return Jet1D(self.coeffs[1:] * k, self.center)

    def evaluate(self, s: Scalar | np.ndarray) -> np.ndarray | Scalar:
        """Evaluate the Taylor polynomial at offset `s` from the center."""
        out = self.coeffs[-1]
        for c in self.coeffs[-2::-1]:
            out = out * s + c
        return out

    # -- arithmetic -----------------------------------------------------------

    def _align(self, other: Jet1D) -> tuple[np.ndarray, np.ndarray]:
        n = min(self.order, other.order) + 1
        return self.coeffs[:n], other.coeffs[:n]

    def __add__(self, other: Jet1D | Scalar) -> Jet1D:
        if isinstance(other, Jet1D):
            a, b = self._align(other)
            return Jet1D(a + b, self.center)
        coeffs = self.coeffs.astype(np.result_type(self.coeffs, other), copy=True)
        coeffs[0] = coeffs[0] + other
        return Jet1D(coeffs, self.center)

    __radd__ = __add__

    def __neg__(self) -> Jet1D:
        return Jet1D(-self.coeffs, self.center)

    def __sub__(self, other: Jet1D | Scalar) -> Jet1D:
        return self + (-other)

    def __rsub__(self, other: Scalar) -> Jet1D:
        return (-self) + other

    def __mul__(self, other: Jet1D | Scalar) -> Jet1D:
        if not isinstance(other, Jet1D):
            return Jet1D(self.coeffs * other, self.center)
        a, b = self._align(other)
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.result_type(a, b))
        for k in range(out.shape[0]):
            for j in range(k + 1):
                out[k] += a[j] * b[k - j]
        return Jet1D(out, self.center)

    __rmul__ = __mul__

    def __truediv__(self, other: Jet1D | Scalar) -> Jet1D:
        if isinstance(other, Jet1D):
            return self * other.reciprocal()
        return Jet1D(self.coeffs / other, self.center)

    def __rtruediv__(self, other: Scalar) -> Jet1D:
        return self.reciprocal() * other

    def __pow__(self, power: int) -> Jet1D:
        if power < 0:
            return self.reciprocal() ** (-power)
        result = Jet1D.constant(1.0, self.order, self.center)
        base = self
        while power:
            if power & 1:
                result = result * base
            base = base * base
            power >>= 1
        return result

    # -- elementary functions -------------------------------------------------

    def reciprocal(self) -> Jet1D:
        a = self.coeffs
        if np.any(a[0] == 0):
            msg = "cannot invert a jet with zero constant term"
            raise BadJetError(msg)
        b = np.zeros_like(a, dtype=np.result_type(a, np.float64))
        b[0] = 1.0 / a[0]
        for k in range(1, a.shape[0]):
            acc = sum(a[j] * b[k - j] for j in range(1, k + 1))
            b[k] = -acc / a[0]
        return Jet1D(b, self.center)

    def sqrt(self) -> Jet1D:
        a = self.coeffs
        if np.any(a[0] == 0) or (not np.iscomplexobj(a) and np.any(a[0] < 0)):
            msg = "jet square root needs a positive constant term"
            raise BadJetError(msg)
        b = np.zeros_like(a, dtype=np.result_type(a, np.float64))
        b[0] = np.sqrt(a[0])
        for k in range(1, a.shape[0]):
            acc = sum(b[j] * b[k - j] for j in range(1, k))
            b[k] = (a[k] - acc) / (2.0 * b[0])
        return Jet1D(b, self.center)

    def exp(self) -> Jet1D:
        a = self.coeffs
        b = np.zeros_like(a, dtype=np.result_type(a, np.float64))
        b[0] = np.exp(a[0])
        for k in range(1, a.shape[0]):
            b[k] = sum(j * a[j] * b[k - j] for j in range(1, k + 1)) / k
        return Jet1D(b, self.center)

    # -- composition ----------------------------------------------------------

    def compose(self, inner: Jet1D) -> Jet1D:
        """Jet of f∘g, where `self` is f about g(inner.center).

        The constant term of `inner` must equal `self.center`.
        """
        g0 = inner.coeffs[0]
        if np.any(np.abs(g0 - self.center) > 1e-12 * (1.0 + abs(self.center))):
            msg = f"inner jet value {g0!r} does not match outer center {self.center!r}"
            raise BadJetError(msg)
        delta = inner.shifted()
        n = min(self.order, inner.order)
        result = Jet1D.constant(self.coeffs[n], n, inner.center)
        for k in range(n - 1, -1, -1):
            result = result * delta + self.coeffs[k]
        return result.truncate(n)

    def revert(self) -> Jet1D:
        """Compositional inverse g with f(g(x)) = x, for f(0) = 0 and f'(0) != 0."""
        a = self.coeffs
        if np.any(a[0] != 0):
            msg = "series reversion needs a jet vanishing at the origin"
            raise BadJetError(msg)
        if self.order < 1 or np.any(a[1] == 0):
            msg = "series reversion needs a nonzero linear coefficient"
            raise BadJetError(msg)
        flat = Jet1D(a, 0.0)
        x = Jet1D.variable(self.order)
        g = x / a[1]
        for _ in range(self.order):
            nonlinear = flat.compose(g) - g * a[1]
            g = (x - nonlinear) / a[1]
        return g
