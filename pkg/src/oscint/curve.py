"""Support-function geometry of strictly convex planar curves.

A curve is given by its support function h(θ); the boundary point with outward
normal u(θ) = (cos θ, sin θ) is x(θ) = h·u + h'·u⊥ and the radius of curvature
is ρ = h + h''. The critical points of the phase ⟨x, ξ(φ)⟩ are exactly θ = φ
and θ = φ + π.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cache
from math import factorial

import numpy as np
from scipy.optimize import minimize_scalar

from oscint.errors import InvalidInputError, JetOverflowError, NonConvexError, OutOfRangeError
from oscint.jets import Jet1D
from oscint.models import (
    BoundaryNodes,
    BoundaryPoint,
    CurveKind,
    InvolutionResult,
    SymmetryCertificate,
    WidthProfile,
)

logger = logging.getLogger(__name__)

MAX_JET_ORDER = 8
DEFAULT_TOL = 1e-10
CONVEXITY_GRID = 4096
CONVEXITY_MARGIN = 1e-12
HARMONIC_GRID = 512


@dataclass(frozen=True)
class SupportCurve:
    """A strictly convex curve given by its support function.

    For ``support_fourier`` curves h(θ) = a0 + Σ cₙ cos nθ + sₙ sin nθ; the
    first harmonic is a translation by (c₁, s₁). For ``ellipse`` curves
    h(θ) = √(a² cos²(θ-r) + b² sin²(θ-r)) with rotation r.
    """

    kind: CurveKind
    a0: float = 0.0
    cos_coeffs: tuple[float, ...] = ()
    sin_coeffs: tuple[float, ...] = ()
    a: float | None = None
    b: float | None = None
    rotation: float = 0.0

    def __post_init__(self) -> None:
        if self.kind is CurveKind.ELLIPSE:
            if self.a is None or self.b is None:
                msg = "an ellipse needs both semi-axes a and b"
                raise InvalidInputError(msg)
            if not self.a >= self.b > 0:
                msg = f"ellipse semi-axes must satisfy a ≥ b > 0, got a={self.a}, b={self.b}"
                raise InvalidInputError(msg)
        else:
            if self.a0 <= 0:
                msg = f"support function mean a0 must be positive, got {self.a0}"
                raise NonConvexError(msg)
            if not all(map(math.isfinite, (*self.cos_coeffs, *self.sin_coeffs))):
                msg = "support function coefficients must be finite"
                raise InvalidInputError(msg)
        _check_strict_convexity(self)

    # -- constructors ---------------------------------------------------------

    @classmethod
    def fourier(
        cls,
        a0: float,
        cos: tuple[float, ...] | list[float] = (),
        sin: tuple[float, ...] | list[float] = (),
    ) -> SupportCurve:
        return cls(
            kind=CurveKind.SUPPORT_FOURIER,
            a0=float(a0),
            cos_coeffs=tuple(float(c) for c in cos),
            sin_coeffs=tuple(float(s) for s in sin),
        )

    @classmethod
    def disk(cls, radius: float = 1.0, center: tuple[float, float] = (0.0, 0.0)) -> SupportCurve:
        cx, cy = center
        if cx == 0.0 and cy == 0.0:
            return cls.fourier(radius)
        return cls.fourier(radius, (cx,), (cy,))

    @classmethod
    def ellipse(cls, a: float, b: float, rotation: float = 0.0) -> SupportCurve:
        return cls(kind=CurveKind.ELLIPSE, a=float(a), b=float(b), rotation=float(rotation))

    # -- support function -----------------------------------------------------

    @property
    def n_harmonics(self) -> int:
        return max(len(self.cos_coeffs), len(self.sin_coeffs))

    @property
    def center(self) -> tuple[float, float]:
        if self.kind is CurveKind.ELLIPSE:
            return (0.0, 0.0)
        c1 = self.cos_coeffs[0] if self.cos_coeffs else 0.0
        s1 = self.sin_coeffs[0] if self.sin_coeffs else 0.0
        return (c1, s1)

    def _complex_coeffs(self) -> np.ndarray:
        n = self.n_harmonics
        c = np.zeros(n)
        s = np.zeros(n)
        c[: len(self.cos_coeffs)] = self.cos_coeffs
        s[: len(self.sin_coeffs)] = self.sin_coeffs
        return c - 1j * s

    def derivatives(self, theta: float | np.ndarray, order: int) -> np.ndarray:
        """h, h', ..., h^{(order)} at `theta`, stacked along axis 0."""
        theta = np.asarray(theta, dtype=np.float64)
        if self.kind is CurveKind.ELLIPSE:
            return self._ellipse_derivatives(theta, order)
        out = np.zeros((order + 1, *theta.shape))
        out[0] = self.a0
        coeffs = self._complex_coeffs()
        if coeffs.size == 0:
            return out
        n = np.arange(1, coeffs.size + 1)
        phase = np.exp(1j * np.multiply.outer(theta, n))
        for k in range(order + 1):
            out[k] += np.real(phase @ (coeffs * (1j * n) ** k))
        return out

    def _ellipse_derivatives(self, theta: np.ndarray, order: int) -> np.ndarray:
        assert self.a is not None and self.b is not None
        mean = 0.5 * (self.a**2 + self.b**2)
        half = 0.5 * (self.a**2 - self.b**2)
        arg = 2.0 * (theta - self.rotation)
        q = np.zeros((order + 1, *theta.shape))
        q[0] = mean + half * np.cos(arg)
        for k in range(1, order + 1):
            q[k] = half * 2.0**k * np.cos(arg + k * math.pi / 2)
        return Jet1D.from_derivatives(q).sqrt().coeffs * _factorials(order, theta.ndim)

    def support(self, theta: float | np.ndarray) -> np.ndarray:
        return self.derivatives(theta, 0)[0]

    def radius_of_curvature(self, theta: float | np.ndarray) -> np.ndarray:
        d = self.derivatives(theta, 2)
        return d[0] + d[2]

    def curvature(self, theta: float | np.ndarray) -> np.ndarray:
        return 1.0 / self.radius_of_curvature(theta)

    def support_jet(self, theta_c: float, order: int) -> Jet1D:
        """Jet of s ↦ h(θ_c + s) about s = 0."""
        return Jet1D.from_derivatives(self.derivatives(float(theta_c), order))

    def harmonics(self, n_max: int | None = None) -> tuple[float, np.ndarray, np.ndarray]:
        """(a0, cos, sin) Fourier coefficients of h."""
        if self.kind is CurveKind.SUPPORT_FOURIER:
            n = self.n_harmonics if n_max is None else n_max
            c = np.zeros(n)
            s = np.zeros(n)
            m = min(n, len(self.cos_coeffs))
            c[:m] = self.cos_coeffs[:m]
            m = min(n, len(self.sin_coeffs))
            s[:m] = self.sin_coeffs[:m]
            return self.a0, c, s
        theta = 2 * math.pi * np.arange(HARMONIC_GRID) / HARMONIC_GRID
        spectrum = np.fft.rfft(self.support(theta)) / HARMONIC_GRID
        n = HARMONIC_GRID // 2 - 1 if n_max is None else n_max
        return (
            float(spectrum[0].real),
            2.0 * spectrum[1 : n + 1].real,
            -2.0 * spectrum[1 : n + 1].imag,
        )

    @property
    def perimeter(self) -> float:
        """∫ρ dθ = ∫h dθ."""
        if self.kind is CurveKind.SUPPORT_FOURIER:
            return 2.0 * math.pi * self.a0
        return 2.0 * math.pi * self.harmonics(0)[0]

    @property
    def area(self) -> float:
        """½∫h·ρ dθ, by the periodic trapezoid rule."""
        theta = 2 * math.pi * np.arange(HARMONIC_GRID) / HARMONIC_GRID
        d = self.derivatives(theta, 2)
        return float(math.pi * np.mean(d[0] * (d[0] + d[2])))

    @property
    def max_radius(self) -> float:
        theta = 2 * math.pi * np.arange(256) / 256
        d = self.derivatives(theta, 1)
        return float(np.max(np.hypot(d[0], d[1])))

    # -- rigid motions --------------------------------------------------------

    def rotated(self, beta: float) -> SupportCurve:
        """The curve rotated by `beta` about the origin: h_new(θ) = h(θ - β)."""
        if self.kind is CurveKind.ELLIPSE:
            assert self.a is not None and self.b is not None
            return SupportCurve.ellipse(self.a, self.b, self.rotation + beta)
        coeffs = self._complex_coeffs() * np.exp(-1j * np.arange(1, self.n_harmonics + 1) * beta)
        return SupportCurve.fourier(self.a0, tuple(coeffs.real), tuple(-coeffs.imag))

    def scaled(self, factor: float) -> SupportCurve:
        if factor <= 0:
            msg = f"scale factor must be positive, got {factor}"
            raise InvalidInputError(msg)
        if self.kind is CurveKind.ELLIPSE:
            assert self.a is not None and self.b is not None
            return SupportCurve.ellipse(self.a * factor, self.b * factor, self.rotation)
        return SupportCurve.fourier(
            self.a0 * factor,
            tuple(c * factor for c in self.cos_coeffs),
            tuple(s * factor for s in self.sin_coeffs),
        )


def _factorials(order: int, batch_ndim: int) -> np.ndarray:
    f = np.array([factorial(k) for k in range(order + 1)], dtype=np.float64)
    return f.reshape((-1,) + (1,) * batch_ndim)


def _check_strict_convexity(curve: SupportCurve) -> None:
    """Raise NonConvexError unless ρ = h + h'' stays positive.

    Dense grid first, then bounded refinement around the smallest grid value.
    """
    theta = 2 * math.pi * np.arange(CONVEXITY_GRID) / CONVEXITY_GRID
    rho = curve.radius_of_curvature(theta)
    i = int(np.argmin(rho))
    step = 2 * math.pi / CONVEXITY_GRID
    res = minimize_scalar(
        lambda x: float(curve.radius_of_curvature(x)),
        bounds=(theta[i] - step, theta[i] + step),
        method="bounded",
        options={"xatol": 1e-10},
    )
    rho_min = min(float(rho[i]), float(res.fun))
    scale = float(np.max(np.abs(rho)))
    logger.debug("convexity check: min ρ = %.6g at θ ≈ %.6f", rho_min, float(res.x))
    if not rho_min > CONVEXITY_MARGIN * max(scale, 1.0):
        msg = f"radius of curvature h + h'' reaches {rho_min:.3e} at θ ≈ {float(res.x):.6f}"
        raise NonConvexError(msg)


def _unit(theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    u = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    u_perp = np.stack([-np.sin(theta), np.cos(theta)], axis=-1)
    return u, u_perp


def sample_boundary(
    curve: SupportCurve, theta: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Positions, outward normals and radii of curvature at each θ."""
    theta = np.asarray(theta, dtype=np.float64)
    d = curve.derivatives(theta, 2)
    u, u_perp = _unit(theta)
    positions = d[0][..., None] * u + d[1][..., None] * u_perp
    return positions, u, d[0] + d[2]


def point_at(curve: SupportCurve, theta: float) -> BoundaryPoint:
    d = curve.derivatives(float(theta), 2)
    h, hp, rho = float(d[0]), float(d[1]), float(d[0] + d[2])
    if not rho > 0:
        msg = f"ρ(θ={theta}) = {rho:.3e} is not positive"
        raise NonConvexError(msg)
    c, s = math.cos(theta), math.sin(theta)
    return BoundaryPoint(
        theta=float(theta),
        position=(h * c - hp * s, h * s + hp * c),
        outward_normal=(c, s),
        tangent=(-s, c),
        curvature=1.0 / rho,
    )


def width_profile(
    curve: SupportCurve, n_samples: int = 256, tol: float = DEFAULT_TOL
) -> WidthProfile:
    """w(θ) = h(θ) + h(θ + π) on a uniform grid over [0, 2π)."""
    if n_samples < 16:
        msg = f"width profile needs at least 16 samples, got {n_samples}"
        raise OutOfRangeError(msg)
    theta = 2 * math.pi * np.arange(n_samples) / n_samples
    width = curve.support(theta) + curve.support(theta + math.pi)
    mean = float(np.mean(width))
    is_constant = bool(np.max(np.abs(width - mean)) <= tol * mean)
    return WidthProfile(
        theta=theta,
        width=width,
        w_min=float(width.min()),
        w_max=float(width.max()),
        is_constant=is_constant,
        breadth=mean if is_constant else None,
    )


def involution(curve: SupportCurve, theta: float) -> InvolutionResult:
    """The opposite-normal point p* = x(θ + π), the breadth, and the double-normal residual."""
    p_star = point_at(curve, theta + math.pi)
    d = curve.derivatives(float(theta), 1)
    d_star = curve.derivatives(float(theta) + math.pi, 1)
    return InvolutionResult(
        p_star=p_star,
        breadth=float(d[0] + d_star[0]),
        double_normal_residual=float(abs(d[1] + d_star[1])),
    )


def symmetry_and_circle_certificate(
    curve: SupportCurve, tol: float = DEFAULT_TOL
) -> SymmetryCertificate:
    """Harmonic test of central symmetry, constant width, and (both together) the circle.

    The first harmonic is a translation and is ignored: the center is (c₁, s₁).
    """
    a0, c, s = curve.harmonics()
    amplitude = np.hypot(c, s)
    n = np.arange(1, amplitude.size + 1)
    odd = amplitude[(n % 2 == 1) & (n >= 3)]
    even = amplitude[(n % 2 == 0) & (n >= 2)]
    max_odd = float(odd.max()) if odd.size else 0.0
    max_even = float(even.max()) if even.size else 0.0
    centrally_symmetric = max_odd <= tol * a0
    constant_width = max_even <= tol * a0
    return SymmetryCertificate(
        centrally_symmetric=centrally_symmetric,
        constant_width=constant_width,
        is_circle=centrally_symmetric and constant_width,
        center=curve.center,
        max_odd_harmonic=max_odd,
        max_even_harmonic=max_even,
    )


def jet_at(curve: SupportCurve, theta_c: float, order: int = 6) -> Jet1D:
    """Taylor jet of the local graph y(x₁) of ∂Ω at θ_c.

    Frame: origin at x(θ_c), first axis the tangent u⊥(θ_c), second axis the
    inward normal -u(θ_c). With s = θ - θ_c,
        X₁(s) = h sin s + h' cos s - h'(θ_c),  Y(s) = h(θ_c) - h cos s + h' sin s,
    and y = Y ∘ X₁⁻¹.
    """
    if order > MAX_JET_ORDER:
        msg = f"graph jets are available up to order {MAX_JET_ORDER}, got {order}"
        raise JetOverflowError(msg)
    if order < 2:
        msg = f"graph jet order must be at least 2, got {order}"
        raise OutOfRangeError(msg)
    h = curve.support_jet(theta_c, order + 1)
    hp = h.derivative()
    h = h.truncate(order)
    sin, cos = Jet1D.sin_cos(order)
    x1 = (h * sin + hp * cos).shifted()
    y = (-(h * cos) + hp * sin).shifted()
    return y.compose(x1.revert()).flattened_below(2)


def quad_nodes(curve: SupportCurve, n: int) -> BoundaryNodes:
    """Periodic trapezoid nodes θ_j = 2πj/n with arc-length weights ρ(θ_j)·2π/n."""
    if n < 8:
        msg = f"boundary quadrature needs at least 8 nodes, got {n}"
        raise OutOfRangeError(msg)
    theta = 2 * math.pi * np.arange(n) / n
    positions, normals, rho = sample_boundary(curve, theta)
    if np.any(rho <= 0):
        msg = "radius of curvature is not positive at a quadrature node"
        raise NonConvexError(msg)
    return BoundaryNodes(
        theta=theta, positions=positions, normals=normals, weights=rho * (2 * math.pi / n)
    )


@cache
def cached_leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss–Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def area_nodes(
    curve: SupportCurve, n_theta: int = 256, n_radial: int = 32
) -> tuple[np.ndarray, np.ndarray]:
    """Interior quadrature: c + s(x(θ) - c), trapezoid in θ × Gauss–Legendre in s.

    The Jacobian of the map is s·ρ(θ)·(h(θ) - ⟨c, u(θ)⟩).
    """
    theta = 2 * math.pi * np.arange(n_theta) / n_theta
    positions, normals, rho = sample_boundary(curve, theta)
    center = np.asarray(curve.center)
    reach = positions - center
    height = np.einsum("ij,ij->i", reach, normals)
    s, ws = cached_leggauss(n_radial)
    points = center + s[:, None, None] * reach[None, :, :]
    weights = (ws * s)[:, None] * (rho * height)[None, :] * (2 * math.pi / n_theta)
    return points.reshape(-1, 2), weights.ravel()
