"""Core data models shared across the geometry, phase and eigen modules."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import StrEnum
from typing import TYPE_CHECKING

import numpy as np

from oscint.errors import InvalidInputError

if TYPE_CHECKING:
    from oscint.jets import Jet1D

Vector = tuple[float, float]


class CurveKind(StrEnum):
    SUPPORT_FOURIER = "support_fourier"
    ELLIPSE = "ellipse"


class BoundaryKind(StrEnum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"


class Convention(StrEnum):
    """Sign and branch convention of the first stationary-phase correction."""

    HORMANDER = "hormander"  # alternating signs, per-point e^{±iπ/4}
    LITERAL = "literal"  # uniform minus bracket, uniform (2πi)^{1/2}


class ExpansionMode(StrEnum):
    FORMULA = "formula"
    BRUTEFORCE = "bruteforce"


class BesselMethod(StrEnum):
    SERIES = "series"
    ASYMPTOTIC = "asymptotic"
    RECURRENCE = "recurrence"


class PlaneWaveVerdict(StrEnum):
    DISK_CONSISTENT = "DISK-CONSISTENT"
    NOT_DISK = "NOT-DISK"


class EigenVerdict(StrEnum):
    OVERDETERMINED_SOLVABLE = "OVERDETERMINED-SOLVABLE"
    NO_OVERDETERMINED_MODE = "NO-OVERDETERMINED-MODE-IN-WINDOW"


@dataclass(frozen=True)
class BoundaryPoint:
    """A point of ∂Ω in support parametrization."""

    theta: float
    position: Vector
    outward_normal: Vector
    tangent: Vector  # counterclockwise, u⊥(θ)
    curvature: float


@dataclass(frozen=True, eq=False)
class BoundaryNodes:
    """Periodic trapezoid nodes on ∂Ω with arc-length weights."""

    theta: np.ndarray
    positions: np.ndarray  # (n, 2)
    normals: np.ndarray  # (n, 2), outward
    weights: np.ndarray  # ρ(θ)·2π/n

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())


@dataclass(frozen=True, eq=False)
class WidthProfile:
    theta: np.ndarray
    width: np.ndarray
    w_min: float
    w_max: float
    is_constant: bool
    breadth: float | None  # L, set only when the width is constant

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.theta.tolist(), self.width.tolist(), strict=True))


@dataclass(frozen=True)
class InvolutionResult:
    p_star: BoundaryPoint
    breadth: float
    double_normal_residual: float


@dataclass(frozen=True)
class SymmetryCertificate:
    centrally_symmetric: bool
    constant_width: bool
    is_circle: bool
    center: Vector
    max_odd_harmonic: float
    max_even_harmonic: float


@dataclass(frozen=True)
class PlaneWaveParams:
    """Parameters of the plane wave φ(x) = e^{t⟨η,x⟩} e^{iλ⟨ξ,x⟩}.

    With ξ ⊥ η unit vectors, -Δφ = (λ² - t²)φ, so α = λ² - t².
    """

    lam: float
    t: float
    xi: Vector
    eta: Vector

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lam) and math.isfinite(self.t)):
            msg = f"plane-wave parameters must be finite, got λ={self.lam}, t={self.t}"
            raise InvalidInputError(msg)
        if self.lam < 0 or self.t < 0:
            msg = f"need λ ≥ 0 and t ≥ 0, got λ={self.lam}, t={self.t}"
            raise InvalidInputError(msg)
        if abs(self.helmholtz_defect) > 1e-14 * max(1.0, self.lam**2 + self.t**2):
            msg = (
                f"ξ={self.xi} and η={self.eta} are not orthonormal; "
                f"-Δφ - αφ = {self.helmholtz_defect:.3e}·φ"
            )
            raise InvalidInputError(msg)

    @classmethod
    def from_direction(cls, lam: float, t: float, phi: float) -> PlaneWaveParams:
        """ξ = (cos φ, sin φ), η = (sin φ, -cos φ)."""
        c, s = math.cos(phi), math.sin(phi)
        return cls(lam=lam, t=t, xi=(c, s), eta=(s, -c))

    @classmethod
    def from_alpha(cls, alpha: float, t: float, phi: float) -> PlaneWaveParams:
        """Parametrize the level set λ² - t² = α by t."""
        lam_sq = alpha + t * t
        if lam_sq < 0:
            msg = f"α={alpha} with t={t} gives λ² < 0"
            raise InvalidInputError(msg)
        return cls.from_direction(math.sqrt(lam_sq), t, phi)

    @property
    def alpha(self) -> float:
        return self.lam**2 - self.t**2

    @property
    def direction(self) -> float:
        return math.atan2(self.xi[1], self.xi[0])

    @property
    def helmholtz_defect(self) -> complex:
        """-Δφ/φ - α, which vanishes for orthonormal (ξ, η)."""
        xx = self.xi[0] ** 2 + self.xi[1] ** 2
        ee = self.eta[0] ** 2 + self.eta[1] ** 2
        xe = self.xi[0] * self.eta[0] + self.xi[1] * self.eta[1]
        return (self.lam**2 * (xx - 1) - self.t**2 * (ee - 1)) - 2j * self.lam * self.t * xe

    def rotated(self, beta: float) -> PlaneWaveParams:
        return PlaneWaveParams.from_direction(self.lam, self.t, self.direction + beta)


@dataclass(frozen=True)
class CriticalData:
    """Local data of the phase ⟨ξ, x⟩ at one of its two critical points on ∂Ω."""

    theta: float
    position: Vector
    sigma: float  # ⟨ξ, inward normal⟩ = ±1
    phase_value: float
    k1: float  # second derivative of the phase along the boundary graph
    curvature: float
    g_jet: Jet1D
    tau: float  # exponential tilt along the tangent, t⟨η, T⟩
    tilt_value: float  # t⟨η, p⟩
    amp_jet: Jet1D  # δ·e^{τ x₁}
    graph_jet: Jet1D  # y(x₁)


@dataclass(frozen=True)
class ExpansionResult:
    lam: float
    l0_term: complex
    l1_coeff: complex
    surrogate: complex


@dataclass(frozen=True)
class ConvergenceRow:
    lam: float
    abs_integral: float
    resid_l0: float
    resid_l01: float
    admissible: bool
    envelope_l0: float
    envelope_l01: float


@dataclass(frozen=True)
class ConvergenceScan:
    rows: list[ConvergenceRow]
    slope_l0: float
    slope_l01: float
    gamma: float


@dataclass(frozen=True)
class RigidityRow:
    direction: float
    lam: float
    t: float
    integral: complex
    surrogate: complex
    scaled_two_point: float
    admissible: bool

    @property
    def abs_resid(self) -> float:
        return abs(self.integral - self.surrogate)

    @property
    def resid_times_lambda(self) -> float:
        return self.abs_resid * self.lam


@dataclass(frozen=True)
class RigidityReport:
    kind: BoundaryKind
    rows: list[RigidityRow]
    verdict: PlaneWaveVerdict
    tol: float
    witness_direction: float | None
    best_level: tuple[float, float]  # (λ, t) with the smallest worst-direction integral
    best_level_max: float


@dataclass(frozen=True, eq=False)
class EigenMode:
    alpha: float
    kind: BoundaryKind
    coefficients: np.ndarray
    boundary_theta: np.ndarray
    boundary_values: np.ndarray
    deviation: float
    multiplicity: int
    sigma: float
    center: Vector
    basis_order: int

    @property
    def boundary_data(self) -> list[tuple[float, float]]:
        return list(zip(self.boundary_theta.tolist(), self.boundary_values.tolist(), strict=True))


@dataclass(frozen=True)
class EigenAssessment:
    kind: BoundaryKind
    window: tuple[float, float]
    modes: list[EigenMode]
    hits: list[EigenMode]
    verdict: EigenVerdict
    min_deviation: float
    cross_checks: dict[float, PlaneWaveVerdict] = field(default_factory=dict)
    rejected: list[EigenMode] = field(default_factory=list)  # constant data, failed cross-check


@dataclass(frozen=True)
class BesselEval:
    order: int
    argument: float
    value: float
    method: BesselMethod


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one numerical self-check."""

    name: str
    error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.error <= self.tolerance)


@dataclass(frozen=True)
class RigidityAssessment:
    """Plane-wave and eigen evidence for one curve at one eigenvalue guess."""

    kind: BoundaryKind
    alpha: float  # refined eigenvalue when the eigen scan found one, else the input
    plane_wave: RigidityReport
    eigen: EigenAssessment | None
    verdict: PlaneWaveVerdict

    @property
    def eigen_verdict(self) -> EigenVerdict:
        if self.eigen is None:
            return EigenVerdict.NO_OVERDETERMINED_MODE
        return self.eigen.verdict
