"""Plane-wave boundary integrals, admissibility and rigidity scans.

    I_D = ∫_{∂Ω} e^{t⟨η,x⟩} e^{iλ⟨ξ,x⟩} dS
    I_N = ∫_{∂Ω} ⟨tη + iλξ, ν⟩ e^{t⟨η,x⟩} e^{iλ⟨ξ,x⟩} dS      (ν outward)

I_N = ∫_{∂Ω} ∂_νφ dS = -α ∫_Ω φ dx by the divergence theorem.
"""

from __future__ import annotations

import logging
import math
import sys
from typing import TYPE_CHECKING

import numpy as np
from joblib import Parallel, delayed

from oscint.curve import SupportCurve, area_nodes, point_at, quad_nodes, width_profile
from oscint.errors import (
    InadmissibleError,
    InvalidOrderError,
    OutOfRangeError,
    QuadratureFailureError,
)
from oscint.models import (
    BoundaryKind,
    CheckResult,
    Convention,
    PlaneWaveParams,
    PlaneWaveVerdict,
    RigidityReport,
    RigidityRow,
)
from oscint.specfun import bessel_i0, bessel_j
from oscint.stphase import critical_angles, neumann_two_point_surrogate, two_point_surrogate

if TYPE_CHECKING:
    from collections.abc import Sequence


logger = logging.getLogger(__name__)

MIN_NODES = 64
MAX_NODES = 2**20
QUAD_TOL = 1e-12
GAMMA_FLOOR = 24.0**0.25
VERDICT_REL_TOL = 1e-6
OFFSET_FLOOR = 1e-12  # |p*¹| below this is a symmetric pair


def _plane_wave(positions: np.ndarray, params: PlaneWaveParams) -> np.ndarray:
    tilt = positions @ np.asarray(params.eta)
    phase = positions @ np.asarray(params.xi)
    return np.exp(params.t * tilt + 1j * params.lam * phase)


def _integrand_sum(
    curve: SupportCurve, params: PlaneWaveParams, kind: BoundaryKind, n: int
) -> tuple[complex, float]:
    nodes = quad_nodes(curve, n)
    values = _plane_wave(nodes.positions, params)
    if kind is BoundaryKind.NEUMANN:
        gradient = params.t * np.asarray(params.eta) + 1j * params.lam * np.asarray(params.xi)
        values = values * (nodes.normals @ gradient)
    terms = nodes.weights * values
    return complex(terms.sum()), float(np.abs(terms).sum())


def boundary_integral(
    curve: SupportCurve,
    params: PlaneWaveParams,
    kind: BoundaryKind = BoundaryKind.DIRICHLET,
    n_nodes: int = MIN_NODES,
) -> complex:
    """Periodic trapezoid rule with node doubling until two successive values agree."""
    if n_nodes < MIN_NODES:
        msg = f"boundary integral needs at least {MIN_NODES} nodes, got {n_nodes}"
        raise OutOfRangeError(msg)
    n = n_nodes
    bandwidth = params.lam * curve.max_radius
    while n < bandwidth and n < MAX_NODES:
        n *= 2
    previous, _ = _integrand_sum(curve, params, kind, n)
    while n < MAX_NODES:
        n *= 2
        current, magnitude = _integrand_sum(curve, params, kind, n)
        tol = max(QUAD_TOL, 64 * np.finfo(float).eps * magnitude)
        if abs(current - previous) <= tol:
            logger.debug(
                "%s integral converged at %d nodes (λ=%.4g, t=%.4g)", kind, n, params.lam, params.t
            )
            return current
        previous = current
    msg = f"{kind} integral did not converge with {MAX_NODES} nodes (λ={params.lam}, t={params.t})"
    raise QuadratureFailureError(msg)


def area_integral(
    curve: SupportCurve, params: PlaneWaveParams, n_theta: int = 512, n_radial: int = 48
) -> complex:
    """∫_Ω φ dx by the tensor quadrature of `area_nodes`."""
    points, weights = area_nodes(curve, n_theta, n_radial)
    return complex(np.sum(weights * _plane_wave(points, params)))


def disk_dirichlet_oracle(radius: float, lam: float, t: float) -> float:
    """2πR J₀(R√(λ² - t²)), or 2πR I₀(R√(t² - λ²)) when t > λ."""
    alpha = lam * lam - t * t
    if alpha >= 0:
        return 2 * math.pi * radius * bessel_j(0, radius * math.sqrt(alpha))
    return 2 * math.pi * radius * bessel_i0(radius * math.sqrt(-alpha))


def disk_neumann_oracle(radius: float, lam: float, t: float) -> float:
    """-2πR√α J₁(√α R), valid for α = λ² - t² ≥ 0."""
    alpha = lam * lam - t * t
    if alpha < 0:
        msg = f"the Neumann disk oracle needs α ≥ 0, got {alpha}"
        raise OutOfRangeError(msg)
    k = math.sqrt(alpha)
    return -2 * math.pi * radius * k * bessel_j(1, k * radius)


def gamma_of(curve: SupportCurve) -> float:
    """γ = max(width(Ω), 24^{1/4})."""
    return max(width_profile(curve).w_max, GAMMA_FLOOR)


def admissible(
    curve: SupportCurve, params: PlaneWaveParams, gamma: float | None = None
) -> tuple[bool, float]:
    """e^{2γt} ≤ √λ together with 1 ≤ t < λ."""
    if gamma is None:
        gamma = gamma_of(curve)
    ok = 1.0 <= params.t < params.lam and 2 * gamma * params.t <= 0.5 * math.log(params.lam)
    return ok, gamma


def alpha_star(lambda_star: float, t_star: float) -> float:
    """α* = λ*² - t*²."""
    if t_star >= lambda_star:
        msg = f"need t* < λ*, got t*={t_star}, λ*={lambda_star}"
        raise InvalidOrderError(msg)
    if t_star < 1:
        msg = f"need t* ≥ 1, got {t_star}"
        raise InvalidOrderError(msg)
    return lambda_star**2 - t_star**2


def threshold_lambda(m_sum: float, k_p1: float, gamma: float, t_tilde: float) -> float:
    """max{4(M₁+M₂)²k(p₁), e^{4γ t̃*}}."""
    exponent = 4 * gamma * t_tilde
    if exponent > math.log(sys.float_info.max):
        msg = f"e^(4γt̃) overflows for γ={gamma}, t̃={t_tilde}"
        raise OutOfRangeError(msg)
    return max(4 * m_sum**2 * k_p1, math.exp(exponent))


def threshold_t(k_p: float, k_pstar: float, p_star_x: float, c_star: float, eps: float) -> float:
    """t* from the curvature-ratio case split.

    C_* when √k(p*) ≥ 2√k(p); otherwise max{(ln½ + ½ln(k(p*)/k(p)))/p*¹ + ε, C_*}.
    A vanishing p*¹ leaves only the C_* branch.
    """
    if k_p <= 0 or k_pstar <= 0:
        msg = f"curvatures must be positive, got k(p)={k_p}, k(p*)={k_pstar}"
        raise OutOfRangeError(msg)
    if math.sqrt(k_pstar) >= 2 * math.sqrt(k_p) or abs(p_star_x) < OFFSET_FLOOR:
        return c_star
    ratio = (math.log(0.5) + 0.5 * math.log(k_pstar / k_p)) / p_star_x
    return max(ratio + eps, c_star)


def _scaled_two_point(curve: SupportCurve, params: PlaneWaveParams) -> float:
    """λ^{1/2}·|k(p)^{-1/2}e^{iλ⟨ξ,p⟩} + k(p*)^{-1/2}e^{iλ⟨ξ,p*⟩}e^{t⟨η,p*-p⟩}|.

    p sits at the phase minimum.
    """
    theta_star, theta_p = critical_angles(params)
    p, p_star = point_at(curve, theta_p), point_at(curve, theta_star)
    xi, eta = np.asarray(params.xi), np.asarray(params.eta)
    pos, pos_star = np.asarray(p.position), np.asarray(p_star.position)
    near = p.curvature**-0.5 * np.exp(1j * params.lam * (xi @ pos))
    far = p_star.curvature**-0.5 * np.exp(1j * params.lam * (xi @ pos_star))
    total = near + far * np.exp(params.t * (eta @ (pos_star - pos)))
    return float(math.sqrt(params.lam) * abs(total))


def _scan_row(
    curve: SupportCurve,
    kind: BoundaryKind,
    params: PlaneWaveParams,
    convention: Convention,
    gamma: float,
    direction: float,
) -> RigidityRow:
    integral = boundary_integral(curve, params, kind)
    if kind is BoundaryKind.NEUMANN:
        surrogate = neumann_two_point_surrogate(curve, params, convention)
    else:
        surrogate = two_point_surrogate(curve, params, convention)
    ok, _ = admissible(curve, params, gamma)
    return RigidityRow(
        direction=direction,
        lam=params.lam,
        t=params.t,
        integral=integral,
        surrogate=surrogate,
        scaled_two_point=_scaled_two_point(curve, params),
        admissible=ok,
    )


def rigidity_scan(
    curve: SupportCurve,
    kind: BoundaryKind,
    params_grid: Sequence[PlaneWaveParams],
    n_dirs: int,
    *,
    tol: float | None = None,
    allow_inadmissible: bool = False,
    convention: Convention = Convention.HORMANDER,
    n_jobs: int = 1,
) -> RigidityReport:
    """Integrals and surrogates over a uniform direction grid for every (λ, t) level.

    Each level's own direction is the grid offset. The verdict is DISK-CONSISTENT
    when some level keeps every direction's integral (divided by λ for Neumann)
    below `tol`, which defaults to 1e-6·perimeter.
    """
    if n_dirs < 1:
        msg = f"need at least one direction, got {n_dirs}"
        raise OutOfRangeError(msg)
    if not params_grid:
        msg = "rigidity scan needs at least one (λ, t) level"
        raise OutOfRangeError(msg)
    gamma = gamma_of(curve)
    for params in params_grid:
        ok, _ = admissible(curve, params, gamma)
        if not ok and not allow_inadmissible:
            msg = (
                f"(λ={params.lam:.6g}, t={params.t:.6g}) is inadmissible for γ={gamma:.6f}; "
                "pass allow_inadmissible to run anyway"
            )
            raise InadmissibleError(msg)
        if not ok:
            logger.warning("inadmissible level λ=%.6g, t=%.6g forced", params.lam, params.t)
    if tol is None:
        tol = VERDICT_REL_TOL * curve.perimeter

    jobs = []
    for params in params_grid:
        for j in range(n_dirs):
            phi = params.direction + 2 * math.pi * j / n_dirs
            jobs.append((PlaneWaveParams.from_direction(params.lam, params.t, phi), phi))
    rows: list[RigidityRow] = Parallel(n_jobs=n_jobs)(
        delayed(_scan_row)(curve, kind, p, convention, gamma, phi) for p, phi in jobs
    )

    best_level = (params_grid[0].lam, params_grid[0].t)
    best_max = math.inf
    witness = None
    for level, params in enumerate(params_grid):
        level_rows = rows[level * n_dirs : (level + 1) * n_dirs]
        sizes = [_verdict_size(row, kind) for row in level_rows]
        worst = int(np.argmax(sizes))
        if sizes[worst] < best_max:
            best_max = sizes[worst]
            best_level = (params.lam, params.t)
            witness = level_rows[worst].direction
    verdict = PlaneWaveVerdict.DISK_CONSISTENT if best_max < tol else PlaneWaveVerdict.NOT_DISK
    return RigidityReport(
        kind=kind,
        rows=rows,
        verdict=verdict,
        tol=tol,
        witness_direction=None if verdict is PlaneWaveVerdict.DISK_CONSISTENT else witness,
        best_level=best_level,
        best_level_max=best_max,
    )


def _verdict_size(row: RigidityRow, kind: BoundaryKind) -> float:
    size = abs(row.integral)
    return size / row.lam if kind is BoundaryKind.NEUMANN else size


def oracle_checks() -> list[CheckResult]:
    """Quadrature against the unit-disk closed forms over a small (λ, t) grid."""
    disk = SupportCurve.disk(1.0)
    levels = [(lam, t) for lam in (5.0, 20.0, 50.0) for t in (0.0, 1.0, 2.0)]
    dirichlet = max(
        abs(
            boundary_integral(disk, PlaneWaveParams.from_direction(lam, t, 0.3))
            - disk_dirichlet_oracle(1.0, lam, t)
        )
        for lam, t in levels
    )
    neumann = max(
        abs(
            boundary_integral(
                disk, PlaneWaveParams.from_direction(lam, t, 0.3), BoundaryKind.NEUMANN
            )
            - disk_neumann_oracle(1.0, lam, t)
        )
        for lam, t in levels
    )
    return [
        CheckResult("disk_dirichlet_oracle", dirichlet, 1e-10),
        CheckResult("disk_neumann_oracle", neumann, 1e-9),
    ]
