"""Stationary-phase expansion of plane-wave boundary integrals.

For the phase f = ⟨ξ, x⟩ restricted to ∂Ω there are exactly two critical
points, θ = φ (phase maximum) and θ = φ + π (phase minimum). Each contributes

    e^{t⟨η,p⟩} e^{iλ⟨ξ,p⟩} (2π/(λ|k|))^{1/2} e^{i·sgn(k₁)π/4} (ψ(0) + L₁ψ/λ)

where, in the local graph frame, L₁ψ is the first Hörmander correction

    L₁ψ = i[½□ψ - ⅛□²(gψ) + (1/96)□³(g²ψ)](0),   □ = (1/k₁) d²/dx₁².
"""

from __future__ import annotations

import cmath
import logging
import math
from math import factorial
from typing import TYPE_CHECKING

import numpy as np
from joblib import Parallel, delayed

from oscint.curve import jet_at, point_at
from oscint.errors import BadJetError, InadmissibleError, InvalidInputError, NotCriticalError
from oscint.jets import Jet1D
from oscint.models import (
    BoundaryKind,
    Convention,
    ConvergenceRow,
    ConvergenceScan,
    CriticalData,
    ExpansionResult,
    PlaneWaveParams,
)

if TYPE_CHECKING:
    from collections.abc import Sequence

    from oscint.curve import SupportCurve

logger = logging.getLogger(__name__)

JET_ORDER = 8
CRITICAL_TOL = 1e-10
MIN_SLOPE_POINTS = 3
ENVELOPE_SAMPLES = 8

# (ν, μ) pairs of the k = 2 truncation, with the Hörmander weight 2^{-ν}/(μ!ν!)
_L1_TERMS = ((1, 0), (2, 1), (3, 2))


def l1_amplitude(
    g_jet: Jet1D, k1: float, t: float, convention: Convention = Convention.HORMANDER
) -> complex:
    """L₁ψ for the amplitude ψ = δ·e^{t x₁}, in closed form.

    □ψ(0) = t²/k₁ + k₁,  □²(gψ)(0) = (g⁗ + 4t g‴)/k₁²,  □³(g²ψ)(0) = (g²)^{(6)}/k₁³.
    """
    _check_phase_jet(g_jet)
    if k1 == 0:
        msg = "k1 must be nonzero at a nondegenerate critical point"
        raise InvalidInputError(msg)
    g3 = float(np.real(g_jet.derivative_value(3)))
    g4 = float(np.real(g_jet.derivative_value(4)))
    g_sq_6 = 20.0 * g3 * g3
    first = 0.5 * (t * t / k1 + k1)
    second = (g4 + 4.0 * t * g3) / (8.0 * k1 * k1)
    third = g_sq_6 / (96.0 * k1**3)
    if convention is Convention.LITERAL:
        return -1j * (first + second + third)
    return 1j * (first - second + third)


def square_sixth_derivative(g_jet: Jet1D) -> float:
    """(g²)^{(6)}(0) computed by jet multiplication."""
    _check_phase_jet(g_jet)
    if g_jet.order < 6:
        g_jet = Jet1D(np.concatenate([g_jet.coeffs, np.zeros(6 - g_jet.order)]), g_jet.center)
    return float(np.real((g_jet * g_jet).derivative_value(6)))


def _check_phase_jet(g_jet: Jet1D) -> None:
    if g_jet.order < 4:
        msg = f"phase remainder jet must reach order 4, got order {g_jet.order}"
        raise BadJetError(msg)
    low = np.abs(g_jet.coeffs[:3])
    if np.any(low > 1e-12 * max(1.0, float(np.max(np.abs(g_jet.coeffs))))):
        msg = f"phase remainder g must vanish to third order, got {g_jet.coeffs[:3]!r}"
        raise BadJetError(msg)


def l1_from_jets(
    crit: CriticalData,
    amp_jet: Jet1D | None = None,
    convention: Convention = Convention.HORMANDER,
) -> complex:
    """L₁ψ for any amplitude jet, straight from the (ν, μ) sum.

    □^ν(g^μ ψ)(0) = (2ν)!·[x^{2ν}](g^μ ψ) / k₁^ν.
    """
    psi = crit.amp_jet if amp_jet is None else amp_jet
    g = crit.g_jet
    values = []
    for nu, mu in _L1_TERMS:
        product = psi * (g**mu) if mu else psi
        if product.order < 2 * nu:
            msg = f"amplitude jet of order {product.order} is too short for □^{nu}"
            raise BadJetError(msg)
        values.append(complex(product.coeffs[2 * nu]) * factorial(2 * nu) / crit.k1**nu)
    box1, box2, box3 = values
    if convention is Convention.LITERAL:
        return -1j * (0.5 * box1 + box2 / 8.0 + box3 / 96.0)
    return 1j * (0.5 * box1 - box2 / 8.0 + box3 / 96.0)


def critical_data(curve: SupportCurve, theta_c: float, params: PlaneWaveParams) -> CriticalData:
    """Local expansion data of the phase ⟨ξ, x⟩ at the boundary point x(θ_c)."""
    bp = point_at(curve, theta_c)
    xi, eta = np.asarray(params.xi), np.asarray(params.eta)
    tangent = np.asarray(bp.tangent)
    inward = -np.asarray(bp.outward_normal)
    if abs(float(tangent @ xi)) > CRITICAL_TOL:
        msg = f"θ={theta_c} is not critical for ξ={params.xi}: ⟨T, ξ⟩ = {float(tangent @ xi):.3e}"
        raise NotCriticalError(msg)
    sigma = math.copysign(1.0, float(inward @ xi))
    y = jet_at(curve, theta_c, JET_ORDER)
    g = y.flattened_below(3) * sigma
    k1 = sigma * bp.curvature
    tau = params.t * float(eta @ tangent)
    x = Jet1D.variable(JET_ORDER)
    slope = y.derivative()
    delta = (slope * slope + 1.0).sqrt()
    amp = delta * (x * tau).exp()
    position = np.asarray(bp.position)
    return CriticalData(
        theta=float(theta_c),
        position=bp.position,
        sigma=sigma,
        phase_value=float(xi @ position),
        k1=k1,
        curvature=bp.curvature,
        g_jet=g,
        tau=tau,
        tilt_value=params.t * float(eta @ position),
        amp_jet=amp,
        graph_jet=y,
    )


def _prefactor(crit: CriticalData, params: PlaneWaveParams) -> complex:
    """Leading term of one critical point, shared by both conventions."""
    envelope = math.sqrt(2.0 * math.pi / (params.lam * abs(crit.k1)))
    return (
        math.exp(crit.tilt_value)
        * cmath.exp(1j * params.lam * crit.phase_value)
        * envelope
        * cmath.exp(1j * math.copysign(1.0, crit.k1) * math.pi / 4)
    )


def expand_critical(
    curve: SupportCurve,
    theta_c: float,
    params: PlaneWaveParams,
    convention: Convention = Convention.HORMANDER,
) -> ExpansionResult:
    crit = critical_data(curve, theta_c, params)
    l0 = _prefactor(crit, params)
    l1 = l1_amplitude(crit.g_jet, crit.k1, crit.tau, convention)
    return ExpansionResult(
        lam=params.lam, l0_term=l0, l1_coeff=l1, surrogate=l0 * (1 + l1 / params.lam)
    )


def critical_contribution(
    curve: SupportCurve,
    theta_c: float,
    params: PlaneWaveParams,
    convention: Convention = Convention.HORMANDER,
) -> complex:
    """L₀ + L₁ contribution of one critical point to ∫_{∂Ω} e^{t⟨η,x⟩}e^{iλ⟨ξ,x⟩} dS."""
    return expand_critical(curve, theta_c, params, convention).surrogate


def critical_angles(params: PlaneWaveParams) -> tuple[float, float]:
    """(θ at the phase maximum, θ at the phase minimum)."""
    phi = params.direction
    return phi, phi + math.pi


def two_point_surrogate(
    curve: SupportCurve,
    params: PlaneWaveParams,
    convention: Convention = Convention.HORMANDER,
    *,
    with_l1: bool = True,
) -> complex:
    total = 0j
    for theta_c in critical_angles(params):
        result = expand_critical(curve, theta_c, params, convention)
        total += result.surrogate if with_l1 else result.l0_term
    return total


def neumann_contribution(
    curve: SupportCurve,
    theta_c: float,
    params: PlaneWaveParams,
    convention: Convention = Convention.HORMANDER,
) -> complex:
    """L₀ + L₁ contribution of one critical point to the Neumann integral.

    In the graph frame ⟨tη + iλξ, ν⟩dS = (τ y'(x₁) - iλσ) dx₁, so the amplitude
    is ψ_N = (τ y' - iλσ)·e^{τ x₁} and carries no δ.
    """
    crit = critical_data(curve, theta_c, params)
    x = Jet1D.variable(JET_ORDER)
    slope = crit.graph_jet.derivative()
    psi = (slope * crit.tau - 1j * params.lam * crit.sigma) * (x * crit.tau).exp()
    l1 = l1_from_jets(crit, psi, convention)
    return _prefactor(crit, params) * (complex(psi.coeffs[0]) + l1 / params.lam)


def neumann_two_point_surrogate(
    curve: SupportCurve, params: PlaneWaveParams, convention: Convention = Convention.HORMANDER
) -> complex:
    return sum(
        (
            neumann_contribution(curve, theta_c, params, convention)
            for theta_c in critical_angles(params)
        ),
        0j,
    )


def fit_slope(lams: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares log-log slope, dropping the smallest λ.

    NaN unless at least three positive values remain.
    """
    lam = np.asarray(lams, dtype=np.float64)[1:]
    val = np.asarray(values, dtype=np.float64)[1:]
    keep = val > 0
    if keep.sum() < MIN_SLOPE_POINTS:
        return math.nan
    return float(np.polyfit(np.log(lam[keep]), np.log(val[keep]), 1)[0])


def oscillation_period(curve: SupportCurve, direction: float) -> float:
    """λ-period 2π/w(φ) of the interference between the two critical points."""
    width = float(curve.support(direction)) + float(curve.support(direction + math.pi))
    return 2 * math.pi / width


def _residuals(
    curve: SupportCurve, direction: float, t: float, lam: float, convention: Convention
) -> tuple[float, float, float]:
    from oscint.planewave import boundary_integral

    params = PlaneWaveParams.from_direction(lam, t, direction)
    integral = boundary_integral(curve, params, BoundaryKind.DIRICHLET)
    l0 = two_point_surrogate(curve, params, convention, with_l1=False)
    l01 = two_point_surrogate(curve, params, convention)
    return abs(integral), abs(integral - l0), abs(integral - l01)


def convergence_scan(
    curve: SupportCurve,
    direction: float,
    t: float,
    lambda_grid: Sequence[float],
    convention: Convention = Convention.HORMANDER,
    *,
    allow_inadmissible: bool = False,
    envelope_samples: int = ENVELOPE_SAMPLES,
    n_jobs: int = 1,
) -> ConvergenceScan:
    """Residuals of the L₀ and L₀+L₁ surrogates against the quadrature oracle over a λ-grid.

    The two critical points interfere with λ-period 2π/w(φ), so a residual taken
    at a single λ carries a factor like |sin(λw/2 + c)|. Each grid value is
    therefore sampled at `envelope_samples` equally spaced shifts across one
    period, and the slopes are fitted to the largest residual of each group.
    Rows keep the residuals at the grid value itself.
    """
    from oscint.planewave import admissible, gamma_of

    grid = [float(lam) for lam in lambda_grid]
    if len(grid) < 4:
        msg = f"convergence scan needs at least 4 λ values, got {len(grid)}"
        raise InvalidInputError(msg)
    if any(b <= a for a, b in zip(grid, grid[1:], strict=False)):
        msg = "λ-grid must be strictly increasing"
        raise InvalidInputError(msg)
    if envelope_samples < 1:
        msg = f"need at least one envelope sample, got {envelope_samples}"
        raise InvalidInputError(msg)

    gamma = gamma_of(curve)
    decay_ok = [2 * gamma * t <= 0.5 * math.log(lam) for lam in grid]
    if not any(decay_ok):
        if not allow_inadmissible:
            msg = (
                f"e^(2γt) = {math.exp(2 * gamma * t):.4g} exceeds √λ on the whole grid "
                f"(γ = {gamma:.6f}, t = {t}); pass allow_inadmissible to run anyway"
            )
            raise InadmissibleError(msg)
        logger.warning("running an inadmissible convergence scan (γ=%.4f, t=%g)", gamma, t)

    step = oscillation_period(curve, direction) / envelope_samples
    raw = Parallel(n_jobs=n_jobs)(
        delayed(_residuals)(curve, direction, t, lam + k * step, convention)
        for lam in grid
        for k in range(envelope_samples)
    )
    rows = []
    for i, lam in enumerate(grid):
        group = raw[i * envelope_samples : (i + 1) * envelope_samples]
        abs_int, r0, r01 = group[0]
        ok, _ = admissible(curve, PlaneWaveParams.from_direction(lam, t, direction), gamma=gamma)
        rows.append(
            ConvergenceRow(
                lam=lam,
                abs_integral=abs_int,
                resid_l0=r0,
                resid_l01=r01,
                admissible=ok,
                envelope_l0=max(sample[1] for sample in group),
                envelope_l01=max(sample[2] for sample in group),
            )
        )
    lams = [row.lam for row in rows]
    slope_l0 = fit_slope(lams, [row.envelope_l0 for row in rows])
    slope_l01 = fit_slope(lams, [row.envelope_l01 for row in rows])
    logger.info("fitted slopes: L0 %.3f, L0+L1 %.3f", slope_l0, slope_l01)
    return ConvergenceScan(rows=rows, slope_l0=slope_l0, slope_l01=slope_l01, gamma=gamma)
