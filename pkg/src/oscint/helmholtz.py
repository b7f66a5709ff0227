"""Dirichlet and Neumann Helmholtz eigenvalues by the method of particular solutions.

Trial functions are Fourier–Bessel waves J_m(√α r){cos mφ, sin mφ} about the
curve's center. At each α the collocation matrix A = [A_B; A_I] (boundary rows
carry u for Dirichlet or ∂_νu for Neumann, interior rows carry u) is reduced
by a pivoted QR; the smallest singular value of the boundary block of Q is
the sine of the angle between the trial space and functions vanishing on
∂Ω. Eigenvalues are its dips.
"""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING

import numpy as np
import scipy.linalg as la
from joblib import Parallel, delayed
from scipy.optimize import minimize_scalar

from oscint.curve import area_nodes, sample_boundary
from oscint.errors import DegenerateModeError, IllConditionedError, NoDipFoundError
from oscint.models import (
    BoundaryKind,
    EigenAssessment,
    EigenMode,
    EigenVerdict,
    PlaneWaveParams,
    PlaneWaveVerdict,
)
from oscint.specfun import bessel_j_table

if TYPE_CHECKING:
    from oscint.config import EigenScanConfig
    from oscint.curve import SupportCurve

logger = logging.getLogger(__name__)

RMS_FLOOR = 1e-12
INTERIOR_SHRINK = 0.95


def _polar(points: np.ndarray, center: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    rel = points - center
    return np.hypot(rel[:, 0], rel[:, 1]), np.arctan2(rel[:, 1], rel[:, 0])


def fourier_bessel(alpha: float, points: np.ndarray, center: np.ndarray, order: int) -> np.ndarray:
    """Columns J₀, J_m cos mφ, J_m sin mφ (m = 1..order) evaluated at `points`."""
    r, phi = _polar(points, center)
    jm = bessel_j_table(order, math.sqrt(alpha) * r)
    m = np.arange(1, order + 1)[:, None]
    cos, sin = np.cos(m * phi), np.sin(m * phi)
    return np.vstack([jm[:1], jm[1:] * cos, jm[1:] * sin]).T


def fourier_bessel_normal(
    alpha: float, points: np.ndarray, normals: np.ndarray, center: np.ndarray, order: int
) -> np.ndarray:
    """Normal derivatives ⟨∇(J_m(kr) e^{imφ}), ν⟩ of the same columns, k = √α."""
    k = math.sqrt(alpha)
    r, phi = _polar(points, center)
    jm = bessel_j_table(order + 1, k * r)
    djm = np.empty((order + 1, r.size))
    djm[0] = -jm[1]
    djm[1:] = 0.5 * (jm[:-2] - jm[2:])
    radial = (normals[:, 0] * np.cos(phi) + normals[:, 1] * np.sin(phi)) * k
    angular = (-normals[:, 0] * np.sin(phi) + normals[:, 1] * np.cos(phi)) / r
    m = np.arange(1, order + 1)[:, None]
    cos, sin = np.cos(m * phi), np.sin(m * phi)
    j, dj = jm[1 : order + 1], djm[1:]
    cos_cols = dj * cos * radial - m * j * sin * angular
    sin_cols = dj * sin * radial + m * j * cos * angular
    return np.vstack([djm[:1] * radial, cos_cols, sin_cols]).T


class CollocationProblem:
    """Fixed collocation geometry for one curve, boundary condition and configuration."""

    def __init__(self, curve: SupportCurve, kind: BoundaryKind, cfg: EigenScanConfig) -> None:
        self.curve = curve
        self.kind = kind
        self.cfg = cfg
        self.center = np.asarray(curve.center, dtype=np.float64)
        self.order = cfg.basis_order

        self.boundary_theta = 2 * math.pi * np.arange(cfg.boundary_points) / cfg.boundary_points
        self.boundary_points, self.boundary_normals, _ = sample_boundary(curve, self.boundary_theta)

        rng = np.random.default_rng(cfg.seed)
        theta = rng.uniform(0.0, 2 * math.pi, cfg.interior_points)
        shrink = INTERIOR_SHRINK * np.sqrt(rng.uniform(0.0, 1.0, cfg.interior_points))
        rim, _, _ = sample_boundary(curve, theta)
        self.interior_points = self.center + shrink[:, None] * (rim - self.center)

    @property
    def n_basis(self) -> int:
        return 2 * self.order + 1

    def boundary_block(self, alpha: float) -> np.ndarray:
        """Boundary rows of the eigenproblem: u (Dirichlet) or ∂_νu (Neumann)."""
        if self.kind is BoundaryKind.DIRICHLET:
            return fourier_bessel(alpha, self.boundary_points, self.center, self.order)
        return fourier_bessel_normal(
            alpha, self.boundary_points, self.boundary_normals, self.center, self.order
        )

    def overdetermined_block(self, alpha: float) -> np.ndarray:
        """The quantity that must be constant for the overdetermined problem: ∂_νu or u."""
        if self.kind is BoundaryKind.DIRICHLET:
            return fourier_bessel_normal(
                alpha, self.boundary_points, self.boundary_normals, self.center, self.order
            )
        return fourier_bessel(alpha, self.boundary_points, self.center, self.order)

    def _factor(
        self, alpha: float
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, int]:
        """Pivoted QR of the collocation matrix with unit-norm columns.

        High-order columns are tiny near the center, so the rank cutoff only
        sees linear dependence after normalizing.
        """
        a = np.vstack(
            [
                self.boundary_block(alpha),
                fourier_bessel(alpha, self.interior_points, self.center, self.order),
            ]
        )
        norms = np.linalg.norm(a, axis=0)
        norms[norms == 0] = 1.0
        try:
            q, r, perm = la.qr(a / norms, mode="economic", pivoting=True)
        except (la.LinAlgError, ValueError) as e:
            msg = f"QR of the collocation matrix failed at α={alpha}: {e}"
            raise IllConditionedError(msg) from e
        diag = np.abs(np.diag(r))
        cutoff = int((diag > diag[0] * self.cfg.qr_rtol).sum())
        return q, r, perm, norms, cutoff

    def subspace_sines(self, alpha: float) -> np.ndarray:
        """Singular values of the boundary block of Q, ascending."""
        q, _, _, _, cutoff = self._factor(alpha)
        m_b = self.boundary_points.shape[0]
        try:
            return la.svd(q[:m_b, :cutoff], compute_uv=False)[::-1]
        except (la.LinAlgError, ValueError) as e:
            msg = f"SVD of the boundary block failed at α={alpha}: {e}"
            raise IllConditionedError(msg) from e

    def sigma(self, alpha: float) -> float:
        return float(self.subspace_sines(alpha)[0])

    def null_coefficients(self, alpha: float) -> tuple[np.ndarray, np.ndarray]:
        """Coefficients of every near-null direction (columns) and the singular values."""
        q, r, perm, norms, cutoff = self._factor(alpha)
        m_b = self.boundary_points.shape[0]
        try:
            _, s, vh = la.svd(q[:m_b, :cutoff])
            s = s[::-1]
            vh = vh[::-1]
            mult = max(1, int((s < self.cfg.multiplicity_tol).sum()))
            coeffs = np.zeros((self.n_basis, mult))
            coeffs[:cutoff] = la.solve_triangular(r[:cutoff, :cutoff], vh[:mult].T)
        except (la.LinAlgError, ValueError) as e:
            msg = f"null directions at α={alpha} could not be recovered: {e}"
            raise IllConditionedError(msg) from e
        unpermuted = np.empty_like(coeffs)
        unpermuted[perm] = coeffs
        return unpermuted / norms[:, None], s


def _scan_grid(cfg: EigenScanConfig) -> np.ndarray:
    n = math.ceil((cfg.alpha_max - cfg.alpha_min) / cfg.scan_step - 1e-9) + 1
    return np.linspace(cfg.alpha_min, cfg.alpha_max, n)


def _build_mode(
    problem: CollocationProblem, alpha: float, coeffs: np.ndarray, sigma: float, mult: int
) -> EigenMode:
    values = problem.overdetermined_block(alpha) @ coeffs
    rms = float(np.sqrt(np.mean(values**2)))
    if rms > RMS_FLOOR:
        coeffs = coeffs / rms
        values = values / rms
    deviation = float(np.std(values) / max(float(np.sqrt(np.mean(values**2))), RMS_FLOOR))
    return EigenMode(
        alpha=alpha,
        kind=problem.kind,
        coefficients=coeffs,
        boundary_theta=problem.boundary_theta.copy(),
        boundary_values=values,
        deviation=deviation,
        multiplicity=mult,
        sigma=sigma,
        center=(float(problem.center[0]), float(problem.center[1])),
        basis_order=problem.order,
    )


def eigen_scan(
    curve: SupportCurve, kind: BoundaryKind, cfg: EigenScanConfig, n_jobs: int = 1
) -> list[EigenMode]:
    """Eigenmodes in [alpha_min, alpha_max], sorted by α, one per singular direction."""
    problem = CollocationProblem(curve, kind, cfg)
    grid = _scan_grid(cfg)
    sigmas = np.array(Parallel(n_jobs=n_jobs)(delayed(problem.sigma)(a) for a in grid))
    dips = [
        i
        for i in range(1, grid.size - 1)
        if sigmas[i] < sigmas[i - 1] and sigmas[i] < sigmas[i + 1]
    ]
    if not dips:
        msg = (
            f"no dip of the subspace sine in [{cfg.alpha_min}, {cfg.alpha_max}] "
            f"(step {cfg.scan_step}, min σ={sigmas.min():.3e})"
        )
        raise NoDipFoundError(msg)

    modes: list[EigenMode] = []
    best = math.inf
    for i in dips:
        bracket = (grid[i - 1], grid[i], grid[i + 1])
        res = minimize_scalar(
            problem.sigma,
            bracket=bracket,
            method="golden",
            tol=cfg.refine_tol / (2 * grid[i]),
        )
        alpha, sigma = float(res.x), float(res.fun)
        best = min(best, sigma)
        if sigma >= cfg.accept_tol:
            logger.warning(
                "discarding dip near α=%.6f: σ=%.3e above %.1e", alpha, sigma, cfg.accept_tol
            )
            continue
        coeffs, sines = problem.null_coefficients(alpha)
        mult = coeffs.shape[1]
        logger.debug("eigenvalue α=%.12f σ=%.3e multiplicity %d", alpha, sines[0], mult)
        modes.extend(
            _build_mode(problem, alpha, coeffs[:, j], float(sines[j]), mult) for j in range(mult)
        )

    if not modes:
        msg = (
            f"{len(dips)} dip(s) found but none refined below "
            f"σ={cfg.accept_tol:g} (best {best:.3e})"
        )
        raise IllConditionedError(msg)
    modes.sort(key=lambda mode: (mode.alpha, mode.sigma))
    return modes


def boundary_deviation(mode: EigenMode) -> float:
    """std/rms of the overdetermined boundary quantity; 0 when it is exactly constant."""
    values = np.asarray(mode.boundary_values, dtype=np.float64)
    if values.size == 0:
        msg = "mode carries no boundary data"
        raise DegenerateModeError(msg)
    rms = float(np.sqrt(np.mean(values**2)))
    if rms < RMS_FLOOR:
        msg = f"boundary data of the mode at α={mode.alpha:.6f} vanishes (rms {rms:.3e})"
        raise DegenerateModeError(msg)
    return float(np.std(values) / rms)


def evaluate_mode(mode: EigenMode, points: np.ndarray) -> np.ndarray:
    """u at arbitrary points of the plane."""
    points = np.asarray(points, dtype=np.float64)
    basis = fourier_bessel(mode.alpha, points, np.asarray(mode.center), mode.basis_order)
    return basis @ mode.coefficients


def mode_inner_product(curve: SupportCurve, first: EigenMode, second: EigenMode) -> float:
    """⟨u, v⟩ / (‖u‖‖v‖) over Ω by the interior tensor quadrature."""
    points, weights = area_nodes(curve)
    u = evaluate_mode(first, points)
    v = evaluate_mode(second, points)
    norm = math.sqrt(float(np.sum(weights * u * u)) * float(np.sum(weights * v * v)))
    if norm == 0:
        msg = "cannot normalize a mode that vanishes in the interior"
        raise DegenerateModeError(msg)
    return float(np.sum(weights * u * v)) / norm


def rigidity_verdict(
    curve: SupportCurve,
    kind: BoundaryKind,
    cfg: EigenScanConfig,
    dev_tol: float = 1e-4,
    n_dirs: int = 16,
    n_jobs: int = 1,
) -> EigenAssessment:
    """Modes whose overdetermined quantity is constant to `dev_tol`, cross-checked by plane waves.

    Each candidate α is fed to the plane-wave scan at t = 1 (λ = √(α + 1)); the
    integral over ∂Ω must vanish in every direction for a genuine disk mode.
    Candidates failing that scan are demoted to `rejected` and do not count
    towards the verdict.
    """
    from oscint.planewave import rigidity_scan

    modes = eigen_scan(curve, kind, cfg, n_jobs=n_jobs)
    candidates = [mode for mode in modes if mode.deviation < dev_tol]
    cross_checks = {}
    for alpha in sorted({mode.alpha for mode in candidates}):
        report = rigidity_scan(
            curve,
            kind,
            [PlaneWaveParams.from_alpha(alpha, 1.0, 0.0)],
            n_dirs,
            allow_inadmissible=True,
            n_jobs=n_jobs,
        )
        cross_checks[alpha] = report.verdict
        logger.info(
            "cross-check at α=%.9f: %s (max %.3e)", alpha, report.verdict, report.best_level_max
        )
    hits: list[EigenMode] = []
    rejected: list[EigenMode] = []
    for mode in candidates:
        if cross_checks[mode.alpha] == PlaneWaveVerdict.DISK_CONSISTENT:
            hits.append(mode)
        else:
            rejected.append(mode)
    if rejected:
        logger.warning(
            "%d mode(s) with constant boundary data failed the plane-wave cross-check",
            len(rejected),
        )
    verdict = EigenVerdict.OVERDETERMINED_SOLVABLE if hits else EigenVerdict.NO_OVERDETERMINED_MODE
    return EigenAssessment(
        kind=kind,
        window=cfg.window,
        modes=modes,
        hits=hits,
        verdict=verdict,
        min_deviation=min(mode.deviation for mode in modes),
        cross_checks=cross_checks,
        rejected=rejected,
    )
