"""End-to-end rigidity assessment of a curve at a candidate eigenvalue."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

from oscint.config import EigenScanConfig
from oscint.errors import IllConditionedError, NoDipFoundError
from oscint.helmholtz import rigidity_verdict
from oscint.models import (
    BoundaryKind,
    EigenAssessment,
    EigenVerdict,
    PlaneWaveParams,
    PlaneWaveVerdict,
    RigidityAssessment,
)
from oscint.planewave import rigidity_scan

if TYPE_CHECKING:
    from collections.abc import Sequence

    from oscint.curve import SupportCurve

logger = logging.getLogger(__name__)

REFINE_TOL = 1e-12
SCAN_STEP = 0.02


def _eigen_window(alpha: float, half_width: float) -> tuple[float, float]:
    lo = max(alpha - half_width, 0.5 * alpha)
    return lo, alpha + half_width


def assess_rigidity(
    curve: SupportCurve,
    kind: BoundaryKind,
    alpha: float,
    t_values: Sequence[float],
    n_dirs: int,
    *,
    dev_tol: float = 1e-4,
    half_width: float = 0.5,
    seed: int = 42,
    n_jobs: int = 1,
) -> RigidityAssessment:
    """Full rigidity pipeline.

    1. Scan the eigenproblem in a window around `alpha`
    2. Snap `alpha` to the nearest refined eigenvalue, if any
    3. Scan plane-wave integrals on the α level set for every t
    4. Combine: DISK-CONSISTENT needs vanishing integrals and an overdetermined mode
    """
    # Step 1: eigen scan; an empty window is evidence too
    lo, hi = _eigen_window(alpha, half_width)
    cfg = EigenScanConfig(
        alpha_min=lo, alpha_max=hi, scan_step=SCAN_STEP, refine_tol=REFINE_TOL, seed=seed
    )
    eigen: EigenAssessment | None
    try:
        eigen = rigidity_verdict(curve, kind, cfg, dev_tol=dev_tol, n_dirs=n_dirs, n_jobs=n_jobs)
    except (NoDipFoundError, IllConditionedError) as e:
        logger.info("no eigenvalue near α=%.6f: %s", alpha, e)
        eigen = None

    # Step 2: snap to the closest eigenvalue
    refined = alpha
    if eigen is not None:
        candidates = eigen.hits or eigen.modes
        refined = min((mode.alpha for mode in candidates), key=lambda a: abs(a - alpha))
        logger.debug("α=%.9f refined to %.12f", alpha, refined)

    # Step 3: plane waves on the level set λ² - t² = α
    params_grid = [PlaneWaveParams.from_alpha(refined, t, 0.0) for t in t_values]
    plane_wave = rigidity_scan(
        curve, kind, params_grid, n_dirs, allow_inadmissible=True, n_jobs=n_jobs
    )

    # Step 4: both strands must agree
    solvable = eigen is not None and eigen.verdict is EigenVerdict.OVERDETERMINED_SOLVABLE
    consistent = plane_wave.verdict is PlaneWaveVerdict.DISK_CONSISTENT and solvable
    return RigidityAssessment(
        kind=kind,
        alpha=refined,
        plane_wave=plane_wave,
        eigen=eigen,
        verdict=PlaneWaveVerdict.DISK_CONSISTENT if consistent else PlaneWaveVerdict.NOT_DISK,
    )
