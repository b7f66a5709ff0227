"""Tests for the particular-solutions eigensolver."""

import dataclasses
import math

import numpy as np
import pytest
from scipy import special

from oscint import helmholtz, planewave
from oscint.config import EigenScanConfig
from oscint.errors import DegenerateModeError, IllConditionedError, NoDipFoundError
from oscint.helmholtz import (
    CollocationProblem,
    boundary_deviation,
    eigen_scan,
    fourier_bessel,
    fourier_bessel_normal,
    mode_inner_product,
    rigidity_verdict,
)
from oscint.models import BoundaryKind, EigenVerdict, PlaneWaveVerdict

from .conftest import J01, J02, J11, J21

DISK_DIRICHLET_1 = 5.783185962946785


def window(lo: float, hi: float, **kwargs) -> EigenScanConfig:
    return EigenScanConfig(alpha_min=lo, alpha_max=hi, **kwargs)


class TestFourierBessel:
    def test_column_layout(self):
        points = np.array([[0.3, 0.4], [-0.5, 0.1]])
        cols = fourier_bessel(4.0, points, np.zeros(2), 2)
        assert cols.shape == (2, 5)
        r = np.hypot(points[:, 0], points[:, 1])
        phi = np.arctan2(points[:, 1], points[:, 0])
        np.testing.assert_allclose(cols[:, 0], special.j0(2 * r), atol=1e-14)
        np.testing.assert_allclose(cols[:, 2], special.jv(2, 2 * r) * np.cos(2 * phi), atol=1e-14)
        np.testing.assert_allclose(cols[:, 4], special.jv(2, 2 * r) * np.sin(2 * phi), atol=1e-14)

    def test_normal_derivative_matches_finite_differences(self, rng):
        points = rng.uniform(-0.8, 0.8, size=(6, 2))
        angles = rng.uniform(0, 2 * math.pi, size=6)
        normals = np.stack([np.cos(angles), np.sin(angles)], axis=1)
        center = np.array([0.1, -0.05])
        h = 1e-6
        exact = fourier_bessel_normal(9.0, points, normals, center, 4)
        plus = fourier_bessel(9.0, points + h * normals, center, 4)
        minus = fourier_bessel(9.0, points - h * normals, center, 4)
        np.testing.assert_allclose(exact, (plus - minus) / (2 * h), atol=1e-8)


class TestCollocation:
    def test_interior_points_stay_inside(self, ellipse):
        problem = CollocationProblem(ellipse, BoundaryKind.DIRICHLET, window(3.0, 6.0))
        pts = problem.interior_points
        assert pts.shape == (50, 2)
        assert np.all((pts[:, 0] / 1.5) ** 2 + pts[:, 1] ** 2 < 0.95**2 + 1e-12)

    def test_seed_fixes_interior_points(self, ellipse):
        first = CollocationProblem(ellipse, BoundaryKind.DIRICHLET, window(3.0, 6.0, seed=7))
        second = CollocationProblem(ellipse, BoundaryKind.DIRICHLET, window(3.0, 6.0, seed=7))
        np.testing.assert_array_equal(first.interior_points, second.interior_points)

    def test_sigma_dips_at_eigenvalue(self, disk):
        problem = CollocationProblem(disk, BoundaryKind.DIRICHLET, window(5.0, 7.0))
        assert problem.sigma(J01**2) < 1e-8
        assert problem.sigma(6.5) > 1e-3

    def test_linear_algebra_failure_is_ill_conditioned(self, disk, monkeypatch):
        problem = CollocationProblem(disk, BoundaryKind.DIRICHLET, window(5.0, 7.0))

        def diverging_svd(*args, **kwargs):
            msg = "SVD did not converge"
            raise np.linalg.LinAlgError(msg)

        monkeypatch.setattr(helmholtz.la, "svd", diverging_svd)
        with pytest.raises(IllConditionedError):
            problem.sigma(6.0)
        with pytest.raises(IllConditionedError):
            problem.null_coefficients(6.0)

    def test_double_eigenvalue_has_two_null_directions(self, disk):
        problem = CollocationProblem(disk, BoundaryKind.DIRICHLET, window(14.0, 15.0))
        coeffs, sines = problem.null_coefficients(J11**2)
        assert coeffs.shape == (problem.n_basis, 2)
        assert sines[1] < 1e-8
        assert sines[2] > 1e-3


class TestEigenScan:
    def test_disk_dirichlet_ground_state(self, disk):
        modes = eigen_scan(disk, BoundaryKind.DIRICHLET, window(5.0, 7.0))
        assert len(modes) == 1
        mode = modes[0]
        assert mode.alpha == pytest.approx(DISK_DIRICHLET_1, abs=1e-6)
        assert mode.multiplicity == 1
        assert mode.deviation < 1e-6
        assert boundary_deviation(mode) == pytest.approx(mode.deviation)

    def test_disk_neumann_radial_mode(self, disk):
        modes = eigen_scan(disk, BoundaryKind.NEUMANN, window(14.0, 16.0))
        assert len(modes) == 1
        assert modes[0].alpha == pytest.approx(J11**2, abs=1e-5)
        assert modes[0].deviation < 1e-6

    def test_disk_double_dip(self, disk):
        modes = eigen_scan(disk, BoundaryKind.DIRICHLET, window(14.0, 15.0))
        assert len(modes) == 2
        for mode in modes:
            assert mode.alpha == pytest.approx(J11**2, abs=1e-6)
            assert mode.multiplicity == 2
            # ∂_νu ∝ cos(θ - θ₀) has zero mean, so std equals rms
            assert mode.deviation == pytest.approx(1.0, abs=1e-6)

    def test_boundary_data_is_normalized(self, disk):
        mode = eigen_scan(disk, BoundaryKind.DIRICHLET, window(5.0, 7.0))[0]
        values = np.array([value for _, value in mode.boundary_data])
        assert np.sqrt(np.mean(values**2)) == pytest.approx(1.0)

    def test_no_dip(self, disk):
        with pytest.raises(NoDipFoundError):
            eigen_scan(disk, BoundaryKind.DIRICHLET, window(6.0, 7.0))

    def test_parallel_scan_matches_serial(self, disk):
        cfg = window(5.0, 7.0, scan_step=0.1)
        serial = eigen_scan(disk, BoundaryKind.DIRICHLET, cfg)
        parallel = eigen_scan(disk, BoundaryKind.DIRICHLET, cfg, n_jobs=2)
        assert [m.alpha for m in parallel] == pytest.approx([m.alpha for m in serial])

    @pytest.mark.slow
    def test_disk_spectrum(self, disk):
        modes = eigen_scan(disk, BoundaryKind.DIRICHLET, window(5.0, 27.0))
        expected = [J01**2, J11**2, J11**2, J21**2, J21**2]
        assert [m.alpha for m in modes] == pytest.approx(expected, abs=1e-5)
        assert all(m.alpha < J02**2 for m in modes)

    @pytest.mark.slow
    def test_ellipse_has_no_constant_flux_mode(self, ellipse):
        modes = eigen_scan(ellipse, BoundaryKind.DIRICHLET, window(3.0, 30.0))
        assert len(modes) >= 4
        assert 3.5 < modes[0].alpha < 4.8
        assert min(m.deviation for m in modes) > 1e-2

    @pytest.mark.parametrize("name", ["disk", "ellipse"])
    def test_scaling_divides_eigenvalues(self, request, name):
        curve = request.getfixturevalue(name)
        ground = eigen_scan(curve, BoundaryKind.DIRICHLET, window(3.0, 6.0))[0]
        doubled = eigen_scan(
            curve.scaled(2.0), BoundaryKind.DIRICHLET, window(0.75, 1.5, scan_step=0.0125)
        )[0]
        assert doubled.alpha == pytest.approx(ground.alpha / 4, rel=1e-6)


class TestDeviation:
    def test_scale_invariant(self, disk):
        mode = eigen_scan(disk, BoundaryKind.DIRICHLET, window(14.0, 15.0))[0]
        scaled = dataclasses.replace(mode, boundary_values=-3.7 * mode.boundary_values)
        assert boundary_deviation(scaled) == pytest.approx(boundary_deviation(mode))

    def test_empty_or_vanishing_data(self, disk):
        mode = eigen_scan(disk, BoundaryKind.DIRICHLET, window(5.0, 7.0))[0]
        with pytest.raises(DegenerateModeError):
            boundary_deviation(dataclasses.replace(mode, boundary_values=np.zeros(0)))
        with pytest.raises(DegenerateModeError):
            boundary_deviation(dataclasses.replace(mode, boundary_values=np.zeros(8)))

    def test_modes_of_distinct_eigenvalues_are_orthogonal(self, disk):
        ground = eigen_scan(disk, BoundaryKind.DIRICHLET, window(5.0, 7.0))[0]
        excited = eigen_scan(disk, BoundaryKind.DIRICHLET, window(14.0, 15.0))[0]
        assert mode_inner_product(disk, ground, ground) == pytest.approx(1.0)
        assert abs(mode_inner_product(disk, ground, excited)) < 1e-6


class TestRigidityVerdict:
    def test_disk_is_solvable(self, disk):
        assessment = rigidity_verdict(disk, BoundaryKind.DIRICHLET, window(5.0, 7.0))
        assert assessment.verdict is EigenVerdict.OVERDETERMINED_SOLVABLE
        assert len(assessment.hits) == 1
        assert assessment.min_deviation < 1e-6
        assert list(assessment.cross_checks.values()) == [PlaneWaveVerdict.DISK_CONSISTENT]
        assert assessment.window == (5.0, 7.0)

    def test_disk_double_mode_is_not_a_hit(self, disk):
        assessment = rigidity_verdict(disk, BoundaryKind.DIRICHLET, window(14.0, 15.0))
        assert assessment.verdict is EigenVerdict.NO_OVERDETERMINED_MODE
        assert assessment.cross_checks == {}

    def test_reuleaux_has_no_hit(self, reuleaux):
        assessment = rigidity_verdict(reuleaux, BoundaryKind.DIRICHLET, window(5.0, 7.0))
        assert assessment.verdict is EigenVerdict.NO_OVERDETERMINED_MODE
        assert assessment.min_deviation > 1e-4

    def test_failed_cross_check_demotes_hit(self, disk, monkeypatch):
        scan = planewave.rigidity_scan

        def not_disk(*args, **kwargs):
            return dataclasses.replace(scan(*args, **kwargs), verdict=PlaneWaveVerdict.NOT_DISK)

        monkeypatch.setattr(planewave, "rigidity_scan", not_disk)
        assessment = rigidity_verdict(disk, BoundaryKind.DIRICHLET, window(5.0, 7.0))
        assert assessment.verdict is EigenVerdict.NO_OVERDETERMINED_MODE
        assert assessment.hits == []
        assert len(assessment.rejected) == 1
        assert assessment.rejected[0].deviation < 1e-6
        assert list(assessment.cross_checks.values()) == [PlaneWaveVerdict.NOT_DISK]

    @pytest.mark.slow
    @pytest.mark.parametrize("name", ["ellipse", "reuleaux"])
    def test_non_disks_have_no_hit_up_to_forty(self, request, name):
        curve = request.getfixturevalue(name)
        assessment = rigidity_verdict(curve, BoundaryKind.DIRICHLET, window(5.0, 40.0))
        assert assessment.verdict is EigenVerdict.NO_OVERDETERMINED_MODE
        assert assessment.hits == []
        assert assessment.rejected == []
        assert assessment.min_deviation >= 1e-4
