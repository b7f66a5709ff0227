"""Tests for data models."""

import math

import numpy as np
import pytest

from oscint.models import (
    BoundaryKind,
    CheckResult,
    EigenVerdict,
    PlaneWaveParams,
    PlaneWaveVerdict,
    RigidityAssessment,
    RigidityReport,
    RigidityRow,
    WidthProfile,
)


class TestVerdicts:
    def test_report_strings(self):
        assert str(PlaneWaveVerdict.DISK_CONSISTENT) == "DISK-CONSISTENT"
        assert str(PlaneWaveVerdict.NOT_DISK) == "NOT-DISK"
        assert str(EigenVerdict.NO_OVERDETERMINED_MODE) == "NO-OVERDETERMINED-MODE-IN-WINDOW"

    def test_boundary_kinds_are_lowercase(self):
        for kind in BoundaryKind:
            assert kind.value == kind.value.lower()


class TestPlaneWaveParams:
    def test_level_set(self):
        params = PlaneWaveParams.from_alpha(7.0, 3.0, 1.2)
        assert params.lam == pytest.approx(4.0)
        assert params.alpha == pytest.approx(7.0)

    def test_frozen(self):
        params = PlaneWaveParams.from_direction(1.0, 0.0, 0.0)
        with pytest.raises(AttributeError):
            params.lam = 2.0  # type: ignore[misc]

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            PlaneWaveParams.from_direction(math.inf, 0.0, 0.0)


class TestRigidityRow:
    def test_residual_properties(self):
        row = RigidityRow(
            direction=0.0,
            lam=10.0,
            t=1.0,
            integral=1 + 1j,
            surrogate=1 + 0.5j,
            scaled_two_point=0.0,
            admissible=False,
        )
        assert row.abs_resid == pytest.approx(0.5)
        assert row.resid_times_lambda == pytest.approx(5.0)


class TestRigidityAssessment:
    def test_missing_eigen_scan(self):
        report = RigidityReport(
            kind=BoundaryKind.DIRICHLET,
            rows=[],
            verdict=PlaneWaveVerdict.NOT_DISK,
            tol=1e-6,
            witness_direction=0.0,
            best_level=(2.0, 1.0),
            best_level_max=0.3,
        )
        assessment = RigidityAssessment(
            kind=BoundaryKind.DIRICHLET,
            alpha=3.0,
            plane_wave=report,
            eigen=None,
            verdict=PlaneWaveVerdict.NOT_DISK,
        )
        assert assessment.eigen_verdict is EigenVerdict.NO_OVERDETERMINED_MODE


class TestCheckResult:
    def test_passed(self):
        assert CheckResult("a", 1e-12, 1e-10).passed
        assert not CheckResult("b", 1e-9, 1e-10).passed

    def test_nan_error_fails(self):
        assert not CheckResult("c", math.nan, 1.0).passed


class TestWidthProfile:
    def test_samples(self):
        profile = WidthProfile(
            theta=np.array([0.0, 1.0]),
            width=np.array([2.0, 2.0]),
            w_min=2.0,
            w_max=2.0,
            is_constant=True,
            breadth=2.0,
        )
        assert profile.samples == [(0.0, 2.0), (1.0, 2.0)]
