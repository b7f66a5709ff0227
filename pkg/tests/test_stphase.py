"""Tests for the stationary-phase expansion."""

import cmath
import math

import numpy as np
import pytest

from oscint.curve import jet_at
from oscint.errors import BadJetError, InadmissibleError, InvalidInputError, NotCriticalError
from oscint.jets import Jet1D
from oscint.models import BoundaryKind, Convention, PlaneWaveParams
from oscint.planewave import boundary_integral, disk_dirichlet_oracle, disk_neumann_oracle
from oscint.stphase import (
    convergence_scan,
    critical_angles,
    critical_contribution,
    critical_data,
    expand_critical,
    fit_slope,
    l1_amplitude,
    l1_from_jets,
    neumann_two_point_surrogate,
    oscillation_period,
    square_sixth_derivative,
    two_point_surrogate,
)

UP = math.pi / 2
DOUBLING_GRID = [100.0 * 2**j for j in range(7)]


@pytest.fixture
def disk_g(disk):
    """Phase remainder of the unit circle at its bottom point: x⁴/8 + x⁶/16 + ..."""
    return jet_at(disk, 3 * UP, order=8).flattened_below(3)


class TestL1Amplitude:
    @pytest.mark.parametrize("t", [0.0, 1.0, 2.0])
    def test_unit_circle(self, disk_g, t):
        assert l1_amplitude(disk_g, 1.0, t) == pytest.approx(1j * (t * t / 2 + 1 / 8), abs=1e-12)

    def test_flat_phase(self):
        assert l1_amplitude(Jet1D.from_coeffs(np.zeros(7)), 1.0, 0.0) == pytest.approx(0.5j)

    def test_literal_convention(self, disk_g):
        assert l1_amplitude(disk_g, 1.0, 0.0, Convention.LITERAL) == pytest.approx(-7j / 8)

    def test_rejects_low_order_terms(self):
        with pytest.raises(BadJetError):
            l1_amplitude(Jet1D.from_coeffs([0.0, 0.0, 0.5, 0.0, 0.1]), 1.0, 0.0)

    def test_rejects_short_jet(self):
        with pytest.raises(BadJetError):
            l1_amplitude(Jet1D.from_coeffs([0.0, 0.0, 0.0, 1.0]), 1.0, 0.0)

    def test_zero_curvature(self, disk_g):
        with pytest.raises(InvalidInputError):
            l1_amplitude(disk_g, 0.0, 0.0)

    def test_square_sixth_derivative(self, rng):
        for _ in range(100):
            coeffs = np.concatenate([np.zeros(3), rng.normal(size=4)])
            g = Jet1D.from_coeffs(coeffs)
            g3 = g.derivative_value(3)
            assert square_sixth_derivative(g) == pytest.approx(20 * g3 * g3, rel=1e-12)

    @pytest.mark.parametrize("theta", [0.0, 1.0, 2.2])
    def test_closed_form_matches_jet_sum(self, reuleaux, theta):
        params = PlaneWaveParams.from_direction(50.0, 1.5, theta)
        crit = critical_data(reuleaux, theta, params)
        closed = l1_amplitude(crit.g_jet, crit.k1, crit.tau)
        assert l1_from_jets(crit) == pytest.approx(closed, rel=1e-10)


class TestCriticalData:
    def test_angles(self):
        params = PlaneWaveParams.from_direction(10.0, 0.0, 0.4)
        assert critical_angles(params) == pytest.approx((0.4, 0.4 + math.pi))

    def test_not_critical(self, disk):
        params = PlaneWaveParams.from_direction(10.0, 0.0, UP)
        with pytest.raises(NotCriticalError):
            critical_data(disk, 0.3, params)

    def test_signs_on_ellipse(self, ellipse):
        params = PlaneWaveParams.from_direction(10.0, 1.0, UP)
        top = critical_data(ellipse, UP, params)
        bottom = critical_data(ellipse, 3 * UP, params)
        assert top.sigma == -1.0
        assert bottom.sigma == 1.0
        assert bottom.k1 == pytest.approx(1 / 2.25)
        assert top.k1 == pytest.approx(-1 / 2.25)
        assert bottom.phase_value == pytest.approx(-1.0)
        assert abs(bottom.tau) == pytest.approx(1.0)


class TestCriticalContribution:
    def test_disk_bottom_point(self, disk):
        params = PlaneWaveParams.from_direction(100.0, 0.0, UP)
        value = critical_contribution(disk, 3 * UP, params)
        phase = cmath.exp(1j * math.pi / 4) * cmath.exp(-100j)
        expected = math.sqrt(2 * math.pi / 100) * phase * (1 + 1j / 800)
        assert value == pytest.approx(expected, abs=1e-12)

    def test_top_point_is_conjugate(self, disk):
        params = PlaneWaveParams.from_direction(100.0, 0.0, UP)
        top = critical_contribution(disk, UP, params)
        bottom = critical_contribution(disk, 3 * UP, params)
        assert top == pytest.approx(bottom.conjugate(), abs=1e-12)

    def test_expansion_parts(self, disk):
        params = PlaneWaveParams.from_direction(100.0, 0.0, UP)
        result = expand_critical(disk, 3 * UP, params)
        assert result.l1_coeff == pytest.approx(0.125j)
        assert result.surrogate == pytest.approx(result.l0_term * (1 + result.l1_coeff / 100))

    @pytest.mark.parametrize("t", [0.0, 1.0])
    def test_conjugate_pair_on_ellipse(self, ellipse, t):
        params = PlaneWaveParams.from_direction(300.0, t, UP)
        top = critical_contribution(ellipse, UP, params)
        bottom = critical_contribution(ellipse, 3 * UP, params)
        assert top == pytest.approx(bottom.conjugate(), rel=1e-10)

    def test_rotation_invariance(self, reuleaux):
        params = PlaneWaveParams.from_direction(50.0, 1.5, 0.4)
        reference = critical_contribution(reuleaux, 0.4, params)
        for beta in 2 * math.pi * np.arange(20) / 20:
            turned = PlaneWaveParams.from_direction(50.0, 1.5, 0.4 + beta)
            value = critical_contribution(reuleaux.rotated(beta), 0.4 + beta, turned)
            assert value == pytest.approx(reference, rel=1e-10)

    def test_literal_convention_keeps_leading_term(self, disk):
        params = PlaneWaveParams.from_direction(100.0, 0.0, UP)
        standard = expand_critical(disk, 3 * UP, params)
        literal = expand_critical(disk, 3 * UP, params, Convention.LITERAL)
        assert literal.l0_term == standard.l0_term
        assert literal.l1_coeff == pytest.approx(-7 * standard.l1_coeff)

    def test_envelope_scales_with_curvature(self, disk):
        params = PlaneWaveParams.from_direction(400.0, 0.0, 0.0)
        small = disk.scaled(0.5)
        envelope = abs(expand_critical(disk, 0.0, params).l0_term)
        l0 = expand_critical(small, 0.0, params).l0_term
        assert abs(l0) == pytest.approx(envelope / math.sqrt(2))


class TestTwoPointSurrogate:
    @pytest.mark.parametrize("lam, tol", [(100.0, 3e-6), (200.0, 1e-5), (400.0, 2e-7)])
    def test_disk_matches_bessel(self, disk, lam, tol):
        params = PlaneWaveParams.from_direction(lam, 0.0, UP)
        assert abs(two_point_surrogate(disk, params) - disk_dirichlet_oracle(1.0, lam, 0.0)) < tol

    def test_disk_with_tilt(self, disk):
        params = PlaneWaveParams.from_direction(400.0, 2.0, 0.7)
        error = abs(two_point_surrogate(disk, params) - disk_dirichlet_oracle(1.0, 400.0, 2.0))
        assert error < 1e-5

    def test_l0_only_is_worse(self, disk):
        params = PlaneWaveParams.from_direction(3 * math.pi / 4 + 63 * math.pi, 0.0, UP)
        exact = disk_dirichlet_oracle(1.0, params.lam, 0.0)
        l0 = two_point_surrogate(disk, params, with_l1=False)
        l01 = two_point_surrogate(disk, params)
        assert abs(exact - l01) < 1e-3 * abs(exact - l0)

    @pytest.mark.parametrize("lam", [400.0, 1600.0])
    def test_neumann_disk(self, disk, lam):
        params = PlaneWaveParams.from_direction(lam, 0.0, 0.2)
        error = abs(neumann_two_point_surrogate(disk, params) - disk_neumann_oracle(1.0, lam, 0.0))
        assert error * lam**1.5 < 1.0

    def test_neumann_matches_quadrature_on_ellipse(self, ellipse):
        params = PlaneWaveParams.from_direction(800.0, 1.0, 0.3)
        integral = boundary_integral(ellipse, params, BoundaryKind.NEUMANN)
        assert abs(neumann_two_point_surrogate(ellipse, params) - integral) < 0.1


class TestFitSlope:
    def test_exact_power_law(self):
        lams = [100.0, 200.0, 400.0, 800.0]
        assert fit_slope(lams, [lam**-2.5 for lam in lams]) == pytest.approx(-2.5)

    def test_drops_smallest_lambda(self):
        lams = [100.0, 200.0, 400.0, 800.0]
        values = [1.0, *(lam**-1.0 for lam in lams[1:])]
        assert fit_slope(lams, values) == pytest.approx(-1.0)

    def test_too_few_positive_values(self):
        assert math.isnan(fit_slope([1.0, 2.0, 3.0], [1.0, 0.0, 1.0]))

    def test_two_points_are_not_enough(self):
        assert math.isnan(fit_slope([1.0, 2.0, 4.0], [1.0, 0.5, 0.25]))
        assert fit_slope([1.0, 2.0, 4.0, 8.0], [1.0, 0.5, 0.25, 0.125]) == pytest.approx(-1.0)


class TestOscillationPeriod:
    def test_disk(self, disk):
        assert oscillation_period(disk, 0.7) == pytest.approx(math.pi)

    def test_ellipse(self, ellipse):
        assert oscillation_period(ellipse, 0.0) == pytest.approx(2 * math.pi / 3)
        assert oscillation_period(ellipse, UP) == pytest.approx(math.pi)


@pytest.mark.slow
class TestConvergenceScan:
    def test_disk_l01_slope(self, disk):
        scan = convergence_scan(disk, UP, 0.0, DOUBLING_GRID)
        assert -2.7 <= scan.slope_l01 <= -2.3
        assert [row.lam for row in scan.rows] == DOUBLING_GRID

    def test_disk_l0_slope(self, disk):
        scan = convergence_scan(disk, UP, 0.0, DOUBLING_GRID)
        assert -1.7 <= scan.slope_l0 <= -1.3

    def test_envelope_bounds_row_residuals(self, disk):
        scan = convergence_scan(disk, UP, 0.0, DOUBLING_GRID[:4])
        for row in scan.rows:
            assert row.envelope_l0 >= row.resid_l0
            assert row.envelope_l01 >= row.resid_l01

    def test_single_sample_uses_grid_residuals(self, disk):
        scan = convergence_scan(disk, UP, 0.0, DOUBLING_GRID[:4], envelope_samples=1)
        for row in scan.rows:
            assert row.envelope_l0 == row.resid_l0
            assert row.envelope_l01 == row.resid_l01

    def test_literal_convention_fails_disk_slope(self, disk):
        scan = convergence_scan(disk, UP, 0.0, DOUBLING_GRID, Convention.LITERAL)
        assert -1.7 <= scan.slope_l01 <= -1.3
        last = scan.rows[-1]
        assert last.envelope_l01 == pytest.approx(8 * last.envelope_l0, rel=0.05)

    def test_ellipse_without_tilt(self, ellipse):
        scan = convergence_scan(ellipse, UP, 0.0, DOUBLING_GRID, n_jobs=2)
        assert scan.slope_l01 <= -2.2
        assert -1.7 <= scan.slope_l0 <= -1.3

    def test_ellipse_with_tilt(self, ellipse):
        scan = convergence_scan(
            ellipse, UP, 1.0, DOUBLING_GRID, allow_inadmissible=True, n_jobs=2
        )
        assert scan.slope_l01 <= -1.4
        assert scan.gamma == pytest.approx(3.0)
        assert not any(row.admissible for row in scan.rows)
        assert [row.lam for row in scan.rows] == DOUBLING_GRID


class TestConvergenceScanInput:
    def test_inadmissible_grid_rejected(self, ellipse):
        with pytest.raises(InadmissibleError):
            convergence_scan(ellipse, UP, 1.0, [100.0, 200.0, 400.0, 800.0])

    def test_needs_four_values(self, disk):
        with pytest.raises(InvalidInputError):
            convergence_scan(disk, 0.0, 0.0, [100.0, 200.0, 400.0])

    def test_needs_increasing_grid(self, disk):
        with pytest.raises(InvalidInputError):
            convergence_scan(disk, 0.0, 0.0, [100.0, 400.0, 200.0, 800.0])

    def test_needs_envelope_samples(self, disk):
        with pytest.raises(InvalidInputError):
            convergence_scan(disk, 0.0, 0.0, DOUBLING_GRID[:4], envelope_samples=0)
