import math

import numpy as np
import pytest

from adiaopt.adiabaticity import EigenstateTrace, final_adiabaticity, track_eigenstates
from adiaopt.errors import ValidationError
from adiaopt.operators import SIGMA_Z, expm_hermitian
from adiaopt.optimality import (
    directional_derivative,
    residual_certificate,
    response_kT,
    sensitivity,
    stationarity_residual,
)
from adiaopt.paths import Controls, perturbed_path, rotating_spin_path
from adiaopt.propagator import TimeGrid, evolve
from adiaopt.operators import hermitian_basis
from adiaopt.spin import period

from conftest import ConstantPath, random_hermitian


def setup(path, steps=4096, level=0):
    trace = evolve(path, steps)
    return trace, track_eigenstates(path, trace.grid, level)


def random_controls(rng, dim, T, n=8, scale=1.0):
    return Controls.from_interior(scale * rng.normal(size=(dim * dim - 1, n)), T)


@pytest.fixture
def generic(spin):
    """Spin path at a duration where it is not stationary."""
    path = rotating_spin_path(spin, 0.65 * period(spin))
    trace, eigen = setup(path)
    return path, trace, eigen


class TestResponse:
    def test_zero_perturbation(self, generic):
        path, trace, _ = generic
        k = response_kT(trace, path, Controls.zeros(3, 5, path.duration))
        assert np.max(np.abs(k)) == 0.0

    def test_commuting_perturbation(self):
        path = ConstantPath(-0.5 * SIGMA_Z, 2.0)
        trace = evolve(path, 64)
        values = np.zeros((3, 6))
        values[2] = [0.3, -0.2, 0.9, 0.4, 0.1, 0.7]
        k = response_kT(trace, path, Controls.from_interior(values, 2.0))
        assert np.max(np.abs(k)) <= 1e-15

    def test_hermitian(self, generic, rng):
        path, trace, _ = generic
        k = response_kT(trace, path, random_controls(rng, 2, path.duration))
        assert np.max(np.abs(k - k.conj().T)) <= 1e-15

    def test_matches_reintegration_to_second_order(self, generic, rng):
        path, trace, _ = generic
        h = random_controls(rng, 2, path.duration)
        k = response_kT(trace, path, h)
        errors = []
        for eps in (1e-2, 1e-3):
            u_eps = evolve(perturbed_path(path, h, eps), 4096).final
            errors.append(np.max(np.abs(u_eps - expm_hermitian(k, -eps) @ trace.final)))
        assert math.log10(errors[0] / errors[1]) >= 1.8

    def test_rejects_unpinned(self, generic):
        path, trace, _ = generic
        with pytest.raises(ValidationError):
            response_kT(trace, path, Controls(np.linspace(0, path.duration, 3), np.ones((3, 3))))

    def test_rejects_foreign_trace(self, generic, spin):
        path, _, _ = generic
        other = evolve(rotating_spin_path(spin, 1.0), 16)
        with pytest.raises(ValidationError):
            response_kT(other, path, Controls.zeros(3, 2, path.duration))


class TestDirectionalDerivative:
    def test_zero_direction(self, generic):
        path, trace, eigen = generic
        assert directional_derivative(trace, path, eigen, Controls.zeros(3, 4, path.duration)) == 0.0

    @pytest.mark.parametrize("seed", range(3))
    def test_vanishes_at_revival(self, spin, seed):
        path = rotating_spin_path(spin, period(spin))
        trace, eigen = setup(path)
        h = random_controls(np.random.default_rng(seed), 2, path.duration)
        assert abs(directional_derivative(trace, path, eigen, h)) <= 1e-6

    def test_half_period_matches_finite_difference(self, spin):
        path = rotating_spin_path(spin, period(spin) / 2)
        trace, eigen = setup(path)
        eps = 1e-4
        checked = 0
        for i in range(3):
            values = np.zeros((3, 7))
            values[i] = np.sin(np.pi * np.arange(1, 8) / 8)
            h = Controls.from_interior(values, path.duration)
            d = directional_derivative(trace, path, eigen, h)
            if abs(d) <= 1e-3:
                continue
            fd = (final_adiabaticity(perturbed_path(path, h, eps)) - final_adiabaticity(perturbed_path(path, h, -eps))) / (
                2 * eps
            )
            assert d == pytest.approx(fd, rel=0.05)
            checked += 1
        assert checked >= 1

    def test_sign_and_factor(self, generic, rng):
        path, trace, eigen = generic
        h = random_controls(rng, 2, path.duration)
        eps = 1e-4
        fd = (final_adiabaticity(perturbed_path(path, h, eps)) - final_adiabaticity(perturbed_path(path, h, -eps))) / (
            2 * eps
        )
        assert directional_derivative(trace, path, eigen, h) == pytest.approx(fd, rel=1e-4)


class TestStationarityResidual:
    def test_parallel_direction_vanishes(self):
        path = ConstantPath(0.7 * SIGMA_Z, 3.0)
        trace, eigen = setup(path, 64)
        res = stationarity_residual(trace, path, eigen)
        assert np.max(np.abs(res.values[2])) <= 1e-15

    def test_revival_is_stationary(self, spin):
        path = rotating_spin_path(spin, period(spin))
        res = stationarity_residual(*setup(path)[:1], path, setup(path)[1])
        assert res.sup_norm <= 1e-6 * spin.omega0

    @pytest.mark.parametrize("m", [0, 1])
    def test_odd_half_periods_not_stationary(self, spin, m):
        path = rotating_spin_path(spin, (2 * m + 1) * period(spin) / 2)
        trace, eigen = setup(path)
        assert stationarity_residual(trace, path, eigen).sup_norm > 1e-3 * spin.omega0

    def test_shape_and_norms(self, generic):
        path, trace, eigen = generic
        res = stationarity_residual(trace, path, eigen)
        assert res.values.shape == (3, trace.grid.nodes.size)
        assert res.sup_norm == np.max(np.abs(res.values))
        assert np.all(np.isfinite(res.values))

    def test_consistent_with_directional_derivative(self, generic, rng):
        path, trace, eigen = generic
        res = stationarity_residual(trace, path, eigen)
        w = trace.grid.trapezoid_weights()
        for _ in range(5):
            h = random_controls(rng, 2, path.duration)
            assembled = -2.0 * np.sum(res.values * h(trace.grid.nodes).T * w)
            assert directional_derivative(trace, path, eigen, h) == pytest.approx(assembled, rel=1e-6)

    def test_sensitivity_expands_residual(self, generic):
        path, trace, eigen = generic
        s = sensitivity(trace, path, eigen)
        r = np.real(np.einsum("iab,kba->ik", hermitian_basis(2), s))
        np.testing.assert_allclose(r, stationarity_residual(trace, path, eigen).values, atol=1e-14)

    def test_gauge_independent(self, generic):
        path, trace, eigen = generic
        phases = np.exp(1j * np.linspace(0.3, 5.0, eigen.states.shape[0]))[:, None]
        rephased = EigenstateTrace(eigen.grid, eigen.level, eigen.states * phases, eigen.energies, eigen.gaps)
        a = stationarity_residual(trace, path, eigen).values
        b = stationarity_residual(trace, path, rephased).values
        assert np.max(np.abs(a - b)) <= 1e-10

    def test_grid_mismatch(self, generic):
        path, trace, _ = generic
        eigen = track_eigenstates(path, TimeGrid.uniform(path.duration, 10), 0)
        with pytest.raises(ValidationError):
            stationarity_residual(trace, path, eigen)


class TestCertificate:
    def test_revival_passes(self, spin):
        cert = residual_certificate(rotating_spin_path(spin, period(spin)))
        assert cert.passed
        assert cert.scale == pytest.approx(0.5)

    def test_off_revival_fails(self, spin):
        cert = residual_certificate(rotating_spin_path(spin, 0.65 * period(spin)))
        assert not cert.passed

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_constant_hamiltonian(self, rng, d):
        for level in range(d):
            path = ConstantPath(random_hermitian(rng, d), rng.uniform(0.5, 5.0))
            cert = residual_certificate(path, level=level, steps=32)
            assert cert.passed and cert.sup_norm <= 1e-10
