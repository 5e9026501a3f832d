import numpy as np
import pytest

from adiaopt.errors import AmbiguousLogarithmError, GaugeTrackingError, ValidationError
from adiaopt.operators import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    align_gauge,
    as_hermitian,
    as_state,
    as_unitary,
    basis_coefficients,
    commutator,
    eigh,
    expm_hermitian,
    expm_skew,
    from_coefficients,
    hermitian_basis,
    unitary_generator,
)

from conftest import random_hermitian, random_unitary


class TestExpmSkew:
    def test_zero_hamiltonian_gives_identity(self):
        assert np.array_equal(expm_skew(np.zeros((2, 2)), 1.0), np.eye(2))

    def test_sigma_z_half_turn(self):
        np.testing.assert_allclose(expm_skew(SIGMA_Z, np.pi), -np.eye(2), atol=1e-14)

    def test_sigma_x_quarter_turn(self):
        np.testing.assert_allclose(expm_skew(SIGMA_X, np.pi / 2), -1j * SIGMA_X, atol=1e-14)

    def test_s_zero_is_exact_identity(self, rng):
        assert np.array_equal(expm_skew(random_hermitian(rng, 3), 0.0), np.eye(3))

    def test_matches_scipy(self, rng):
        import scipy.linalg

        h = random_hermitian(rng, 4)
        np.testing.assert_allclose(expm_skew(h, 0.7), scipy.linalg.expm(-0.7j * h), atol=1e-12)

    def test_rejects_non_finite(self):
        with pytest.raises(ValidationError):
            expm_skew(np.array([[np.nan, 0], [0, 1]]), 1.0)
        with pytest.raises(ValidationError):
            expm_skew(SIGMA_Z, np.inf)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValidationError):
            expm_skew(np.array([[0, 1], [0, 0]]), 1.0)

    def test_batched_exponent(self, rng):
        h = np.stack([random_hermitian(rng, 2) for _ in range(5)])
        s = np.linspace(0, 1, 5)
        out = expm_hermitian(h, s)
        for k in range(5):
            np.testing.assert_allclose(out[k], expm_skew(h[k], s[k]), atol=1e-14)


class TestEigh:
    def test_sigma_z(self):
        spec = eigh(SIGMA_Z)
        np.testing.assert_allclose(spec.eigenvalues, [-1, 1])
        assert abs(abs(spec.eigenvectors[1, 0]) - 1) < 1e-14
        assert abs(abs(spec.eigenvectors[0, 1]) - 1) < 1e-14

    def test_tilted_field(self):
        omega0, theta = 1.7, 0.4
        h = -0.5 * omega0 * (np.cos(theta) * SIGMA_Z + np.sin(theta) * SIGMA_X)
        np.testing.assert_allclose(eigh(h).eigenvalues, [-omega0 / 2, omega0 / 2], atol=1e-14)

    def test_degenerate_reports_zero_gap(self):
        spec = eigh(np.eye(2))
        np.testing.assert_allclose(spec.eigenvalues, [1, 1])
        assert spec.min_gap == 0.0

    def test_reconstruction(self, rng):
        h = random_hermitian(rng, 6)
        spec = eigh(h)
        assert np.max(np.abs(spec.reconstruct() - h)) <= 1e-10
        v = spec.eigenvectors
        assert np.max(np.abs(v.conj().T @ v - np.eye(6))) <= 1e-10


class TestHermitianBasis:
    def test_pauli(self):
        b = hermitian_basis(2)
        for got, want in zip(b, (SIGMA_X, SIGMA_Y, SIGMA_Z)):
            np.testing.assert_array_equal(got, want)

    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_gell_mann_properties(self, d):
        b = hermitian_basis(d)
        assert len(b) == d * d - 1
        gram = np.einsum("iab,jba->ij", b, b)
        np.testing.assert_allclose(gram, 2 * np.eye(d * d - 1), atol=1e-14)
        np.testing.assert_allclose(np.trace(b, axis1=1, axis2=2), 0, atol=1e-14)
        np.testing.assert_allclose(b, np.conj(np.swapaxes(b, 1, 2)))

    @pytest.mark.parametrize("d", [1, 0, 2.5])
    def test_rejects_small(self, d):
        with pytest.raises(ValidationError):
            hermitian_basis(d)

    def test_round_trip(self, rng):
        b = hermitian_basis(4)
        h = random_hermitian(rng, 4)
        h -= np.trace(h) / 4 * np.eye(4)
        assert np.max(np.abs(from_coefficients(basis_coefficients(h, b), b) - h)) <= 1e-12


class TestCommutator:
    def test_pauli_algebra(self):
        np.testing.assert_allclose(commutator(SIGMA_X, SIGMA_Y), 2j * SIGMA_Z)
        np.testing.assert_allclose(commutator(SIGMA_Z, SIGMA_X), 2j * SIGMA_Y)

    def test_self_commutator_vanishes(self, rng):
        a = random_hermitian(rng, 3)
        assert np.max(np.abs(commutator(a, a))) == 0.0

    def test_dim_mismatch(self):
        with pytest.raises(ValidationError):
            commutator(np.eye(2), np.eye(3))


class TestAlignGauge:
    def test_identity(self, rng):
        ref = [np.array([0.6, 0.8j]), np.array([1, 0], dtype=complex)]
        out = align_gauge(ref, ref)
        for a, b in zip(out, ref):
            np.testing.assert_allclose(a, b)

    def test_removes_phase(self):
        ref = [np.array([0.6, 0.8j])]
        out = align_gauge(ref, [np.exp(1.3j) * ref[0]])
        np.testing.assert_allclose(out[0], ref[0], atol=1e-15)

    def test_orthogonal_fails(self):
        with pytest.raises(GaugeTrackingError):
            align_gauge([np.array([1, 0], dtype=complex)], [np.array([0, 1], dtype=complex)])


class TestValidators:
    def test_hermitian(self):
        with pytest.raises(ValidationError):
            as_hermitian(np.array([[1.0]]))
        with pytest.raises(ValidationError):
            as_hermitian(np.array([[0, 1], [1.1, 0]]))

    def test_unitary(self, rng):
        as_unitary(random_unitary(rng, 3))
        with pytest.raises(ValidationError):
            as_unitary(2 * np.eye(2))

    def test_state(self):
        as_state([1, 0])
        with pytest.raises(ValidationError):
            as_state([1, 1])


class TestUnitaryGenerator:
    def test_round_trip(self, rng):
        u = random_unitary(rng, 4)
        k = unitary_generator(u)
        np.testing.assert_allclose(expm_hermitian(k, 1.0), u, atol=1e-12)
        assert np.max(np.abs(np.linalg.eigvalsh(k))) < np.pi

    def test_phase_pi_is_ambiguous(self):
        with pytest.raises(AmbiguousLogarithmError):
            unitary_generator(np.diag([1.0, -1.0]))
