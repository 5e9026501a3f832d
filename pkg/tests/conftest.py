import numpy as np
import pytest

from adiaopt.paths import RotatingSpinParams

# reference scenario used throughout: omega_bar = sqrt(1.25)
REFERENCE_SPIN = RotatingSpinParams(omega0=1.0, omega=0.5, theta=np.pi / 2)


@pytest.fixture
def spin():
    return REFERENCE_SPIN


@pytest.fixture
def rng():
    return np.random.default_rng(20111)


def random_hermitian(rng, d, scale=1.0):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * 0.5 * (a + a.conj().T)


def random_unitary(rng, d):
    q, r = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


class ConstantPath:
    """Time-independent Hamiltonian with the path interface."""

    kind = "constant"
    kinks = ()
    has_frame = False

    def __init__(self, h, T):
        self.h = np.asarray(h, dtype=complex)
        self.dim = self.h.shape[0]
        self.duration = T

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(self.h, t.shape + self.h.shape).copy()
