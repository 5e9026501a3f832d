"""Dense complex matrix primitives.

Hermitian operators, unitaries and states are plain ``numpy`` arrays of
dtype ``complex128``. The ``as_*`` helpers validate an array against the
corresponding invariant and return a normalized copy; everything else in the
package passes arrays around freely once they have been checked.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import AmbiguousLogarithmError, GaugeTrackingError, ValidationError

HERMITIAN_ATOL = 1e-12
UNITARY_ATOL = 1e-10
NORM_ATOL = 1e-12
GAUGE_OVERLAP_FLOOR = 0.1

IDENTITY2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose over the last two axes."""
    return np.conj(np.swapaxes(m, -1, -2))


def _as_finite_square(m, name: str) -> np.ndarray:
    arr = np.array(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {arr.shape}")
    if arr.shape[0] < 2:
        raise ValidationError(f"{name} must have dimension >= 2")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} has non-finite entries")
    return arr


def as_hermitian(m, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    """Validate a Hermitian operator and return it exactly symmetrized."""
    arr = _as_finite_square(m, "Hermitian operator")
    scale = max(1.0, float(np.max(np.abs(arr))))
    if np.max(np.abs(arr - dagger(arr))) > atol * scale:
        raise ValidationError("matrix is not Hermitian")
    return 0.5 * (arr + dagger(arr))


def unitary_defect(u: np.ndarray) -> float:
    """Max-norm of ``U^dagger U - I``; accepts a stack of unitaries."""
    u = np.asarray(u)
    eye = np.eye(u.shape[-1])
    return float(np.max(np.abs(dagger(u) @ u - eye)))


def as_unitary(m, atol: float = UNITARY_ATOL) -> np.ndarray:
    arr = _as_finite_square(m, "unitary operator")
    if unitary_defect(arr) > atol:
        raise ValidationError("matrix is not unitary")
    return arr


def as_state(v, atol: float = NORM_ATOL) -> np.ndarray:
    arr = np.array(v, dtype=complex)
    if arr.ndim != 1 or arr.size < 2:
        raise ValidationError(f"state must be a vector of length >= 2, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("state has non-finite components")
    if abs(np.linalg.norm(arr) - 1.0) > atol:
        raise ValidationError("state is not normalized")
    return arr


@dataclass(frozen=True)
class Spectrum:
    """Eigen-decomposition of a Hermitian operator.

    Attributes
    ----------
    eigenvalues:
        Real eigenvalues in ascending order.
    eigenvectors:
        Columns are the orthonormal eigenvectors, ``eigenvectors[:, n]``
        belonging to ``eigenvalues[n]``.
    min_gap:
        Smallest difference between adjacent eigenvalues. Zero signals a
        degeneracy; callers that need a gap must check it themselves.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    min_gap: float

    def state(self, n: int) -> np.ndarray:
        return self.eigenvectors[:, n].copy()

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)


def eigh(h) -> Spectrum:
    h = as_hermitian(h)
    vals, vecs = np.linalg.eigh(h)
    gaps = np.diff(vals)
    return Spectrum(vals, vecs, float(gaps.min()))


def expm_hermitian(h: np.ndarray, s) -> np.ndarray:
    """``exp(-i s H)`` for a (stack of) Hermitian ``H`` without validation.

    ``s`` broadcasts against the leading axes of ``h``.
    """
    vals, vecs = np.linalg.eigh(h)
    phases = np.exp(-1j * np.asarray(s, dtype=float)[..., None] * vals)
    return (vecs * phases[..., None, :]) @ dagger(vecs)


def expm_skew(h, s: float) -> np.ndarray:
    """Return the unitary ``exp(-i s H)`` for Hermitian ``H``.

    The exponential is evaluated through the eigendecomposition of ``H``,
    so the result is unitary to machine precision for any ``s``.
    """
    h = as_hermitian(h)
    if not np.isfinite(s):
        raise ValidationError("exponent scale must be finite")
    if s == 0:
        return np.eye(h.shape[0], dtype=complex)
    return expm_hermitian(h, s)


def unitary_generator(u) -> np.ndarray:
    """Hermitian ``K`` with ``U = exp(-i K)`` and eigenvalues in ``[-pi, pi)``.

    This is ``i`` times the principal logarithm of ``U``. An eigenphase at
    exactly ``pi`` has no principal branch and raises
    :class:`AmbiguousLogarithmError`.
    """
    u = as_unitary(u)
    # complex Schur form of a normal matrix is diagonal with unitary Z
    t, z = scipy.linalg.schur(u, output="complex")
    phases = np.angle(np.diag(t))
    if np.any(np.abs(np.abs(phases) - np.pi) < 1e-12):
        raise AmbiguousLogarithmError(
            "target unitary has an eigenphase at pi; supply the reference generator explicitly"
        )
    k = (z * (-phases)) @ dagger(z)
    return 0.5 * (k + dagger(k))


def commutator(a, b) -> np.ndarray:
    """``AB - BA``; anti-Hermitian whenever both inputs are Hermitian."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape[-2:] != b.shape[-2:]:
        raise ValidationError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a @ b - b @ a


@lru_cache(maxsize=None)
def _gell_mann(d: int) -> np.ndarray:
    mats = []
    for j in range(d):
        for k in range(j + 1, d):
            sym = np.zeros((d, d), dtype=complex)
            sym[j, k] = sym[k, j] = 1.0
            anti = np.zeros((d, d), dtype=complex)
            anti[j, k] = -1j
            anti[k, j] = 1j
            mats.extend([sym, anti])
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        mats.append(np.diag(np.sqrt(2.0 / (l * (l + 1))) * diag).astype(complex))
    out = np.array(mats)
    out.setflags(write=False)
    return out


def hermitian_basis(d: int) -> np.ndarray:
    """Generalized Gell-Mann matrices, shape ``(d*d - 1, d, d)``.

    Traceless, Hermitian, normalized to ``Tr(l_i l_j) = 2 delta_ij``. For
    ``d = 2`` the order is ``(sigma_x, sigma_y, sigma_z)``.
    """
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise ValidationError(f"basis dimension must be an integer >= 2, got {d!r}")
    return _gell_mann(int(d))


def basis_coefficients(x, basis: np.ndarray) -> np.ndarray:
    """Real expansion coefficients of the traceless part of Hermitian ``x``."""
    return 0.5 * np.real(np.einsum("ijk,...kj->...i", basis, x))


def from_coefficients(coeffs, basis: np.ndarray) -> np.ndarray:
    """Inverse of :func:`basis_coefficients`; ``coeffs`` may carry leading axes."""
    return np.tensordot(np.asarray(coeffs, dtype=float), basis, axes=([-1], [0]))


def align_gauge(reference: Sequence[np.ndarray], candidate: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Rephase each candidate so its overlap with the reference is real positive.

    Raises :class:`GaugeTrackingError` when an overlap magnitude drops below
    0.1, which means the grid is too coarse or two levels crossed.
    """
    if len(reference) != len(candidate):
        raise ValidationError("reference and candidate counts differ")
    out = []
    for ref, cand in zip(reference, candidate):
        ref = np.asarray(ref, dtype=complex)
        cand = np.asarray(cand, dtype=complex)
        if ref.shape != cand.shape:
            raise ValidationError("reference and candidate dimensions differ")
        overlap = np.vdot(ref, cand)
        if abs(overlap) <= GAUGE_OVERLAP_FLOOR:
            raise GaugeTrackingError(f"overlap {abs(overlap):.3g} below {GAUGE_OVERLAP_FLOOR}")
        out.append(cand * (np.conj(overlap) / abs(overlap)))
    return out
