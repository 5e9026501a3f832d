"""Time-dependent Hamiltonians on a fixed interval ``[0, T]``.

Every path is an immutable callable: ``path(t)`` accepts a scalar time or a
1-d array of times and returns a ``(d, d)`` matrix or a ``(n, d, d)`` stack.
Paths generated by a unitary frame ``H(t) = V(t) H(0) V(t)^dagger`` also
expose ``path.frame(t)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .operators import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    as_hermitian,
    as_unitary,
    dagger,
    expm_hermitian,
    from_coefficients,
    hermitian_basis,
    unitary_generator,
)

KINDS = ("isospectral", "lambda_ramp", "rotating_spin", "perturbed", "dilated")


def _positive_duration(T) -> float:
    T = float(T)
    if not np.isfinite(T) or T <= 0:
        raise ValidationError(f"duration must be positive and finite, got {T}")
    return T


def _times(t):
    arr = np.asarray(t, dtype=float)
    if arr.ndim > 1:
        raise ValidationError("times must be a scalar or a 1-d array")
    return arr


@dataclass(frozen=True, eq=False)
class Controls:
    """Piecewise-linear real coefficient functions ``f_i(t)``.

    ``values[i, k]`` is ``f_i`` at ``knots[k]``; between knots the functions
    are linear. Knots run from 0 to the path duration inclusive.
    """

    knots: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        knots = np.array(self.knots, dtype=float)
        values = np.array(self.values, dtype=float)
        if knots.ndim != 1 or knots.size < 2 or np.any(np.diff(knots) <= 0):
            raise ValidationError("control knots must be strictly increasing with at least two entries")
        if knots[0] != 0.0:
            raise ValidationError("first control knot must be at t=0")
        if values.ndim != 2 or values.shape[1] != knots.size:
            raise ValidationError(f"control values must have shape (B, {knots.size}), got {values.shape}")
        if not (np.all(np.isfinite(values)) and np.all(np.isfinite(knots))):
            raise ValidationError("control values must be finite")
        knots.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_interior(cls, interior, duration: float) -> "Controls":
        """Uniform knots with the given interior values and zero endpoints."""
        interior = np.atleast_2d(np.asarray(interior, dtype=float))
        b, n = interior.shape
        knots = np.linspace(0.0, _positive_duration(duration), n + 2)
        values = np.zeros((b, n + 2))
        values[:, 1:-1] = interior
        return cls(knots, values)

    @classmethod
    def zeros(cls, n_basis: int, n_interior: int, duration: float) -> "Controls":
        return cls.from_interior(np.zeros((n_basis, n_interior)), duration)

    @property
    def n_basis(self) -> int:
        return self.values.shape[0]

    @property
    def duration(self) -> float:
        return float(self.knots[-1])

    @property
    def interior(self) -> np.ndarray:
        return self.values[:, 1:-1].copy()

    @property
    def pinned(self) -> bool:
        return bool(np.all(self.values[:, 0] == 0.0) and np.all(self.values[:, -1] == 0.0))

    def __call__(self, t) -> np.ndarray:
        """Coefficients at ``t``; shape ``(B,)`` or ``(n, B)``."""
        t = _times(t)
        out = np.stack([np.interp(t, self.knots, row) for row in self.values], axis=-1)
        return out

    def hat_weights(self, t) -> np.ndarray:
        """Interpolation weights of each interior knot at times ``t``, shape ``(n, K-2)``.

        ``f(t) = hat_weights(t) @ interior.T`` for pinned controls.
        """
        t = np.atleast_1d(_times(t))
        k = self.knots.size
        eye = np.eye(k)
        w = np.stack([np.interp(t, self.knots, eye[j]) for j in range(1, k - 1)], axis=-1)
        return w.reshape(t.size, k - 2)


def _require_pinned(controls: Controls, dim: int, duration: float) -> None:
    if controls.n_basis != dim * dim - 1:
        raise ValidationError(f"expected {dim * dim - 1} control functions, got {controls.n_basis}")
    if not np.isclose(controls.duration, duration, rtol=1e-12, atol=0.0):
        raise ValidationError("control knots must span the path duration")
    if not controls.pinned:
        raise ValidationError("control functions must vanish at t=0 and t=T")


@dataclass(frozen=True, eq=False)
class HamiltonianPath:
    """Base class: ``dim``, ``duration`` and forced grid nodes ``kinks``."""

    dim: int = field(init=False)
    duration: float = field(init=False)
    kind: str = field(init=False, default="")
    kinks: tuple = field(init=False, default=())

    has_frame = False

    def __call__(self, t) -> np.ndarray:
        raise NotImplementedError

    def frame(self, t) -> np.ndarray:
        raise ValidationError(f"{self.kind} path has no unitary frame")

    def initial(self) -> np.ndarray:
        return self(0.0)

    def final(self) -> np.ndarray:
        return self(self.duration)


def _set(obj, **kw):
    for k, v in kw.items():
        object.__setattr__(obj, k, v)


@dataclass(frozen=True)
class RotatingSpinParams:
    """Field of Larmor frequency ``omega0`` precessing at ``omega`` about z, tilted by ``theta``."""

    omega0: float
    omega: float
    theta: float

    def __post_init__(self):
        vals = (self.omega0, self.omega, self.theta)
        if not all(np.isfinite(v) for v in vals):
            raise ValidationError("spin parameters must be finite")
        if self.omega0 <= 0:
            raise ValidationError("omega0 must be positive")
        if not 0.0 <= self.theta <= np.pi:
            raise ValidationError("theta must lie in [0, pi]")


@dataclass(frozen=True, eq=False)
class RotatingSpinPath(HamiltonianPath):
    params: RotatingSpinParams
    T: float

    has_frame = True

    def __post_init__(self):
        _set(self, dim=2, duration=_positive_duration(self.T), kind="rotating_spin", kinks=())

    def __call__(self, t):
        t = _times(t)
        p = self.params
        st, ct = np.sin(p.theta), np.cos(p.theta)
        wt = p.omega * t[..., None, None]
        field_ = st * np.cos(wt) * SIGMA_X + st * np.sin(wt) * SIGMA_Y + ct * SIGMA_Z
        return -0.5 * p.omega0 * field_

    def frame(self, t):
        """``exp(-i omega t sigma_z / 2)``; equals the identity at ``t=0``."""
        t = _times(t)
        half = 0.5 * self.params.omega * t
        out = np.zeros(t.shape + (2, 2), dtype=complex)
        out[..., 0, 0] = np.exp(-1j * half)
        out[..., 1, 1] = np.exp(1j * half)
        return out


def rotating_spin_path(params: RotatingSpinParams, T: float) -> RotatingSpinPath:
    return RotatingSpinPath(params, T)


@dataclass(frozen=True, eq=False)
class IsospectralParams:
    """Initial Hamiltonian, target frame ``V(T)`` and interior controls.

    ``generator`` optionally fixes the reference path as
    ``V_ref(t) = exp(-i (t/T) generator)``; by default the principal
    logarithm of ``V_end`` is used.
    """

    H0: np.ndarray
    V_end: np.ndarray
    controls: Controls
    generator: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class IsospectralPath(HamiltonianPath):
    params: IsospectralParams
    T: float

    has_frame = True

    def __post_init__(self):
        h0 = as_hermitian(self.params.H0)
        v_end = as_unitary(self.params.V_end)
        d = h0.shape[0]
        if v_end.shape != h0.shape:
            raise ValidationError("H0 and V_end dimensions differ")
        duration = _positive_duration(self.T)
        _require_pinned(self.params.controls, d, duration)
        if self.params.generator is None:
            gen = unitary_generator(v_end)
        else:
            gen = as_hermitian(self.params.generator)
            if np.max(np.abs(expm_hermitian(gen, 1.0) - v_end)) > 1e-10:
                raise ValidationError("exp(-i generator) does not reproduce V_end")
        vals, vecs = np.linalg.eigh(gen)
        _set(
            self,
            dim=d,
            duration=duration,
            kind="isospectral",
            kinks=(),
            _h0=h0,
            _gen_vals=vals,
            _gen_vecs=vecs,
            _basis=hermitian_basis(d),
        )

    @property
    def controls(self) -> Controls:
        return self.params.controls

    def reference_frame(self, t):
        t = _times(t)
        phases = np.exp(-1j * (t / self.duration)[..., None] * self._gen_vals)
        v = (self._gen_vecs * phases[..., None, :]) @ dagger(self._gen_vecs)
        # endpoints exact so H(0) and H(T) are reproduced bit for bit
        v[t == 0.0] = np.eye(self.dim)
        v[t == self.duration] = self.params.V_end
        return v

    def control_generator(self, t):
        """Hermitian ``F(t) = sum_i f_i(t) lambda_i``."""
        return from_coefficients(self.controls(t), self._basis)

    def frame(self, t):
        f = self.control_generator(t)
        rot = expm_hermitian(f, -1.0)
        rot[np.all(f == 0.0, axis=(-2, -1))] = np.eye(self.dim)
        return self.reference_frame(t) @ rot

    def __call__(self, t):
        v = self.frame(t)
        return v @ self._h0 @ dagger(v)

    def with_controls(self, controls: Controls) -> "IsospectralPath":
        p = self.params
        return IsospectralPath(IsospectralParams(p.H0, p.V_end, controls, p.generator), self.T)


def isospectral_path(params: IsospectralParams, T: float) -> IsospectralPath:
    return IsospectralPath(params, T)


@dataclass(frozen=True, eq=False)
class LambdaRampPath(HamiltonianPath):
    """Scale ``H0`` up to ``Lambda H0``, interpolate to ``Lambda H1``, scale back down."""

    H0: np.ndarray
    H1: np.ndarray
    Lambda: float
    T: float

    def __post_init__(self):
        h0 = as_hermitian(self.H0)
        h1 = as_hermitian(self.H1)
        if h0.shape != h1.shape:
            raise ValidationError("H0 and H1 dimensions differ")
        lam = float(self.Lambda)
        if not np.isfinite(lam) or lam < 1.0:
            raise ValidationError(f"Lambda must be >= 1, got {self.Lambda}")
        T = _positive_duration(self.T)
        _set(self, dim=h0.shape[0], duration=T, kind="lambda_ramp", kinks=(T / 3, 2 * T / 3), _h0=h0, _h1=h1)

    def coefficients(self, t):
        """Weights ``(a, b)`` with ``H(t) = a H0 + b H1``."""
        t = _times(t)
        L = float(self.Lambda)
        x = 3.0 * t / self.duration
        a = np.where(x <= 1, 1 + x * (L - 1), np.where(x <= 2, (2 - x) * L, 0.0))
        b = np.where(x <= 1, 0.0, np.where(x <= 2, (-1 + x) * L, 3 * L - 2 + x * (1 - L)))
        return a, b

    def __call__(self, t):
        a, b = self.coefficients(t)
        return a[..., None, None] * self._h0 + b[..., None, None] * self._h1


def lambda_ramp_path(H0, H1, Lambda: float, T: float) -> LambdaRampPath:
    return LambdaRampPath(H0, H1, Lambda, T)


@dataclass(frozen=True, eq=False)
class PerturbedPath(HamiltonianPath):
    """Base path conjugated by ``exp(i epsilon h(t))``, ``h = sum_i f_i lambda_i``."""

    base: HamiltonianPath
    h_coeffs: Controls
    epsilon: float

    has_frame = True

    def __post_init__(self):
        if not self.base.has_frame:
            raise ValidationError(f"cannot perturb a {self.base.kind} path: it has no unitary frame")
        if not np.isfinite(self.epsilon):
            raise ValidationError("epsilon must be finite")
        _require_pinned(self.h_coeffs, self.base.dim, self.base.duration)
        _set(
            self,
            dim=self.base.dim,
            duration=self.base.duration,
            kind="perturbed",
            kinks=self.base.kinks,
            _basis=hermitian_basis(self.base.dim),
        )

    def generator(self, t):
        """Hermitian ``h(t)``."""
        return from_coefficients(self.h_coeffs(t), self._basis)

    def rotation(self, t):
        gen = self.generator(t)
        rot = expm_hermitian(gen, -float(self.epsilon))
        rot[np.all(gen == 0.0, axis=(-2, -1))] = np.eye(self.dim)
        return rot

    def frame(self, t):
        return self.rotation(t) @ self.base.frame(t)

    def __call__(self, t):
        e = self.rotation(t)
        return e @ self.base(t) @ dagger(e)


def perturbed_path(base: HamiltonianPath, h_coeffs: Controls, epsilon: float) -> PerturbedPath:
    return PerturbedPath(base, h_coeffs, float(epsilon))


@dataclass(frozen=True, eq=False)
class DilatedPath(HamiltonianPath):
    """``t -> base(lam t)`` on ``[0, T/lam]``."""

    base: HamiltonianPath
    lam: float

    def __post_init__(self):
        lam = float(self.lam)
        if not np.isfinite(lam) or lam <= 0:
            raise ValidationError(f"dilation factor must be positive, got {self.lam}")
        _set(
            self,
            dim=self.base.dim,
            duration=self.base.duration / lam,
            kind="dilated",
            kinks=tuple(k / lam for k in self.base.kinks),
        )

    @property
    def has_frame(self):
        return self.base.has_frame

    def __call__(self, t):
        return self.base(self.lam * _times(t))

    def frame(self, t):
        return self.base.frame(self.lam * _times(t))


def time_dilate(base: HamiltonianPath, lam: float) -> DilatedPath:
    return DilatedPath(base, float(lam))
