"""Closed-form solution of a spin-1/2 in a uniformly rotating field.

In the frame rotating with the field about z the Hamiltonian becomes static,

    H_rot = -((omega0 cos(theta) + omega) sigma_z + omega0 sin(theta) sigma_x) / 2,

so the spin precesses at ``omega_bar = |(omega0 sin(theta), 0, omega0 cos(theta) + omega)|``
about an axis tilted by ``beta`` from z. Sign convention: ``omega`` is the
rate at which the field turns counterclockwise about +z, ``H(t)`` contains
``exp(-i omega t sigma_z / 2)`` on the left, and
``omega_bar**2 = omega0**2 + 2 omega0 omega cos(theta) + omega**2``.
The test-suite checks this against the Schrödinger equation directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFrameError
from .operators import IDENTITY2, SIGMA_X, SIGMA_Y, SIGMA_Z
from .paths import RotatingSpinParams


@dataclass(frozen=True)
class SpinEffectiveParams:
    omega_bar: float
    beta: float


def effective_params(p: RotatingSpinParams) -> SpinEffectiveParams:
    z = p.omega0 * math.cos(p.theta) + p.omega
    x = p.omega0 * math.sin(p.theta)
    omega_bar = math.hypot(x, z)
    if omega_bar <= 1e-12 * max(p.omega0, abs(p.omega)):
        raise DegenerateFrameError("field rotation exactly cancels the Larmor precession")
    return SpinEffectiveParams(omega_bar, math.atan2(x, z))


def initial_state(p: RotatingSpinParams) -> np.ndarray:
    """``exp(-i theta sigma_y / 2)|+>``, the ground state of ``H(0)``."""
    return np.array([math.cos(p.theta / 2), math.sin(p.theta / 2)], dtype=complex)


def period(p: RotatingSpinParams) -> float:
    """``2 pi / omega_bar``: the first time the adiabaticity returns to 1."""
    return 2 * math.pi / effective_params(p).omega_bar


def _su2(angle, axis) -> np.ndarray:
    """``exp(i angle axis.sigma)`` for a unit ``axis``; ``angle`` may be an array."""
    angle = np.asarray(angle, dtype=float)[..., None, None]
    n_sigma = axis[0] * SIGMA_X + axis[1] * SIGMA_Y + axis[2] * SIGMA_Z
    return np.cos(angle) * IDENTITY2 + 1j * np.sin(angle) * n_sigma


def analytic_propagator(p: RotatingSpinParams, t) -> np.ndarray:
    """``exp(-i omega t sigma_z/2) exp(i omega_bar t/2 (cos(beta) sigma_z + sin(beta) sigma_x))``."""
    eff = effective_params(p)
    t = np.asarray(t, dtype=float)
    frame = _su2(-0.5 * p.omega * t, (0.0, 0.0, 1.0))
    body = _su2(0.5 * eff.omega_bar * t, (math.sin(eff.beta), 0.0, math.cos(eff.beta)))
    return frame @ body


def analytic_adiabaticity(p: RotatingSpinParams, t):
    """``1 - (omega sin(theta) / omega_bar)**2 sin(omega_bar t / 2)**2``."""
    eff = effective_params(p)
    amp = (p.omega * math.sin(p.theta) / eff.omega_bar) ** 2
    return 1.0 - amp * np.sin(0.5 * eff.omega_bar * np.asarray(t, dtype=float)) ** 2


def adiabaticity_envelope(p: RotatingSpinParams) -> float:
    """Largest possible ``1 - A(t)`` over all times."""
    eff = effective_params(p)
    return (p.omega * math.sin(p.theta) / eff.omega_bar) ** 2
