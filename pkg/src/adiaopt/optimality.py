"""First-order response of the final adiabaticity to a change of frame.

A path ``H0(t) = V0(t) H(0) V0(t)^dagger`` is perturbed to
``V(t) = exp(i eps h(t)) V0(t)`` with ``h(0) = h(T) = 0``. The propagator
responds as ``U(T) = exp(i eps k(T)) U0(T) + O(eps^2)`` with

    k(T) = U0(T) [ i int_0^T U0(t)^dagger [H0(t), h(t)] U0(t) dt ] U0(T)^dagger,

and the final adiabaticity changes at the rate
``dA/deps = -2 Im{<n(T)| k(T) U0(T) |n0> <n0| U0(T)^dagger |n(T)>}``.
Expanding ``h = sum_i f_i lambda_i`` gives
``dA/deps = -2 sum_i int f_i(t) R_i(t) dt`` with the stationarity residual

    R_i(t) = Re{<n(T)| U0(T) U0(t)^dagger [H0(t), lambda_i] U0(t) |n0> <n0| U0(T)^dagger |n(T)>}.

A path is stationary when every ``R_i(t)`` vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .adiabaticity import DEFAULT_GAP_FLOOR, EigenstateTrace, track_eigenstates
from .errors import ValidationError
from .operators import dagger, from_coefficients, hermitian_basis
from .paths import Controls, HamiltonianPath
from .propagator import DEFAULT_STEPS, PropagatorTrace, TimeGrid, evolve

DEFAULT_TOLERANCE = 1e-5


@dataclass(frozen=True, eq=False)
class StationarityResidual:
    """``values[i, k]`` is ``R_i`` at ``grid.nodes[k]``."""

    grid: TimeGrid
    values: np.ndarray
    sup_norm: float
    l2_norm: float

    @property
    def basis_size(self) -> int:
        return self.values.shape[0]


def _check_inputs(trace0: PropagatorTrace, path0: HamiltonianPath, eigen: EigenstateTrace | None = None):
    if trace0.dim != path0.dim:
        raise ValidationError("trace and path dimensions differ")
    if not np.isclose(trace0.grid.duration, path0.duration, rtol=1e-12, atol=0.0):
        raise ValidationError("trace grid does not span the path duration")
    if eigen is not None and not eigen.grid.matches(trace0.grid):
        raise ValidationError("eigenstate trace and propagator trace use different grids")


def _endpoint_vectors(trace0: PropagatorTrace, eigen: EigenstateTrace):
    """Forward states ``U(t)|n0>``, backward states ``U(t) U(T)^dagger |n(T)>`` and the amplitude."""
    u = trace0.unitaries
    n0, nT = eigen.initial, eigen.final
    forward = u @ n0
    backward = u @ (dagger(trace0.final) @ nT)
    amplitude = np.vdot(nT, trace0.final @ n0)
    return forward, backward, amplitude


def sensitivity(trace0: PropagatorTrace, path0: HamiltonianPath, eigen: EigenstateTrace) -> np.ndarray:
    """Traceless Hermitian ``S(t_k)`` with ``R_i(t_k) = Tr(lambda_i S(t_k))``.

    Shape ``(N+1, d, d)``. The first-order change of the final adiabaticity
    under ``exp(i eps h) V0`` is ``-2 eps int Tr(h S) dt``.
    """
    _check_inputs(trace0, path0, eigen)
    fwd, bwd, amp = _endpoint_vectors(trace0, eigen)
    h = path0(trace0.grid.nodes)
    p = np.einsum("ki,kj->kij", fwd, bwd.conj())
    q = np.conj(amp) * (p @ h - h @ p)
    return 0.5 * (q + dagger(q))


def stationarity_residual(trace0: PropagatorTrace, path0: HamiltonianPath, eigen: EigenstateTrace) -> StationarityResidual:
    _check_inputs(trace0, path0, eigen)
    fwd, bwd, amp = _endpoint_vectors(trace0, eigen)
    h = path0(trace0.grid.nodes)
    basis = hermitian_basis(path0.dim)
    hl = np.einsum("kab,ibc->kiac", h, basis)
    comm = hl - np.einsum("iab,kbc->kiac", basis, h)
    g = np.einsum("ka,kiab,kb->ik", bwd.conj(), comm, fwd)
    values = np.real(np.conj(amp) * g)
    w = trace0.grid.trapezoid_weights()
    return StationarityResidual(
        trace0.grid,
        values,
        float(np.max(np.abs(values))),
        float(np.sqrt(np.sum(w * values**2))),
    )


def _generator_on_grid(path0: HamiltonianPath, grid: TimeGrid, h_coeffs: Controls) -> np.ndarray:
    if h_coeffs.n_basis != path0.dim**2 - 1:
        raise ValidationError(f"expected {path0.dim**2 - 1} perturbation functions, got {h_coeffs.n_basis}")
    if not h_coeffs.pinned:
        raise ValidationError("perturbation functions must vanish at t=0 and t=T")
    return from_coefficients(h_coeffs(grid.nodes), hermitian_basis(path0.dim))


def response_kT(trace0: PropagatorTrace, path0: HamiltonianPath, h_coeffs: Controls) -> np.ndarray:
    """Hermitian generator ``k(T)`` of the first-order change in ``U(T)``."""
    _check_inputs(trace0, path0)
    grid = trace0.grid
    gen = _generator_on_grid(path0, grid, h_coeffs)
    h0 = path0(grid.nodes)
    u = trace0.unitaries
    integrand = dagger(u) @ (h0 @ gen - gen @ h0) @ u
    inner = 1j * np.tensordot(grid.trapezoid_weights(), integrand, axes=1)
    k = trace0.final @ inner @ dagger(trace0.final)
    return 0.5 * (k + dagger(k))


def directional_derivative(trace0: PropagatorTrace, path0: HamiltonianPath, eigen: EigenstateTrace,
                           h_coeffs: Controls) -> float:
    """``dA/deps`` at ``eps = 0`` for the perturbation ``exp(i eps h) V0``."""
    _check_inputs(trace0, path0, eigen)
    k = response_kT(trace0, path0, h_coeffs)
    n0, nT = eigen.initial, eigen.final
    amp = np.vdot(nT, trace0.final @ n0)
    first = np.vdot(nT, k @ trace0.final @ n0)
    return float(-2.0 * np.imag(first * np.conj(amp)))


def spectral_radius(h) -> float:
    return float(np.max(np.abs(np.linalg.eigvalsh(h))))


@dataclass(frozen=True, eq=False)
class Certificate:
    """Outcome of a stationarity scan.

    ``passed`` means the path is stationary to ``tolerance`` relative to
    ``scale`` (the spectral radius of ``H(0)``). It does not distinguish a
    maximum from another kind of extremum.
    """

    residual: StationarityResidual
    scale: float
    tolerance: float
    final_adiabaticity: float

    @property
    def sup_norm(self) -> float:
        return self.residual.sup_norm

    @property
    def l2_norm(self) -> float:
        return self.residual.l2_norm

    @property
    def threshold(self) -> float:
        return self.tolerance * self.scale

    @property
    def passed(self) -> bool:
        return self.residual.sup_norm <= self.threshold

    def summary(self) -> dict:
        return {
            "sup_norm": self.sup_norm,
            "l2_norm": self.l2_norm,
            "scale": self.scale,
            "tolerance": self.tolerance,
            "threshold": self.threshold,
            "final_adiabaticity": self.final_adiabaticity,
            "pass": self.passed,
        }


def residual_certificate(path: HamiltonianPath, level: int = 0, steps: int = DEFAULT_STEPS,
                         tol: float = DEFAULT_TOLERANCE, gap_floor: float = DEFAULT_GAP_FLOOR) -> Certificate:
    trace = evolve(path, steps)
    eigen = track_eigenstates(path, trace.grid, level, gap_floor)
    res = stationarity_residual(trace, path, eigen)
    amp = np.vdot(eigen.final, trace.final @ eigen.initial)
    return Certificate(res, spectral_radius(path(0.0)), float(tol), float(abs(amp) ** 2))
