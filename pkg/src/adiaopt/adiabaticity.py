"""Instantaneous eigenstates, the adiabaticity ``A(t)`` and slowness diagnostics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GapCollapseError, GaugeTrackingError, ValidationError
from .operators import GAUGE_OVERLAP_FLOOR, dagger
from .paths import HamiltonianPath
from .propagator import DEFAULT_STEPS, PropagatorTrace, TimeGrid, evolve, state_trace

DEFAULT_GAP_FLOOR = 1e-6


@dataclass(frozen=True, eq=False)
class EigenstateTrace:
    """A single level followed along a grid with a smooth phase.

    ``states[k]`` is the level's eigenvector at ``grid.nodes[k]``;
    consecutive states have real positive overlap. ``gaps[k]`` is the
    distance from the level to the rest of the spectrum.
    """

    grid: TimeGrid
    level: int
    states: np.ndarray
    energies: np.ndarray
    gaps: np.ndarray

    @property
    def min_gap_over_time(self) -> float:
        return float(self.gaps.min())

    @property
    def initial(self) -> np.ndarray:
        return self.states[0]

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


@dataclass(frozen=True, eq=False)
class AdiabaticityTrace:
    grid: TimeGrid
    values: np.ndarray

    @property
    def final(self) -> float:
        return float(self.values[-1])


def _follow_levels(vecs: np.ndarray, level: int) -> np.ndarray:
    """Index of the tracked level at every node, continued by maximal overlap."""
    overlaps = np.abs(dagger(vecs[:-1]) @ vecs[1:])
    successor = np.argmax(overlaps, axis=-1)
    idx = np.empty(vecs.shape[0], dtype=int)
    idx[0] = level
    if np.all(successor == np.arange(vecs.shape[-1])):
        idx[1:] = level
        return idx
    for k, row in enumerate(successor):
        idx[k + 1] = row[idx[k]]
    return idx


def _initial_gauge(v: np.ndarray) -> np.ndarray:
    j = int(np.argmax(np.abs(v)))
    return v * (np.conj(v[j]) / abs(v[j]))


def track_eigenstates(
    path: HamiltonianPath,
    grid: TimeGrid,
    level: int,
    gap_floor: float = DEFAULT_GAP_FLOOR,
) -> EigenstateTrace:
    """Follow eigenstate ``level`` of ``path`` across ``grid``.

    The level is picked by ascending energy at ``t=0`` and afterwards by
    continuity (largest overlap with the previous node), so an avoided
    crossing does not swap labels. Phases are parallel transported.

    Raises
    ------
    GapCollapseError
        If the tracked level comes within ``gap_floor`` of another level.
    GaugeTrackingError
        If consecutive eigenvectors overlap by less than 0.1.
    """
    d = path.dim
    if not 0 <= level < d:
        raise ValidationError(f"level {level} out of range for dimension {d}")
    h = path(grid.nodes)
    vals, vecs = np.linalg.eigh(h)
    rows = np.arange(vals.shape[0])
    idx = _follow_levels(vecs, level)
    energies = vals[rows, idx]
    others = np.abs(vals - energies[:, None])
    others[rows, idx] = np.inf
    gaps = others.min(axis=1)
    worst = int(np.argmin(gaps))
    if gaps[worst] < gap_floor:
        raise GapCollapseError(
            f"gap {gaps[worst]:.3g} at t={grid.nodes[worst]:.6g} is below the floor {gap_floor:g}"
        )
    raw = vecs[rows, :, idx]
    raw[0] = _initial_gauge(raw[0])
    ov = np.einsum("ki,ki->k", raw[:-1].conj(), raw[1:])
    mag = np.abs(ov)
    if mag.size and mag.min() <= GAUGE_OVERLAP_FLOOR:
        k = int(np.argmin(mag))
        raise GaugeTrackingError(
            f"eigenvector overlap {mag[k]:.3g} between t={grid.nodes[k]:.6g} and the next node; refine the grid"
        )
    phase = np.ones(vals.shape[0], dtype=complex)
    phase[1:] = np.cumprod(np.conj(ov / mag))
    phase /= np.abs(phase)
    states = raw * phase[:, None]
    return EigenstateTrace(grid, level, states, energies, gaps)


def adiabaticity_trace(states, eigen: EigenstateTrace) -> AdiabaticityTrace:
    """``A(t_k) = |<n(t_k)|psi(t_k)>|**2`` for an evolved state trace."""
    psi = np.asarray(states, dtype=complex)
    if psi.shape != eigen.states.shape:
        raise ValidationError(f"state trace shape {psi.shape} does not match eigenstate trace {eigen.states.shape}")
    values = np.abs(np.einsum("ki,ki->k", eigen.states.conj(), psi)) ** 2
    if abs(values[0] - 1.0) > 1e-9:
        raise ValidationError("initial state is not the tracked eigenstate")
    return AdiabaticityTrace(eigen.grid, values)


@dataclass(frozen=True, eq=False)
class Simulation:
    """Everything a forward run produces."""

    path: HamiltonianPath
    trace: PropagatorTrace
    eigen: EigenstateTrace
    states: np.ndarray
    adiabaticity: AdiabaticityTrace

    @property
    def final_adiabaticity(self) -> float:
        return self.adiabaticity.final


def simulate(
    path: HamiltonianPath,
    level: int = 0,
    steps: int = DEFAULT_STEPS,
    gap_floor: float = DEFAULT_GAP_FLOOR,
) -> Simulation:
    """Evolve from eigenstate ``level`` of ``H(0)`` and record ``A(t)``."""
    trace = evolve(path, steps)
    eigen = track_eigenstates(path, trace.grid, level, gap_floor)
    psi = state_trace(trace, eigen.initial)
    return Simulation(path, trace, eigen, psi, adiabaticity_trace(psi, eigen))


def final_adiabaticity(
    path: HamiltonianPath,
    level: int = 0,
    steps: int = DEFAULT_STEPS,
    gap_floor: float = DEFAULT_GAP_FLOOR,
) -> float:
    return simulate(path, level, steps, gap_floor).final_adiabaticity


def slowness_diagnostic(path: HamiltonianPath, grid: TimeGrid, m: int, n: int,
                        gap_floor: float = DEFAULT_GAP_FLOOR) -> np.ndarray:
    """``|<m|dn/dt> / (E_m - E_n)|`` at every node.

    Uses ``<m|dn/dt> = <m|dH/dt|n> / (E_n - E_m)`` with ``dH/dt`` from
    central differences on the grid (second-order one-sided at the ends).
    Small values do not certify adiabatic evolution; this is only the
    customary rate-over-gap ratio.
    """
    if m == n:
        raise ValidationError("slowness diagnostic needs two distinct levels")
    em = track_eigenstates(path, grid, m, gap_floor)
    en = track_eigenstates(path, grid, n, gap_floor)
    gap = em.energies - en.energies
    if np.min(np.abs(gap)) < gap_floor:
        raise GapCollapseError(f"levels {m} and {n} are degenerate on the grid")
    h = path(grid.nodes)
    dh = np.gradient(h, grid.nodes, axis=0, edge_order=2)
    element = np.einsum("ki,kij,kj->k", em.states.conj(), dh, en.states)
    return np.abs(element) / gap**2
