"""Exponential-midpoint integration of ``i dU/dt = H(t) U``, ``U(0) = I``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError
from .operators import as_state, expm_hermitian, unitary_defect
from .paths import HamiltonianPath

DEFAULT_STEPS = 4096
UNITARITY_LIMIT = 1e-9


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """Strictly increasing nodes from 0 to ``T`` inclusive."""

    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValidationError("time grid needs at least two nodes")
        if nodes[0] != 0.0 or np.any(np.diff(nodes) <= 0) or not np.all(np.isfinite(nodes)):
            raise ValidationError("time grid must start at 0 and increase strictly")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def uniform(cls, T: float, steps: int, kinks=()) -> "TimeGrid":
        """``steps`` intervals on ``[0, T]`` with nodes forced at every kink.

        Steps are shared out between the kink-delimited segments in
        proportion to their length, so doubling ``steps`` refines every
        segment by two.
        """
        if int(steps) != steps or steps < 1:
            raise ValidationError(f"steps must be a positive integer, got {steps!r}")
        steps = int(steps)
        breaks = [0.0] + sorted(k for k in kinks if 0.0 < k < T) + [float(T)]
        lengths = np.diff(breaks)
        if steps < len(lengths):
            raise ValidationError(f"need at least {len(lengths)} steps to resolve the kinks")
        counts = np.maximum(1, np.round(steps * lengths / T).astype(int))
        counts[np.argmax(lengths)] += steps - counts.sum()
        pieces = [np.linspace(a, b, n + 1)[:-1] for a, b, n in zip(breaks[:-1], breaks[1:], counts)]
        return cls(np.concatenate(pieces + [[float(T)]]))

    @classmethod
    def for_path(cls, path: HamiltonianPath, steps: int = DEFAULT_STEPS) -> "TimeGrid":
        return cls.uniform(path.duration, steps, path.kinks)

    @property
    def steps(self) -> int:
        return self.nodes.size - 1

    @property
    def duration(self) -> float:
        return float(self.nodes[-1])

    def trapezoid_weights(self) -> np.ndarray:
        dt = np.diff(self.nodes)
        w = np.zeros(self.nodes.size)
        w[:-1] += 0.5 * dt
        w[1:] += 0.5 * dt
        return w

    def matches(self, other: "TimeGrid") -> bool:
        return self.nodes.shape == other.nodes.shape and np.array_equal(self.nodes, other.nodes)


@dataclass(frozen=True, eq=False)
class PropagatorTrace:
    """Propagators ``U(t_k)`` stacked as ``unitaries[k]``, shape ``(N+1, d, d)``."""

    grid: TimeGrid
    unitaries: np.ndarray
    max_unitarity_defect: float

    @property
    def final(self) -> np.ndarray:
        return self.unitaries[-1]

    @property
    def dim(self) -> int:
        return self.unitaries.shape[-1]


def _ordered_products(steps: np.ndarray) -> np.ndarray:
    """Prefix products ``out[k] = steps[k] @ ... @ steps[0]`` by doubling scan."""
    out = steps.copy()
    shift = 1
    while shift < len(out):
        out[shift:] = out[shift:] @ out[:-shift]
        shift *= 2
    return out


def step_unitaries(path: HamiltonianPath, nodes: np.ndarray) -> np.ndarray:
    """One-step propagators ``exp(-i dt H(t + dt/2))`` between consecutive nodes."""
    dt = np.diff(nodes)
    h_mid = path(nodes[:-1] + 0.5 * dt)
    if not np.all(np.isfinite(h_mid)):
        raise NumericalError("Hamiltonian produced non-finite entries during stepping")
    return expm_hermitian(h_mid, dt)


def propagate(path: HamiltonianPath, nodes) -> np.ndarray:
    """Propagators from ``nodes[0]`` to every node; ``nodes`` need not start at 0."""
    nodes = np.asarray(nodes, dtype=float)
    d = path.dim
    out = np.empty((nodes.size, d, d), dtype=complex)
    out[0] = np.eye(d)
    if nodes.size > 1:
        out[1:] = _ordered_products(step_unitaries(path, nodes))
    return out


def evolve(path: HamiltonianPath, steps: int = DEFAULT_STEPS, grid: TimeGrid | None = None) -> PropagatorTrace:
    """Integrate the Schrödinger equation for ``path``.

    Parameters
    ----------
    path:
        Hamiltonian to integrate.
    steps:
        Number of intervals on a uniform grid; the path's kinks are added as
        forced nodes. Ignored when ``grid`` is given.
    grid:
        Explicit grid, which must end at ``path.duration``.

    Returns
    -------
    PropagatorTrace
        Propagators at every node. Each step is an exact unitary so the
        defect only reflects rounding; a defect above 1e-9 raises.
    """
    if grid is None:
        grid = TimeGrid.for_path(path, steps)
    elif not math.isclose(grid.duration, path.duration, rel_tol=1e-12):
        raise ValidationError("grid does not span the path duration")
    u = propagate(path, grid.nodes)
    defect = unitary_defect(u)
    if not np.isfinite(defect) or defect > UNITARITY_LIMIT:
        raise NumericalError(f"unitarity defect {defect:.3g} exceeds {UNITARITY_LIMIT}")
    return PropagatorTrace(grid, u, defect)


def state_trace(trace: PropagatorTrace, initial) -> np.ndarray:
    """States ``U(t_k) psi0`` stacked as rows, shape ``(N+1, d)``."""
    psi0 = as_state(initial)
    if psi0.size != trace.dim:
        raise ValidationError(f"state of length {psi0.size} does not match dimension {trace.dim}")
    return trace.unitaries @ psi0


@dataclass(frozen=True)
class ConvergenceReport:
    steps: int
    error_estimate: float
    observed_order: float | None
    exact: bool
    differences: tuple


def richardson_check(path: HamiltonianPath, steps: int = DEFAULT_STEPS) -> ConvergenceReport:
    """Step-halving audit of ``U(T)``.

    Runs ``steps``, ``2*steps`` and ``4*steps``. The observed order is
    ``log2`` of the ratio of successive differences; the error estimate is the
    Richardson estimate for the ``steps`` run. When the differences are at
    rounding level the integrator is exact for this path and no order is
    reported.
    """
    if steps < 2 or steps % 2:
        raise ValidationError("richardson_check needs an even number of steps")
    finals = [evolve(path, steps * m).final for m in (1, 2, 4)]
    d1 = float(np.max(np.abs(finals[0] - finals[1])))
    d2 = float(np.max(np.abs(finals[1] - finals[2])))
    if d1 <= 1e-12:
        return ConvergenceReport(steps, d1, None, True, (d1, d2))
    order = math.log2(d1 / d2) if d2 > 0 else float("inf")
    p = 2.0 ** order
    estimate = d1 * p / (p - 1) if p > 1 else float("inf")
    return ConvergenceReport(steps, estimate, order, False, (d1, d2))
