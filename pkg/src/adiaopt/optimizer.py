"""Gradient ascent of the final adiabaticity over fixed-endpoint isospectral paths."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .adiabaticity import DEFAULT_GAP_FLOOR, simulate
from .errors import NumericalError, ValidationError
from .operators import SIGMA_Z, as_hermitian, as_unitary, dagger, hermitian_basis
from .optimality import DEFAULT_TOLERANCE, sensitivity, spectral_radius, stationarity_residual
from .paths import Controls, IsospectralParams, IsospectralPath, RotatingSpinParams, RotatingSpinPath

DEFAULT_CONTROL_NODES = 32


@dataclass(frozen=True, eq=False)
class Scenario:
    """Fixed endpoints, duration and numerics of an optimization problem.

    Parameters are the interior values ``c[i, k]`` of piecewise-linear
    ``f_i`` on ``n_controls`` uniformly spaced interior knots; the path is
    ``V(t) = V_ref(t) exp(i sum_i f_i(t) lambda_i)``.
    """

    H0: np.ndarray
    V_end: np.ndarray
    T: float
    level: int = 0
    steps: int = 4096
    n_controls: int = DEFAULT_CONTROL_NODES
    generator: np.ndarray | None = None
    gap_floor: float = DEFAULT_GAP_FLOOR

    def __post_init__(self):
        object.__setattr__(self, "H0", as_hermitian(self.H0))
        object.__setattr__(self, "V_end", as_unitary(self.V_end))
        if self.n_controls < 1:
            raise ValidationError("need at least one interior control node")

    @property
    def dim(self) -> int:
        return self.H0.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.dim**2 - 1, self.n_controls)

    @property
    def scale(self) -> float:
        return spectral_radius(self.H0)

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape)

    def controls(self, coeffs) -> Controls:
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != self.shape:
            raise ValidationError(f"coefficients must have shape {self.shape}, got {coeffs.shape}")
        return Controls.from_interior(coeffs, self.T)

    def path(self, coeffs) -> IsospectralPath:
        params = IsospectralParams(self.H0, self.V_end, self.controls(coeffs), self.generator)
        return IsospectralPath(params, self.T)


def spin_scenario(params: RotatingSpinParams, T: float, **kw) -> Scenario:
    """Scenario whose zero-coefficient path is the rotating-spin Hamiltonian."""
    spin = RotatingSpinPath(params, T)
    generator = 0.5 * params.omega * T * SIGMA_Z
    return Scenario(spin(0.0), spin.frame(T), T, generator=generator, **kw)


def random_start(scenario: Scenario, amplitude: float, seed: int) -> np.ndarray:
    """Uniform random coefficients rescaled to max-norm ``amplitude``."""
    rng = np.random.default_rng(seed)
    c = rng.uniform(-1.0, 1.0, scenario.shape)
    return c * (amplitude / np.max(np.abs(c)))


@dataclass(frozen=True, eq=False)
class Evaluation:
    coeffs: np.ndarray
    adiabaticity: float
    residual_sup: float
    gradient: np.ndarray


def _frame_gradient(path: IsospectralPath, nodes: np.ndarray, sens: np.ndarray) -> np.ndarray:
    """Pull ``S(t)`` back through ``V = V_ref exp(iF)`` to a density in ``F``.

    Returns ``Psi(t)`` with ``dA = -2 int Tr(dF Psi) dt``:
    ``Psi = int_0^1 exp(-isF) V_ref^dagger S V_ref exp(isF) ds``.
    """
    vref = path.reference_frame(nodes)
    s_ref = dagger(vref) @ sens @ vref
    mu, w = np.linalg.eigh(path.control_generator(nodes))
    s_eig = dagger(w) @ s_ref @ w
    x = mu[:, :, None] - mu[:, None, :]
    small = np.abs(x) < 1e-8
    safe = np.where(small, 1.0, x)
    kernel = np.where(small, 1.0 - 0.5j * x, (1.0 - np.exp(-1j * safe)) / (1j * safe))
    return w @ (s_eig * kernel) @ dagger(w)


def evaluate(coeffs, scenario: Scenario) -> Evaluation:
    """Forward simulation plus gradient ``dA/dc`` at ``coeffs``."""
    coeffs = np.asarray(coeffs, dtype=float)
    path = scenario.path(coeffs)
    sim = simulate(path, scenario.level, scenario.steps, scenario.gap_floor)
    nodes = sim.trace.grid.nodes
    sens = sensitivity(sim.trace, path, sim.eigen)
    residual = stationarity_residual(sim.trace, path, sim.eigen)
    psi = _frame_gradient(path, nodes, sens)
    density = np.real(np.einsum("iab,kba->ki", hermitian_basis(scenario.dim), psi))
    weights = sim.trace.grid.trapezoid_weights()[:, None] * path.controls.hat_weights(nodes)
    grad = -2.0 * density.T @ weights
    return Evaluation(coeffs, sim.final_adiabaticity, residual.sup_norm, grad)


def gradient(coeffs, scenario: Scenario) -> np.ndarray:
    """``dA/dc[i, k]`` as an array shaped like ``coeffs``."""
    return evaluate(coeffs, scenario).gradient


@dataclass(frozen=True)
class AscentConfig:
    max_iters: int = 200
    tol: float = DEFAULT_TOLERANCE
    initial_step: float = 1.0
    min_step: float = 1e-12


@dataclass(eq=False)
class OptimizationReport:
    iterations: int
    A_history: list
    final_A: float
    final_residual_sup: float
    converged: bool
    step_sizes: list
    threshold: float
    rejected_trials: int = 0
    gap_rejections: int = 0
    final_coefficients: np.ndarray = field(default=None, repr=False)

    @property
    def initial_A(self) -> float:
        return self.A_history[0]

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "A_history": [float(a) for a in self.A_history],
            "initial_A": float(self.initial_A),
            "final_A": float(self.final_A),
            "final_residual_sup": float(self.final_residual_sup),
            "threshold": float(self.threshold),
            "converged": bool(self.converged),
            "step_sizes": [float(s) for s in self.step_sizes],
            "rejected_trials": self.rejected_trials,
            "gap_rejections": self.gap_rejections,
        }


def ascend(initial, scenario: Scenario, config: AscentConfig = AscentConfig()) -> OptimizationReport:
    """Backtracking gradient ascent on the final adiabaticity.

    A trial step is accepted only if a fresh simulation shows a strictly
    larger ``A``. The step halves on rejection and doubles after two
    consecutive acceptances. The run converges once the stationarity
    residual drops below ``config.tol`` times the spectral radius of
    ``H(0)``; hitting ``max_iters`` or ``min_step`` first is reported as
    non-convergence.
    """
    threshold = config.tol * scenario.scale
    current = evaluate(initial, scenario)
    history = [current.adiabaticity]
    steps_taken = []
    step = float(config.initial_step)
    streak = rejected = gap_rejected = 0
    iterations = 0
    converged = current.residual_sup <= threshold
    while not converged and iterations < config.max_iters and step >= config.min_step:
        iterations += 1
        try:
            trial = evaluate(current.coeffs + step * current.gradient, scenario)
        except NumericalError:
            gap_rejected += 1
            trial = None
        if trial is not None and math.isfinite(trial.adiabaticity) and trial.adiabaticity > current.adiabaticity:
            current = trial
            history.append(trial.adiabaticity)
            steps_taken.append(step)
            streak += 1
            if streak == 2:
                step *= 2.0
                streak = 0
            converged = current.residual_sup <= threshold
        else:
            rejected += 1
            streak = 0
            step *= 0.5
    return OptimizationReport(
        iterations=iterations,
        A_history=history,
        final_A=current.adiabaticity,
        final_residual_sup=current.residual_sup,
        converged=converged,
        step_sizes=steps_taken,
        threshold=threshold,
        rejected_trials=rejected,
        gap_rejections=gap_rejected,
        final_coefficients=current.coeffs,
    )
