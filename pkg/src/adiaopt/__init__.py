"""Adiabaticity diagnostics and optimization for time-dependent Hamiltonians."""

__version__ = "0.1.0"

from .adiabaticity import (
    AdiabaticityTrace,
    EigenstateTrace,
    adiabaticity_trace,
    final_adiabaticity,
    simulate,
    slowness_diagnostic,
    track_eigenstates,
)
from .errors import (
    AdiaoptError,
    AmbiguousLogarithmError,
    DegenerateFrameError,
    GapCollapseError,
    GaugeTrackingError,
    NumericalError,
    ValidationError,
)
from .operators import (
    Spectrum,
    align_gauge,
    commutator,
    eigh,
    expm_skew,
    hermitian_basis,
)
from .optimality import (
    directional_derivative,
    residual_certificate,
    response_kT,
    stationarity_residual,
)
from .optimizer import AscentConfig, Scenario, ascend, gradient, spin_scenario
from .paths import (
    Controls,
    IsospectralParams,
    RotatingSpinParams,
    isospectral_path,
    lambda_ramp_path,
    perturbed_path,
    rotating_spin_path,
    time_dilate,
)
from .propagator import PropagatorTrace, TimeGrid, evolve, richardson_check, state_trace
from .spin import analytic_adiabaticity, analytic_propagator, effective_params
