"""Scenario configuration files (JSON) and the objects built from them."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import ValidationError
from .optimizer import AscentConfig, Scenario, random_start, spin_scenario
from .paths import (
    HamiltonianPath,
    RotatingSpinParams,
    RotatingSpinPath,
    lambda_ramp_path,
    time_dilate,
)
from .spin import effective_params


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ComplexMatrix(_Strict):
    real: list[list[float]]
    imag: Optional[list[list[float]]] = None

    def to_array(self) -> np.ndarray:
        re = np.array(self.real, dtype=float)
        im = np.zeros_like(re) if self.imag is None else np.array(self.imag, dtype=float)
        if re.shape != im.shape or re.ndim != 2:
            raise ValidationError("real and imag parts must be matrices of equal shape")
        if not (np.all(np.isfinite(re)) and np.all(np.isfinite(im))):
            raise ValidationError("matrix entries must be finite")
        return re + 1j * im

    @classmethod
    def from_array(cls, m) -> "ComplexMatrix":
        m = np.asarray(m, dtype=complex)
        return cls(real=m.real.tolist(), imag=m.imag.tolist())


class OptimizerSettings(_Strict):
    max_iters: int = Field(200, ge=0)
    tol: float = Field(1e-5, gt=0, allow_inf_nan=False)
    initial_step: float = Field(1.0, gt=0, allow_inf_nan=False)

    def ascent(self) -> AscentConfig:
        return AscentConfig(self.max_iters, self.tol, self.initial_step)


class OracleSettings(_Strict):
    mode: Literal["equivalence", "lambda_sweep"] = "equivalence"
    random_cases: int = Field(5, ge=0)
    tolerance: float = Field(1e-5, gt=0, allow_inf_nan=False)
    lambdas: list[float] = [1.0, 10.0, 100.0, 1000.0]
    sweep_limit: float = Field(1e-3, gt=0, allow_inf_nan=False)


class ScenarioConfig(_Strict):
    """Everything one CLI invocation needs.

    ``T`` is the duration in time units; ``T_periods`` instead gives it in
    units of ``2 pi / omega_bar`` of the spin parameters. Exactly one of the
    two must be set.
    """

    kind: Literal["rotating_spin", "lambda_ramp", "isospectral"]
    omega0: float = Field(1.0, gt=0, allow_inf_nan=False)
    omega: float = Field(0.5, allow_inf_nan=False)
    theta: float = Field(math.pi / 2, ge=0, le=math.pi)
    T: Optional[float] = Field(None, gt=0, allow_inf_nan=False)
    T_periods: Optional[float] = Field(None, gt=0, allow_inf_nan=False)
    Lambda: Optional[float] = Field(None, ge=1, allow_inf_nan=False)
    dilation: float = Field(1.0, gt=0, allow_inf_nan=False)
    H0: Optional[ComplexMatrix] = None
    V_end: Optional[ComplexMatrix] = None
    generator: Optional[ComplexMatrix] = None
    control_nodes: int = Field(32, ge=1)
    coefficients: Optional[list[list[float]]] = None
    random_amplitude: Optional[float] = Field(None, ge=0, allow_inf_nan=False)
    steps: int = Field(4096, ge=1)
    level: int = Field(0, ge=0)
    gap_floor: float = Field(1e-6, gt=0, allow_inf_nan=False)
    tolerance: float = Field(1e-5, gt=0, allow_inf_nan=False)
    seed: int = 0
    out_dir: Optional[str] = None
    optimizer: OptimizerSettings = OptimizerSettings()
    oracle: OracleSettings = OracleSettings()

    @model_validator(mode="after")
    def _consistent(self):
        if (self.T is None) == (self.T_periods is None):
            raise ValueError("set exactly one of T and T_periods")
        if self.kind == "lambda_ramp" and self.Lambda is None:
            raise ValueError("lambda_ramp needs Lambda")
        if self.kind != "lambda_ramp" and self.Lambda is not None:
            raise ValueError("Lambda only applies to lambda_ramp")
        explicit = (self.H0, self.V_end, self.generator, self.coefficients, self.random_amplitude)
        if self.kind != "isospectral" and any(x is not None for x in explicit[:3]):
            raise ValueError("H0, V_end and generator only apply to isospectral")
        if (self.H0 is None) != (self.V_end is None):
            raise ValueError("H0 and V_end must be given together")
        if self.coefficients is not None and self.random_amplitude is not None:
            raise ValueError("give coefficients or random_amplitude, not both")
        if self.kind == "lambda_ramp" and (self.coefficients is not None or self.random_amplitude is not None):
            raise ValueError("lambda_ramp takes no control coefficients")
        return self

    @property
    def spin_params(self) -> RotatingSpinParams:
        return RotatingSpinParams(self.omega0, self.omega, self.theta)

    @property
    def duration(self) -> float:
        if self.T is not None:
            return float(self.T)
        return self.T_periods * 2 * math.pi / effective_params(self.spin_params).omega_bar


def load_config(path, overrides: dict | None = None) -> ScenarioConfig:
    """Parse and validate a JSON config; any problem raises :class:`ValidationError`."""
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ValidationError("config must be a JSON object")
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return parse_config(raw)


def parse_config(raw: dict) -> ScenarioConfig:
    import pydantic

    try:
        return ScenarioConfig.model_validate(raw)
    except pydantic.ValidationError as exc:
        raise ValidationError(str(exc)) from exc


def build_scenario(cfg: ScenarioConfig) -> Scenario:
    """Optimization scenario for ``rotating_spin`` or ``isospectral`` configs."""
    if cfg.kind == "lambda_ramp":
        raise ValidationError("lambda_ramp paths are not isospectral")
    kw = dict(level=cfg.level, steps=cfg.steps, n_controls=cfg.control_nodes, gap_floor=cfg.gap_floor)
    if cfg.H0 is not None:
        gen = None if cfg.generator is None else cfg.generator.to_array()
        return Scenario(cfg.H0.to_array(), cfg.V_end.to_array(), cfg.duration, generator=gen, **kw)
    return spin_scenario(cfg.spin_params, cfg.duration, **kw)


def start_coefficients(cfg: ScenarioConfig, scenario: Scenario) -> np.ndarray:
    if cfg.coefficients is not None:
        c = np.array(cfg.coefficients, dtype=float)
        if c.shape != scenario.shape:
            raise ValidationError(f"coefficients must have shape {scenario.shape}, got {c.shape}")
        return c
    if cfg.random_amplitude:
        return random_start(scenario, cfg.random_amplitude, cfg.seed)
    return scenario.zeros()


def build_path(cfg: ScenarioConfig) -> HamiltonianPath:
    T = cfg.duration
    controlled = cfg.coefficients is not None or bool(cfg.random_amplitude)
    if cfg.kind == "rotating_spin" and not controlled:
        path = RotatingSpinPath(cfg.spin_params, T)
    elif cfg.kind == "lambda_ramp":
        spin = RotatingSpinPath(cfg.spin_params, T)
        path = lambda_ramp_path(spin(0.0), spin(T), cfg.Lambda, T)
    else:
        scenario = build_scenario(cfg)
        path = scenario.path(start_coefficients(cfg, scenario))
    if cfg.dilation != 1.0:
        path = time_dilate(path, cfg.dilation)
    return path


def config_schema() -> dict:
    return ScenarioConfig.model_json_schema()
