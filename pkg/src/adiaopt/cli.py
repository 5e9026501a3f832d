"""Batch command-line front end.

Exit codes: 0 success, 1 invalid config (or a failed oracle check),
2 numerical failure such as a collapsed gap.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .adiabaticity import simulate, slowness_diagnostic
from .config import (
    ScenarioConfig,
    build_path,
    build_scenario,
    config_schema,
    load_config,
    start_coefficients,
)
from .errors import NumericalError, ValidationError
from .optimality import residual_certificate
from .optimizer import ascend
from .paths import RotatingSpinParams, RotatingSpinPath, lambda_ramp_path
from .propagator import evolve, state_trace
from .spin import analytic_adiabaticity, analytic_propagator, initial_state, period

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2


def _fmt(x: float) -> str:
    return f"{x:.16e}"


def write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    rows = np.column_stack(columns)
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _out_dir(cfg: ScenarioConfig, arg: str | None) -> Path:
    out = Path(arg or cfg.out_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(cfg: ScenarioConfig, out: str | None) -> int:
    path = build_path(cfg)
    sim = simulate(path, cfg.level, cfg.steps, cfg.gap_floor)
    grid = sim.trace.grid
    others = [m for m in range(path.dim) if m != cfg.level]
    slowness = np.max([slowness_diagnostic(path, grid, m, cfg.level, cfg.gap_floor) for m in others], axis=0)
    target = _out_dir(cfg, out) / "simulate.csv"
    write_csv(
        target,
        ["t", "A", "E_level", "min_gap", "slowness_diag"],
        [grid.nodes, sim.adiabaticity.values, sim.eigen.energies, sim.eigen.gaps, slowness],
    )
    print(f"final A = {sim.final_adiabaticity:.12g}; wrote {target}")
    return EXIT_OK


def cmd_residual(cfg: ScenarioConfig, out: str | None) -> int:
    path = build_path(cfg)
    cert = residual_certificate(path, cfg.level, cfg.steps, cfg.tolerance, cfg.gap_floor)
    res = cert.residual
    outdir = _out_dir(cfg, out)
    header = ["t"] + [f"R_{i + 1}" for i in range(res.basis_size)]
    write_csv(outdir / "residual.csv", header, [res.grid.nodes, *res.values])
    write_json(outdir / "residual.json", cert.summary())
    verdict = "stationary" if cert.passed else "not stationary"
    print(f"sup residual {cert.sup_norm:.3e} vs threshold {cert.threshold:.3e}: {verdict}")
    return EXIT_OK


def cmd_optimize(cfg: ScenarioConfig, out: str | None) -> int:
    if cfg.dilation != 1.0:
        raise ValidationError("optimize does not accept a dilation")
    scenario = build_scenario(cfg)
    start = start_coefficients(cfg, scenario)
    report = ascend(start, scenario, cfg.optimizer.ascent())
    final = report.final_coefficients.tolist()
    payload = report.to_dict()
    payload["coefficients"] = final
    outdir = _out_dir(cfg, out)
    write_json(outdir / "optimize.json", payload)
    emitted = cfg.model_dump(exclude_none=True, exclude={"random_amplitude", "out_dir", "optimizer", "oracle"})
    emitted.update(kind="isospectral", coefficients=final, tolerance=cfg.optimizer.tol)
    write_json(outdir / "optimized_path.json", emitted)
    print(
        f"A {report.initial_A:.10f} -> {report.final_A:.10f} in {report.iterations} iterations; "
        f"converged={report.converged}"
    )
    return EXIT_OK


def _equivalence_case(params: RotatingSpinParams, T: float, steps: int) -> dict:
    path = RotatingSpinPath(params, T)
    trace = evolve(path, steps)
    t = trace.grid.nodes
    u_dev = float(np.max(np.abs(trace.unitaries - analytic_propagator(params, t))))
    psi = state_trace(trace, initial_state(params))
    n_t = path.frame(t) @ initial_state(params)
    a_num = np.abs(np.einsum("ki,ki->k", n_t.conj(), psi)) ** 2
    a_dev = float(np.max(np.abs(a_num - analytic_adiabaticity(params, t))))
    return {
        "omega0": params.omega0,
        "omega": params.omega,
        "theta": params.theta,
        "T": T,
        "steps": steps,
        "propagator_deviation": u_dev,
        "adiabaticity_deviation": a_dev,
    }


def oracle_cases(cfg: ScenarioConfig) -> list[tuple[RotatingSpinParams, float]]:
    cases = [(cfg.spin_params, cfg.duration)]
    rng = np.random.default_rng(cfg.seed)
    for _ in range(cfg.oracle.random_cases):
        ratio = rng.uniform(0.1, 2.0)
        theta = rng.uniform(0.1, math.pi - 0.1)
        p = RotatingSpinParams(cfg.omega0, ratio * cfg.omega0, theta)
        cases.append((p, period(p)))
    return cases


def lambda_sweep(cfg: ScenarioConfig) -> list[dict]:
    T = cfg.duration
    spin = RotatingSpinPath(cfg.spin_params, T)
    h0, h1 = spin(0.0), spin(T)
    rows = []
    for lam in cfg.oracle.lambdas:
        steps = cfg.steps * max(1, math.ceil(lam / 100))
        sim = simulate(lambda_ramp_path(h0, h1, lam, T), cfg.level, steps, cfg.gap_floor)
        rows.append({"Lambda": lam, "steps": steps, "infidelity": 1.0 - sim.final_adiabaticity})
    return rows


def cmd_oracle_check(cfg: ScenarioConfig, out: str | None) -> int:
    tol = cfg.oracle.tolerance
    if cfg.oracle.mode == "lambda_sweep":
        rows = lambda_sweep(cfg)
        infid = [r["infidelity"] for r in rows]
        decreasing = all(b < a for a, b in zip(infid, infid[1:]))
        ok = decreasing and infid[-1] <= cfg.oracle.sweep_limit
        payload = {"mode": "lambda_sweep", "rows": rows, "strictly_decreasing": decreasing, "pass": ok}
        msg = ", ".join(f"Lambda={r['Lambda']:g}: 1-A={r['infidelity']:.3e}" for r in rows)
    else:
        rows = [_equivalence_case(p, T, cfg.steps) for p, T in oracle_cases(cfg)]
        worst = max(max(r["propagator_deviation"], r["adiabaticity_deviation"]) for r in rows)
        ok = worst <= tol
        payload = {"mode": "equivalence", "cases": rows, "max_deviation": worst, "tolerance": tol, "pass": ok}
        msg = f"max deviation {worst:.3e} (tolerance {tol:g})"
    write_json(_out_dir(cfg, out) / "oracle_check.json", payload)
    print(("PASS " if ok else "FAIL ") + msg, file=sys.stdout if ok else sys.stderr)
    return EXIT_OK if ok else EXIT_INVALID


COMMANDS = {
    "simulate": cmd_simulate,
    "residual": cmd_residual,
    "optimize": cmd_optimize,
    "oracle-check": cmd_oracle_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adiaopt", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="scenario JSON file")
        p.add_argument("--out", help="output directory (default: config out_dir or cwd)")
        p.add_argument("--steps", type=int, help="override the number of integration steps")
        p.add_argument("--seed", type=int, help="override the random seed")
    sub.add_parser("schema", help="print the config JSON schema")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors, which is reserved for numerical failures here
        return EXIT_INVALID if exc.code == 2 else exc.code
    if args.command == "schema":
        print(json.dumps(config_schema(), indent=2, sort_keys=True))
        return EXIT_OK
    try:
        cfg = load_config(args.config, {"steps": args.steps, "seed": args.seed})
        return COMMANDS[args.command](cfg, args.out)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
