"""Command-line front end: kernel tables, bound certification, solver runs.

Commands: kernel-eval, verify-bounds, solve, converge. Each takes
--config PATH (flat key-value JSON) and --out DIR; a manifest is written
first, then CSV/JSON artifacts. All floats are printed with 17
significant digits so emitted files round-trip exactly.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys

import numpy as np
import scipy

from . import __version__
from . import bounds as bounds_mod
from .collision import (
    SolverConfig,
    bimodal,
    compact_bump,
    distribution_to_csv,
    maxwellian,
    weak_form_pairing,
    HardSphereKernel,
    InversePowerKernel,
)
from .kernel import DEFAULT_TOL, b_bar_s, b_s, build_map_table
from .solver import convergence_study, moment_propagation_check, run_flow, stable_dt

SCHEMA = 1


class ConfigError(ValueError):
    """Configuration schema violation, reported with the field path."""


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    return cfg


def _field(cfg: dict, key: str, kind, default):
    if key not in cfg:
        if default is _REQUIRED:
            raise ConfigError(f"missing required config field '{key}'")
        return default
    val = cfg[key]
    if kind is float and isinstance(val, int):
        val = float(val)
    if kind is list and isinstance(val, list):
        return val
    if not isinstance(val, kind) or isinstance(val, bool) and kind is not bool:
        raise ConfigError(f"config field '{key}' must be {kind.__name__}, got {val!r}")
    return val


_REQUIRED = object()


def _write_json(path, payload) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


def _write_manifest(args, command: str) -> None:
    os.makedirs(args.out, exist_ok=True)
    cfg_hash = None
    if args.config is not None:
        with open(args.config, "rb") as fh:
            cfg_hash = hashlib.sha256(fh.read()).hexdigest()
    manifest = {
        "schema": SCHEMA,
        "command": command,
        "config_path": args.config,
        "config_sha256": cfg_hash,
        "output_dir": args.out,
        "seed": args.seed,
        "versions": {
            "hslimit": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": sys.version.split()[0],
        },
    }
    _write_json(os.path.join(args.out, "manifest.json"), manifest)


def _parse_float_list(text: str, name: str):
    try:
        return [float(tok) for tok in text.split(",") if tok]
    except ValueError as exc:
        raise ConfigError(f"malformed {name} list {text!r}") from exc


# -- kernel-eval -------------------------------------------------------------


def cmd_kernel_eval(args) -> int:
    cfg = _load_config(args.config)
    s_values = _field(cfg, "s_values", list, [0.5])
    if args.s is not None:
        s_values = _parse_float_list(args.s, "--s")
    if args.theta is not None:
        thetas = _parse_float_list(args.theta, "--theta")
    elif "theta_grid" in cfg:
        thetas = [float(t) for t in _field(cfg, "theta_grid", list, _REQUIRED)]
    else:
        t_min = _field(cfg, "theta_min", float, 1e-4)
        t_max = _field(cfg, "theta_max", float, math.pi)
        n = _field(cfg, "n_theta", int, 400)
        thetas = list(np.geomspace(t_min, t_max, n))
    n_nodes = _field(cfg, "n_nodes", int, 256)
    tol = _field(cfg, "tol", float, DEFAULT_TOL)
    for s in s_values:
        if not 0.0 < s < 1.0:
            raise ConfigError(f"s values must lie in (0, 1), got {s}")
    for t in thetas:
        if not 0.0 < t <= math.pi:
            raise ConfigError(f"theta values must lie in (0, pi], got {t}")

    _write_manifest(args, "kernel-eval")
    path = os.path.join(args.out, "kernel.csv")
    with open(path, "w") as fh:
        fh.write("s,theta,b_s,b_bar_s,quad_err,certified_ratio\n")
        for s in s_values:
            table = build_map_table(s, n_nodes, tol)
            for theta in thetas:
                kv = b_s(table, theta)
                bbar = b_bar_s(table, theta)
                ratio = abs(kv.b - 0.25) * theta ** (2.0 + 2.0 * s) / s
                fh.write(",".join(_fmt(x) for x in
                                  (s, theta, kv.b, bbar, kv.quad_err, ratio)) + "\n")
    print(f"wrote {path} ({len(s_values) * len(thetas)} rows)")
    return 0


# -- verify-bounds -----------------------------------------------------------


def cmd_verify_bounds(args) -> int:
    cfg = _load_config(args.config)
    slack = _field(cfg, "slack", float, bounds_mod.DEFAULT_SLACK)
    s_values = [float(s) for s in _field(cfg, "s_values", list, list(bounds_mod.S_GRID))]
    n_theta = _field(cfg, "n_theta", int, 400)
    theta_min = _field(cfg, "theta_min", float, 1e-4)
    n_nodes = _field(cfg, "n_nodes", int, 256)
    tol = _field(cfg, "tol", float, DEFAULT_TOL)
    theta_grid = tuple(np.geomspace(theta_min, math.pi, n_theta))

    _write_manifest(args, "verify-bounds")
    checks = bounds_mod.run_all(tuple(s_values), theta_grid, slack=slack,
                                n_nodes=n_nodes, tol=tol)
    all_passed = all(c.passed for c in checks)
    report = {
        "schema": SCHEMA,
        "slack": slack,
        "all_passed": all_passed,
        "checks": [c.to_dict() for c in checks],
    }
    path = os.path.join(args.out, "bounds_report.json")
    _write_json(path, report)
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name}: worst ratio {c.worst_ratio:.6g}")
    print(f"wrote {path}")
    return 0 if all_passed else 1


# -- solve / converge --------------------------------------------------------


def _initial_data(cfg: dict, n_r: int, V_max: float):
    name = _field(cfg, "initial", str, "maxwellian")
    if name == "maxwellian":
        return maxwellian(_field(cfg, "T", float, 1.0), n_r, V_max)
    if name == "bimodal":
        return bimodal(_field(cfg, "T_cold", float, 0.5),
                       _field(cfg, "T_hot", float, 1.5),
                       _field(cfg, "weight", float, 0.5), n_r, V_max)
    if name == "bump":
        return compact_bump(_field(cfg, "center", float, 1.0),
                            _field(cfg, "width", float, 0.8), n_r, V_max)
    raise ConfigError(f"config field 'initial' must be maxwellian|bimodal|bump, got {name!r}")


def _solver_config(cfg: dict) -> SolverConfig:
    n_quad = _field(cfg, "n_quad", list, [48, 24, 32, 12])
    dt = cfg.get("dt")
    if dt is not None and not isinstance(dt, (int, float)):
        raise ConfigError(f"config field 'dt' must be a number or null, got {dt!r}")
    try:
        return SolverConfig(
            n_r=_field(cfg, "n_r", int, 48),
            V_max=_field(cfg, "V_max", float, 8.0),
            n_quad=tuple(int(n) for n in n_quad),
            theta_cut=_field(cfg, "theta_cut", float, 1e-3),
            dt=None if dt is None else float(dt),
            t_end=_field(cfg, "t_end", float, 1.0),
            k_weights=tuple(float(k) for k in _field(cfg, "k_weights", list, [2.0])),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _series_csv(series, path, k_weights) -> None:
    cols = ["t", "mass", "energy", "entropy", "min_f"] + [f"l1k_{k:g}" for k in k_weights]
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for i, t in enumerate(series.times):
            row = [t, series.mass[i], series.energy[i], series.entropy[i],
                   series.min_f[i]] + [series.l1k[k][i] for k in k_weights]
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def cmd_solve(args) -> int:
    cfg = _load_config(args.config)
    scfg = _solver_config(cfg)
    f_in = _initial_data(cfg, scfg.n_r, scfg.V_max)
    kernel_name = _field(cfg, "kernel", str, "hard-sphere")
    if kernel_name == "hard-sphere":
        kernel = HardSphereKernel()
    elif kernel_name == "inverse-power":
        s = _field(cfg, "s", float, _REQUIRED)
        if not 0.0 < s < 0.125:
            raise ConfigError(f"config field 's' must lie in (0, 1/8), got {s}")
        kernel = InversePowerKernel(s)
    else:
        raise ConfigError(
            f"config field 'kernel' must be hard-sphere|inverse-power, got {kernel_name!r}")

    _write_manifest(args, "solve")
    dt = stable_dt(f_in, scfg)
    series = run_flow(f_in, kernel, scfg, dt, scfg.t_end)
    _series_csv(series, os.path.join(args.out, "series.csv"), scfg.k_weights)
    distribution_to_csv(series.snapshots[-1], os.path.join(args.out, "final_state.csv"))

    checks = [moment_propagation_check(series, k).to_dict() for k in scfg.k_weights]
    summary = {
        "schema": SCHEMA,
        "kernel": kernel.name,
        "dt": dt,
        "t_end": scfg.t_end,
        "mass_drift": series.drift("mass"),
        "energy_drift": series.drift("energy"),
        "entropy_initial": series.entropy[0],
        "entropy_final": series.entropy[-1],
        "weak_form_pairings": {
            "mass": weak_form_pairing(f_in, kernel, scfg, "mass"),
            "energy": weak_form_pairing(f_in, kernel, scfg, "energy"),
        },
        "moment_checks": checks,
    }
    path = os.path.join(args.out, "summary.json")
    _write_json(path, summary)
    print(f"wrote {path} (mass drift {summary['mass_drift']:.3g}, "
          f"energy drift {summary['energy_drift']:.3g})")
    return 0


def cmd_converge(args) -> int:
    cfg = _load_config(args.config)
    scfg = _solver_config(cfg)
    f_in = _initial_data(cfg, scfg.n_r, scfg.V_max)
    s_list = [float(s) for s in _field(cfg, "s_list", list, [0.1, 0.05, 0.025])]
    k_list = [float(k) for k in _field(cfg, "k_list", list, [2.0])]
    measure_floor = _field(cfg, "measure_floor", bool, False)

    _write_manifest(args, "converge")
    study = convergence_study(f_in, s_list, scfg.t_end, k_list, scfg,
                              measure_floor=measure_floor)
    path = os.path.join(args.out, "study.csv")
    with open(path, "w") as fh:
        cols = ["s"] + [f"sup_Fs_l1k_{k:g}" for k in k_list] \
            + [f"fixed_time_l1k_{k:g}" for k in k_list]
        fh.write(",".join(cols) + "\n")
        for i, s in enumerate(study.s_values):
            row = [s] + [study.sup_norms[k][i] for k in k_list] \
                + [study.fixed_time_norms[k][i] for k in k_list]
            fh.write(",".join(_fmt(x) for x in row) + "\n")
    summary = {
        "schema": SCHEMA,
        "s_values": study.s_values,
        "k_list": study.k_list,
        "dt": study.dt,
        "sup_norms": {f"{k:g}": v for k, v in study.sup_norms.items()},
        "fixed_time_norms": {f"{k:g}": v for k, v in study.fixed_time_norms.items()},
        "ratio_max_over_min": {f"{k:g}": v for k, v in study.ratio.items()},
        "floor": None if study.floor is None else {f"{k:g}": v for k, v in study.floor.items()},
    }
    jpath = os.path.join(args.out, "summary.json")
    _write_json(jpath, summary)
    for k in k_list:
        print(f"k={k:g}: sup|F^s| per s {study.sup_norms[k]}, "
              f"ratio {study.ratio[k]:.4g}")
    print(f"wrote {jpath}")
    return 0


# -- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hslimit",
        description="Inverse-power-law Boltzmann kernel, bound certification, "
                    "and hard-sphere-limit solver runs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="flat key-value JSON config")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=0, help="seed for any sampling")

    p = sub.add_parser("kernel-eval", help="tabulate b_s and the certified ratio")
    common(p)
    p.add_argument("--s", default=None, help="comma-separated s values (overrides config)")
    p.add_argument("--theta", default=None, help="comma-separated theta values")
    p.set_defaults(func=cmd_kernel_eval)

    p = sub.add_parser("verify-bounds", help="run the full inequality suite")
    common(p)
    p.set_defaults(func=cmd_verify_bounds)

    p = sub.add_parser("solve", help="integrate one kernel from configured data")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("converge", help="uniform-boundedness study across s")
    common(p)
    p.set_defaults(func=cmd_converge)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
