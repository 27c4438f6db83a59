"""Command-line batch entry points: run, sweep, verify.

    lpmhd run    --config cfg --out dir [--snapshots]
    lpmhd sweep  --config cfg --eps 1e-1,1e-2 --out dir [--jobs n]
    lpmhd verify --level fast|full

Artifacts are CSV and JSON only; the documented schemas live in README.md.
Floats are printed with 17 significant digits, so identical config + seed
reproduces byte-identical files.  LPMHD_SEED overrides the config seed.
Exit codes: 0 ok, 1 verification failure, 2 config error, 3 numerical
failure (summary still written).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import kernels
from .config import parse_config
from .diagnostics import (
    Trajectory,
    fit_euler_growth_constant,
    lifespan_bound_new,
    lifespan_bound_old,
    t_star_empirical,
)
from .dynamics import SimConfig, make_initial_data, run_simulation, save_snapshot
from .errors import ConfigurationError, LpmhdError
from .littlewood_paley import B1_INF_1, B2_INF_1, besov_norm, build_partition
from .spectral import Grid, l2_norm
from .verify import run_suite

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_FAILURE_TERMINATIONS = ("numerical_failure", "cfl_violation")

SWEEP_COLUMNS = ("epsilon", "t_star", "censored", "e_at_tfix", "bound_new_c1",
                 "bound_new_cfit", "energy_drift", "status")


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return "nan" if math.isnan(x) else format(x, ".17g")
    return str(x)


def write_diagnostics_csv(path, traj: Trajectory):
    from .diagnostics import DiagnosticsRecord

    lines = [",".join(DiagnosticsRecord.CSV_FIELDS)]
    for rec in traj.records:
        lines.append(",".join(_fmt(getattr(rec, name))
                              for name in DiagnosticsRecord.CSV_FIELDS))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _apply_seed_override(config: SimConfig) -> SimConfig:
    raw = os.environ.get("LPMHD_SEED")
    if raw is None:
        return config
    try:
        return replace(config, seed=int(raw))
    except ValueError:
        raise ConfigurationError(f"LPMHD_SEED must be an integer, got {raw!r}") from None


def _initial_norms(config: SimConfig) -> dict:
    grid = Grid(config.n, config.length)
    part = build_partition(grid)
    u0, b0 = make_initial_data(config, grid, part)
    u_l2b2 = l2_norm(u0) + besov_norm(u0, B2_INF_1, part)
    u_l2b1 = l2_norm(u0) + besov_norm(u0, B1_INF_1, part)
    b_l2b2 = l2_norm(b0) + besov_norm(b0, B2_INF_1, part)
    b_l2b1 = l2_norm(b0) + besov_norm(b0, B1_INF_1, part)
    return {
        "u0_l2_b2": u_l2b2,
        "b0_b1": besov_norm(b0, B1_INF_1, part),
        "pair_l2_b2": u_l2b2 + b_l2b2,
        "pair_l2_b1": u_l2b1 + b_l2b1,
    }


def _run_reference(config: SimConfig) -> Trajectory:
    return run_simulation(config, "euler", with_snapshots=True)


def _summarise(config: SimConfig, traj: Trajectory, reference: Trajectory | None) -> dict:
    records = traj.records
    first, last = records[0], records[-1]
    norms = _initial_norms(config)
    summary = {
        "system": traj.system,
        "termination": traj.termination,
        "t_final": last.t,
        "records": len(records),
        "backend": kernels.BACKEND_NAME,
        "config": dataclasses.asdict(config),
        "energy_initial": first.energy,
        "energy_final": last.energy,
        "energy_drift": abs(last.energy - first.energy) / first.energy
        if first.energy > 0 else 0.0,
        "initial_norms": norms,
        "integrals": {
            "grad2_u": last.int_grad2_u,
            "omega_plus_j": last.int_omega_plus,
            "omega_minus_j": last.int_omega_minus,
            "lipschitz": last.int_lipschitz,
            "current_sq": last.int_current_sq,
        },
        "lifespan_bound_new_c1": lifespan_bound_new(
            norms["u0_l2_b2"], norms["b0_b1"]).bound,
        "lifespan_bound_old_c1": lifespan_bound_old(
            norms["pair_l2_b2"], norms["pair_l2_b1"], norms["b0_b1"]).bound,
    }
    if reference is not None:
        e_series = traj.series("delta_norm")
        times = traj.times
        e0 = float(e_series[0])
        block = {"e0": e0, "e_final": float(e_series[-1])}
        t_fix = min(0.5, config.t_end)
        block["t_fix"] = t_fix
        block["e_at_tfix"] = float(np.interp(t_fix, times, e_series))
        if e0 > 0:
            result = t_star_empirical(times, e_series, e0)
            block["t_star"] = result.t_star
            block["censored"] = result.censored
        phi = reference.series("euler_phi")
        block["euler_growth_constant"] = fit_euler_growth_constant(
            reference.times, phi, float(phi[0]))
        summary["euler_comparison"] = block
    return summary


def cmd_run(config_path, out_dir, snapshots: bool = False) -> int:
    try:
        config = _apply_seed_override(parse_config(config_path))
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    reference = None
    if config.system != "euler" and config.euler_reference:
        reference = _run_reference(config)
    traj = run_simulation(config, config.system, reference=reference,
                          with_snapshots=snapshots)
    write_diagnostics_csv(out / "diagnostics.csv", traj)
    summary = _summarise(config, traj, reference)
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n",
                                      encoding="utf-8")
    if snapshots:
        snap_dir = out / "snapshots"
        snap_dir.mkdir(exist_ok=True)
        for rec, snap in zip(traj.records, traj.snapshots):
            name = f"state_t{rec.t:012.6f}.bin".replace(".", "p", 1)
            save_snapshot(snap_dir / name, config.n, config.length, rec.t, snap)
    if traj.termination in _FAILURE_TERMINATIONS:
        print(f"run ended early: {traj.termination}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _parse_eps_list(raw: str) -> list[float]:
    values = []
    for token in raw.split(","):
        token = token.strip()
        if not token:
            continue
        try:
            values.append(float(token))
        except ValueError:
            raise ConfigurationError(f"bad epsilon value {token!r}") from None
    if not values:
        raise ConfigurationError("empty epsilon list")
    deduped = []
    for v in values:
        if v in deduped:
            print(f"warning: duplicate epsilon {v:g} ignored", file=sys.stderr)
        else:
            deduped.append(v)
    return deduped


def _sweep_row(config: SimConfig, eps: float, reference: Trajectory,
               u0_norm: float) -> dict:
    row = {"epsilon": eps, "t_star": math.nan, "censored": True,
           "e_at_tfix": math.nan, "bound_new_c1": math.nan,
           "bound_new_cfit": math.nan, "energy_drift": math.nan, "status": "ok"}
    try:
        cfg = replace(config, epsilon=eps)
        traj = run_simulation(cfg, "mhd", reference=reference)
        e_series = traj.series("delta_norm")
        times = traj.times
        energy = traj.series("energy")
        row["energy_drift"] = float(np.max(np.abs(energy - energy[0])) / energy[0])
        t_fix = min(0.5, cfg.t_end)
        row["e_at_tfix"] = float(np.interp(t_fix, times, e_series))
        if e_series[0] > 0:
            result = t_star_empirical(times, e_series, float(e_series[0]))
            row["t_star"] = result.t_star
            row["censored"] = result.censored
        row["bound_new_c1"] = lifespan_bound_new(u0_norm, eps).bound
        if traj.termination in _FAILURE_TERMINATIONS:
            row["status"] = traj.termination
    except LpmhdError as exc:
        row["status"] = f"error: {exc}"
    return row


def fit_sweep_constant(u0_norm: float, points: list[tuple[float, float]],
                       c_cap: float = 1e6) -> float:
    """Largest C for which the triple-log bound stays below every empirical
    T* in ``points`` (pairs of epsilon and uncensored T*)."""
    if not points:
        return math.nan

    def valid(c: float) -> bool:
        return all(lifespan_bound_new(u0_norm, eps, c).bound <= t_star
                   for eps, t_star in points)

    lo = 0.0
    hi = 1.0
    while valid(hi) and hi < c_cap:
        lo, hi = hi, hi * 2.0
    if hi >= c_cap:
        return c_cap
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if valid(mid):
            lo = mid
        else:
            hi = mid
    return lo


def cmd_sweep(config_path, eps_raw, out_dir, jobs: int = 1) -> int:
    try:
        config = _apply_seed_override(parse_config(config_path))
        eps_list = _parse_eps_list(eps_raw)
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    norms = _initial_norms(replace(config, epsilon=1.0))
    u0_norm = norms["u0_l2_b2"]
    reference = _run_reference(config)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(
                lambda eps: _sweep_row(config, eps, reference, u0_norm), eps_list))
    else:
        rows = [_sweep_row(config, eps, reference, u0_norm) for eps in eps_list]

    fit_points = [(row["epsilon"], row["t_star"]) for row in rows
                  if row["status"] == "ok" and not row["censored"]
                  and math.isfinite(row["t_star"])]
    c_fit = fit_sweep_constant(u0_norm, fit_points)
    for row in rows:
        if math.isfinite(c_fit):
            row["bound_new_cfit"] = lifespan_bound_new(u0_norm, row["epsilon"], c_fit).bound

    lines = [",".join(SWEEP_COLUMNS)]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in SWEEP_COLUMNS))
    (out / "sweep.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    meta = {
        "u0_l2_b2": u0_norm,
        "c_fit": c_fit,
        "uncensored_points": len(fit_points),
        "epsilons": eps_list,
        "backend": kernels.BACKEND_NAME,
    }
    (out / "sweep_summary.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    ok_rows = sum(1 for row in rows if row["status"] == "ok")
    return EXIT_OK if ok_rows >= 1 else EXIT_NUMERICAL


def cmd_verify(level: str) -> int:
    try:
        results = run_suite(level)
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for result in results:
        print(result.row())
    failures = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failures)}/{len(results)} checks passed")
    if failures:
        print("failed: " + ", ".join(failures), file=sys.stderr)
        return EXIT_VERIFY_FAIL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lpmhd",
                                     description="2-D ideal MHD spectral laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate one configuration")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", required=True)
    p_run.add_argument("--snapshots", action="store_true")

    p_sweep = sub.add_parser("sweep", help="run an epsilon family")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--eps", required=True, help="comma-separated epsilon list")
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--jobs", type=int, default=1)

    p_verify = sub.add_parser("verify", help="run the property suite")
    p_verify.add_argument("--level", choices=("fast", "full"), default="fast")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args.config, args.out, args.snapshots)
    if args.command == "sweep":
        return cmd_sweep(args.config, args.eps, args.out, args.jobs)
    return cmd_verify(args.level)


if __name__ == "__main__":
    sys.exit(main())
