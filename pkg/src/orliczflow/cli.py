"""Command line interface: ``orliczflow {solve,prox,verify,sweep}``."""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, build_problem, grid_function, parse_config, to_dict
from .proximal import ProximalOperator, resolvent_convergence
from .solver import SolverConfig
from .stepper import StepError, Trajectory, a_priori_bound, energy_identity_report, max_regularity_report, solve
from .verify import SUITES, run_suite

TRAJECTORY_COLUMNS = ("k", "t", "E", "rho_phi_rate", "rho_conj_eta", "EL_residual", "energy_ineq_slack",
                      "inner_iters")


def _fmt(x, prec: int) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.{prec}g}"


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer, int)) and not isinstance(x, bool):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x) if math.isfinite(x) else None
    return x


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, header, rows, prec: int) -> None:
    with path.open("w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for row in rows:
            wr.writerow([_fmt(v, prec) for v in row])


# ---------------------------------------------------------------------------
# solve


def trajectory_summary(traj: Trajectory) -> dict:
    k = traj.steps_done
    out = {
        "partial": not traj.complete,
        "steps_done": k,
        "K": traj.tg.K,
        "tau": traj.tg.tau,
        "grad_tol": traj.grad_tol,
        "E0": traj.energy[0],
        "E_final": traj.energy[k],
        "inner_iters_total": int(np.sum(traj.inner_iters[:k])),
    }
    if k:
        _, total = energy_identity_report(traj)
        rate_q, conj_A_q, conj_eta_q = max_regularity_report(traj)
        lhs, rhs = a_priori_bound(traj)
        out.update(
            energy_identity_total=total,
            rho_rate_Q=rate_q,
            rho_conj_A_rate_Q=conj_A_q,
            rho_conj_eta_Q=conj_eta_q,
            a_priori_lhs=lhs,
            a_priori_rhs=rhs,
            max_EL_residual=float(np.max(traj.el_residual[:k])),
            max_energy_ineq_slack=float(np.max(traj.ineq_slack[:k])),
        )
    return out


def write_trajectory(traj: Trajectory, out_dir: Path, cfg: RunConfig) -> None:
    prec = cfg.output.precision
    k = traj.steps_done
    t = traj.tg.times
    rows = [(i, t[i], traj.energy[i], traj.rho_rate[i - 1], traj.rho_conj_eta[i - 1], traj.el_residual[i - 1],
             traj.ineq_slack[i - 1], int(traj.inner_iters[i - 1])) for i in range(1, k + 1)]
    _write_csv(out_dir / "trajectory.csv", TRAJECTORY_COLUMNS, rows, prec)
    for s in cfg.output.snapshots:
        if s <= k:
            _write_csv(out_dir / f"u_{s}.csv", ("node", "value"), enumerate(traj.us[s]), prec)


def run(cfg: RunConfig, out_dir=None) -> int:
    """Solve the configured problem and write CSV + summary; returns the exit status."""
    out_dir = Path(out_dir or cfg.output.dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    prob = build_problem(cfg)
    status, error = 0, None
    try:
        traj = solve(prob)
    except StepError as exc:
        traj, status, error = exc.trajectory, 1, str(exc)
    write_trajectory(traj, out_dir, cfg)
    summary = trajectory_summary(traj)
    summary["error"] = error
    summary["config"] = to_dict(cfg)
    _write_json(out_dir / "summary.json", summary)
    return status


# ---------------------------------------------------------------------------
# prox


PROX_COLUMNS = ("lambda", "distance", "E_J", "E_lambda", "E_u", "yosida_dual_modular", "inclusion_residual",
                "inner_iters")


def run_prox(cfg: RunConfig, out_dir=None) -> int:
    out_dir = Path(out_dir or cfg.output.dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    prob = build_problem(cfg)
    solver = SolverConfig(grad_tol=cfg.solver.grad_tol or 1e-11, max_iters=cfg.solver.max_iters,
                          hessian_floor=cfg.solver.hessian_floor)
    P = ProximalOperator(prob.space, prob.energy, solver)
    u = grid_function(cfg.prox.u, prob.grid) if cfg.prox.u is not None else prob.u0
    rows = resolvent_convergence(P, u, cfg.prox.lambdas)
    _write_csv(out_dir / "prox.csv", PROX_COLUMNS, [[r[c] for c in PROX_COLUMNS] for r in rows],
               cfg.output.precision)
    d = [r["distance"] for r in rows]
    summary = {
        "sandwich_holds": all(r["E_J"] <= r["E_lambda"] <= r["E_u"] + 1e-10 for r in rows),
        "distance_decreasing": all(b < a for a, b in zip(d, d[1:])),
        "final_distance": d[-1],
        "max_inclusion_residual": max(r["inclusion_residual"] for r in rows),
        "config": to_dict(cfg),
    }
    _write_json(out_dir / "summary.json", summary)
    return 0


# ---------------------------------------------------------------------------
# sweep


SWEEP_COLUMNS = ("K", "tau", "partial", "E_final", "energy_identity_total", "rho_rate_Q", "rho_conj_A_rate_Q",
                 "rho_conj_eta_Q", "max_EL_residual", "max_energy_ineq_slack")


def _sweep_one(args):
    cfg, out_dir = args
    status = run(cfg, out_dir)
    summary = json.loads((Path(out_dir) / "summary.json").read_text())
    return status, summary


def worker_slots(jobs: int) -> int:
    cap = os.environ.get("ORLICZFLOW_THREADS")
    slots = os.cpu_count() or 1
    if cap:
        try:
            slots = max(1, int(cap))
        except ValueError:
            raise SystemExit(f"ORLICZFLOW_THREADS must be a positive integer, got {cap!r}")
    return max(1, min(slots, jobs))


def run_sweep(cfg: RunConfig, k_list, out_dir=None) -> int:
    """Run ``cfg`` for each K in ``k_list`` (own subdirectories) and write ``sweep.csv``."""
    out_dir = Path(out_dir or cfg.output.dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = []
    for K in k_list:
        c = dataclasses.replace(cfg, time=dataclasses.replace(cfg.time, K=K),
                                output=dataclasses.replace(cfg.output, snapshots=tuple(
                                    s for s in cfg.output.snapshots if s <= K)))
        jobs.append((c, str(out_dir / f"K{K}")))
    slots = worker_slots(len(jobs))
    if slots == 1:
        results = [_sweep_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=slots) as ex:
            results = list(ex.map(_sweep_one, jobs))
    rows = [[s.get(c) if s.get(c) is not None else math.nan for c in SWEEP_COLUMNS] for _, s in results]
    for row in rows:
        row[2] = int(row[2])
    _write_csv(out_dir / "sweep.csv", SWEEP_COLUMNS, rows, cfg.output.precision)
    return max(st for st, _ in results)


# ---------------------------------------------------------------------------
# entry point


def _k_list(text: str):
    try:
        ks = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not ks or any(k < 1 for k in ks):
        raise argparse.ArgumentTypeError("K values must be positive")
    return ks


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="orliczflow", description="Doubly nonlinear gradient flows in Orlicz spaces.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (("solve", "run the time stepper"), ("prox", "resolvent convergence study"),
                        ("sweep", "refinement study over several K")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, type=Path, help="JSON run configuration")
        p.add_argument("--out", type=Path, default=None, help="output directory (overrides output.dir)")
        p.add_argument("--seed", type=int, default=None, help="overrides the config seed")
        if name == "sweep":
            p.add_argument("--k-list", type=_k_list, default=[32, 64, 128], help="e.g. 32,64,128")
    p = sub.add_parser("verify", help="run the property suites")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    p.add_argument("--seed", type=int, default=0)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        return 0 if run_suite(args.suite, args.seed) else 1
    try:
        cfg = parse_config(args.config)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if args.command == "solve":
        return run(cfg, args.out)
    if args.command == "prox":
        return run_prox(cfg, args.out)
    return run_sweep(cfg, args.k_list, args.out)


if __name__ == "__main__":
    sys.exit(main())
