"""Command-line front end.

Subcommands: ``solve`` (find a reliable strategic decision), ``minimize``
(bisection on the total budget), ``validate`` (Monte Carlo report for a
decision file), ``demo-inventory`` (write the shipped demo instance).

Artifacts are JSON (instances, decisions, summaries, reports) and CSV
(iteration logs, bisection steps, per-scenario validation rows, nominal
trajectories).  All floats are written with shortest round-trip formatting
and all JSON keys are sorted, so identical runs produce identical bytes.

Exit codes: 0 success/candidate, 2 infeasibility certificate, 3 call budget
exhausted, 4 bisection failed, 1 input or data errors.  Set SSDM_LOG to
debug/info/warning to control verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import __version__
from .backend import backend_name
from .bisection import BisectionConfig, minimize as run_minimize
from .engines import bl_call_bound, ellipsoid_call_bound, run_bl, run_ellipsoid
from .errors import SSDMError
from .geometry import bounding_ball
from .inventory import InventoryInstance, StrategicDecisionView, default_instance, \
    instance_from_dict, instance_to_dict, build_model, objective_vector, \
    sample_scenario, scenario_rows
from .oracle import OracleConfig, SamplingOracle
from .reports import validate_decision
from .rng import TAG_VALIDATE, substream

log = logging.getLogger("ssdm")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2
EXIT_BUDGET = 3
EXIT_FAILED = 4


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _write_json(path: str, obj) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) if not isinstance(v, str) else v
                              for v in row) + "\n")


def _load_instance(path: str) -> InventoryInstance:
    with open(path) as fh:
        return instance_from_dict(json.load(fh))


def _decision_dict(instance: InventoryInstance, y: np.ndarray) -> dict:
    view = StrategicDecisionView(instance, y)
    stages = []
    for t in range(1, instance.K + 1):
        stages.append({
            "stage": t,
            "lower": view.lower(t).tolist(),
            "upper": view.upper(t).tolist(),
            "stage_budget": view.stage_budget(t),
        })
    return {
        "format_version": 1,
        "kind": "decision",
        "n": instance.n,
        "y": y.tolist(),
        "stages": stages,
        "total_budget": view.total_budget,
    }


def _write_decision(out_dir: str, instance: InventoryInstance, y: np.ndarray) -> None:
    _write_json(os.path.join(out_dir, "decision.json"), _decision_dict(instance, y))
    view = StrategicDecisionView(instance, y)
    rows = []
    for t in range(1, instance.K + 1):
        for i in range(instance.d):
            rows.append((t, i, view.lower(t)[i], view.upper(t)[i],
                         view.stage_budget(t), view.total_budget))
    _write_csv(os.path.join(out_dir, "decision.csv"),
               ("stage", "product", "lower", "upper", "stage_budget",
                "total_budget"), rows)


def _write_iterations(out_dir: str, records) -> None:
    rows = [(r.s, r.delta, r.n_samples, r.outcome) for r in records]
    _write_csv(os.path.join(out_dir, "iterations.csv"),
               ("s", "delta", "n_samples", "outcome"), rows)


def _engine_budget(args, n: int, radius: float) -> int:
    if args.budget is not None:
        return int(args.budget)
    if args.engine == "bl":
        return bl_call_bound(radius, args.rho)
    return ellipsoid_call_bound(n, radius, args.rho)


def _oracle(args, budget: int, steps: int = 1) -> SamplingOracle:
    return SamplingOracle(OracleConfig(
        epsilon=args.epsilon, delta=args.delta, schedule=args.schedule,
        fixed_calls=budget * steps if args.schedule == "fixed" else None,
        seed=args.seed))


def cmd_solve(args) -> int:
    instance = _load_instance(args.instance)
    model = build_model(instance)
    ball = bounding_ball(model.box_lo, model.box_hi)
    budget = _engine_budget(args, model.n, ball.radius)
    oracle = _oracle(args, budget)
    log.info("solve: n=%d stages=%d budget=%d engine=%s", model.n, model.K,
             budget, args.engine)
    if args.engine == "bl":
        res = run_bl(model, oracle, ball, budget)
    else:
        res = run_ellipsoid(model, oracle, ball, rho=args.rho,
                            budget_override=budget)
    os.makedirs(args.out_dir, exist_ok=True)
    _write_iterations(args.out_dir, res.log)
    exit_code = {"candidate": EXIT_OK, "infeasible": EXIT_INFEASIBLE,
                 "budget_exhausted": EXIT_BUDGET}[res.status]
    summary = {
        "format_version": 1,
        "kind": "solve_summary",
        "version": __version__,
        "backend": backend_name(),
        "engine": args.engine,
        "schedule": args.schedule,
        "epsilon": args.epsilon,
        "delta": args.delta,
        "rho": args.rho,
        "budget": budget,
        "seed": args.seed,
        "status": res.status,
        "exit_code": exit_code,
        "calls": res.calls,
        "samples": res.samples,
        "delta_r": res.delta_r,
    }
    _write_json(os.path.join(args.out_dir, "summary.json"), summary)
    if res.candidate:
        _write_decision(args.out_dir, instance, res.y)
    log.info("solve: %s after %d calls (%d samples)", res.status, res.calls,
             res.samples)
    return exit_code


def cmd_minimize(args) -> int:
    instance = _load_instance(args.instance)
    model = build_model(instance)
    config = BisectionConfig(
        objective=objective_vector(instance), kappa_opt=args.kappa_opt,
        rho=args.rho, epsilon=args.epsilon, delta=args.delta,
        engine=args.engine, schedule=args.schedule, seed=args.seed,
        budget_override=args.budget)
    out = run_minimize(model, config)
    os.makedirs(args.out_dir, exist_ok=True)
    _write_iterations(args.out_dir, out.iteration_log)
    rows = [(s.k, s.phi, s.outcome, s.lo, s.hi, s.calls_total,
             s.samples_total, s.engine_status) for s in out.steps]
    _write_csv(os.path.join(args.out_dir, "steps.csv"),
               ("k", "phi", "outcome", "localizer_lo", "localizer_hi",
                "calls_total", "samples_total", "engine_status"), rows)
    summary = {
        "format_version": 1,
        "kind": "minimize_summary",
        "version": __version__,
        "backend": backend_name(),
        "engine": args.engine,
        "schedule": args.schedule,
        "epsilon": args.epsilon,
        "delta": args.delta,
        "rho": args.rho,
        "kappa_opt": args.kappa_opt,
        "budget": args.budget,
        "seed": args.seed,
        "solved": out.solved,
        "bound": out.bound,
        "objective_range": list(out.objective_range),
        "steps": len(out.steps),
        "calls": out.calls,
        "samples": out.samples,
        "exit_code": EXIT_OK if out.solved else EXIT_FAILED,
    }
    _write_json(os.path.join(args.out_dir, "summary.json"), summary)
    if out.solved:
        _write_decision(args.out_dir, instance, out.y_hat)
        log.info("minimize: bound %.6g after %d calls", out.bound, out.calls)
        print(f"solved: objective bound {out.bound!r} "
              f"({len(out.steps)} steps, {out.calls} oracle calls)")
        return EXIT_OK
    print("failed: no productive bisection step; see steps.csv",
          file=sys.stderr)
    return EXIT_FAILED


def cmd_validate(args) -> int:
    instance = _load_instance(args.instance)
    with open(args.decision) as fh:
        doc = json.load(fh)
    if doc.get("kind") != "decision":
        raise SSDMError("not a decision document")
    y = np.asarray(doc["y"], dtype=float)
    if y.size != instance.n:
        raise SSDMError(f"decision length {y.size} does not match instance "
                        f"dimension {instance.n}")
    report, rows = validate_decision(instance, y, args.samples, args.seed,
                                     with_utopian=not args.no_utopian,
                                     enforce_stage_caps=not args.drop_stage_caps)
    os.makedirs(args.out_dir, exist_ok=True)
    _write_json(os.path.join(args.out_dir, "report.json"), report.to_dict())
    _write_csv(os.path.join(args.out_dir, "scenarios.csv"),
               ("index", "greedy_ok", "within_budget", "failed_stage",
                "total_cost", "utopian_cost", "relative_excess"),
               [(r.index, r.greedy_ok, r.within_budget, r.failed_stage,
                 r.total_cost, r.utopian, r.excess) for r in rows])
    print(f"failure_rate {report.failure_rate!r} over {report.n_scenarios} "
          f"scenarios; cost stats over successes: min {_fmt(report.cost_min)} "
          f"mean {_fmt(report.cost_mean)} median {_fmt(report.cost_median)} "
          f"max {_fmt(report.cost_max)}; omega {_fmt(report.omega)}")
    if report.mean_excess_over_utopian is not None:
        print(f"mean excess over clairvoyant: "
              f"{100.0 * report.mean_excess_over_utopian:.1f}%")
    return EXIT_OK


def cmd_demo_inventory(args) -> int:
    instance = default_instance()
    os.makedirs(args.out_dir, exist_ok=True)
    _write_json(os.path.join(args.out_dir, "instance.json"),
                instance_to_dict(instance))
    rows = []
    for name in ("demand", "order_cost", "holding_cost", "backlog_penalty",
                 "revenue"):
        arr = instance.nominal[name]
        for t in range(1, instance.K + 1):
            for i in range(instance.d):
                rows.append((t, name, i, arr[t - 1, i]))
    _write_csv(os.path.join(args.out_dir, "nominals.csv"),
               ("stage", "component", "product", "value"), rows)
    scen = sample_scenario(instance, substream(args.seed, TAG_VALIDATE, 0))
    _write_csv(os.path.join(args.out_dir, "scenario_example.csv"),
               ("t", "component", "value"),
               scenario_rows(instance, scen))
    print(f"wrote instance.json, nominals.csv and scenario_example.csv "
          f"to {args.out_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ssdm",
        description="Reliable strategic decisions for multi-stage problems "
                    "under sampled uncertainty.")
    p.add_argument("--version", action="version", version=f"ssdm {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, kappa=False):
        sp.add_argument("--instance", required=True, help="instance JSON file")
        sp.add_argument("--epsilon", type=float, default=0.05,
                        help="implementability tolerance (default 0.05)")
        sp.add_argument("--delta", type=float, default=0.01,
                        help="reliability tolerance (default 0.01)")
        sp.add_argument("--rho", type=float, default=1.0,
                        help="stability tolerance feeding the call budget")
        if kappa:
            sp.add_argument("--kappa-opt", type=float, default=0.1,
                            dest="kappa_opt",
                            help="optimality tolerance (default 0.1)")
        sp.add_argument("--engine", choices=("bl", "ellipsoid"), default="bl")
        sp.add_argument("--schedule", choices=("fixed", "adaptive"),
                        default="adaptive")
        sp.add_argument("--budget", type=int, default=None,
                        help="override the per-run (per-step) call budget")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out-dir", default=".", help="artifact directory")

    sp = sub.add_parser("solve", help="find a reliable strategic decision")
    common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("minimize", help="minimize the total budget by bisection")
    common(sp, kappa=True)
    sp.set_defaults(func=cmd_minimize)

    sp = sub.add_parser("validate", help="Monte Carlo validation of a decision")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--decision", required=True, help="decision JSON file")
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--no-utopian", action="store_true",
                    help="skip the clairvoyant comparison")
    sp.add_argument("--drop-stage-caps", action="store_true",
                    help="drop per-stage cost caps in the clairvoyant LP")
    sp.add_argument("--out-dir", default=".")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("demo-inventory", help="write the shipped demo instance")
    sp.add_argument("--seed", type=int, default=0,
                    help="seed for the example scenario dump")
    sp.add_argument("--out-dir", default=".")
    sp.set_defaults(func=cmd_demo_inventory)
    return p


def main(argv=None) -> int:
    level = os.environ.get("SSDM_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (SSDMError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
