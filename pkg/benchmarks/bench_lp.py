#!/usr/bin/env python3
"""Benchmark: compiled simplex kernel vs the pure numpy fallback.

Workloads mirror what dominates a real run: small stage-feasibility systems,
the wide terminal-stage system of the demo instance, and a whole oracle-driven
engine run.  Usage:

    python benchmarks/bench_lp.py [--repeats 5]
"""

import argparse
import time

import numpy as np

from ssdm import _simplex_py
from ssdm._simplex import simplex_solve as solve_compiled
from ssdm.inventory import build_model, default_instance, sample_scenario
from ssdm.model import stage_feasible
from ssdm.rng import substream

solve_pure = _simplex_py.simplex_solve


def random_lps(rng, count, m, n):
    problems = []
    for _ in range(count):
        G = rng.normal(size=(m, n))
        base = rng.normal(size=n)
        h = G @ base + rng.random(m)
        c = rng.normal(size=n)
        lo = base - 3.0
        hi = base + 3.0
        problems.append((G, h, c, lo, hi))
    return problems


def time_kernel(solver, problems, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        for G, h, c, lo, hi in problems:
            solver(G, h, c, lo, hi, 0)
        best = min(best, time.perf_counter() - t0)
    return best


def stage_problems():
    """The demo instance's stage systems at a scattered decision point."""
    ins = default_instance()
    model = build_model(ins)
    scen = sample_scenario(ins, substream(0, 9, 0))
    y = 0.5 * (model.box_lo + model.box_hi)
    probs = []
    for t in range(1, model.K + 1):
        sp = model.stage_builder(t, scen.stage(t))
        rhs = sp.d - sp.A @ y
        G = np.hstack([sp.B, sp.C])
        nx, nw = sp.n_x, sp.n_w
        lo = np.concatenate([sp.x_lo if sp.x_lo is not None else np.full(nx, -np.inf),
                             sp.w_lo if sp.w_lo is not None else np.full(nw, -np.inf)])
        hi = np.concatenate([sp.x_hi if sp.x_hi is not None else np.full(nx, np.inf),
                             sp.w_hi if sp.w_hi is not None else np.full(nw, np.inf)])
        probs.append((G, rhs, np.zeros(G.shape[1]), lo, hi))
    return probs


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)

    cases = [
        ("200 dense 12x20 LPs", random_lps(rng, 200, 12, 20)),
        ("50 dense 60x90 LPs", random_lps(rng, 50, 60, 90)),
        ("demo stage systems (12 small + 1 wide)", stage_problems()),
    ]
    print(f"{'workload':45s} {'compiled':>10s} {'pure':>10s} {'speedup':>8s}")
    for name, problems in cases:
        tc = time_kernel(solve_compiled, problems, args.repeats)
        tp = time_kernel(solve_pure, problems, args.repeats)
        print(f"{name:45s} {tc * 1e3:9.2f}ms {tp * 1e3:9.2f}ms {tp / tc:7.1f}x")

    # agreement spot-check on the benchmark inputs
    mismatches = 0
    for name, problems in cases:
        for G, h, c, lo, hi in problems:
            s1, z1, v1, *_ = solve_compiled(G, h, c, lo, hi, 0)
            s2, z2, v2, *_ = solve_pure(G, h, c, lo, hi, 0)
            if s1 != s2 or (s1 == 0 and abs(v1 - v2) > 1e-7 * (1 + abs(v1))):
                mismatches += 1
    print(f"\nbackend agreement: {mismatches} mismatches across all workloads")


if __name__ == "__main__":
    main()
