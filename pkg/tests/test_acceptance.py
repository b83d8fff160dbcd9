"""Acceptance suite: one test per criterion, each printing a PASS line with
its measured quantities (run with ``pytest tests/test_acceptance.py -v -s``).
"""

import json
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import box_poly, threshold_model
from test_lp import brute_force_box_lp

from ssdm.backend import simplex_solve
from ssdm.bisection import BisectionConfig, minimize
from ssdm.engines import bl_call_bound, run_bl
from ssdm.geometry import StagePolyhedron, bounding_ball
from ssdm.inventory import build_model, default_instance, objective_vector
from ssdm.lp import LinearProgram, solve_lp
from ssdm.model import Scenario, SemiStochasticModel, \
    separator_from_infeasibility, stage_feasible
from ssdm.oracle import OracleConfig, SamplingOracle, sample_size
from ssdm.remodel import DecisionBasis, coefficient_box, embed_constant, lift
from ssdm.reports import validate_decision


def _report(num, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {num:2d} [{status}] {detail}")
    assert ok, detail


# ---------------------------------------------------------------------------
# 1. separator contract
# ---------------------------------------------------------------------------

def test_criterion_01_separator_contract():
    t0 = time.time()
    rng = np.random.default_rng(101)
    pairs = 0
    worst_fy = np.inf
    worst_norm = 0.0
    worst_feas = -np.inf
    instances = 0
    while pairs < 500:
        n = int(rng.integers(3, 11))
        nx = int(rng.integers(0, 3))
        nw = int(rng.integers(0, 2))
        m = int(rng.integers(3, 9))
        A = rng.normal(size=(m, n))
        B = rng.normal(size=(m, nx))
        C = rng.normal(size=(m, nw))
        base = rng.normal(size=n + nx + nw)
        d = np.hstack([A, B, C]) @ base + rng.random(m)  # nonempty
        use_bounds = nx > 0 and rng.random() < 0.5
        x_lo = base[n:n + nx] - rng.random(nx) if use_bounds else None
        x_hi = base[n:n + nx] + rng.random(nx) if use_bounds else None
        sp = StagePolyhedron(A=A, B=B, C=C, d=d, x_lo=x_lo, x_hi=x_hi)
        model = SemiStochasticModel(
            n=n, K=1, Y=box_poly(np.full(n, -100.0), np.full(n, 100.0)),
            stage_builder=lambda t, xi, sp=sp: sp,
            sampler=lambda g: Scenario(stages=(np.zeros(1),)),
            box_lo=np.full(n, -100.0), box_hi=np.full(n, 100.0))
        # LP-sample feasible strategic points of this stage once
        G = np.hstack([A, B, C])
        lo = np.concatenate([np.full(n, -120.0),
                             x_lo if use_bounds else np.full(nx, -np.inf),
                             np.full(nw, -np.inf)])
        hi = np.concatenate([np.full(n, 120.0),
                             x_hi if use_bounds else np.full(nx, np.inf),
                             np.full(nw, np.inf)])
        pts = []
        while len(pts) < 100:
            c = rng.normal(size=n + nx + nw)
            res = solve_lp(LinearProgram(c=c, G=G, h=d, lo=lo, hi=hi))
            if res.optimal:
                pts.append(res.z[:n])
        pts = np.array(pts)
        instances += 1
        found = 0
        tries = 0
        while found < 10 and tries < 60:
            tries += 1
            y = base[:n] + rng.normal(size=n) * 30.0
            chk = stage_feasible(model, 1, np.zeros(1), y)
            if chk.feasible:
                continue
            sep = separator_from_infeasibility(model, 1, np.zeros(1), y,
                                               chk.farkas, chk.bound_term)
            fy = sep(y)
            worst_fy = min(worst_fy, fy)
            worst_norm = max(worst_norm, abs(np.linalg.norm(sep.a) - 1.0))
            fvals = pts @ sep.a + sep.alpha
            worst_feas = max(worst_feas, float(np.max(fvals)))
            assert fy >= -1e-8
            assert abs(np.linalg.norm(sep.a) - 1.0) <= 1e-9
            assert np.max(fvals) <= 1e-8
            found += 1
            pairs += 1
    elapsed = time.time() - t0
    _report(1, pairs >= 500 and elapsed < 60.0,
            f"{pairs} pairs on {instances} instances; min f(y)={worst_fy:.2e}, "
            f"max |a|-1={worst_norm:.2e}, max f on feasible={worst_feas:.2e}, "
            f"{elapsed:.1f}s")


# ---------------------------------------------------------------------------
# 2. LP oracle equivalence
# ---------------------------------------------------------------------------

def test_criterion_02_lp_vertex_enumeration():
    t0 = time.time()
    rng = np.random.default_rng(22)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 6))
        m = int(rng.integers(1, 9))
        G = rng.normal(size=(m, n)).round(2)
        h = rng.normal(size=m).round(2)
        c = rng.normal(size=n).round(2)
        lo = np.full(n, -5.0)
        hi = np.full(n, 5.0)
        feasible, best = brute_force_box_lp(G, h, c, lo, hi)
        status, z, value, lam, ray, _ = simplex_solve(G, h, c, lo, hi, 0)
        assert status == (0 if feasible else 1)
        if feasible:
            worst = max(worst, abs(value - best))
            assert abs(value - best) <= 1e-7
    elapsed = time.time() - t0
    _report(2, elapsed < 30.0,
            f"200 LPs match enumeration; worst value gap {worst:.2e}, "
            f"{elapsed:.1f}s")


# ---------------------------------------------------------------------------
# 3. bundle-level termination bound and level invariants
# ---------------------------------------------------------------------------

def test_criterion_03_bl_termination_bound():
    from conftest import deterministic_box_model
    t0 = time.time()
    rng = np.random.default_rng(2024)
    max_ratio = 0.0
    for trial in range(50):
        n = int(rng.integers(2, 6))
        y_lo = np.full(n, -1.0)
        y_hi = np.full(n, 1.0)
        center = rng.uniform(-0.45, 0.45, size=n)
        half = rng.uniform(0.15, 0.5, size=n)
        star_lo = np.maximum(center - half, -0.95)
        star_hi = np.minimum(center + half, 0.95)
        rho_star = float(np.min(0.5 * (star_hi - star_lo)))
        model = deterministic_box_model(y_lo, y_hi, star_lo, star_hi)
        ball = bounding_ball(y_lo, y_hi)
        bound = 32.0 * ball.radius ** 2 / rho_star ** 2 + 1.0
        oracle = SamplingOracle(OracleConfig(epsilon=0.2, delta=0.1,
                                             seed=trial))
        res = run_bl(model, oracle, ball, budget=bl_call_bound(ball.radius,
                                                               rho_star))
        assert res.candidate
        assert res.calls <= bound
        max_ratio = max(max_ratio, res.calls / bound)
        deltas = [r.delta for r in res.log if r.delta is not None]
        for a, b in zip(deltas, deltas[1:]):
            assert b >= a - 1e-8
        for dv in deltas:
            assert dv <= -rho_star + 1e-6
    elapsed = time.time() - t0
    _report(3, elapsed < 120.0,
            f"50 instances terminate within the call bound (max used "
            f"{100 * max_ratio:.1f}% of it); level values monotone and below "
            f"-rho_*; {elapsed:.1f}s")


# ---------------------------------------------------------------------------
# 4. infeasibility certificate
# ---------------------------------------------------------------------------

def test_criterion_04_infeasibility_certificate():
    t0 = time.time()
    rng = np.random.default_rng(44)
    for trial in range(20):
        n = int(rng.integers(2, 5))
        a = rng.normal(size=n)
        a /= np.linalg.norm(a)
        cpoint = rng.normal(size=n) * 0.3
        gap = 0.2 + rng.random()
        # stage 1: a.y >= a.c + gap; stage 2: a.y <= a.c - gap -> empty
        sp1 = StagePolyhedron(A=-a[None, :], B=np.zeros((1, 0)),
                              C=np.zeros((1, 0)),
                              d=np.array([-(a @ cpoint) - gap]))
        sp2 = StagePolyhedron(A=a[None, :], B=np.zeros((1, 0)),
                              C=np.zeros((1, 0)),
                              d=np.array([(a @ cpoint) - gap]))
        lo = np.full(n, -3.0)
        hi = np.full(n, 3.0)
        model = SemiStochasticModel(
            n=n, K=2, Y=box_poly(lo, hi),
            stage_builder=lambda t, xi, s1=sp1, s2=sp2: s1 if t == 1 else s2,
            sampler=lambda g: Scenario(stages=(np.zeros(1), np.zeros(1))),
            box_lo=lo, box_hi=hi)
        oracle = SamplingOracle(OracleConfig(epsilon=0.2, delta=0.1,
                                             seed=trial))
        res = run_bl(model, oracle, bounding_ball(lo, hi), budget=100)
        assert res.status == "infeasible"
        assert res.delta_r >= -1e-8
    elapsed = time.time() - t0
    _report(4, elapsed < 30.0,
            f"20 empty instances certified infeasible (delta_R >= -1e-8); "
            f"{elapsed:.1f}s")


# ---------------------------------------------------------------------------
# 5. sample schedule
# ---------------------------------------------------------------------------

def test_criterion_05_sample_schedule():
    fixed = OracleConfig(epsilon=0.05, delta=0.01, schedule="fixed",
                         fixed_calls=129)
    adaptive = OracleConfig(epsilon=0.05, delta=0.01, schedule="adaptive")
    vals = (sample_size(fixed, 1), sample_size(adaptive, 1),
            sample_size(adaptive, 10))
    _report(5, vals == (190, 103, 195),
            f"strict-ceiling sizes {vals} == (190, 103, 195)")


# ---------------------------------------------------------------------------
# 6. reliability guarantee
# ---------------------------------------------------------------------------

def test_criterion_06_reliability():
    t0 = time.time()
    epsilon, delta = 0.2, 0.1
    runs = 100
    bad = 0
    for seed in range(runs):
        model = threshold_model()
        oracle = SamplingOracle(OracleConfig(epsilon=epsilon, delta=delta,
                                             schedule="adaptive", seed=seed))
        res = run_bl(model, oracle, bounding_ball(model.box_lo, model.box_hi),
                     budget=400)
        if not res.candidate or (1.0 - float(res.y[0])) > epsilon:
            bad += 1
    limit = delta + 3.0 * math.sqrt(delta * (1.0 - delta) / runs)
    elapsed = time.time() - t0
    _report(6, bad / runs <= limit and elapsed < 300.0,
            f"{bad}/{runs} runs exceeded the true gap tolerance "
            f"(limit {limit:.3f}); {elapsed:.1f}s")


# ---------------------------------------------------------------------------
# 7. bisection optimality guarantee
# ---------------------------------------------------------------------------

def test_criterion_07_bisection_optimality():
    from test_bisection import toy_2d
    t0 = time.time()
    rho = 0.02
    kappa = 0.1
    s_star = 0.5 + 2.0 * rho  # analytic smallest rho-stable target
    hits = 0
    always_below_target = True
    for seed in range(50):
        out = minimize(toy_2d(), BisectionConfig(
            objective=[1.0, 0.0], kappa_opt=kappa, rho=rho, epsilon=0.2,
            delta=0.1, seed=seed))
        if not out.solved:
            continue
        fy = float(out.y_hat[0])
        if fy <= s_star + kappa + 1e-6:
            hits += 1
        smallest_target = min(s.phi for s in out.steps if s.outcome == "A")
        if fy > smallest_target + 1e-8:
            always_below_target = False
    elapsed = time.time() - t0
    _report(7, hits >= 45 and always_below_target and elapsed < 300.0,
            f"{hits}/50 runs within s_* + kappa; targets respected: "
            f"{always_below_target}; {elapsed:.1f}s")


# ---------------------------------------------------------------------------
# 8. inventory end to end
# ---------------------------------------------------------------------------

def test_criterion_08_inventory_end_to_end():
    t0 = time.time()
    instance = default_instance()
    model = build_model(instance)
    out = minimize(model, BisectionConfig(
        objective=objective_vector(instance), kappa_opt=0.05, rho=1.0,
        epsilon=0.05, delta=0.01, seed=11, budget_override=200))
    assert len(out.steps) == 10, "expected a 10-step bisection"
    assert out.solved
    report, _ = validate_decision(instance, out.y_hat, 1000, seed=99)
    elapsed = time.time() - t0
    bound = 0.05 + 3.0 * math.sqrt(0.05 * 0.95 / 1000.0)
    ok = (report.failure_rate <= bound
          and report.n_cost_violations == 0
          and (report.cost_max is None or report.cost_max <= report.omega + 1e-6)
          and report.mean_excess_over_utopian is not None
          and elapsed < 900.0)
    _report(8, ok,
            f"10-step bisection bound {out.bound:.4f}; failure rate "
            f"{report.failure_rate:.4f} <= {bound:.4f}; max cost "
            f"{report.cost_max:.4f} <= omega {report.omega:.4f}; mean excess "
            f"over clairvoyant {100 * report.mean_excess_over_utopian:.1f}%; "
            f"{elapsed:.0f}s")


# ---------------------------------------------------------------------------
# 9. remodeling
# ---------------------------------------------------------------------------

def test_criterion_09_remodeling():
    from test_remodel import random_staged, toy_staged
    t0 = time.time()
    from ssdm.lp import _solve_raw
    count = 0
    for seed in range(20):
        staged = random_staged(seed)
        basis = DecisionBasis.constants(staged.K + 1)
        box = coefficient_box(staged, basis, np.full(staged.split.n, -3.0),
                              np.full(staged.split.n, 3.0))
        lifted = lift(staged, basis, box)
        rng = np.random.default_rng(seed + 5000)
        for i in range(5):
            from ssdm.rng import substream
            base_s = staged.sampler(substream(seed, 1, i))
            scen = Scenario(stages=tuple(base_s.stages) + (base_s.stages[-1],))
            y = rng.uniform(-3.0, 3.0, size=staged.split.n)
            chi = embed_constant(staged, basis, y)
            for t in range(1, staged.K + 1):
                sp = staged.w_builder(t, scen.stage(t))
                y_rev = np.concatenate([
                    y[staged.split.offset(s):staged.split.offset(s)
                      + staged.split.dim(s)] for s in range(t + 1)])
                res = _solve_raw(sp.B, sp.d - sp.A @ y_rev, np.zeros(sp.n_x),
                                 sp.x_lo if sp.x_lo is not None
                                 else np.full(sp.n_x, -np.inf),
                                 sp.x_hi if sp.x_hi is not None
                                 else np.full(sp.n_x, np.inf))
                got = stage_feasible(lifted, t, scen.stage(t), chi).feasible
                assert res.optimal == got
                count += 1
    assert count >= 100
    # strict enlargement on the two-scenario toy
    staged = toy_staged()
    basis = DecisionBasis.affine(2)
    lifted = lift(staged, basis, coefficient_box(staged, basis, [-2.0], [2.0]))
    chi_affine = np.array([0.0, 1.0])
    both_ok = all(
        stage_feasible(lifted, 1, Scenario(stages=(np.array([d]),
                                                   np.array([d]))).stage(1),
                       chi_affine).feasible
        for d in (0.0, 1.0))
    const_half_fails = not stage_feasible(
        lifted, 1, Scenario(stages=(np.array([1.0]), np.array([1.0]))).stage(1),
        np.array([0.5, 0.0])).feasible
    elapsed = time.time() - t0
    _report(9, both_ok and const_half_fails and elapsed < 60.0,
            f"{count} identity-lift checks agree; affine rule feasible where "
            f"constants are not; {elapsed:.1f}s")


# ---------------------------------------------------------------------------
# 10. determinism
# ---------------------------------------------------------------------------

def _run_cli(args, out_dir, extra_env=None):
    env = dict(os.environ)
    env.pop("SSDM_PURE_PYTHON", None)
    if extra_env:
        env.update(extra_env)
    cmd = [sys.executable, "-m", "ssdm.cli"] + args + ["--out-dir", str(out_dir)]
    proc = subprocess.run(cmd, capture_output=True, env=env)
    assert proc.returncode in (0, 2, 3), proc.stderr.decode()
    return sorted(os.listdir(out_dir))


def test_criterion_10_determinism(tmp_path):
    from test_cli import small_solvable, write_instance
    t0 = time.time()
    inst = tmp_path / "instance.json"
    write_instance(inst, small_solvable())
    base = ["minimize", "--instance", str(inst), "--epsilon", "0.15",
            "--delta", "0.1", "--kappa-opt", "0.3", "--budget", "150",
            "--seed", "4"]
    envs = [{"OMP_NUM_THREADS": "1", "OPENBLAS_NUM_THREADS": "1"},
            {"OMP_NUM_THREADS": "1", "OPENBLAS_NUM_THREADS": "1"},
            {"OMP_NUM_THREADS": "4", "OPENBLAS_NUM_THREADS": "4"}]
    listings = []
    contents = []
    for i, env in enumerate(envs):
        out = tmp_path / f"run{i}"
        out.mkdir()
        files = _run_cli(base, out, env)
        listings.append(files)
        contents.append({f: (out / f).read_bytes() for f in files})
    assert listings[0] == listings[1] == listings[2]
    assert contents[0] == contents[1], "same-env reruns differ"
    assert contents[0] == contents[2], "thread-count variation changed artifacts"

    # validate command determinism as well
    dec = tmp_path / "run0" / "decision.json"
    vbase = ["validate", "--instance", str(inst), "--decision", str(dec),
             "--samples", "150", "--seed", "6"]
    vcontents = []
    for i, env in enumerate(envs):
        out = tmp_path / f"val{i}"
        out.mkdir()
        files = _run_cli(vbase, out, env)
        vcontents.append({f: (out / f).read_bytes() for f in files})
    assert vcontents[0] == vcontents[1] == vcontents[2]
    elapsed = time.time() - t0
    _report(10, True,
            f"minimize + validate artifacts byte-identical across reruns and "
            f"1 vs 4 BLAS threads; {elapsed:.1f}s")
