"""Minimizing a linear objective over reliable strategic decisions by
bisection on the objective value.

Each step k targets the midpoint phi_k of the current localizer segment,
appends the budget row f.y <= phi_k to the static set, and runs a cutting
engine with a per-step call budget.  A stuck query (candidate) makes the
step productive and keeps the lower half; an infeasibility certificate or an
exhausted budget keeps the upper half.  One oracle owns the whole run: its
call counter and adaptive sample schedule persist across steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engines import bl_call_bound, ellipsoid_call_bound, run_bl, run_ellipsoid
from .errors import UnboundedObjective
from .geometry import bounding_ball
from .lp import LinearProgram, solve_lp
from .model import SemiStochasticModel
from .oracle import OracleConfig, SamplingOracle, strict_ceiling


@dataclass(frozen=True)
class BisectionConfig:
    """Objective and tolerances for one minimize run.

    kappa_opt is the optimality tolerance (final localizer width), rho the
    stability tolerance feeding the per-step call budget unless
    budget_override fixes it directly.
    """

    objective: np.ndarray
    kappa_opt: float
    rho: float
    epsilon: float
    delta: float
    engine: str = "bl"
    schedule: str = "adaptive"
    seed: int = 0
    budget_override: int | None = None

    def __post_init__(self):
        f = np.asarray(self.objective, dtype=float).reshape(-1)
        if not np.all(np.isfinite(f)) or float(np.linalg.norm(f)) <= 0.0:
            raise ValueError("objective must be finite and nonzero")
        object.__setattr__(self, "objective", f)
        if self.kappa_opt <= 0.0 or self.rho <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.engine not in ("bl", "ellipsoid"):
            raise ValueError("engine must be 'bl' or 'ellipsoid'")


@dataclass(frozen=True)
class StepRecord:
    """One bisection step: target, A/B/C outcome, localizer after the step,
    and the cumulative oracle call count."""

    k: int
    phi: float
    outcome: str            # "A" productive, "B" certificate, "C" budget out
    lo: float
    hi: float
    calls_total: int
    samples_total: int
    engine_status: str


@dataclass(frozen=True)
class BisectionOutcome:
    solved: bool
    y_hat: np.ndarray | None
    bound: float | None
    steps: tuple
    calls: int
    samples: int
    objective_range: tuple
    iteration_log: tuple = ()


def objective_range(model: SemiStochasticModel, f) -> tuple:
    """[min, max] of f.y over the static set's lifted representation."""
    f = np.asarray(f, dtype=float).reshape(-1)
    G = np.hstack([model.Y.A, model.Y.C])
    cexp = np.concatenate([f, np.zeros(model.Y.n_aux)])
    lo_res = solve_lp(LinearProgram(c=cexp, G=G, h=model.Y.d))
    hi_res = solve_lp(LinearProgram(c=-cexp, G=G, h=model.Y.d))
    if lo_res.status == "unbounded" or hi_res.status == "unbounded":
        raise UnboundedObjective("objective unbounded over Y; boundedness "
                                 "assumption violated")
    if not (lo_res.optimal and hi_res.optimal):
        raise UnboundedObjective("static set Y is empty or degenerate")
    return float(lo_res.value), float(-hi_res.value)


def bisection_steps(width: float, kappa_opt: float) -> int:
    """Step count: smallest integer strictly above log2(width / kappa)."""
    return strict_ceiling(math.log2(width / kappa_opt))


def minimize(model: SemiStochasticModel, config: BisectionConfig) -> BisectionOutcome:
    f = config.objective
    if f.size != model.n:
        raise ValueError("objective dimension does not match the model")
    rng_lo, rng_hi = objective_range(model, f)
    width = rng_hi - rng_lo
    if width <= 0.0:
        raise ValueError("objective range is a point; nothing to bisect")
    L = bisection_steps(width, config.kappa_opt)

    ball = bounding_ball(model.box_lo, model.box_hi)
    if config.budget_override is not None:
        budget = int(config.budget_override)
    elif config.engine == "bl":
        budget = bl_call_bound(ball.radius, config.rho)
    else:
        budget = ellipsoid_call_bound(model.n, ball.radius, config.rho)

    oracle = SamplingOracle(OracleConfig(
        epsilon=config.epsilon, delta=config.delta, schedule=config.schedule,
        fixed_calls=budget * max(L, 1) if config.schedule == "fixed" else None,
        seed=config.seed))

    lo = rng_lo
    seg = width  # exact halving: multiply by 0.5 each step
    steps = []
    iter_log = []
    y_hat = None
    bound = None
    for k in range(1, L + 1):
        phi = lo + 0.5 * seg
        cut_model = model.with_extra_y_row(f, phi)
        if config.engine == "bl":
            res = run_bl(cut_model, oracle, ball, budget)
        else:
            res = run_ellipsoid(cut_model, oracle, ball,
                                rho=config.rho, budget_override=budget)
        iter_log.extend(res.log)
        seg *= 0.5
        if res.candidate:
            outcome = "A"           # productive: keep the lower half
            y_hat = res.y
            bound = phi
        else:
            outcome = "B" if res.status == "infeasible" else "C"
            lo = lo + seg           # keep the upper half
        steps.append(StepRecord(
            k=k, phi=phi, outcome=outcome, lo=lo, hi=lo + seg,
            calls_total=oracle.calls_made, samples_total=oracle.samples_drawn,
            engine_status=res.status))
    return BisectionOutcome(
        solved=y_hat is not None, y_hat=y_hat, bound=bound,
        steps=tuple(steps), calls=oracle.calls_made,
        samples=oracle.samples_drawn, objective_range=(rng_lo, rng_hi),
        iteration_log=tuple(iter_log))
