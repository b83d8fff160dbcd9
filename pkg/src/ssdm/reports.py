"""Monte Carlo validation of a strategic decision on an inventory instance.

Fresh scenarios come from a stream tag disjoint from all solve-time draws.
Per scenario the greedy local policy runs the horizon; a scenario counts as
a failure when some stage admits no order or when the realized total expense
overruns the total budget (the latter is exactly terminal-stage
infeasibility once the actual stages pass, and is also reported separately).
Cost statistics cover the non-failure scenarios; the clairvoyant comparison
is informational.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ClairvoyantInfeasible
from .inventory import InventoryInstance, StrategicDecisionView, \
    greedy_local_policy, sample_scenario, utopian_cost
from .rng import TAG_VALIDATE, substream

BUDGET_SLACK = 1e-6


@dataclass(frozen=True)
class ScenarioResult:
    index: int
    greedy_ok: bool
    within_budget: bool
    failed_stage: int | None
    total_cost: float | None
    utopian: float | None
    excess: float | None


@dataclass(frozen=True)
class ValidationReport:
    n_scenarios: int
    n_failures: int
    failure_rate: float
    cost_min: float | None
    cost_mean: float | None
    cost_median: float | None
    cost_max: float | None
    omega: float
    n_cost_violations: int
    mean_excess_over_utopian: float | None
    n_clairvoyant_infeasible: int

    def to_dict(self) -> dict:
        return {
            "format_version": 1,
            "kind": "validation_report",
            "n_scenarios": self.n_scenarios,
            "n_failures": self.n_failures,
            "failure_rate": self.failure_rate,
            "cost_min": self.cost_min,
            "cost_mean": self.cost_mean,
            "cost_median": self.cost_median,
            "cost_max": self.cost_max,
            "omega": self.omega,
            "n_cost_violations": self.n_cost_violations,
            "mean_excess_over_utopian": self.mean_excess_over_utopian,
            "n_clairvoyant_infeasible": self.n_clairvoyant_infeasible,
        }


def _median(sorted_vals: np.ndarray) -> float:
    """Midpoint-of-two rule for even counts."""
    n = sorted_vals.size
    if n % 2 == 1:
        return float(sorted_vals[n // 2])
    return float(0.5 * (sorted_vals[n // 2 - 1] + sorted_vals[n // 2]))


def validate_decision(instance: InventoryInstance, y, n_scenarios: int,
                      seed: int, with_utopian: bool = True,
                      enforce_stage_caps: bool = True):
    """Run the greedy policy on fresh scenarios; returns (report, rows)."""
    if n_scenarios < 1:
        raise ValueError("need at least one scenario")
    view = StrategicDecisionView(instance, y)
    omega = view.total_budget
    rows = []
    n_fail = 0
    n_overrun = 0
    n_clair_bad = 0
    costs = []
    excesses = []
    for i in range(n_scenarios):
        scen = sample_scenario(instance, substream(seed, TAG_VALIDATE, i))
        run = greedy_local_policy(instance, view.y, scen)
        if not run.feasible:
            n_fail += 1
            rows.append(ScenarioResult(i, False, False, run.failed_stage,
                                       None, None, None))
            continue
        cost = float(run.total_cost)
        within = cost <= omega + BUDGET_SLACK
        if not within:
            n_overrun += 1
            n_fail += 1  # terminal-stage infeasibility
        utop = None
        excess = None
        if with_utopian:
            try:
                utop = utopian_cost(instance, scen,
                                    enforce_stage_caps=enforce_stage_caps)
                if within and abs(utop) > 1e-12:
                    excess = cost / utop - 1.0
                    excesses.append(excess)
            except ClairvoyantInfeasible:
                n_clair_bad += 1
        if within:
            costs.append(cost)
        rows.append(ScenarioResult(i, True, within, None, cost, utop, excess))
    costs_arr = np.sort(np.array(costs)) if costs else None
    report = ValidationReport(
        n_scenarios=n_scenarios,
        n_failures=n_fail,
        failure_rate=n_fail / n_scenarios,
        cost_min=float(costs_arr[0]) if costs else None,
        cost_mean=float(np.mean(costs_arr)) if costs else None,
        cost_median=_median(costs_arr) if costs else None,
        cost_max=float(costs_arr[-1]) if costs else None,
        omega=omega,
        n_cost_violations=n_overrun,
        mean_excess_over_utopian=float(np.mean(excesses)) if excesses else None,
        n_clairvoyant_infeasible=n_clair_bad,
    )
    return report, rows
