"""The semi-stochastic model: a static set Y, per-stage scenario sets, and
the machinery turning stage infeasibility into separators.

A strategic decision y is implementable when y is in Y and every stage set
{x : (y, x) feasible for stage t under scenario data xi_t} is nonempty for
all realizations; the library relaxes "all realizations" to "probability at
least 1 - epsilon" through sampling (see :mod:`ssdm.oracle`).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import ModelContractViolation, ZeroGradient
from .geometry import PolyhedralRep, Separator, StagePolyhedron, normalize_separator
from .lp import _solve_raw, lp_feasible
from .rng import TAG_EPSILON, substream


@dataclass(frozen=True)
class Scenario:
    """Per-stage uncertain data; stage t's vector remembers stages 1..t-1
    by the builder's own convention (commonly a prefix concatenation)."""

    stages: tuple

    def __post_init__(self):
        stages = tuple(np.asarray(s, dtype=float).reshape(-1) for s in self.stages)
        if not stages:
            raise ValueError("scenario needs at least one stage")
        for s in stages:
            if s.size and not np.all(np.isfinite(s)):
                raise ValueError("scenario data must be finite")
        object.__setattr__(self, "stages", stages)

    @property
    def K(self) -> int:
        return len(self.stages)

    def stage(self, t: int) -> np.ndarray:
        if not 1 <= t <= self.K:
            raise IndexError(f"stage {t} outside 1..{self.K}")
        return self.stages[t - 1]


@dataclass(frozen=True)
class StageCheck:
    """Outcome of one stage feasibility test."""

    feasible: bool
    t: int
    x: np.ndarray | None = None
    farkas: np.ndarray | None = None
    bound_term: float = 0.0


@dataclass(frozen=True)
class SemiStochasticModel:
    """Model data: dimensions, static set, stage builders, and sampler.

    stage_builder(t, xi_t) must return the StagePolyhedron of stage t for the
    given scenario data; sampler(rng) must return a Scenario with K stages.
    box_lo/box_hi bound Y (they feed the enclosing ball E1).
    """

    n: int
    K: int
    Y: PolyhedralRep
    stage_builder: Callable[[int, np.ndarray], StagePolyhedron]
    sampler: Callable[[np.random.Generator], Scenario]
    box_lo: np.ndarray
    box_hi: np.ndarray
    check_nonempty: bool = True

    def __post_init__(self):
        if self.Y.n != self.n:
            raise ValueError("Y dimension does not match n")
        lo = np.asarray(self.box_lo, dtype=float).reshape(-1)
        hi = np.asarray(self.box_hi, dtype=float).reshape(-1)
        if lo.size != self.n or hi.size != self.n:
            raise ValueError("box bounds must have length n")
        object.__setattr__(self, "box_lo", lo)
        object.__setattr__(self, "box_hi", hi)
        if self.check_nonempty:
            res = lp_feasible(np.hstack([self.Y.A, self.Y.C]), self.Y.d)
            if not res.optimal:
                raise ModelContractViolation("the static set Y is empty")

    def with_extra_y_row(self, row: np.ndarray, rhs: float) -> "SemiStochasticModel":
        """Model with one additional static constraint row.y <= rhs."""
        row = np.asarray(row, dtype=float).reshape(1, -1)
        Y2 = PolyhedralRep(
            A=np.vstack([self.Y.A, row]),
            C=np.vstack([self.Y.C, np.zeros((1, self.Y.n_aux))]),
            d=np.append(self.Y.d, float(rhs)),
        )
        return replace(self, Y=Y2, check_nonempty=False)


def stage_feasible(model: SemiStochasticModel, t: int, xi_t, y) -> StageCheck:
    """Does stage t admit a local decision at y under data xi_t?

    Solves the phase-one LP on {(x, w) : B x + C w <= d - A y} within the
    stage bounds; infeasibility yields the Farkas row multipliers plus the
    constant contributed by active variable bounds.
    """
    sp = model.stage_builder(t, xi_t)
    y = np.asarray(y, dtype=float)
    rhs = sp.d - np.einsum("ij,j->i", sp.A, y)
    nx, nw = sp.n_x, sp.n_w
    G = np.hstack([sp.B, sp.C])
    lo = np.full(nx + nw, -np.inf)
    hi = np.full(nx + nw, np.inf)
    if sp.x_lo is not None:
        lo[:nx] = sp.x_lo
    if sp.x_hi is not None:
        hi[:nx] = sp.x_hi
    if sp.w_lo is not None:
        lo[nx:] = sp.w_lo
    if sp.w_hi is not None:
        hi[nx:] = sp.w_hi
    res = _solve_raw(G, rhs, np.zeros(nx + nw), lo, hi)
    if res.optimal:
        return StageCheck(feasible=True, t=t, x=res.z[:nx])
    return StageCheck(feasible=False, t=t, farkas=res.farkas,
                      bound_term=res.bound_term)


def separator_from_infeasibility(model: SemiStochasticModel, t: int, xi_t, y,
                                 farkas, bound_term: float = 0.0) -> Separator:
    """Convert a stage Farkas certificate at y into a unit-gradient separator.

    With g = A.T lam and gamma = lam.d plus the folded bound terms, f(y') =
    (g.y' - gamma)/|g| is nonnegative at the query and nonpositive on the
    stage's feasible y-set.  A vanishing g would certify the stage set itself
    empty, which contradicts the model contract.
    """
    sp = model.stage_builder(t, xi_t)
    lam = np.asarray(farkas, dtype=float)
    g = np.einsum("ij,i->j", sp.A, lam)
    gamma = float(lam @ sp.d) + float(bound_term)
    try:
        return normalize_separator(g, gamma)
    except ZeroGradient as exc:
        raise ModelContractViolation(
            f"stage {t} produced a y-free infeasibility certificate; "
            "the stage set is empty for some scenario data") from exc


def membership_or_separator(model: SemiStochasticModel, y) -> Separator | None:
    """None when y is in Y; otherwise a separator of y and Y."""
    y = np.asarray(y, dtype=float)
    rhs = model.Y.d - np.einsum("ij,j->i", model.Y.A, y)
    res = lp_feasible(model.Y.C, rhs)
    if res.optimal:
        return None
    lam = res.farkas
    g = np.einsum("ij,i->j", model.Y.A, lam)
    gamma = float(lam @ model.Y.d)
    try:
        return normalize_separator(g, gamma)
    except ZeroGradient as exc:
        raise ModelContractViolation(
            "membership certificate does not involve y; Y is empty") from exc


def scenario_fails(model: SemiStochasticModel, y, scenario: Scenario) -> bool:
    """True when some stage of the scenario admits no local decision at y."""
    for t in range(1, model.K + 1):
        if not stage_feasible(model, t, scenario.stage(t), y).feasible:
            return True
    return False


def epsilon_hat(model: SemiStochasticModel, y, n_samples: int, seed: int) -> float:
    """Monte Carlo estimate of the implementability gap probability at y.

    Points outside Y count as failing every scenario, so the estimate is 1.0
    off Y; this keeps validation total (the stage-only definition does not
    cover such points).  Deterministic given the seed.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    y = np.asarray(y, dtype=float)
    if membership_or_separator(model, y) is not None:
        return 1.0
    failures = 0
    for i in range(n_samples):
        scen = model.sampler(substream(seed, TAG_EPSILON, i))
        if scenario_fails(model, y, scen):
            failures += 1
    return failures / n_samples
