"""Cutting-scheme engines driving the oracle to a stuck point.

Both engines query the oracle, accumulate the returned unit-gradient cuts in
a bundle, and stop at the first stuck query (a candidate decision).  The
bundle-level engine additionally tracks the level value Delta_s = min over
the enclosing ball of the running cut max: the sequence is nondecreasing,
stays below -rho_* while a rho_*-ball fits inside the feasible set, and a
nonnegative value certifies that no implementable decision with an interior
exists (so the engine reports infeasibility).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ballprog import Bundle, min_max_over_ball, project_to_level
from .errors import ShapeDegenerate
from .geometry import Ball, Separator
from .model import SemiStochasticModel

INFEASIBLE_GUARD = -1e-8  # Delta at or above this certifies infeasibility

BL_CONST = 32.0       # call bound 32 R^2 / rho^2 + 1
ELLIPSOID_CONST = 2.0  # call bound 2 n^2 ln(1 + R/rho)


@dataclass(frozen=True)
class IterationRecord:
    """One engine iteration: global call index, level value (bundle-level
    engines only), scheduled samples actually drawn, and the outcome."""

    s: int
    delta: float | None
    n_samples: int
    outcome: str


@dataclass(frozen=True)
class EngineResult:
    """status: "candidate" (oracle got stuck at y), "infeasible" (the bundle's
    level value delta_r turned nonnegative, certifying that no implementable
    decision with an interior exists), or "budget_exhausted" (delta_r then
    holds the last level value, if any)."""

    status: str
    y: np.ndarray | None
    calls: int
    samples: int
    delta_r: float | None
    bundle: Bundle
    log: tuple

    @property
    def candidate(self) -> bool:
        return self.status == "candidate"


def bl_call_bound(radius: float, rho: float) -> int:
    """Bundle-level call budget 32 R^2 / rho^2 + 1 for a stability radius rho."""
    return int(math.floor(BL_CONST * radius * radius / (rho * rho))) + 1


def ellipsoid_call_bound(n: int, radius: float, rho: float) -> int:
    """Ellipsoid call budget ceil(2 n^2 ln(1 + R/rho))."""
    return int(math.ceil(ELLIPSOID_CONST * n * n * math.log1p(radius / rho)))


def _outcome_tag(out) -> str:
    if out.stuck:
        return "stuck"
    if out.source == "membership":
        return "cut:membership"
    return f"cut:stage:{out.stage}"


def run_bl(model: SemiStochasticModel, oracle, ball: Ball, budget: int) -> EngineResult:
    """Bundle-level search from the ball center.

    Each cut updates Delta = min over the ball of the cut max; the next
    iterate is the metric projection of the current one onto the half-level
    set {f <= Delta/2} inside the ball.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    bundle = Bundle()
    log = []
    y = ball.center.copy()
    samples0 = getattr(oracle, "samples_drawn", 0)
    delta = None
    for call in range(1, budget + 1):
        out = oracle.query(model, y)
        drawn = getattr(oracle, "samples_drawn", 0) - samples0
        if out.stuck:
            log.append(IterationRecord(out.call_index, delta, out.samples_used, "stuck"))
            return EngineResult("candidate", y, call, drawn, delta, bundle, tuple(log))
        bundle.append(out.separator)
        delta, _ = min_max_over_ball(bundle, ball)
        log.append(IterationRecord(out.call_index, delta, out.samples_used,
                                   _outcome_tag(out)))
        if delta >= INFEASIBLE_GUARD:
            return EngineResult("infeasible", None, call, drawn, delta, bundle,
                                tuple(log))
        y = project_to_level(y, bundle, 0.5 * delta, ball)
    return EngineResult("budget_exhausted", None, budget,
                        getattr(oracle, "samples_drawn", 0) - samples0,
                        delta, bundle, tuple(log))


@dataclass(frozen=True)
class EllipsoidState:
    """Search ellipsoid {y : (y - center).P^{-1}.(y - center) <= 1}."""

    center: np.ndarray
    shape: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float).reshape(-1)
        P = np.asarray(self.shape, dtype=float)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "shape", P)


def _chol_ok(P: np.ndarray) -> bool:
    """Deterministic dense Cholesky test (no LAPACK)."""
    n = P.shape[0]
    scale = max(float(np.max(np.abs(np.diag(P)))), 1e-300)
    L = np.zeros((n, n))
    for j in range(n):
        s = P[j, j] - float(L[j, :j] @ L[j, :j])
        if s <= 1e-16 * scale or not np.isfinite(s):
            return False
        L[j, j] = math.sqrt(s)
        if j + 1 < n:
            L[j + 1:, j] = (P[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return True


def _repair_shape(P: np.ndarray) -> np.ndarray:
    """Symmetrize and floor the spectrum by escalating diagonal loading."""
    P = 0.5 * (P + P.T)
    if _chol_ok(P):
        return P
    scale = max(float(np.max(np.abs(P))), 1e-300)
    for eps in (1e-14, 1e-12, 1e-9, 1e-6):
        Q = P + eps * scale * np.eye(P.shape[0])
        if _chol_ok(Q):
            return Q
    raise ShapeDegenerate("ellipsoid shape matrix is no longer positive definite")


def ellipsoid_cut(state: EllipsoidState, sep: Separator) -> EllipsoidState:
    """Central cut with the halfspace {f(y) <= 0}, f the separator at the
    current center; returns the minimum-volume enclosing ellipsoid of the
    retained half."""
    a = sep.a
    n = a.size
    c = state.center
    P = state.shape
    if n == 1:
        r2 = float(P[0, 0])
        r = math.sqrt(max(r2, 0.0))
        c2 = c - 0.5 * r * a
        return EllipsoidState(center=c2, shape=np.array([[0.25 * r2]]))
    Pa = np.einsum("ij,j->i", P, a)
    aPa = float(a @ Pa)
    if not (aPa > 0.0) or not math.isfinite(aPa):
        P = _repair_shape(P)
        Pa = np.einsum("ij,j->i", P, a)
        aPa = float(a @ Pa)
        if not (aPa > 0.0):
            raise ShapeDegenerate("cut direction has nonpositive ellipsoid norm")
    b = Pa / math.sqrt(aPa)
    c2 = c - b / (n + 1.0)
    P2 = (n * n / (n * n - 1.0)) * (P - (2.0 / (n + 1.0)) * np.outer(b, b))
    P2 = 0.5 * (P2 + P2.T)
    if not _chol_ok(P2):
        P2 = _repair_shape(P2)
    return EllipsoidState(center=c2, shape=P2)


def run_ellipsoid(model: SemiStochasticModel, oracle, ball: Ball,
                  rho: float | None = None,
                  budget_override: int | None = None) -> EngineResult:
    """Central-cut ellipsoid search started from the enclosing ball.

    Stops at the first stuck query; otherwise runs its call budget out.  The
    level value is a bundle-level artifact, so no infeasibility certificate
    is raised mid-run; the accumulated bundle's final value is still reported
    with the exhausted result (nonnegative values are conclusive there too).
    """
    n = ball.center.size
    if budget_override is not None:
        budget = int(budget_override)
    else:
        if rho is None or rho <= 0.0:
            raise ValueError("run_ellipsoid needs rho > 0 or budget_override")
        budget = ellipsoid_call_bound(n, ball.radius, rho)
    if budget < 1:
        raise ValueError("budget must be >= 1")
    state = EllipsoidState(center=ball.center.copy(),
                           shape=ball.radius ** 2 * np.eye(n))
    bundle = Bundle()
    log = []
    samples0 = getattr(oracle, "samples_drawn", 0)
    for call in range(1, budget + 1):
        out = oracle.query(model, state.center)
        drawn = getattr(oracle, "samples_drawn", 0) - samples0
        if out.stuck:
            log.append(IterationRecord(out.call_index, None, out.samples_used, "stuck"))
            return EngineResult("candidate", state.center.copy(), call, drawn,
                                None, bundle, tuple(log))
        bundle.append(out.separator)
        log.append(IterationRecord(out.call_index, None, out.samples_used,
                                   _outcome_tag(out)))
        state = ellipsoid_cut(state, out.separator)
    delta_r = None
    if len(bundle):
        delta_r, _ = min_max_over_ball(bundle, ball)
    return EngineResult("budget_exhausted", None, budget,
                        getattr(oracle, "samples_drawn", 0) - samples0,
                        delta_r, bundle, tuple(log))
