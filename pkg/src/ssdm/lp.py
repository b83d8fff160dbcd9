"""Linear programming with exact status classification and Farkas certificates.

All subproblems in the library funnel through :func:`solve_lp` /
:func:`lp_feasible`.  The pivoting itself lives in the kernel selected by
:mod:`ssdm.backend`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .backend import simplex_solve
from .errors import NumericalFailure

_FARKAS_MARGIN = 1e-9


@dataclass(frozen=True)
class LinearProgram:
    """minimize c.z  subject to  G z <= h,  lo <= z <= hi."""

    c: np.ndarray
    G: np.ndarray
    h: np.ndarray
    lo: np.ndarray | None = None
    hi: np.ndarray | None = None

    def __post_init__(self):
        c = np.ascontiguousarray(self.c, dtype=float).reshape(-1)
        G = np.ascontiguousarray(self.G, dtype=float)
        if G.ndim != 2 or G.shape[1] != c.size:
            raise ValueError("G must be a matrix with one column per variable")
        h = np.ascontiguousarray(self.h, dtype=float).reshape(-1)
        if h.size != G.shape[0]:
            raise ValueError("h size must match the rows of G")
        if not np.all(np.isfinite(c)):
            raise ValueError("objective entries must be finite")
        if not (np.all(np.isfinite(G)) and np.all(np.isfinite(h))):
            raise ValueError("constraint data must be finite")
        lo = self.lo
        hi = self.hi
        lo = np.full(c.size, -np.inf) if lo is None \
            else np.ascontiguousarray(lo, dtype=float).reshape(-1)
        hi = np.full(c.size, np.inf) if hi is None \
            else np.ascontiguousarray(hi, dtype=float).reshape(-1)
        if lo.size != c.size or hi.size != c.size:
            raise ValueError("bound sizes must match the number of variables")
        if np.any(lo > hi):
            raise ValueError("lo > hi for some variable")
        for name, arr in (("c", c), ("G", G), ("h", h), ("lo", lo), ("hi", hi)):
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.c.size

    @property
    def m(self) -> int:
        return self.G.shape[0]


@dataclass(frozen=True)
class LPResult:
    """Outcome of an LP solve.

    status is one of "optimal", "infeasible", "unbounded".  For "optimal",
    ``z`` and ``value`` are set.  For "infeasible", ``farkas`` holds
    L1-normalized nonnegative row multipliers lam such that the aggregated
    row (lam.G) z <= lam.h is violated by every z in the variable box;
    ``bound_term`` is the constant contributed by the active variable bounds,
    so that lam.h + bound_term < inf of the aggregated left side.  For
    "unbounded", ``ray`` is an improving recession direction.
    """

    status: str
    z: np.ndarray | None = None
    value: float | None = None
    farkas: np.ndarray | None = None
    bound_term: float = 0.0
    ray: np.ndarray | None = None
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"

    @property
    def feasible(self) -> bool:
        return self.status in ("optimal", "unbounded")


def _certificate_terms(lam, G, lo, hi):
    """Split the aggregated gradient v = lam.G into bound multipliers.

    Returns (v, bound_term) with bound_term = mu_hi.hi - mu_lo.lo where
    mu_lo = max(v, 0) sits on -z <= -lo and mu_hi = max(-v, 0) on z <= hi, so
    the fully folded certificate has zero gradient and constant
    lam.h + bound_term < 0.  Entries of v that would need an infinite bound
    are a defective certificate and reported as NumericalFailure.
    """
    v = lam @ G
    scale = 1.0 + float(np.max(np.abs(v))) if v.size else 1.0
    v = np.where(np.abs(v) <= 1e-11 * scale, 0.0, v)
    mu_lo = np.maximum(v, 0.0)
    mu_hi = np.maximum(-v, 0.0)
    if np.any((mu_lo > 0.0) & ~np.isfinite(lo)) or np.any((mu_hi > 0.0) & ~np.isfinite(hi)):
        raise NumericalFailure("Farkas certificate pairs with an infinite bound")
    bound_term = float(mu_hi @ np.where(mu_hi > 0.0, hi, 0.0)
                       - mu_lo @ np.where(mu_lo > 0.0, lo, 0.0))
    return v, bound_term


def _solve_raw(G, h, c, lo, hi, max_iter: int = 0) -> LPResult:
    """Kernel call plus status packaging; no input validation (hot path)."""
    status, z, value, lam, ray, iters = simplex_solve(G, h, c, lo, hi, max_iter)
    if status == 0:
        return LPResult(status="optimal", z=z, value=value, iterations=iters)
    if status == 1:
        _, bound_term = _certificate_terms(lam, G, lo, hi)
        margin = float(lam @ h) + bound_term
        if margin > -_FARKAS_MARGIN:
            raise NumericalFailure(
                f"infeasibility certificate too weak (margin {margin:.3e})")
        return LPResult(status="infeasible", farkas=lam,
                        bound_term=bound_term, iterations=iters)
    if status == 2:
        return LPResult(status="unbounded", ray=ray, iterations=iters)
    raise NumericalFailure("simplex exceeded its pivot cap")


def solve_lp(lp: LinearProgram) -> LPResult:
    """Solve a validated LP; statuses are exact for the kernel tolerances."""
    return _solve_raw(lp.G, lp.h, lp.c, lp.lo, lp.hi)


def lp_feasible(G, h) -> LPResult:
    """Feasibility of {z free : G z <= h} (phase-one wrapper).

    Returns an "optimal" result carrying a witness z, or "infeasible" with
    the Farkas multipliers.  Variables are free, so infeasibility
    certificates satisfy lam.G ~ 0 in addition to lam.h < 0.
    """
    G = np.ascontiguousarray(G, dtype=float)
    h = np.ascontiguousarray(h, dtype=float).reshape(-1)
    n = G.shape[1]
    lo = np.full(n, -np.inf)
    hi = np.full(n, np.inf)
    return _solve_raw(G, h, np.zeros(n), lo, hi)
