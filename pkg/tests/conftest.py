"""Shared toy models and helpers for the test suite."""

import numpy as np
import pytest

from ssdm.geometry import PolyhedralRep, StagePolyhedron
from ssdm.model import Scenario, SemiStochasticModel


def box_poly(lo, hi):
    """Axis box as a lifted polyhedron with no auxiliaries."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    n = lo.size
    A = np.vstack([np.eye(n), -np.eye(n)])
    return PolyhedralRep(A=A, C=np.zeros((2 * n, 0)),
                         d=np.concatenate([hi, -lo]))


def deterministic_box_model(y_lo, y_hi, star_lo, star_hi):
    """Deterministic model whose implementable set is the box
    [star_lo, star_hi] (one stage, no local variables)."""
    y_lo = np.asarray(y_lo, dtype=float)
    y_hi = np.asarray(y_hi, dtype=float)
    star_lo = np.asarray(star_lo, dtype=float)
    star_hi = np.asarray(star_hi, dtype=float)
    n = y_lo.size
    A = np.vstack([np.eye(n), -np.eye(n)])
    sp = StagePolyhedron(A=A, B=np.zeros((2 * n, 0)), C=np.zeros((2 * n, 0)),
                         d=np.concatenate([star_hi, -star_lo]))

    def builder(t, xi):
        return sp

    def sampler(rng):
        return Scenario(stages=(np.zeros(1),))

    return SemiStochasticModel(n=n, K=1, Y=box_poly(y_lo, y_hi),
                               stage_builder=builder, sampler=sampler,
                               box_lo=y_lo, box_hi=y_hi)


def threshold_model():
    """One stochastic stage: feasible iff y >= demand, demand ~ U[0, 1].

    The gap probability is exactly 1 - y on [0, 1]."""
    def builder(t, xi):
        return StagePolyhedron(A=np.array([[-1.0]]), B=np.zeros((1, 0)),
                               C=np.zeros((1, 0)), d=np.array([-float(xi[0])]))

    def sampler(rng):
        return Scenario(stages=(np.array([rng.uniform(0.0, 1.0)]),))

    return SemiStochasticModel(n=1, K=1, Y=box_poly([0.0], [1.0]),
                               stage_builder=builder, sampler=sampler,
                               box_lo=[0.0], box_hi=[1.0])


def halfspace_model(normal, offset, y_lo, y_hi):
    """Deterministic model with implementable set {normal.y <= offset}
    intersected with the bounding box."""
    y_lo = np.asarray(y_lo, dtype=float)
    y_hi = np.asarray(y_hi, dtype=float)
    normal = np.asarray(normal, dtype=float)
    sp = StagePolyhedron(A=normal[None, :], B=np.zeros((1, 0)),
                         C=np.zeros((1, 0)), d=np.array([float(offset)]))

    def builder(t, xi):
        return sp

    def sampler(rng):
        return Scenario(stages=(np.zeros(1),))

    return SemiStochasticModel(n=y_lo.size, K=1, Y=box_poly(y_lo, y_hi),
                               stage_builder=builder, sampler=sampler,
                               box_lo=y_lo, box_hi=y_hi)


def tiny_inventory(x_hi=2.0, demand=1.0, order_cost=2.0, ratio=(1.0, 1.0)):
    """The single-product, single-stage worked example."""
    from ssdm.inventory import InventoryInstance
    return InventoryInstance(
        d=1, K=1, z0=[0.0], z_lo=0.0, z_hi=1.0, x_lo=0.0, x_hi=x_hi,
        storage_weight=[1.0], storage_cap=np.inf, stage_cost_cap=[np.inf],
        omega_stage_lo=[0.0], omega_stage_hi=[10.0], omega_lo=0.0,
        omega_hi=10.0,
        nominal={"demand": [[demand]], "order_cost": [[order_cost]],
                 "holding_cost": [[0.0]], "backlog_penalty": [[0.0]],
                 "revenue": [[0.0]]},
        ratio_lo=ratio[0], ratio_hi=ratio[1])


def small_inventory(seed: int, d=2, K=3):
    """Randomized small-but-valid inventory instance for property tests."""
    from ssdm.inventory import InventoryInstance
    rng = np.random.default_rng(seed)
    demand = 0.2 + 0.3 * rng.random((K, d))
    return InventoryInstance(
        d=d, K=K,
        z0=0.2 + 0.1 * rng.random(d),
        z_lo=np.zeros((K, d)),
        z_hi=np.ones((K, d)),
        x_lo=np.zeros((K, d)),
        x_hi=np.full((K, d), 2.0),
        storage_weight=np.ones(d),
        storage_cap=float(d) - 0.2,
        stage_cost_cap=np.full(K, 6.0),
        omega_stage_lo=np.zeros(K),
        omega_stage_hi=np.full(K, 6.0),
        omega_lo=0.0,
        omega_hi=8.0 * K,
        nominal={"demand": demand,
                 "order_cost": 0.8 + 0.4 * rng.random((K, d)),
                 "holding_cost": 0.1 + 0.1 * rng.random((K, d)),
                 "backlog_penalty": np.ones((K, d)),
                 "revenue": np.zeros((K, d))},
    )
