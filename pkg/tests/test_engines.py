import math

import numpy as np
import pytest

from conftest import deterministic_box_model, halfspace_model
from ssdm.engines import EllipsoidState, bl_call_bound, ellipsoid_call_bound, \
    ellipsoid_cut, run_bl, run_ellipsoid
from ssdm.geometry import Ball, Separator, bounding_ball
from ssdm.model import membership_or_separator
from ssdm.oracle import OracleConfig, QueryOutcome, SamplingOracle


class SyntheticBallOracle:
    """Ideal membership oracle for a ball-shaped implementable set."""

    def __init__(self, center, radius):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.s = 1
        self.samples_drawn = 0

    def query(self, model, y):
        y = np.asarray(y, dtype=float)
        idx = self.s
        self.s += 1
        diff = y - self.center
        nrm = float(np.linalg.norm(diff))
        if nrm <= self.radius:
            return QueryOutcome(stuck=True, samples_used=0, call_index=idx)
        a = diff / nrm
        return QueryOutcome(stuck=False,
                            separator=Separator(a=a, alpha=-float(a @ self.center)
                                                - self.radius),
                            source="stage", stage=1, samples_used=0,
                            call_index=idx)


def oracle(eps=0.2, delta=0.1, seed=0):
    return SamplingOracle(OracleConfig(epsilon=eps, delta=delta, seed=seed))


def test_bl_candidate_at_first_call_when_center_inside():
    model = deterministic_box_model([0.0, 0.0], [1.0, 1.0],
                                    [0.2, 0.2], [0.9, 0.9])
    ball = bounding_ball(model.box_lo, model.box_hi)
    res = run_bl(model, oracle(), ball, budget=50)
    assert res.candidate
    assert res.calls == 1
    assert np.allclose(res.y, ball.center)


def test_bl_call_bound_and_level_invariants():
    """Constructed instances with known inscribed radius: the call count obeys
    32 R^2 / rho^2 + 1 and the level values are nondecreasing and stay below
    -rho until termination."""
    rng = np.random.default_rng(2024)
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
        bound = bl_call_bound(ball.radius, rho_star)
        res = run_bl(model, oracle(seed=trial), ball, budget=bound)
        assert res.candidate, f"trial {trial} did not terminate inside bound"
        assert res.calls <= 32.0 * ball.radius ** 2 / rho_star ** 2 + 1.0
        deltas = [r.delta for r in res.log if r.delta is not None]
        for d_prev, d_next in zip(deltas, deltas[1:]):
            assert d_next >= d_prev - 1e-8
        for d in deltas:
            assert d <= -rho_star + 1e-6
        # the stuck point is implementable for the deterministic instance
        assert membership_or_separator(model, res.y) is None


def test_bl_iterates_stay_in_ball_and_below_level():
    from ssdm.ballprog import Bundle, min_max_over_ball, project_to_level
    model = deterministic_box_model([-1.0, -1.0], [1.0, 1.0],
                                    [0.55, 0.55], [0.95, 0.95])
    ball = bounding_ball(model.box_lo, model.box_hi)
    orc = oracle(seed=5)
    bundle = Bundle()
    y = ball.center.copy()
    for _ in range(60):
        out = orc.query(model, y)
        if out.stuck:
            break
        bundle.append(out.separator)
        delta, _ = min_max_over_ball(bundle, ball)
        if delta >= -1e-8:
            break
        y = project_to_level(y, bundle, 0.5 * delta, ball)
        assert np.linalg.norm(y - ball.center) <= ball.radius + 1e-9
        assert bundle.value(y) <= 0.5 * delta + 1e-6


def test_bl_emptiness_certificate():
    """Contradictory deterministic stages produce a nonnegative level value
    within a few calls."""
    from ssdm.model import Scenario, SemiStochasticModel
    from ssdm.geometry import StagePolyhedron

    def contradictory(n=2):
        sp1 = StagePolyhedron(A=np.array([[-1.0] + [0.0] * (n - 1)]),
                              B=np.zeros((1, 0)), C=np.zeros((1, 0)),
                              d=np.array([-1.0]))
        sp2 = StagePolyhedron(A=np.array([[1.0] + [0.0] * (n - 1)]),
                              B=np.zeros((1, 0)), C=np.zeros((1, 0)),
                              d=np.array([-1.0]))
        from conftest import box_poly
        lo = np.full(n, -2.0)
        hi = np.full(n, 2.0)
        return SemiStochasticModel(
            n=n, K=2, Y=box_poly(lo, hi),
            stage_builder=lambda t, xi: sp1 if t == 1 else sp2,
            sampler=lambda rng: Scenario(stages=(np.zeros(1), np.zeros(1))),
            box_lo=lo, box_hi=hi)

    for seed in range(5):
        model = contradictory()
        ball = bounding_ball(model.box_lo, model.box_hi)
        res = run_bl(model, oracle(seed=seed), ball, budget=50)
        assert res.status == "infeasible"
        assert res.delta_r >= -1e-8
        assert res.calls <= 3


def test_bl_budget_exhausted():
    model = halfspace_model([1.0, 0.0], -10.0, [-2.0, -2.0], [2.0, 2.0])
    # implementable set empty inside the box (requires y1 <= -10)
    ball = bounding_ball(model.box_lo, model.box_hi)
    res = run_bl(model, oracle(seed=1), ball, budget=2)
    assert res.status in ("budget_exhausted", "infeasible")
    if res.status == "budget_exhausted":
        assert res.calls == 2
        assert res.delta_r is not None


def test_bl_ball_target_within_evaluated_bound():
    """A ball of radius 0.5 inside the unit enclosing ball: the call bound
    evaluates to 129 and the engine terminates within it."""
    assert bl_call_bound(1.0, 0.5) == 129
    res = run_bl(None, SyntheticBallOracle([0.3, 0.1], 0.5),
                 Ball(center=[0.0, 0.0], radius=1.0), budget=129)
    assert res.candidate
    assert res.calls <= 129
    assert np.linalg.norm(np.asarray(res.y) - [0.3, 0.1]) <= 0.5 + 1e-9


def test_ellipsoid_default_budget_formula():
    assert ellipsoid_call_bound(2, math.e - 1.0, 1.0) == 8


def test_ellipsoid_volume_contraction():
    rng = np.random.default_rng(6)
    for n in (1, 2, 3, 5, 8):
        state = EllipsoidState(center=np.zeros(n), shape=np.eye(n) * 4.0)
        factor_bound = math.exp(-1.0 / (2.0 * n))
        for _ in range(10):
            g = rng.normal(size=n)
            g /= np.linalg.norm(g)
            sep = Separator(a=g, alpha=-float(g @ state.center))
            new = ellipsoid_cut(state, sep)
            det_old = np.linalg.det(state.shape)
            det_new = np.linalg.det(new.shape)
            assert det_new <= det_old * factor_bound * (1.0 + 1e-6)
            state = new


def test_ellipsoid_synthetic_ball_oracle():
    """Against a brute-force membership oracle for a ball-shaped target, the
    engine finds a candidate within the default budget."""
    res = run_ellipsoid(None, SyntheticBallOracle([0.0, 0.0], 0.3),
                        Ball(center=[0.9, 0.0], radius=1.0), rho=0.3)
    assert res.candidate
    assert res.calls <= ellipsoid_call_bound(2, 1.0, 0.3)
    assert np.linalg.norm(res.y) <= 0.3 + 1e-9


def test_ellipsoid_stuck_first_query_when_center_inside():
    model = deterministic_box_model([0.0, 0.0], [1.0, 1.0],
                                    [0.2, 0.2], [0.9, 0.9])
    ball = bounding_ball(model.box_lo, model.box_hi)
    res = run_ellipsoid(model, oracle(), ball, rho=0.1)
    assert res.candidate
    assert res.calls == 1


def test_ellipsoid_budget_exhausted_reports_delta():
    model = halfspace_model([1.0, 0.0], -10.0, [-2.0, -2.0], [2.0, 2.0])
    ball = bounding_ball(model.box_lo, model.box_hi)
    res = run_ellipsoid(model, oracle(seed=2), ball, budget_override=5)
    assert res.status == "budget_exhausted"
    assert res.calls == 5
    assert res.delta_r is not None
    # the true level value of cuts from an empty implementable set is >= 0
    assert res.delta_r >= -1e-8


def test_engine_log_records():
    model = deterministic_box_model([-1.0, -1.0], [1.0, 1.0],
                                    [0.5, 0.5], [0.9, 0.9])
    ball = bounding_ball(model.box_lo, model.box_hi)
    res = run_bl(model, oracle(seed=3), ball, budget=100)
    assert res.candidate
    assert [r.s for r in res.log] == list(range(1, res.calls + 1))
    assert res.log[-1].outcome == "stuck"
    for rec in res.log[:-1]:
        assert rec.outcome.startswith("cut:")
