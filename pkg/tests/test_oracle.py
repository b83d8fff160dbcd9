import math

import numpy as np
import pytest

from conftest import deterministic_box_model, threshold_model
from ssdm.oracle import KAPPA_CONST, OracleConfig, OracleState, SamplingOracle, \
    query, sample_size, strict_ceiling
from ssdm.rng import derive_key, substream


def test_strict_ceiling():
    assert strict_ceiling(189.2996) == 190
    assert strict_ceiling(3.0) == 4      # integers map to a + 1
    assert strict_ceiling(-0.5) == 0


def test_sample_size_fixed_value():
    cfg = OracleConfig(epsilon=0.05, delta=0.01, schedule="fixed",
                       fixed_calls=129)
    assert sample_size(cfg, 1) == 190
    assert sample_size(cfg, 57) == 190   # constant in s


def test_sample_size_adaptive_values():
    cfg = OracleConfig(epsilon=0.05, delta=0.01, schedule="adaptive")
    assert sample_size(cfg, 1) == 103
    assert sample_size(cfg, 10) == 195


def test_kappa_sequence_sums_to_one():
    # sum over s of 1/kappa_s = (1/KAPPA_CONST) * sum 1/s^2 = 1
    partial = sum(1.0 / (s * s * KAPPA_CONST) for s in range(1, 200000))
    assert partial == pytest.approx(1.0, abs=1e-4)
    assert KAPPA_CONST == pytest.approx(math.pi ** 2 / 6.0, abs=1e-12)


def test_adaptive_schedule_monotone():
    cfg = OracleConfig(epsilon=0.1, delta=0.05, schedule="adaptive")
    sizes = [sample_size(cfg, s) for s in range(1, 200)]
    assert all(b >= a for a, b in zip(sizes, sizes[1:]))


def test_config_validation():
    with pytest.raises(ValueError):
        OracleConfig(epsilon=0.0, delta=0.1)
    with pytest.raises(ValueError):
        OracleConfig(epsilon=0.1, delta=1.0)
    with pytest.raises(ValueError):
        OracleConfig(epsilon=0.1, delta=0.1, schedule="fixed")


def test_query_membership_separator_without_sampling():
    model = deterministic_box_model([0.0, 0.0], [1.0, 1.0],
                                    [0.2, 0.2], [0.8, 0.8])
    oracle = SamplingOracle(OracleConfig(epsilon=0.1, delta=0.1, seed=1))
    out = oracle.query(model, [3.0, 0.5])
    assert not out.stuck
    assert out.source == "membership"
    assert out.samples_used == 0
    assert oracle.state.s == 2  # incremented exactly once


def test_query_interior_always_stuck():
    model = deterministic_box_model([0.0, 0.0], [1.0, 1.0],
                                    [0.2, 0.2], [0.8, 0.8])
    oracle = SamplingOracle(OracleConfig(epsilon=0.3, delta=0.3, seed=1))
    for _ in range(5):
        out = oracle.query(model, [0.5, 0.5])
        assert out.stuck


def test_query_always_infeasible_stage():
    model = deterministic_box_model([0.0, 0.0], [1.0, 1.0],
                                    [0.2, 0.2], [0.8, 0.8])
    oracle = SamplingOracle(OracleConfig(epsilon=0.3, delta=0.3, seed=1))
    out = oracle.query(model, [0.05, 0.5])  # in Y, never in the stage set
    assert not out.stuck
    assert out.source == "stage"
    assert out.stage == 1
    assert out.samples_used == 1


def test_counter_increments_once_per_query():
    model = threshold_model()
    oracle = SamplingOracle(OracleConfig(epsilon=0.3, delta=0.3, seed=4))
    for expect in (1, 2, 3):
        out = oracle.query(model, [0.9])
        assert out.call_index == expect
    assert oracle.state.s == 4


def test_scenarios_are_function_of_seed_call_and_index():
    """Replaying a query with a fresh state reproduces its draws exactly."""
    model = threshold_model()
    cfg = OracleConfig(epsilon=0.4, delta=0.4, seed=77)
    s1 = OracleState()
    out1 = query(s1, cfg, model, [0.5])
    s2 = OracleState()
    out2 = query(s2, cfg, model, [0.5])
    assert out1.stuck == out2.stuck
    assert out1.samples_used == out2.samples_used
    if not out1.stuck:
        assert out1.separator.alpha == out2.separator.alpha
    # distinct calls use distinct substreams
    k_a = derive_key(77, 1, 1, 1)
    k_b = derive_key(77, 1, 2, 1)
    assert k_a != k_b


def test_stuck_probability_bound():
    """Empirical stuck frequency at a known-bad point stays within the
    binomial envelope of exp(-eps(y) N)."""
    model = threshold_model()
    y = [0.5]  # eps(y) = 0.5
    cfg = OracleConfig(epsilon=0.25, delta=0.5, schedule="adaptive", seed=0)
    n_draw = sample_size(cfg, 1)
    p_bound = math.exp(-0.5 * n_draw)
    reps = 400
    stuck = 0
    for seed in range(reps):
        state = OracleState()
        out = query(state, OracleConfig(epsilon=0.25, delta=0.5,
                                        schedule="adaptive", seed=seed),
                    model, y)
        stuck += out.stuck
    freq = stuck / reps
    assert freq <= p_bound + 3.0 * math.sqrt(max(p_bound, 1e-12) / reps) + 1e-9


def test_stuck_binomial_example():
    """eps(y) = 0.3 with N_1 = 103 draws: stuck probability ~ 0.7^103, so
    hundreds of trials should never get stuck."""
    model = threshold_model()
    cfg0 = OracleConfig(epsilon=0.05, delta=0.01, schedule="adaptive", seed=0)
    assert sample_size(cfg0, 1) == 103
    assert 0.7 ** 103 < 1e-15
    for seed in range(200):
        state = OracleState()
        out = query(state, OracleConfig(epsilon=0.05, delta=0.01,
                                        schedule="adaptive", seed=seed),
                    model, [0.7])
        assert not out.stuck


def test_substream_determinism():
    g1 = substream(5, 1, 2, 3)
    g2 = substream(5, 1, 2, 3)
    assert g1.random(4).tolist() == g2.random(4).tolist()
    assert substream(5, 1, 2, 3).random() != substream(5, 1, 2, 4).random()


def test_stream_tags_are_disjoint():
    """Solve-time, validation, and estimation streams never collide."""
    from ssdm.rng import TAG_EPSILON, TAG_ORACLE, TAG_VALIDATE
    tags = (TAG_ORACLE, TAG_VALIDATE, TAG_EPSILON)
    assert len(set(tags)) == 3
    keys = {derive_key(123, tag, 1, 1) for tag in tags}
    assert len(keys) == 3
