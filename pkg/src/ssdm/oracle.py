"""The sampling separation oracle.

Per query the oracle first tests membership in Y (separating immediately on
failure, without drawing), then draws its scheduled number of independent
scenarios and scans them in draw order, stages ascending; the first
infeasible (scenario, stage) pair is converted into a separator.  If every
stage of every drawn scenario passes, the oracle "gets stuck" - precisely
the event the surrounding cutting scheme treats as success.

Scenario draws are a pure function of (seed, call index, sample index), so a
query is replayable and distinct calls share no randomness.  The call
counter increases exactly once per query and is never reset, even across
bisection steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Separator
from .model import SemiStochasticModel, separator_from_infeasibility, stage_feasible, \
    membership_or_separator
from .rng import TAG_ORACLE, substream

#: kappa_s = s^2 * KAPPA_CONST, a nondecreasing sequence with sum 1/kappa_s = 1
KAPPA_CONST = math.pi ** 2 / 6.0


def strict_ceiling(a: float) -> int:
    """Smallest integer strictly greater than a (integers map to a + 1)."""
    return int(math.floor(a)) + 1


@dataclass(frozen=True)
class OracleConfig:
    """Reliability parameters and the sample-size schedule.

    schedule "fixed" uses a constant size from the engine call bound
    fixed_calls (M); "adaptive" grows with the call index and needs no call
    bound in advance.
    """

    epsilon: float
    delta: float
    schedule: str = "adaptive"
    fixed_calls: int | None = None
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if self.schedule not in ("fixed", "adaptive"):
            raise ValueError("schedule must be 'fixed' or 'adaptive'")
        if self.schedule == "fixed" and (self.fixed_calls is None or self.fixed_calls < 1):
            raise ValueError("fixed schedule needs fixed_calls >= 1")


@dataclass
class OracleState:
    """Mutable per-run oracle bookkeeping; one owner, queried sequentially."""

    s: int = 1              # index of the next call; never reset
    total_samples: int = 0


@dataclass(frozen=True)
class QueryOutcome:
    """Either a separator (with its source) or "stuck"."""

    stuck: bool
    separator: Separator | None = None
    source: str | None = None       # "membership" or "stage"
    stage: int | None = None
    samples_used: int = 0
    call_index: int = 0


def sample_size(config: OracleConfig, s: int) -> int:
    """Scheduled number of scenario draws for the s-th call."""
    if s < 1:
        raise ValueError("call index starts at 1")
    if config.schedule == "fixed":
        a = math.log(config.fixed_calls / config.delta) / config.epsilon
    else:
        kappa_s = s * s * KAPPA_CONST
        a = math.log(kappa_s / config.delta) / config.epsilon
    return strict_ceiling(a)


def query(state: OracleState, config: OracleConfig,
          model: SemiStochasticModel, y) -> QueryOutcome:
    """One oracle call at the point y; increments the call counter once."""
    s = state.s
    state.s += 1
    y = np.asarray(y, dtype=float)
    sep = membership_or_separator(model, y)
    if sep is not None:
        return QueryOutcome(stuck=False, separator=sep, source="membership",
                            samples_used=0, call_index=s)
    n_draw = sample_size(config, s)
    for i in range(1, n_draw + 1):
        rng = substream(config.seed, TAG_ORACLE, s, i)
        scen = model.sampler(rng)
        state.total_samples += 1
        for t in range(1, model.K + 1):
            chk = stage_feasible(model, t, scen.stage(t), y)
            if not chk.feasible:
                sep = separator_from_infeasibility(
                    model, t, scen.stage(t), y, chk.farkas, chk.bound_term)
                return QueryOutcome(stuck=False, separator=sep, source="stage",
                                    stage=t, samples_used=i, call_index=s)
    return QueryOutcome(stuck=True, samples_used=n_draw, call_index=s)


class SamplingOracle:
    """Config + state bundle with the query interface engines expect."""

    def __init__(self, config: OracleConfig):
        self.config = config
        self.state = OracleState()

    @property
    def calls_made(self) -> int:
        return self.state.s - 1

    @property
    def samples_drawn(self) -> int:
        return self.state.total_samples

    def next_sample_size(self) -> int:
        return sample_size(self.config, self.state.s)

    def query(self, model: SemiStochasticModel, y) -> QueryOutcome:
        return query(self.state, self.config, model, y)
