"""Multi-product inventory instantiation.

The strategic decision fixes, per stage, lower/upper corridors for the
inventory level, a stage expense budget, and one total budget; local
decisions are the replenishment orders.  Stage systems couple the corridor
trajectory with the orders (balance inequalities, a stage expense cap, and
order boxes); one fictitious terminal stage replays the whole horizon to tie
the stage expenses to the total budget.

Uncertain data per stage is eta_t = [demand; order cost; holding cost;
backlog penalty; revenue], each of product dimension d, drawn independently
and uniformly inside per-component ratio boxes around the nominal
trajectories.  Scenario stage vectors are prefix concatenations
xi_t = (eta_1, ..., eta_t); the terminal stage sees the full trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadInstance, ClairvoyantInfeasible
from .geometry import PolyhedralRep, StagePolyhedron
from .lp import LinearProgram, _solve_raw, solve_lp
from .model import Scenario, SemiStochasticModel

FORMAT_VERSION = 1

_ETA_BLOCKS = ("demand", "order_cost", "holding_cost", "backlog_penalty", "revenue")


def _stage_mat(x, K, d, name) -> np.ndarray:
    a = np.asarray(x, dtype=float)
    if a.ndim == 0:
        a = np.full((K, d), float(a))
    elif a.ndim == 1:
        if a.size == d:
            a = np.tile(a, (K, 1))
        elif a.size == K:
            a = np.repeat(a[:, None], d, axis=1)
        else:
            raise BadInstance(f"{name}: cannot broadcast shape {a.shape} to (K, d)")
    if a.shape != (K, d):
        raise BadInstance(f"{name}: expected shape {(K, d)}, got {a.shape}")
    return a.copy()


def _stage_vec(x, K, name) -> np.ndarray:
    a = np.asarray(x, dtype=float).reshape(-1)
    if a.size == 1:
        a = np.full(K, float(a[0]))
    if a.size != K:
        raise BadInstance(f"{name}: expected length {K}")
    return a.copy()


@dataclass(frozen=True)
class InventoryInstance:
    """Certain data of the d-product, K-stage problem.

    Bounds must be finite where they bound the strategic decision (state
    corridors and budget ranges); order boxes and cost caps may use inf.
    """

    d: int
    K: int
    z0: np.ndarray
    z_lo: np.ndarray          # (K, d) state corridors
    z_hi: np.ndarray
    x_lo: np.ndarray          # (K, d) order boxes
    x_hi: np.ndarray
    storage_weight: np.ndarray   # (d,) >= 0
    storage_cap: float
    stage_cost_cap: np.ndarray   # (K,) certain caps w_bar
    omega_stage_lo: np.ndarray   # (K,)
    omega_stage_hi: np.ndarray
    omega_lo: float
    omega_hi: float
    nominal: dict
    ratio_lo: float = 0.7
    ratio_hi: float = 1.3

    def __post_init__(self):
        d, K = int(self.d), int(self.K)
        if d < 1 or K < 1:
            raise BadInstance("need d >= 1 products and K >= 1 stages")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "K", K)
        z0 = np.asarray(self.z0, dtype=float).reshape(-1)
        if z0.size != d:
            raise BadInstance("z0 must have length d")
        object.__setattr__(self, "z0", z0)
        for name in ("z_lo", "z_hi", "x_lo", "x_hi"):
            object.__setattr__(self, name, _stage_mat(getattr(self, name), K, d, name))
        sw = np.asarray(self.storage_weight, dtype=float).reshape(-1)
        if sw.size == 1:
            sw = np.full(d, float(sw[0]))
        if sw.size != d or np.any(sw < 0):
            raise BadInstance("storage_weight must be length d and nonnegative")
        object.__setattr__(self, "storage_weight", sw)
        object.__setattr__(self, "storage_cap", float(self.storage_cap))
        for name in ("stage_cost_cap", "omega_stage_lo", "omega_stage_hi"):
            object.__setattr__(self, name, _stage_vec(getattr(self, name), K, name))
        object.__setattr__(self, "omega_lo", float(self.omega_lo))
        object.__setattr__(self, "omega_hi", float(self.omega_hi))
        nom = {k: _stage_mat(self.nominal[k], K, d, f"nominal.{k}")
               for k in _ETA_BLOCKS}
        object.__setattr__(self, "nominal", nom)
        if np.any(self.z_lo > self.z_hi) or np.any(self.x_lo > self.x_hi):
            raise BadInstance("a bound pair is reversed")
        if np.any(self.omega_stage_lo > self.omega_stage_hi) \
                or self.omega_lo > self.omega_hi:
            raise BadInstance("a budget bound pair is reversed")
        if np.any(nom["demand"] <= 0):
            raise BadInstance("nominal demands must be positive")
        for k in _ETA_BLOCKS:
            if np.any(nom[k] < 0):
                raise BadInstance(f"nominal.{k} must be nonnegative")
        if not (0 <= self.ratio_lo <= self.ratio_hi):
            raise BadInstance("need 0 <= ratio_lo <= ratio_hi")
        for name in ("z_lo", "z_hi", "omega_stage_lo", "omega_stage_hi"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise BadInstance(f"{name} must be finite (bounded decisions)")
        if not (np.isfinite(self.omega_lo) and np.isfinite(self.omega_hi)):
            raise BadInstance("total budget range must be finite")

    # strategic layout: [l_1; u_1; w_1; ...; l_K; u_K; w_K; omega]
    @property
    def n(self) -> int:
        return self.K * (2 * self.d + 1) + 1

    def idx_l(self, t: int) -> slice:
        base = (t - 1) * (2 * self.d + 1)
        return slice(base, base + self.d)

    def idx_u(self, t: int) -> slice:
        base = (t - 1) * (2 * self.d + 1) + self.d
        return slice(base, base + self.d)

    def idx_w(self, t: int) -> int:
        return (t - 1) * (2 * self.d + 1) + 2 * self.d

    @property
    def idx_omega(self) -> int:
        return self.K * (2 * self.d + 1)

    def eta_nominal(self, t: int) -> np.ndarray:
        return np.concatenate([self.nominal[k][t - 1] for k in _ETA_BLOCKS])

    def split_eta(self, eta: np.ndarray) -> dict:
        d = self.d
        return {k: eta[i * d:(i + 1) * d] for i, k in enumerate(_ETA_BLOCKS)}

    def stage_eta(self, xi_t: np.ndarray, t: int) -> np.ndarray:
        """Stage t's own data block from the prefix vector xi_t."""
        w = 5 * self.d
        return xi_t[(t - 1) * w: t * w]


@dataclass(frozen=True)
class StrategicDecisionView:
    """Named view over the flat strategic vector."""

    instance: InventoryInstance
    y: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float).reshape(-1)
        if y.size != self.instance.n:
            raise ValueError(f"decision length {y.size} != n = {self.instance.n}")
        object.__setattr__(self, "y", y)

    def lower(self, t: int) -> np.ndarray:
        return self.y[self.instance.idx_l(t)]

    def upper(self, t: int) -> np.ndarray:
        return self.y[self.instance.idx_u(t)]

    def stage_budget(self, t: int) -> float:
        return float(self.y[self.instance.idx_w(t)])

    @property
    def total_budget(self) -> float:
        return float(self.y[self.instance.idx_omega])


def pack_decision(instance: InventoryInstance, lower, upper, stage_budget,
                  total_budget: float) -> np.ndarray:
    """Flatten per-stage corridors and budgets into the strategic vector."""
    lower = _stage_mat(lower, instance.K, instance.d, "lower")
    upper = _stage_mat(upper, instance.K, instance.d, "upper")
    stage_budget = _stage_vec(stage_budget, instance.K, "stage_budget")
    y = np.empty(instance.n)
    for t in range(1, instance.K + 1):
        y[instance.idx_l(t)] = lower[t - 1]
        y[instance.idx_u(t)] = upper[t - 1]
        y[instance.idx_w(t)] = stage_budget[t - 1]
    y[instance.idx_omega] = float(total_budget)
    return y


# ---------------------------------------------------------------------------
# model construction
# ---------------------------------------------------------------------------

def static_set(instance: InventoryInstance) -> PolyhedralRep:
    """The static table: corridor bounds, budget ranges, storage cap.

    max[u_t, 0] is linearized through auxiliary variables (one block per
    stage), valid because the storage weights are nonnegative and the terms
    sit on the <= side.
    """
    ins = instance
    d, K, n = ins.d, ins.K, ins.n
    n_aux = K * d  # u_plus per stage
    rows_A, rows_C, rhs = [], [], []

    def add(a_row, c_row, b):
        rows_A.append(a_row)
        rows_C.append(c_row)
        rhs.append(b)

    for t in range(1, K + 1):
        for i in range(d):
            li = ins.idx_l(t).start + i
            ui = ins.idx_u(t).start + i
            a = np.zeros(n); a[li] = -1.0
            add(a, np.zeros(n_aux), -ins.z_lo[t - 1, i])        # l >= z_lo
            a = np.zeros(n); a[li] = 1.0; a[ui] = -1.0
            add(a, np.zeros(n_aux), 0.0)                        # l <= u
            a = np.zeros(n); a[ui] = 1.0
            add(a, np.zeros(n_aux), ins.z_hi[t - 1, i])         # u <= z_hi
            # u_plus lift: u - u_plus <= 0, -u_plus <= 0
            c = np.zeros(n_aux); c[(t - 1) * d + i] = -1.0
            a = np.zeros(n); a[ui] = 1.0
            add(a, c, 0.0)
            add(np.zeros(n), c, 0.0)
        wi = ins.idx_w(t)
        a = np.zeros(n); a[wi] = -1.0
        add(a, np.zeros(n_aux), -ins.omega_stage_lo[t - 1])
        hi_cap = min(ins.omega_stage_hi[t - 1], ins.stage_cost_cap[t - 1])
        if np.isfinite(hi_cap):
            a = np.zeros(n); a[wi] = 1.0
            add(a, np.zeros(n_aux), hi_cap)
        if np.isfinite(ins.storage_cap):
            c = np.zeros(n_aux)
            c[(t - 1) * d:t * d] = ins.storage_weight
            add(np.zeros(n), c, ins.storage_cap)
    a = np.zeros(n); a[ins.idx_omega] = -1.0
    add(a, np.zeros(n_aux), -ins.omega_lo)
    a = np.zeros(n); a[ins.idx_omega] = 1.0
    add(a, np.zeros(n_aux), ins.omega_hi)
    return PolyhedralRep(A=np.array(rows_A), C=np.array(rows_C), d=np.array(rhs))


def decision_box(instance: InventoryInstance) -> tuple:
    """Natural coordinate box around the static set (feeds the ball E1)."""
    ins = instance
    lo = np.empty(ins.n)
    hi = np.empty(ins.n)
    for t in range(1, ins.K + 1):
        lo[ins.idx_l(t)] = ins.z_lo[t - 1]
        hi[ins.idx_l(t)] = ins.z_hi[t - 1]
        lo[ins.idx_u(t)] = ins.z_lo[t - 1]
        hi[ins.idx_u(t)] = ins.z_hi[t - 1]
        lo[ins.idx_w(t)] = ins.omega_stage_lo[t - 1]
        hi[ins.idx_w(t)] = min(ins.omega_stage_hi[t - 1], ins.stage_cost_cap[t - 1])
    lo[ins.idx_omega] = ins.omega_lo
    hi[ins.idx_omega] = ins.omega_hi
    return lo, hi


def _stage_template(instance: InventoryInstance, t: int):
    """Static blocks of stage t's system; eta-dependent entries are patched
    per call (row 2d carries the cost coefficients)."""
    ins = instance
    d, n = ins.d, ins.n
    m = 4 * d + 1
    A = np.zeros((m, n))
    B0 = np.zeros((m, d))
    C0 = np.zeros((m, 2 * d))
    l_t = ins.idx_l(t).start
    u_t = ins.idx_u(t).start
    for i in range(d):
        # balance: l_t - l_{t-1} - x <= z0 - d_t  (l_{t-1} from y when t > 1)
        A[i, l_t + i] = 1.0
        B0[i, i] = -1.0
        # balance: -u_t + u_{t-1} + x <= d_t - z0
        A[d + i, u_t + i] = -1.0
        B0[d + i, i] = 1.0
        if t > 1:
            A[i, ins.idx_l(t - 1).start + i] = -1.0
            A[d + i, ins.idx_u(t - 1).start + i] = 1.0
        # lifts: u - u_plus <= 0 ; -l - l_minus <= 0
        A[2 * d + 1 + i, u_t + i] = 1.0
        C0[2 * d + 1 + i, i] = -1.0
        A[3 * d + 1 + i, l_t + i] = -1.0
        C0[3 * d + 1 + i, d + i] = -1.0
    A[2 * d, ins.idx_w(t)] = -1.0  # expense row: costs - w_t <= r.d
    return A, B0, C0


def build_model(instance: InventoryInstance) -> SemiStochasticModel:
    """Semi-stochastic model with K actual stages plus the terminal stage.

    Actual stage t: local decision x_t (the order), auxiliary block
    [u_plus_t; l_minus_t].  Terminal stage K+1: local decision is the whole
    order trajectory chi, auxiliary block stacks the per-stage lifts, and one
    extra row ties the summed stage expenses to the total budget.
    """
    ins = instance
    d, K = ins.d, ins.K
    templates = {t: _stage_template(ins, t) for t in range(1, K + 1)}
    w_lo_stage = np.zeros(2 * d)
    w_hi_stage = np.full(2 * d, np.inf)

    def actual_stage(t: int, xi_t: np.ndarray) -> StagePolyhedron:
        eta = ins.split_eta(ins.stage_eta(xi_t, t))
        A, B0, C0 = templates[t]
        B = B0.copy()
        C = C0.copy()
        rd = float(eta["revenue"] @ eta["demand"])
        B[2 * d] = eta["order_cost"]
        C[2 * d, :d] = eta["holding_cost"]
        C[2 * d, d:] = eta["backlog_penalty"]
        rhs = np.zeros(4 * d + 1)
        off = ins.z0 if t == 1 else np.zeros(d)
        rhs[:d] = off - eta["demand"]
        rhs[d:2 * d] = eta["demand"] - off
        rhs[2 * d] = rd
        return StagePolyhedron(A=A, B=B, C=C, d=rhs,
                               x_lo=ins.x_lo[t - 1], x_hi=ins.x_hi[t - 1],
                               w_lo=w_lo_stage, w_hi=w_hi_stage)

    def terminal_stage(xi: np.ndarray) -> StagePolyhedron:
        m = K * (4 * d + 1) + 1
        A = np.zeros((m, ins.n))
        B = np.zeros((m, K * d))
        C = np.zeros((m, 2 * K * d))
        rhs = np.zeros(m)
        total_row = m - 1
        rd_sum = 0.0
        for t in range(1, K + 1):
            eta = ins.split_eta(ins.stage_eta(xi, t))
            At, B0, C0 = templates[t]
            r0 = (t - 1) * (4 * d + 1)
            A[r0:r0 + 4 * d + 1] = At
            B[r0:r0 + 4 * d + 1, (t - 1) * d:t * d] = B0
            C[r0:r0 + 4 * d + 1, 2 * (t - 1) * d:2 * t * d] = C0
            rd = float(eta["revenue"] @ eta["demand"])
            B[r0 + 2 * d, (t - 1) * d:t * d] = eta["order_cost"]
            C[r0 + 2 * d, 2 * (t - 1) * d:2 * (t - 1) * d + d] = eta["holding_cost"]
            C[r0 + 2 * d, 2 * (t - 1) * d + d:2 * t * d] = eta["backlog_penalty"]
            off = ins.z0 if t == 1 else np.zeros(d)
            rhs[r0:r0 + d] = off - eta["demand"]
            rhs[r0 + d:r0 + 2 * d] = eta["demand"] - off
            rhs[r0 + 2 * d] = rd
            rd_sum += rd
            # summed expenses row
            B[total_row, (t - 1) * d:t * d] = eta["order_cost"]
            C[total_row, 2 * (t - 1) * d:2 * (t - 1) * d + d] = eta["holding_cost"]
            C[total_row, 2 * (t - 1) * d + d:2 * t * d] = eta["backlog_penalty"]
        A[total_row, ins.idx_omega] = -1.0
        rhs[total_row] = rd_sum
        return StagePolyhedron(A=A, B=B, C=C, d=rhs,
                               x_lo=ins.x_lo.reshape(-1), x_hi=ins.x_hi.reshape(-1),
                               w_lo=np.zeros(2 * K * d),
                               w_hi=np.full(2 * K * d, np.inf))

    def builder(t: int, xi_t: np.ndarray) -> StagePolyhedron:
        if t <= K:
            return actual_stage(t, xi_t)
        return terminal_stage(xi_t)

    def sampler(rng: np.random.Generator) -> Scenario:
        return sample_scenario(ins, rng)

    lo, hi = decision_box(ins)
    return SemiStochasticModel(n=ins.n, K=K + 1, Y=static_set(ins),
                               stage_builder=builder, sampler=sampler,
                               box_lo=lo, box_hi=hi)


def objective_vector(instance: InventoryInstance) -> np.ndarray:
    """The canonical objective: minimize the total-budget coordinate."""
    f = np.zeros(instance.n)
    f[instance.idx_omega] = 1.0
    return f


# ---------------------------------------------------------------------------
# scenarios and policies
# ---------------------------------------------------------------------------

def sample_scenario(instance: InventoryInstance, rng: np.random.Generator) -> Scenario:
    """Box-uniform scenario; stage vectors are prefixes and the terminal
    stage carries the full trajectory."""
    ins = instance
    lo, hi = ins.ratio_lo, ins.ratio_hi
    etas = []
    for t in range(1, ins.K + 1):
        nom = ins.eta_nominal(t)
        u = rng.random(nom.size)
        etas.append(nom * (lo + (hi - lo) * u))
    prefixes = []
    acc = np.zeros(0)
    for eta in etas:
        acc = np.concatenate([acc, eta])
        prefixes.append(acc)
    prefixes.append(prefixes[-1])  # terminal stage sees everything
    return Scenario(stages=tuple(prefixes))


@dataclass(frozen=True)
class PolicyRun:
    """Greedy local policy applied to one scenario."""

    orders: np.ndarray            # (K, d); rows beyond a failed stage are 0
    stage_costs: np.ndarray       # (K,); entries beyond a failed stage are nan
    total_cost: float             # sum over completed stages
    feasible: bool
    failed_stage: int | None = None


def greedy_local_policy(instance: InventoryInstance, y,
                        scenario: Scenario) -> PolicyRun:
    """Cost-greedy orders: per stage, minimize the stage expense over the
    stage system at (y, xi_t); nonanticipative by construction."""
    ins = instance
    d, K = ins.d, ins.K
    view = StrategicDecisionView(ins, y)
    orders = np.zeros((K, d))
    stage_costs = np.full(K, np.nan)
    templates = {t: _stage_template(ins, t) for t in range(1, K + 1)}
    total = 0.0
    for t in range(1, K + 1):
        xi_t = scenario.stage(t)
        eta = ins.split_eta(ins.stage_eta(xi_t, t))
        A, B0, C0 = templates[t]
        B = B0.copy()
        C = C0.copy()
        B[2 * d] = eta["order_cost"]
        C[2 * d, :d] = eta["holding_cost"]
        C[2 * d, d:] = eta["backlog_penalty"]
        rd = float(eta["revenue"] @ eta["demand"])
        rhs = np.zeros(4 * d + 1)
        off = ins.z0 if t == 1 else np.zeros(d)
        rhs[:d] = off - eta["demand"]
        rhs[d:2 * d] = eta["demand"] - off
        rhs[2 * d] = rd
        rhs = rhs - np.einsum("ij,j->i", A, view.y)
        G = np.hstack([B, C])
        cvec = np.concatenate([eta["order_cost"], eta["holding_cost"],
                               eta["backlog_penalty"]])
        lo = np.concatenate([ins.x_lo[t - 1], np.zeros(2 * d)])
        hi = np.concatenate([ins.x_hi[t - 1], np.full(2 * d, np.inf)])
        res = _solve_raw(G, rhs, cvec, lo, hi)
        if not res.optimal:
            return PolicyRun(orders=orders, stage_costs=stage_costs,
                             total_cost=total, feasible=False, failed_stage=t)
        orders[t - 1] = res.z[:d]
        stage_costs[t - 1] = res.value - rd
        total += stage_costs[t - 1]
    return PolicyRun(orders=orders, stage_costs=stage_costs,
                     total_cost=total, feasible=True)


def utopian_cost(instance: InventoryInstance, scenario: Scenario,
                 enforce_stage_caps: bool = True) -> float:
    """Hindsight-optimal total management cost for one scenario.

    One full-horizon LP over orders and positive/negative state splits, under
    the physical corridors, storage cap, order boxes, and (by default) the
    certain per-stage expense caps.
    """
    ins = instance
    d, K = ins.d, ins.K
    full = scenario.stage(min(scenario.K, K))
    etas = [ins.split_eta(ins.stage_eta(full, t)) for t in range(1, K + 1)]
    demand = np.array([e["demand"] for e in etas])         # (K, d)
    Dcum = np.cumsum(demand, axis=0)
    nx = K * d
    nv = 3 * nx  # x, z_plus, z_minus
    rows, rhs = [], []
    eye = np.eye(d)
    for t in range(1, K + 1):
        csum = np.zeros((d, nx))
        for tau in range(t):
            csum[:, tau * d:(tau + 1) * d] = eye
        zconst = ins.z0 - Dcum[t - 1]
        # z_t <= z_hi
        for i in range(d):
            r = np.zeros(nv); r[:nx] = csum[i]
            rows.append(r); rhs.append(ins.z_hi[t - 1, i] - zconst[i])
        # -z_t <= -z_lo
        for i in range(d):
            r = np.zeros(nv); r[:nx] = -csum[i]
            rows.append(r); rhs.append(zconst[i] - ins.z_lo[t - 1, i])
        # z_t - z_plus_t <= 0
        for i in range(d):
            r = np.zeros(nv); r[:nx] = csum[i]
            r[nx + (t - 1) * d + i] = -1.0
            rows.append(r); rhs.append(-zconst[i])
        # -z_t - z_minus_t <= 0
        for i in range(d):
            r = np.zeros(nv); r[:nx] = -csum[i]
            r[2 * nx + (t - 1) * d + i] = -1.0
            rows.append(r); rhs.append(zconst[i])
        if np.isfinite(ins.storage_cap):
            r = np.zeros(nv)
            r[nx + (t - 1) * d:nx + t * d] = ins.storage_weight
            rows.append(r); rhs.append(ins.storage_cap)
        if enforce_stage_caps and np.isfinite(ins.stage_cost_cap[t - 1]):
            r = np.zeros(nv)
            r[(t - 1) * d:t * d] = etas[t - 1]["order_cost"]
            r[nx + (t - 1) * d:nx + t * d] = etas[t - 1]["holding_cost"]
            r[2 * nx + (t - 1) * d:2 * nx + t * d] = etas[t - 1]["backlog_penalty"]
            rows.append(r)
            rhs.append(ins.stage_cost_cap[t - 1]
                       + float(etas[t - 1]["revenue"] @ etas[t - 1]["demand"]))
    c = np.zeros(nv)
    const = 0.0
    for t in range(1, K + 1):
        c[(t - 1) * d:t * d] = etas[t - 1]["order_cost"]
        c[nx + (t - 1) * d:nx + t * d] = etas[t - 1]["holding_cost"]
        c[2 * nx + (t - 1) * d:2 * nx + t * d] = etas[t - 1]["backlog_penalty"]
        const -= float(etas[t - 1]["revenue"] @ etas[t - 1]["demand"])
    lo = np.concatenate([ins.x_lo.reshape(-1), np.zeros(2 * nx)])
    hi = np.concatenate([ins.x_hi.reshape(-1), np.full(2 * nx, np.inf)])
    res = _solve_raw(np.array(rows), np.array(rhs), c, lo, hi)
    if not res.optimal:
        raise ClairvoyantInfeasible(
            "no hindsight control serves this scenario")
    return float(res.value) + const


# ---------------------------------------------------------------------------
# default instance and JSON round trip
# ---------------------------------------------------------------------------

def default_instance() -> InventoryInstance:
    """The shipped demo instance: 4 products over 12 stages.

    This data is ours (documented here), not reproduced from anywhere:
    smooth seasonal nominal demands and costs, unit storage weights with a
    shared warehouse cap, no revenue, backlog forbidden by the zero state
    floor.
    """
    d, K = 4, 12
    t = np.arange(1, K + 1)[:, None]
    base = np.array([0.32, 0.40, 0.26, 0.36])
    amp = np.array([0.25, 0.2, 0.3, 0.15])
    phase = np.array([0.0, 0.25, 0.5, 0.75])
    demand = base * (1.0 + amp * np.sin(2 * math.pi * (t / K + phase)))
    ocost = np.array([1.0, 1.2, 0.9, 1.1]) * \
        (1.0 + 0.2 * np.cos(2 * math.pi * (t / K + phase)))
    hcost = np.full((K, d), 0.15) * (1.0 + 0.1 * np.sin(2 * math.pi * t / K))
    pcost = np.full((K, d), 1.0)
    revenue = np.zeros((K, d))
    return InventoryInstance(
        d=d, K=K,
        z0=np.full(d, 0.25),
        z_lo=np.zeros((K, d)),
        z_hi=np.ones((K, d)),
        x_lo=np.zeros((K, d)),
        x_hi=np.full((K, d), 1.5),
        storage_weight=np.ones(d),
        storage_cap=3.4,
        stage_cost_cap=np.full(K, 3.5),
        omega_stage_lo=np.zeros(K),
        omega_stage_hi=np.full(K, 3.5),
        omega_lo=0.0,
        omega_hi=30.0,
        nominal={"demand": demand, "order_cost": ocost, "holding_cost": hcost,
                 "backlog_penalty": pcost, "revenue": revenue},
    )


def scenario_rows(instance: InventoryInstance, scenario: Scenario) -> list:
    """Flatten a scenario into (t, component, value) rows for CSV dumps;
    component names carry the product index, e.g. "demand[2]"."""
    rows = []
    for t in range(1, instance.K + 1):
        eta = instance.split_eta(instance.stage_eta(scenario.stage(t), t))
        for name in _ETA_BLOCKS:
            for i in range(instance.d):
                rows.append((t, f"{name}[{i}]", float(eta[name][i])))
    return rows


def instance_to_dict(instance: InventoryInstance) -> dict:
    ins = instance
    return {
        "format_version": FORMAT_VERSION,
        "kind": "inventory_instance",
        "d": ins.d,
        "K": ins.K,
        "z0": ins.z0.tolist(),
        "z_lo": ins.z_lo.tolist(),
        "z_hi": ins.z_hi.tolist(),
        "x_lo": ins.x_lo.tolist(),
        "x_hi": ins.x_hi.tolist(),
        "storage_weight": ins.storage_weight.tolist(),
        "storage_cap": ins.storage_cap,
        "stage_cost_cap": ins.stage_cost_cap.tolist(),
        "omega_stage_lo": ins.omega_stage_lo.tolist(),
        "omega_stage_hi": ins.omega_stage_hi.tolist(),
        "omega_lo": ins.omega_lo,
        "omega_hi": ins.omega_hi,
        "nominal": {k: v.tolist() for k, v in ins.nominal.items()},
        "ratio_lo": ins.ratio_lo,
        "ratio_hi": ins.ratio_hi,
    }


def instance_from_dict(data: dict) -> InventoryInstance:
    if data.get("kind") != "inventory_instance":
        raise BadInstance("not an inventory instance document")
    if data.get("format_version") != FORMAT_VERSION:
        raise BadInstance(f"unsupported format_version {data.get('format_version')}")
    fields_ = ("d", "K", "z0", "z_lo", "z_hi", "x_lo", "x_hi", "storage_weight",
               "storage_cap", "stage_cost_cap", "omega_stage_lo",
               "omega_stage_hi", "omega_lo", "omega_hi", "nominal",
               "ratio_lo", "ratio_hi")
    missing = [f for f in fields_ if f not in data]
    if missing:
        raise BadInstance(f"instance document is missing fields: {missing}")
    return InventoryInstance(**{f: data[f] for f in fields_})
