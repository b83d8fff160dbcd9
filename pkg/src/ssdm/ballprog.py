"""Bundle subproblems over a Euclidean ball.

Two convex programs drive the bundle-level engine:

* :func:`min_max_over_ball` - the level value ``delta = min over the ball of
  max_r f_r``, computed by bisection on the epigraph level ``t``: the set
  {y in ball : max_r f_r(y) <= t} is nonempty iff the metric projection of
  the center onto {max_r f_r <= t} lies within the radius, and that
  projection is an exact small dual NNQP.  The final feasible projection is
  the argmin, and a dual certificate over the simplex is recovered from the
  active multipliers.

* :func:`project_to_level` - metric projection onto {y in ball : max f_r <= L},
  by an active-set projection onto the affine cuts combined with a scalar
  bisection on the ball-constraint multiplier.

Both rely on :func:`project_polyhedron`, a Lawson-Hanson style active-set
solve of the projection dual.  Linear algebra is hand-rolled (Cholesky and
substitution loops) so results do not depend on BLAS threading.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import EmptyBundle, EmptyLevelSet, NumericalFailure
from .geometry import Ball, Separator
from .lp import LinearProgram, lp_feasible, solve_lp

_W_TOL = 1e-10
_MU_BIS_TOL = 1e-10  # absolute bisection tolerance on the ball multiplier


class Bundle:
    """Ordered collection of unit-gradient cuts f_r(y) = a_r.y + alpha_r.

    Grows by insertion; caches the gradient matrix and its Gram matrix so the
    repeated projections inside one engine run share them.
    """

    def __init__(self, separators=()):
        self._seps: list[Separator] = []
        self._A = np.zeros((0, 0))
        self._alpha = np.zeros(0)
        self._gram = np.zeros((0, 0))
        for s in separators:
            self.append(s)

    def __len__(self) -> int:
        return len(self._seps)

    def __iter__(self):
        return iter(self._seps)

    def __getitem__(self, i) -> Separator:
        return self._seps[i]

    def append(self, sep: Separator) -> None:
        a = sep.a
        if not self._seps:
            self._A = a[None, :].copy()
            self._alpha = np.array([sep.alpha])
            self._gram = np.array([[float(a @ a)]])
        else:
            if a.size != self._A.shape[1]:
                raise ValueError("separator dimension mismatch")
            cross = np.einsum("ij,j->i", self._A, a)
            k = len(self._seps)
            gram = np.empty((k + 1, k + 1))
            gram[:k, :k] = self._gram
            gram[:k, k] = cross
            gram[k, :k] = cross
            gram[k, k] = float(a @ a)
            self._gram = gram
            self._A = np.vstack([self._A, a[None, :]])
            self._alpha = np.append(self._alpha, sep.alpha)
        self._seps.append(sep)

    @property
    def gradients(self) -> np.ndarray:
        return self._A

    @property
    def offsets(self) -> np.ndarray:
        return self._alpha

    @property
    def gram(self) -> np.ndarray:
        return self._gram

    def values(self, y) -> np.ndarray:
        return np.einsum("ij,j->i", self._A, np.asarray(y, dtype=float)) + self._alpha

    def value(self, y) -> float:
        return float(np.max(self.values(y)))


def _chol_solve(Q, rhs):
    """Solve the SPD system Q x = rhs with a deterministic dense Cholesky.

    Escalating diagonal jitter covers nearly singular Gram submatrices.
    """
    p = Q.shape[0]
    if p == 0:
        return np.zeros(0)
    scale = max(float(np.max(np.diag(Q))), 1e-300)
    for jitter in (0.0, 1e-12, 1e-9, 1e-6):
        L = np.zeros((p, p))
        ok = True
        for j in range(p):
            s = Q[j, j] + jitter * scale - float(L[j, :j] @ L[j, :j])
            if s <= 1e-14 * scale:
                ok = False
                break
            L[j, j] = math.sqrt(s)
            if j + 1 < p:
                L[j + 1:, j] = (Q[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
        if not ok:
            continue
        u = np.zeros(p)
        for i in range(p):
            u[i] = (rhs[i] - float(L[i, :i] @ u[:i])) / L[i, i]
        x = np.zeros(p)
        for i in range(p - 1, -1, -1):
            x[i] = (u[i] - float(L[i + 1:, i] @ x[i + 1:])) / L[i, i]
        return x
    raise NumericalFailure("Cholesky failed on a projection subproblem")


def project_polyhedron(q, A, b, gram=None, warm=None):
    """Metric projection of q onto {y : A y <= b}.

    Lawson-Hanson style active set on the dual NNQP
    min 0.5 mu.G.mu - mu.r over mu >= 0, with G = A A^T and r = A q - b.
    Returns (y, mu).  The caller guarantees nonemptiness; a stall (which the
    empty set would cause) raises NumericalFailure.
    """
    q = np.asarray(q, dtype=float)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    k = A.shape[0]
    if k == 0:
        return q.copy(), np.zeros(0)
    r = np.einsum("ij,j->i", A, q) - b
    scale = 1.0 + float(np.max(np.abs(r)))
    mu = np.zeros(k)
    if float(np.max(r)) <= _W_TOL * scale:
        return q.copy(), mu
    G = gram if gram is not None else A @ A.T
    active = np.zeros(k, dtype=bool)

    def resolve():
        """Inner loop: restore mu >= 0 on the active set after a re-solve."""
        for _ in range(2 * k + 4):
            idx = np.flatnonzero(active)
            s = _chol_solve(G[np.ix_(idx, idx)], r[idx])
            if s.size == 0:
                return
            if np.min(s) > 0.0:
                mu[idx] = s
                return
            cur = mu[idx]
            neg = s <= 0.0
            denom = cur[neg] - s[neg]
            alphas = np.where(denom > 0.0, cur[neg] / np.where(denom > 0.0, denom, 1.0), 0.0)
            alpha = float(np.min(alphas))
            stepped = cur + alpha * (s - cur)
            mu[idx] = np.maximum(stepped, 0.0)
            drop = idx[(stepped <= 1e-12 * (1.0 + float(np.max(np.abs(stepped)))))
                       & neg]
            if drop.size == 0:
                drop = idx[neg][:1]
            active[drop] = False
            mu[drop] = 0.0
        raise NumericalFailure("projection inner loop stalled")

    if warm is not None and np.any(warm):
        active[:] = warm
        resolve()

    max_outer = 10 * k + 100
    for _ in range(max_outer):
        w = r - np.einsum("ij,j->i", G, mu)
        w = np.where(active, -np.inf, w)
        j = int(np.argmax(w))
        if w[j] <= _W_TOL * scale:
            break
        active[j] = True
        resolve()
    else:
        raise NumericalFailure("projection active set did not converge "
                               "(is the polyhedron empty?)")
    y = q - np.einsum("ij,i->j", A, mu)
    viol = float(np.max(np.einsum("ij,j->i", A, y) - b))
    if viol > 1e-7 * scale:
        # all-active exits on an empty or badly conditioned polyhedron
        raise NumericalFailure(
            f"projection result infeasible by {viol:.3e}")
    return y, mu


def dual_value(bundle: Bundle, ball: Ball, lam) -> float:
    """Concave dual of the min-max problem at a simplex point lam."""
    lam = np.asarray(lam, dtype=float)
    u = np.einsum("ij,i->j", bundle.gradients, lam)
    return float(lam @ bundle.offsets + u @ ball.center
                 - ball.radius * np.linalg.norm(u))


def _epigraph_floor(bundle: Bundle) -> float:
    """min over all of R^n of max_r f_r (no ball), -inf when unbounded."""
    A = bundle.gradients
    k, n = A.shape
    G = np.hstack([A, -np.ones((k, 1))])
    c = np.zeros(n + 1)
    c[n] = 1.0
    res = solve_lp(LinearProgram(c=c, G=G, h=-bundle.offsets))
    if res.status == "optimal":
        return float(res.value)
    return -np.inf


def _min_max_full(bundle: Bundle, ball: Ball):
    """Returns (delta, argmin, mu) with mu the cut multipliers at the argmin."""
    k = len(bundle)
    if k == 0:
        raise EmptyBundle("min_max_over_ball needs at least one cut")
    A = bundle.gradients
    alpha = bundle.offsets
    c = ball.center
    R = ball.radius
    fc = bundle.values(c)
    hi = float(np.max(fc))
    if k == 1:
        return hi - R, c - R * A[0], np.array([1.0])
    lo = hi - R  # each unit-gradient piece has ball minimum f_r(c) - R
    floor = _epigraph_floor(bundle)
    if floor > lo:
        lo = floor
    tol = 1e-10 * (1.0 + R)
    y_best = c.copy()
    mu_best = np.zeros(k)
    warm = None
    guard = 1e-12 * (1.0 + R)
    for _ in range(120):
        if hi - lo <= tol:
            break
        t = 0.5 * (lo + hi)
        y, mu = project_polyhedron(c, A, t - alpha, gram=bundle.gram, warm=warm)
        warm = mu > 0.0
        if float(np.linalg.norm(y - c)) <= R + guard:
            hi = t
            y_best = y
            mu_best = mu
        else:
            lo = t
    return hi, y_best, mu_best


def min_max_over_ball(bundle: Bundle, ball: Ball):
    """min over the ball of the bundle max; returns (delta, argmin)."""
    delta, y, _ = _min_max_full(bundle, ball)
    return delta, y


def recover_dual(bundle: Bundle, ball: Ball, argmin, mu=None):
    """Best available simplex certificate lam for the min-max dual.

    Ball-active optima certify through the normalized projection multipliers;
    interior optima through a near-null convex combination of the active cut
    gradients found by a small LP.
    """
    k = len(bundle)
    cands = []
    if mu is not None and float(np.sum(mu)) > 0.0:
        cands.append(np.asarray(mu, dtype=float) / float(np.sum(mu)))
    f = bundle.values(argmin)
    top = float(np.max(f))
    act = np.flatnonzero(f >= top - 1e-7 * (1.0 + abs(top)))
    e = np.zeros(k)
    e[act[0]] = 1.0
    cands.append(e)
    if act.size > 1:
        # min s  s.t. -s <= (A_act^T lam)_i <= s, sum lam = 1, lam >= 0
        Aact = bundle.gradients[act]
        n = Aact.shape[1]
        p = act.size
        G = np.vstack([
            np.hstack([Aact.T, -np.ones((n, 1))]),
            np.hstack([-Aact.T, -np.ones((n, 1))]),
            np.hstack([np.ones((1, p)), np.zeros((1, 1))]),
            np.hstack([-np.ones((1, p)), np.zeros((1, 1))]),
        ])
        h = np.concatenate([np.zeros(2 * n), [1.0, -1.0]])
        cvec = np.zeros(p + 1)
        cvec[p] = 1.0
        lo = np.concatenate([np.zeros(p), [0.0]])
        hi_b = np.full(p + 1, np.inf)
        res = solve_lp(LinearProgram(c=cvec, G=G, h=h, lo=lo, hi=hi_b))
        if res.status == "optimal":
            lam = np.zeros(k)
            lam[act] = np.maximum(res.z[:p], 0.0)
            s = float(np.sum(lam))
            if s > 0.0:
                cands.append(lam / s)
    vals = [dual_value(bundle, ball, lam) for lam in cands]
    return cands[int(np.argmax(vals))]


def project_to_level(y_prev, bundle: Bundle, level: float, ball: Ball):
    """Metric projection of y_prev onto {y in ball : max_r f_r(y) <= level}.

    Scalar bisection on the ball multiplier: for mu >= 0 the inner problem
    min |y - y_prev|^2 + mu |y - c|^2 over the cut polyhedron is an ordinary
    projection of (y_prev + mu c)/(1 + mu), and |y(mu) - c| is nonincreasing
    in mu.
    """
    y_prev = np.asarray(y_prev, dtype=float)
    k = len(bundle)
    if k == 0:
        raise EmptyBundle("project_to_level needs at least one cut")
    A = bundle.gradients
    b = level - bundle.offsets
    c = ball.center
    R = ball.radius
    tol_in = 1e-9 * (1.0 + abs(level))
    if bundle.value(y_prev) <= level + tol_in and ball.contains(y_prev):
        return y_prev.copy()

    guard = 1e-12 * (1.0 + R)
    try:
        y0, mu0 = project_polyhedron(y_prev, A, b, gram=bundle.gram)
    except NumericalFailure:
        # classify a stalled projection: empty cut polyhedron is caller error
        if lp_feasible(A, b).status == "infeasible":
            raise EmptyLevelSet("the cut level set is empty") from None
        raise
    if float(np.linalg.norm(y0 - c)) <= R + guard:
        return y0

    # level set inside the ball must be nonempty; certify via the center
    yc, _ = project_polyhedron(c, A, b, gram=bundle.gram)
    dist_c = float(np.linalg.norm(yc - c))
    if dist_c > R + 1e-7 * (1.0 + R):
        raise EmptyLevelSet("level set does not meet the ball")

    warm = mu0 > 0.0

    def inner(mu):
        q = (y_prev + mu * c) / (1.0 + mu)
        y, m = project_polyhedron(q, A, b, gram=bundle.gram, warm=warm)
        return y, m

    mu_lo, mu_hi = 0.0, 1.0
    y_hi = None
    for _ in range(64):
        y_hi, m = inner(mu_hi)
        warm = m > 0.0
        if float(np.linalg.norm(y_hi - c)) <= R + guard:
            break
        mu_lo = mu_hi
        mu_hi *= 4.0
        if mu_hi > 1e13:
            return yc
    else:
        return yc

    while mu_hi - mu_lo > _MU_BIS_TOL:
        mu_mid = 0.5 * (mu_lo + mu_hi)
        y_mid, m = inner(mu_mid)
        warm = m > 0.0
        if float(np.linalg.norm(y_mid - c)) <= R + guard:
            mu_hi = mu_mid
            y_hi = y_mid
        else:
            mu_lo = mu_mid
    return y_hi
