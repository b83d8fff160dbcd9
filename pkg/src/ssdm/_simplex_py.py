"""Pure numpy bounded-variable primal simplex kernel.

Canonical problem:

    minimize    c . z
    subject to  G z <= h,    lo <= z <= hi   (entries may be +-inf)

Contract (shared with the compiled kernel in ``_simplex.pyx``):

    simplex_solve(G, h, c, lo, hi, max_iter=0)
        -> (status, z, value, lam, ray, iters)

    status 0: optimal.  ``z`` is a basic (vertex) solution, ``value = c.z``.
    status 1: infeasible.  ``lam`` >= 0 holds L1-normalized row multipliers
              from the optimal phase-one duals; together with the bound
              multipliers implied by the sign pattern of lam.G they certify
              that (lam.G) z <= lam.h fails for every z in the box.
    status 2: unbounded.  ``ray`` is an improving recession direction of the
              structural variables.
    status 3: pivot cap hit (numerically stalled instance).

Pivoting: Dantzig pricing with lowest-index tie-breaks, switching permanently
to Bland's lowest-index rule after a stretch of pivots without objective
improvement, so termination is guaranteed.  Phase one puts artificials on the
initially violated rows; their optimal duals are read off the slack columns
of the tableau (which hold the basis inverse).
"""

from __future__ import annotations

import numpy as np

INF = np.inf

_TOL_D = 1e-9       # reduced-cost threshold
_TOL_PIV = 1e-10    # minimum pivot magnitude
_STALL_LIMIT = 500  # non-improving pivots before switching to Bland


def simplex_solve(G, h, c, lo, hi, max_iter: int = 0):
    G = np.ascontiguousarray(G, dtype=float)
    h = np.ascontiguousarray(h, dtype=float)
    c = np.ascontiguousarray(c, dtype=float)
    lo = np.ascontiguousarray(lo, dtype=float)
    hi = np.ascontiguousarray(hi, dtype=float)
    m, n = G.shape

    tol_feas = 1e-8 * (1.0 + (float(np.max(np.abs(h))) if m else 0.0))

    # Initial nonbasic values: nearest finite bound, else 0 for free vars.
    val0 = np.where(np.isfinite(lo), lo, np.where(np.isfinite(hi), hi, 0.0))
    s_init = h - G @ val0 if m else np.zeros(0)
    art_rows = np.flatnonzero(s_init < 0.0)
    n_art = art_rows.size
    ncols = n + m + n_art

    if max_iter <= 0:
        max_iter = 50 * (m + ncols)

    xl = np.concatenate([lo, np.zeros(m + n_art)])
    xu = np.concatenate([hi, np.full(m + n_art, INF)])
    val = np.zeros(ncols)
    val[:n] = val0
    val[n:n + m] = np.maximum(s_init, 0.0)
    stat = np.empty(ncols, dtype=np.int64)  # 0 basic, 1 at lo, 2 at hi, 3 free
    stat[:n] = np.where(np.isfinite(lo), 1, np.where(np.isfinite(hi), 2, 3))
    stat[n:] = 1

    is_art = np.zeros(ncols, dtype=bool)
    is_art[n + m:] = True

    # Column matrix [G | I | -E_art]; tableau T = B^{-1} A with the initial
    # basis made of slacks and artificials (B = diag(sigma)).
    A = np.zeros((m, ncols))
    A[:, :n] = G
    A[np.arange(m), n + np.arange(m)] = 1.0
    sigma = np.ones(m)
    basis = n + np.arange(m)
    for k, i in enumerate(art_rows):
        A[i, n + m + k] = -1.0
        sigma[i] = -1.0
        basis[i] = n + m + k
        val[n + m + k] = -s_init[i]
    stat[basis] = 0
    T = sigma[:, None] * A

    c1 = np.zeros(ncols)
    c1[n + m:] = 1.0
    c2 = np.zeros(ncols)
    c2[:n] = c

    movable = xu - xl > _TOL_PIV
    iters = 0

    def run_phase(cost):
        nonlocal iters
        d = cost - cost[basis] @ T
        d[basis] = 0.0
        obj = float(cost @ val)
        bland = False
        stall = 0
        while True:
            # ---- pricing ----
            elig = (stat != 0) & ~is_art & movable
            gain_lo = np.where(elig & (stat != 2), -d, -INF)  # can increase
            gain_hi = np.where(elig & (stat != 1), d, -INF)   # can decrease
            gain = np.maximum(gain_lo, gain_hi)
            if bland:
                hits = np.flatnonzero(gain > _TOL_D)
                if hits.size == 0:
                    return 0, None, d
                j = int(hits[0])
            else:
                j = int(np.argmax(gain)) if ncols else 0
                if ncols == 0 or gain[j] <= _TOL_D:
                    return 0, None, d
            direction = 1.0 if gain_lo[j] >= gain_hi[j] else -1.0

            iters += 1
            if iters > max_iter:
                return 3, None, d

            w = T[:, j]
            # ---- ratio test ----
            own = xu[j] - xl[j] if stat[j] != 3 else INF
            t_own = own if np.isfinite(own) else INF
            coeff = direction * w
            t = np.full(m, INF)
            pos = coeff > _TOL_PIV
            neg = coeff < -_TOL_PIV
            bL = xl[basis]
            bU = xu[basis]
            vB = val[basis]
            ok = pos & np.isfinite(bL)
            t[ok] = (vB[ok] - bL[ok]) / coeff[ok]
            ok = neg & np.isfinite(bU)
            t[ok] = (vB[ok] - bU[ok]) / coeff[ok]
            np.maximum(t, 0.0, out=t)
            t_rows = float(t.min()) if m else INF

            if t_own == INF and t_rows == INF:
                ray = np.zeros(n)
                if j < n:
                    ray[j] = direction
                struct = basis < n
                ray[basis[struct]] = -direction * w[struct]
                return 2, ray, d

            if t_rows <= t_own:
                ties = np.flatnonzero(t == t_rows)
                r = int(ties[np.argmin(basis[ties])])
                t_best = t_rows
            else:
                r = -1
                t_best = t_own

            new_obj = obj + d[j] * direction * t_best
            if new_obj < obj - 1e-12 * (1.0 + abs(obj)):
                stall = 0
            else:
                stall += 1
                if stall >= _STALL_LIMIT:
                    bland = True
            obj = new_obj

            if r < 0:
                # bound flip of the entering variable
                val[basis] -= (direction * t_best) * w
                val[j] = xu[j] if stat[j] == 1 else xl[j]
                stat[j] = 2 if stat[j] == 1 else 1
                continue

            # ---- pivot ----
            lv = int(basis[r])
            hit_upper = coeff[r] < 0.0
            enter_val = val[j] + direction * t_best
            val[basis] -= (direction * t_best) * w
            val[lv] = xu[lv] if hit_upper else xl[lv]
            stat[lv] = 2 if hit_upper else 1
            val[j] = enter_val
            stat[j] = 0
            basis[r] = j

            piv = T[r, j]
            Trow = T[r] / piv
            T[r] = Trow
            dj = d[j]
            d -= dj * Trow
            d[j] = 0.0
            colj = T[:, j].copy()
            colj[r] = 0.0
            np.subtract(T, np.outer(colj, Trow), out=T)
            T[:, j] = 0.0
            T[r, j] = 1.0

    # ---- phase one ----
    if n_art:
        code, ray, _ = run_phase(c1)
        if code != 0:
            return 3, None, None, None, None, iters
        v_art = float(np.sum(val[n + m:]))
        if v_art > tol_feas:
            # duals off the slack block of the tableau: y = c1_B B^{-1}
            y = c1[basis] @ T[:, n:n + m]
            lam = np.maximum(-y, 0.0)
            s = float(np.sum(lam))
            if s > 0.0:
                lam /= s
            return 1, None, None, lam, None, iters
        # degenerate pivots to push artificials out of the basis
        for r in range(m):
            if basis[r] >= n + m:
                row = np.abs(T[r, :n + m])
                row[stat[:n + m] == 0] = 0.0
                row[~movable[:n + m]] = 0.0
                j = int(np.argmax(row))
                if row[j] <= 1e-7:
                    continue  # redundant row; artificial stays basic at 0
                lv = int(basis[r])
                val[lv] = 0.0
                stat[lv] = 1
                stat[j] = 0
                basis[r] = j
                piv = T[r, j]
                Trow = T[r] / piv
                T[r] = Trow
                colj = T[:, j].copy()
                colj[r] = 0.0
                T -= np.outer(colj, Trow)
                T[:, j] = 0.0
                T[r, j] = 1.0
        xu[n + m:] = 0.0
        movable[n + m:] = False

    # ---- phase two ----
    code, ray, _ = run_phase(c2)
    if code == 3:
        return 3, None, None, None, None, iters
    if code == 2:
        return 2, None, None, None, ray, iters
    z = val[:n].copy()
    np.clip(z, lo, hi, out=z)
    value = float(c @ z)
    return 0, z, value, None, None, iters
