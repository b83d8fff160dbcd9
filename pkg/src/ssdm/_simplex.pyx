# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled bounded-variable primal simplex kernel.

Same contract and pivoting rules as ``_simplex_py.simplex_solve``; see that
module for documentation.  The backends are semantically interchangeable
(identical pivot choices in exact arithmetic); bitwise agreement between the
two is not guaranteed and not required.
"""

import numpy as np

from libc.math cimport INFINITY, fabs

_TOL_D = 1e-9
_TOL_PIV = 1e-10
_STALL_LIMIT = 500


def simplex_solve(G, h, c, lo, hi, max_iter=0):
    cdef double tol_d = _TOL_D
    cdef double tol_piv = _TOL_PIV

    G = np.ascontiguousarray(G, dtype=np.float64)
    h = np.ascontiguousarray(h, dtype=np.float64)
    c = np.ascontiguousarray(c, dtype=np.float64)
    lo_a = np.ascontiguousarray(lo, dtype=np.float64)
    hi_a = np.ascontiguousarray(hi, dtype=np.float64)
    cdef Py_ssize_t m = G.shape[0]
    cdef Py_ssize_t n = G.shape[1]

    cdef double tol_feas = 1e-8 * (1.0 + (float(np.max(np.abs(h))) if m else 0.0))

    val0 = np.where(np.isfinite(lo_a), lo_a, np.where(np.isfinite(hi_a), hi_a, 0.0))
    # row products in plain C loops so results are independent of BLAS threading
    cdef double[:, ::1] Gv = G
    cdef double[::1] hv = h
    cdef double[::1] v0 = val0
    s_init = np.empty(m)
    cdef double[::1] s_init_v = s_init
    cdef Py_ssize_t i0, j0
    cdef double acc
    for i0 in range(m):
        acc = hv[i0]
        for j0 in range(n):
            acc -= Gv[i0, j0] * v0[j0]
        s_init_v[i0] = acc
    art_rows = np.flatnonzero(s_init < 0.0)
    cdef Py_ssize_t n_art = art_rows.size
    cdef Py_ssize_t ncols = n + m + n_art

    cdef long cap
    if max_iter and int(max_iter) > 0:
        cap = int(max_iter)
    else:
        cap = 50 * (m + ncols)

    xl_a = np.concatenate([lo_a, np.zeros(m + n_art)])
    xu_a = np.concatenate([hi_a, np.full(m + n_art, np.inf)])
    val_a = np.zeros(ncols)
    val_a[:n] = val0
    val_a[n:n + m] = np.maximum(s_init, 0.0)
    stat_a = np.empty(ncols, dtype=np.intp)
    stat_a[:n] = np.where(np.isfinite(lo_a), 1, np.where(np.isfinite(hi_a), 2, 3))
    stat_a[n:] = 1

    is_art_a = np.zeros(ncols, dtype=np.uint8)
    is_art_a[n + m:] = 1

    A = np.zeros((m, ncols))
    A[:, :n] = G
    A[np.arange(m), n + np.arange(m)] = 1.0
    sigma = np.ones(m)
    basis_a = (n + np.arange(m)).astype(np.intp)
    cdef Py_ssize_t k, i
    for k in range(n_art):
        i = art_rows[k]
        A[i, n + m + k] = -1.0
        sigma[i] = -1.0
        basis_a[i] = n + m + k
        val_a[n + m + k] = -s_init[i]
    stat_a[basis_a] = 0
    T_a = sigma[:, None] * A

    c1_a = np.zeros(ncols)
    c1_a[n + m:] = 1.0
    c2_a = np.zeros(ncols)
    c2_a[:n] = c

    movable_a = (xu_a - xl_a > tol_piv).astype(np.uint8)

    cdef double[:, ::1] T = T_a
    cdef double[::1] c1_v = c1_a
    cdef double[::1] val = val_a
    cdef double[::1] xl = xl_a
    cdef double[::1] xu = xu_a
    cdef Py_ssize_t[::1] stat = stat_a
    cdef Py_ssize_t[::1] basis = basis_a
    cdef unsigned char[::1] is_art = is_art_a
    cdef unsigned char[::1] movable = movable_a

    cdef long iters = 0
    cdef long stall_limit = _STALL_LIMIT

    cdef double[::1] d
    cdef double[::1] cost
    cdef Py_ssize_t phase, j, jj, r, lv, sj
    cdef double obj, best, dirn, gl, gh, g, djj, dj
    cdef double t_own, t_rows, t_best, co, b, tt, piv, f, enter_val, new_obj
    cdef double own_rng, vart, ssum
    cdef Py_ssize_t lv_best
    cdef long stall
    cdef bint bland, hit_upper, unbounded, capped

    ray_out = None
    lam_out = None

    for phase in range(1, 3):
        if phase == 1 and n_art == 0:
            continue
        cost_a = c1_a if phase == 1 else c2_a
        d_a = np.empty(ncols)
        d = d_a
        cost = cost_a
        for jj in range(ncols):
            f = cost[jj]
            for i in range(m):
                f -= cost[basis[i]] * T[i, jj]
            d[jj] = f
        for i in range(m):
            d[basis[i]] = 0.0
        obj = 0.0
        for jj in range(ncols):
            obj += cost[jj] * val[jj]
        bland = False
        stall = 0
        unbounded = False
        capped = False

        while True:
            # ---- pricing ----
            j = -1
            best = tol_d
            dirn = 0.0
            for jj in range(ncols):
                if stat[jj] == 0 or is_art[jj] or not movable[jj]:
                    continue
                sj = stat[jj]
                djj = d[jj]
                gl = -djj if sj != 2 else -INFINITY
                gh = djj if sj != 1 else -INFINITY
                g = gl if gl >= gh else gh
                if g > best:
                    best = g
                    j = jj
                    dirn = 1.0 if gl >= gh else -1.0
                    if bland:
                        break
            if j < 0:
                break  # phase optimal

            iters += 1
            if iters > cap:
                capped = True
                break

            # ---- ratio test ----
            if stat[j] != 3:
                own_rng = xu[j] - xl[j]
                t_own = own_rng if own_rng != INFINITY else INFINITY
            else:
                t_own = INFINITY
            t_rows = INFINITY
            r = -1
            lv_best = -1
            for i in range(m):
                co = dirn * T[i, j]
                if co > tol_piv:
                    b = xl[basis[i]]
                    if b == -INFINITY:
                        continue
                    tt = (val[basis[i]] - b) / co
                elif co < -tol_piv:
                    b = xu[basis[i]]
                    if b == INFINITY:
                        continue
                    tt = (val[basis[i]] - b) / co
                else:
                    continue
                if tt < 0.0:
                    tt = 0.0
                if tt < t_rows or (tt == t_rows and basis[i] < lv_best):
                    t_rows = tt
                    r = i
                    lv_best = basis[i]

            if t_own == INFINITY and t_rows == INFINITY:
                unbounded = True
                break

            if t_rows <= t_own:
                t_best = t_rows
            else:
                r = -1
                t_best = t_own

            new_obj = obj + d[j] * dirn * t_best
            if new_obj < obj - 1e-12 * (1.0 + fabs(obj)):
                stall = 0
            else:
                stall += 1
                if stall >= stall_limit:
                    bland = True
            obj = new_obj

            if r < 0:
                for i in range(m):
                    val[basis[i]] -= dirn * t_best * T[i, j]
                if stat[j] == 1:
                    val[j] = xu[j]
                    stat[j] = 2
                else:
                    val[j] = xl[j]
                    stat[j] = 1
                continue

            # ---- pivot ----
            lv = basis[r]
            hit_upper = dirn * T[r, j] < 0.0
            enter_val = val[j] + dirn * t_best
            for i in range(m):
                val[basis[i]] -= dirn * t_best * T[i, j]
            if hit_upper:
                val[lv] = xu[lv]
                stat[lv] = 2
            else:
                val[lv] = xl[lv]
                stat[lv] = 1
            val[j] = enter_val
            stat[j] = 0
            basis[r] = j

            piv = T[r, j]
            for jj in range(ncols):
                T[r, jj] /= piv
            dj = d[j]
            for jj in range(ncols):
                d[jj] -= dj * T[r, jj]
            d[j] = 0.0
            for i in range(m):
                if i == r:
                    continue
                f = T[i, j]
                if f != 0.0:
                    for jj in range(ncols):
                        T[i, jj] -= f * T[r, jj]
                T[i, j] = 0.0
            T[r, j] = 1.0

        if capped:
            return 3, None, None, None, None, int(iters)
        if unbounded:
            if phase == 1:
                return 3, None, None, None, None, int(iters)
            ray = np.zeros(n)
            if j < n:
                ray[j] = dirn
            for i in range(m):
                if basis[i] < n:
                    ray[basis[i]] = -dirn * T[i, j]
            return 2, None, None, None, ray, int(iters)

        if phase == 1:
            vart = 0.0
            for jj in range(n + m, ncols):
                vart += val[jj]
            if vart > tol_feas:
                lam = np.zeros(m)
                for i in range(m):
                    acc = 0.0
                    for jj in range(m):
                        acc += c1_v[basis[jj]] * T[jj, n + i]
                    if -acc > 0.0:
                        lam[i] = -acc
                ssum = float(np.sum(lam))
                if ssum > 0.0:
                    lam /= ssum
                return 1, None, None, lam, None, int(iters)
            # degenerate pivots to push artificials out of the basis
            for r in range(m):
                if basis[r] >= n + m:
                    row = np.abs(T_a[r, :n + m]).copy()
                    row[stat_a[:n + m] == 0] = 0.0
                    row[movable_a[:n + m] == 0] = 0.0
                    j = int(np.argmax(row)) if n + m else -1
                    if j < 0 or row[j] <= 1e-7:
                        continue
                    lv = basis[r]
                    val[lv] = 0.0
                    stat[lv] = 1
                    stat[j] = 0
                    basis[r] = j
                    piv = T[r, j]
                    for jj in range(ncols):
                        T[r, jj] /= piv
                    for i in range(m):
                        if i == r:
                            continue
                        f = T[i, j]
                        if f != 0.0:
                            for jj in range(ncols):
                                T[i, jj] -= f * T[r, jj]
                        T[i, j] = 0.0
                    T[r, j] = 1.0
            xu_a[n + m:] = 0.0
            movable_a[n + m:] = 0

    z = val_a[:n].copy()
    np.clip(z, lo_a, hi_a, out=z)
    value = float(c @ z)
    return 0, z, value, None, None, int(iters)
