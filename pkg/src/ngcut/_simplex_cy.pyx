# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled pivot loop of the bounded-variable revised simplex.

Mirrors ``_simplex_py.iterate``: same pricing, ratio test, tie-breaking and
update order.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY, fabs

cnp.import_array()

DEF OPTIMAL = 0
DEF UNBOUNDED = 1
DEF ITERATION_LIMIT = 2


def iterate(double[:, ::1] Binv, long long[::1] colptr, long long[::1] rowind,
            double[::1] vals, double[::1] d, double[::1] xB, long long[::1] basis,
            signed char[::1] at_upper, signed char[::1] is_basic,
            double[::1] lb, double[::1] ub,
            long long max_iter, double tol_opt, double tol_piv, double tol_tie,
            long long stall_limit, long long stall):
    cdef Py_ssize_t m = Binv.shape[0]
    cdef Py_ssize_t N = d.shape[0]
    cdef Py_ssize_t i, j, k, q, r, b, e
    cdef long long it = 0
    cdef double gap, viol, best, dirn, a, lim, theta_rows, theta, flip, piv, f, xq, ratio, s
    cdef bint bland, to_upper
    cdef cnp.ndarray[cnp.double_t, ndim=1] col_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] col = col_arr
    cdef cnp.ndarray[cnp.double_t, ndim=1] lims_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] lims = lims_arr
    cdef cnp.ndarray[cnp.int8_t, ndim=1] kind_arr = np.empty(m, dtype=np.int8)
    cdef signed char[::1] kind = kind_arr

    while True:
        if it >= max_iter:
            return ITERATION_LIMIT, it, stall
        bland = stall >= stall_limit

        # pricing
        q = -1
        best = 0.0
        for j in range(N):
            if is_basic[j] or ub[j] - lb[j] <= 0.0:
                continue
            if at_upper[j]:
                viol = d[j]
            else:
                viol = -d[j]
            if viol > tol_opt:
                if bland:
                    q = j
                    break
                if viol > best:
                    best = viol
                    q = j
        if q < 0:
            return OPTIMAL, it, stall

        # entering column in the current basis: col = Binv @ M[:, q]
        for i in range(m):
            col[i] = 0.0
        for e in range(colptr[q], colptr[q + 1]):
            k = rowind[e]
            f = vals[e]
            for i in range(m):
                col[i] = col[i] + f * Binv[i, k]

        dirn = -1.0 if at_upper[q] else 1.0

        # ratio test
        theta_rows = INFINITY
        for i in range(m):
            kind[i] = 0
            a = col[i] * dirn
            b = basis[i]
            if a > tol_piv:
                gap = xB[i] - lb[b]
                kind[i] = 1
            elif a < -tol_piv:
                if ub[b] == INFINITY:
                    continue
                gap = ub[b] - xB[i]
                a = -a
                kind[i] = 2
            else:
                continue
            # basic values within tol_tie of a bound count as on it
            lim = 0.0 if gap <= tol_tie else gap / a
            lims[i] = lim
            if lim < theta_rows:
                theta_rows = lim
        flip = ub[q] - lb[q]
        if flip == INFINITY and theta_rows == INFINITY:
            return UNBOUNDED, it, stall

        # among near-ties: largest |pivot| (Bland mode: lowest variable index)
        r = -1
        if flip > theta_rows + tol_tie:
            for i in range(m):
                if kind[i] and lims[i] <= theta_rows + tol_tie:
                    if r < 0:
                        r = i
                    elif bland:
                        if basis[i] < basis[r]:
                            r = i
                    elif fabs(col[i]) > fabs(col[r]) or (fabs(col[i]) == fabs(col[r]) and basis[i] < basis[r]):
                        r = i
        it += 1

        if r < 0:
            theta = flip
            for i in range(m):
                a = col[i]
                if a != 0.0:
                    xB[i] -= dirn * theta * a
            at_upper[q] = 0 if at_upper[q] else 1
            stall = 0
            continue

        theta = lims[r]
        to_upper = kind[r] == 2
        for i in range(m):
            a = col[i]
            if a != 0.0:
                xB[i] -= dirn * theta * a
        if at_upper[q]:
            xq = ub[q] - theta
        else:
            xq = lb[q] + theta
        b = basis[r]
        is_basic[b] = 0
        at_upper[b] = 1 if to_upper else 0
        basis[r] = q
        is_basic[q] = 1
        at_upper[q] = 0
        xB[r] = xq

        piv = col[r]

        # reduced costs: d_j -= d_q / piv * (row r of Binv) . M[:, j]
        ratio = d[q] / piv
        if ratio != 0.0:
            for j in range(N):
                if is_basic[j]:
                    continue
                s = 0.0
                for e in range(colptr[j], colptr[j + 1]):
                    s = s + Binv[r, rowind[e]] * vals[e]
                if s != 0.0:
                    d[j] = d[j] - ratio * s
        d[q] = 0.0

        # basis inverse
        for k in range(m):
            Binv[r, k] = Binv[r, k] / piv
        for i in range(m):
            if i == r:
                continue
            f = col[i]
            if f == 0.0:
                continue
            for k in range(m):
                Binv[i, k] = Binv[i, k] - f * Binv[r, k]

        if theta <= tol_tie:
            stall += 1
        else:
            stall = 0


DEF INFEASIBLE = 3


def iterate_dual(double[:, ::1] Binv, long long[::1] colptr, long long[::1] rowind,
                 double[::1] vals, double[::1] d, double[::1] xB, long long[::1] basis,
                 signed char[::1] at_upper, signed char[::1] is_basic,
                 double[::1] lb, double[::1] ub,
                 long long max_iter, double tol_feas, double tol_opt, double tol_piv):
    """Dual simplex from a dual feasible basis until xB is within bounds.

    Leaving row by dual steepest edge (exact row norms of Binv); entering
    column by a bound-flipping ratio test with a Harris tolerance on the
    final breakpoint.
    """
    cdef Py_ssize_t m = Binv.shape[0]
    cdef Py_ssize_t N = d.shape[0]
    cdef Py_ssize_t i, j, k, q, p, b, e, nc, kk, pos
    cdef long long it = 0
    cdef double viol, worst, g, dirj, aj, bound, best_a, s, f, piv, delta, target, xq, slope, rng
    cdef bint above
    cdef cnp.ndarray[cnp.double_t, ndim=1] col_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] col = col_arr
    cdef cnp.ndarray[cnp.double_t, ndim=1] row_arr = np.empty(N, dtype=np.float64)
    cdef double[::1] alpha = row_arr
    cdef cnp.ndarray[cnp.double_t, ndim=1] rhs_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] shift = rhs_arr
    cdef cnp.ndarray[cnp.int64_t, ndim=1] cand_arr = np.empty(N, dtype=np.int64)
    cdef long long[::1] cand = cand_arr
    cdef cnp.ndarray[cnp.double_t, ndim=1] ratio_arr = np.empty(N, dtype=np.float64)
    cdef double[::1] ratio = ratio_arr
    cdef cnp.ndarray[cnp.int64_t, ndim=1] order_arr
    cdef long long[::1] order

    while True:
        if it >= max_iter:
            return ITERATION_LIMIT, it

        # leaving row: dual steepest edge, violation^2 / ||row of Binv||^2
        p = -1
        worst = 0.0
        for i in range(m):
            b = basis[i]
            viol = lb[b] - xB[i]
            if xB[i] - ub[b] > viol:
                viol = xB[i] - ub[b]
            if viol > tol_feas:
                s = 0.0
                for k in range(m):
                    s = s + Binv[i, k] * Binv[i, k]
                viol = viol * viol / s
                if viol > worst:
                    worst = viol
                    p = i
        if p < 0:
            return OPTIMAL, it
        b = basis[p]
        above = xB[p] > ub[b]
        g = -1.0 if above else 1.0
        target = ub[b] if above else lb[b]

        # pivot row of the nonbasic columns
        for j in range(N):
            if is_basic[j]:
                alpha[j] = 0.0
                continue
            s = 0.0
            for e in range(colptr[j], colptr[j + 1]):
                s = s + Binv[p, rowind[e]] * vals[e]
            alpha[j] = s

        # candidates in column order, then sorted by ratio (stable)
        nc = 0
        for j in range(N):
            if is_basic[j] or ub[j] - lb[j] <= 0.0:
                continue
            dirj = -1.0 if at_upper[j] else 1.0
            aj = -g * alpha[j] * dirj
            if aj > tol_piv:
                cand[nc] = j
                ratio[nc] = d[j] * dirj / aj
                nc += 1
        if nc == 0:
            return INFEASIBLE, it
        order_arr = np.argsort(ratio_arr[:nc], kind="stable")
        order = order_arr

        # pass breakpoints while flipping keeps row p infeasible
        slope = fabs(xB[p] - target)
        kk = 0
        while kk < nc:
            j = cand[order[kk]]
            aj = fabs(alpha[j])
            rng = ub[j] - lb[j]
            if rng == INFINITY or slope - aj * rng <= tol_feas:
                break
            slope -= aj * rng
            kk += 1
        if kk == nc:
            return INFEASIBLE, it

        # Harris pass over the remaining breakpoints
        bound = INFINITY
        for pos in range(kk, nc):
            j = cand[order[pos]]
            if ratio[order[pos]] > bound:
                break
            f = (ratio[order[pos]] * fabs(alpha[j]) + tol_opt) / fabs(alpha[j])
            if f < bound:
                bound = f
        q = -1
        best_a = 0.0
        for pos in range(kk, nc):
            if ratio[order[pos]] > bound:
                break
            j = cand[order[pos]]
            aj = fabs(alpha[j])
            if aj > best_a:
                best_a = aj
                q = j
        it += 1

        # apply the bound flips
        if kk > 0:
            for i in range(m):
                shift[i] = 0.0
            for pos in range(kk):
                j = cand[order[pos]]
                rng = ub[j] - lb[j]
                delta = -rng if at_upper[j] else rng
                at_upper[j] = 0 if at_upper[j] else 1
                for e in range(colptr[j], colptr[j + 1]):
                    shift[rowind[e]] += delta * vals[e]
            for k in range(m):
                f = shift[k]
                if f != 0.0:
                    for i in range(m):
                        xB[i] -= Binv[i, k] * f

        for i in range(m):
            col[i] = 0.0
        for e in range(colptr[q], colptr[q + 1]):
            k = rowind[e]
            f = vals[e]
            for i in range(m):
                col[i] = col[i] + f * Binv[i, k]
        piv = col[p]

        delta = (xB[p] - target) / piv
        for i in range(m):
            f = col[i]
            if f != 0.0:
                xB[i] -= delta * f
        xq = (ub[q] if at_upper[q] else lb[q]) + delta
        is_basic[b] = 0
        at_upper[b] = 1 if above else 0
        basis[p] = q
        is_basic[q] = 1
        at_upper[q] = 0
        xB[p] = xq

        s = d[q] / piv
        if s != 0.0:
            for j in range(N):
                if is_basic[j]:
                    continue
                if j == b:
                    d[j] = d[j] - s
                elif alpha[j] != 0.0:
                    d[j] = d[j] - s * alpha[j]
        d[q] = 0.0

        for k in range(m):
            Binv[p, k] = Binv[p, k] / piv
        for i in range(m):
            if i == p:
                continue
            f = col[i]
            if f == 0.0:
                continue
            for k in range(m):
                Binv[i, k] = Binv[i, k] - f * Binv[p, k]
