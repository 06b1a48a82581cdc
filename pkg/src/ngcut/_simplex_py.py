"""Pure numpy pivot loop; fallback for the compiled ``_simplex_cy``.

Same pricing, ratio test and tie-breaking as the compiled kernel, applied
as vector operations.
"""

import numpy as np

OPTIMAL = 0
UNBOUNDED = 1
ITERATION_LIMIT = 2


def iterate(Binv, colptr, rowind, vals, d, xB, basis, at_upper, is_basic, lb, ub,
            max_iter, tol_opt, tol_piv, tol_tie, stall_limit, stall):
    m = Binv.shape[0]
    N = d.shape[0]
    it = 0
    movable = (ub - lb) > 0.0
    col_of = np.repeat(np.arange(N), np.diff(colptr))
    while True:
        if it >= max_iter:
            return ITERATION_LIMIT, it, stall
        bland = stall >= stall_limit

        viol = np.where(at_upper.astype(bool), d, -d)
        eligible = movable & ~is_basic.astype(bool) & (viol > tol_opt)
        cand = np.flatnonzero(eligible)
        if cand.size == 0:
            return OPTIMAL, it, stall
        q = int(cand[0]) if bland else int(cand[np.argmax(viol[cand])])

        sl = slice(colptr[q], colptr[q + 1])
        col = np.zeros(m)
        for k, f in zip(rowind[sl], vals[sl]):
            col += f * Binv[:, k]

        dirn = -1.0 if at_upper[q] else 1.0
        a = col * dirn
        blb = lb[basis]
        bub = ub[basis]
        kind = np.zeros(m, dtype=np.int8)
        kind[a > tol_piv] = 1
        kind[(a < -tol_piv) & (bub != np.inf)] = 2
        lims = np.full(m, np.inf)
        k1 = kind == 1
        k2 = kind == 2
        gap = np.zeros(m)
        gap[k1] = xB[k1] - blb[k1]
        gap[k2] = bub[k2] - xB[k2]
        lims[k1] = gap[k1] / a[k1]
        lims[k2] = gap[k2] / (-a[k2])
        lims[(kind > 0) & (gap <= tol_tie)] = 0.0
        theta_rows = lims.min() if m else np.inf
        flip = ub[q] - lb[q]
        if flip == np.inf and theta_rows == np.inf:
            return UNBOUNDED, it, stall

        r = -1
        if flip > theta_rows + tol_tie:
            ties = np.flatnonzero((kind > 0) & (lims <= theta_rows + tol_tie))
            if bland:
                r = int(ties[np.argmin(basis[ties])])
            else:
                mag = np.abs(col[ties])
                top = ties[mag == mag.max()]
                r = int(top[np.argmin(basis[top])])
        it += 1

        nzc = np.flatnonzero(col != 0.0)
        if r < 0:
            xB[nzc] -= dirn * flip * col[nzc]
            at_upper[q] = 0 if at_upper[q] else 1
            stall = 0
            continue

        theta = lims[r]
        to_upper = kind[r] == 2
        xB[nzc] -= dirn * theta * col[nzc]
        xq = ub[q] - theta if at_upper[q] else lb[q] + theta
        b = basis[r]
        is_basic[b] = 0
        at_upper[b] = 1 if to_upper else 0
        basis[r] = q
        is_basic[q] = 1
        at_upper[q] = 0
        xB[r] = xq

        piv = col[r]
        ratio = d[q] / piv
        if ratio != 0.0:
            alpha_r = np.bincount(col_of, weights=Binv[r, rowind] * vals, minlength=N)
            upd = (alpha_r != 0.0) & ~is_basic.astype(bool)
            d[upd] = d[upd] - ratio * alpha_r[upd]
        d[q] = 0.0

        Binv[r] = Binv[r] / piv
        rows = nzc[nzc != r]
        if rows.size:
            Binv[rows] -= col[rows, None] * Binv[r][None, :]

        stall = stall + 1 if theta <= tol_tie else 0


INFEASIBLE = 3


def iterate_dual(Binv, colptr, rowind, vals, d, xB, basis, at_upper, is_basic, lb, ub,
                 max_iter, tol_feas, tol_opt, tol_piv):
    """Dual simplex from a dual feasible basis until xB is within bounds."""
    m = Binv.shape[0]
    N = d.shape[0]
    it = 0
    movable = (ub - lb) > 0.0
    col_of = np.repeat(np.arange(N), np.diff(colptr))
    while True:
        if it >= max_iter:
            return ITERATION_LIMIT, it
        blb, bub = lb[basis], ub[basis]
        viol = np.maximum(blb - xB, xB - bub)
        if m == 0 or viol.max() <= tol_feas:
            return OPTIMAL, it
        score = np.where(viol > tol_feas, viol * viol, 0.0)
        rows = np.flatnonzero(score)
        norms = np.zeros(rows.size)
        for k in range(m):
            norms += Binv[rows, k] * Binv[rows, k]
        score[rows] /= norms
        p = int(np.argmax(score))
        b = int(basis[p])
        above = xB[p] > ub[b]
        g = -1.0 if above else 1.0
        target = ub[b] if above else lb[b]

        nb = ~is_basic.astype(bool)
        alpha = np.bincount(col_of, weights=Binv[p, rowind] * vals, minlength=N)
        alpha[~nb] = 0.0

        dirj = np.where(at_upper.astype(bool), -1.0, 1.0)
        aj = -g * alpha * dirj
        cand = np.flatnonzero(nb & movable & (aj > tol_piv))
        if cand.size == 0:
            return INFEASIBLE, it
        ratio = d[cand] * dirj[cand] / aj[cand]
        order = np.argsort(ratio, kind="stable")
        sc, sr = cand[order], ratio[order]
        sa = np.abs(alpha[sc])

        slope = abs(xB[p] - target)
        kk = 0
        while kk < sc.size:
            rng = ub[sc[kk]] - lb[sc[kk]]
            if rng == np.inf or slope - sa[kk] * rng <= tol_feas:
                break
            slope -= sa[kk] * rng
            kk += 1
        if kk == sc.size:
            return INFEASIBLE, it

        bound = np.inf
        for pos in range(kk, sc.size):
            if sr[pos] > bound:
                break
            f = (sr[pos] * sa[pos] + tol_opt) / sa[pos]
            if f < bound:
                bound = f
        q, best_a = -1, 0.0
        for pos in range(kk, sc.size):
            if sr[pos] > bound:
                break
            if sa[pos] > best_a:
                best_a, q = sa[pos], int(sc[pos])
        it += 1

        if kk > 0:
            shift = np.zeros(m)
            for j in sc[:kk]:
                rng = ub[j] - lb[j]
                delta = -rng if at_upper[j] else rng
                at_upper[j] = 0 if at_upper[j] else 1
                sl = slice(colptr[j], colptr[j + 1])
                shift[rowind[sl]] += delta * vals[sl]
            for k in np.flatnonzero(shift != 0.0):
                xB -= Binv[:, k] * shift[k]

        sl = slice(colptr[q], colptr[q + 1])
        col = np.zeros(m)
        for k, f in zip(rowind[sl], vals[sl]):
            col += f * Binv[:, k]
        piv = col[p]

        delta = (xB[p] - target) / piv
        nzc = np.flatnonzero(col != 0.0)
        xB[nzc] -= delta * col[nzc]
        xq = (ub[q] if at_upper[q] else lb[q]) + delta
        is_basic[b] = 0
        at_upper[b] = 1 if above else 0
        basis[p] = q
        is_basic[q] = 1
        at_upper[q] = 0
        xB[p] = xq

        s = d[q] / piv
        if s != 0.0:
            upd = nb & (alpha != 0.0)
            upd[q] = False
            d[upd] = d[upd] - s * alpha[upd]
            d[b] = d[b] - s
        d[q] = 0.0

        Binv[p] = Binv[p] / piv
        rows = nzc[nzc != p]
        if rows.size:
            Binv[rows] -= col[rows, None] * Binv[p][None, :]
