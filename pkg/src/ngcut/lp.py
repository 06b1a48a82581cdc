"""Bounded-variable revised simplex for ``min c.x s.t. Ax <= b, lo <= x <= up``.

A cold solve starts from the all-slack basis with every structural column at
the bound its (slightly perturbed) cost prefers. That basis is dual feasible
because all structural bounds are finite, so a dual simplex pass reaches
primal feasibility (or proves the rows infeasible) without artificials. The
perturbation is then dropped and a primal simplex pass with Dantzig pricing
and a Bland fallback finishes on the true cost.

The pivot loops live in a compiled kernel (``_simplex_cy``) with a numpy
fallback (``_simplex_py``); set ``NGCUT_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass

import numpy as np

from . import _simplex_py
from .formulation import Polytope

log = logging.getLogger(__name__)

try:
    if os.environ.get("NGCUT_PURE_PYTHON") == "1":
        raise ImportError("pure-python backend forced")
    from . import _simplex_cy
except ImportError:  # pragma: no cover - depends on build
    _simplex_cy = None

BACKENDS = {"python": _simplex_py}
if _simplex_cy is not None:
    BACKENDS["cython"] = _simplex_cy
DEFAULT_BACKEND = "cython" if _simplex_cy is not None else "python"

TOL_FEAS = 1e-9
TOL_OPT = 1e-9
TOL_PIV = 1e-7
TOL_TIE = 1e-9
STALL_LIMIT = 50
REFACTOR_EVERY = 100
# relative size of the cost perturbation used by the dual pass
PERTURB = 1e-6

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
ITERATION_LIMIT = "iteration_limit"
UNBOUNDED = "unbounded"

_KERNEL_STATUS = {0: OPTIMAL, 1: UNBOUNDED, 2: ITERATION_LIMIT, 3: INFEASIBLE}


@dataclass
class LpSolution:
    status: str
    x: np.ndarray
    objective: float
    iterations: int
    basis: np.ndarray | None = None
    # multipliers y >= 0 of the rows: c + A^T y is the reduced cost vector
    duals: np.ndarray | None = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _perturbation(n: int) -> np.ndarray:
    """Deterministic weights in [0.5, 1.5) that differ between columns."""
    golden = 0.6180339887498949
    return 0.5 + np.modf(np.arange(1, n + 1) * golden)[0]


class BoundedSimplex:
    """Working state of one LP over a fixed polytope and fixed bounds.

    Revised simplex with an explicit dense basis inverse, rebuilt from
    scratch every ``REFACTOR_EVERY`` pivots. With ``warm=True`` a later
    ``solve`` skips the dual pass and restarts the primal pass from the
    previous optimal basis, which stays primal feasible because only the
    cost changed.
    """

    def __init__(self, polytope: Polytope | None = None, *, A=None, b=None,
                 lower=None, upper=None, backend: str | None = None,
                 max_iter: int | None = None):
        if polytope is not None:
            mat = polytope.matrix
            m, n = mat.n_rows, mat.n_cols
            rows, cols, vals = mat.rows, mat.cols, mat.vals
            b = polytope.rhs
        else:
            A = np.asarray(A, dtype=float)
            b = np.asarray(b, dtype=float).reshape(-1)
            A = A if A.ndim == 2 else np.atleast_2d(A)
            m, n = A.shape
            rows, cols = np.nonzero(A)
            vals = A[rows, cols]
        nz = vals != 0.0
        rows, cols, vals = rows[nz], cols[nz], vals[nz]
        order = np.lexsort((rows, cols))
        self.m, self.n = m, n
        self.b = np.asarray(b, dtype=float).copy()
        self._a_rows = np.asarray(rows, dtype=np.int64)[order]
        self._a_cols = np.asarray(cols, dtype=np.int64)[order]
        self._a_vals = np.asarray(vals, dtype=float)[order]
        self.lower = np.zeros(n) if lower is None else np.asarray(lower, dtype=float).copy()
        self.upper = np.ones(n) if upper is None else np.asarray(upper, dtype=float).copy()
        if not (np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper))):
            raise ValueError("variable bounds must be finite")
        name = backend or DEFAULT_BACKEND
        if name not in BACKENDS:
            raise ValueError(f"unknown backend {name!r}; available: {sorted(BACKENDS)}")
        self.kernel = BACKENDS[name]
        self.max_iter = max_iter if max_iter is not None else 50 * (m + n) + 1000
        self.iterations = 0
        self._ready = False

        N = n + m
        rows = np.concatenate([self._a_rows, np.arange(m)])
        cols = np.concatenate([self._a_cols, n + np.arange(m)])
        vals = np.concatenate([self._a_vals, np.ones(m)])
        self.rowind = np.ascontiguousarray(rows, dtype=np.int64)
        self.vals = np.ascontiguousarray(vals)
        self.col_of = np.ascontiguousarray(cols, dtype=np.int64)
        self.colptr = np.zeros(N + 1, dtype=np.int64)
        np.cumsum(np.bincount(cols, minlength=N), out=self.colptr[1:])
        self.N = N
        self.lb = np.concatenate([self.lower, np.zeros(m)])
        self.ub = np.concatenate([self.upper, np.full(m, np.inf)])

    def A_dot(self, x) -> np.ndarray:
        return np.bincount(self._a_rows, weights=self._a_vals * x[self._a_cols], minlength=self.m)

    def _reset_basis(self):
        self.basis = self.n + np.arange(self.m, dtype=np.int64)
        self.at_upper = np.zeros(self.N, dtype=np.int8)
        self.is_basic = np.zeros(self.N, dtype=np.int8)
        self.is_basic[self.basis] = 1
        self.stall = 0

    def _nonbasic_values(self) -> np.ndarray:
        full = np.where(self.at_upper.astype(bool), self.ub, self.lb)
        full[self.basis] = 0.0
        return full

    def _refactor(self, c_full):
        """Rebuild Binv, xB and the reduced costs from the basis list."""
        m = self.m
        B = np.zeros((m, m))
        for pos, j in enumerate(self.basis):
            sl = slice(self.colptr[j], self.colptr[j + 1])
            B[self.rowind[sl], pos] = self.vals[sl]
        self.Binv = np.ascontiguousarray(np.linalg.inv(B)) if m else np.zeros((0, 0))
        full = self._nonbasic_values()
        Mx = np.bincount(self.rowind, weights=self.vals * full[self.col_of], minlength=m)
        xB = self.Binv @ (self.b - Mx)
        blo, bup = self.lb[self.basis], self.ub[self.basis]
        xB = np.where(np.abs(xB - blo) <= TOL_FEAS, blo, xB)
        self.xB = np.where(np.abs(xB - bup) <= TOL_FEAS, bup, xB)
        pi = c_full[self.basis] @ self.Binv
        self.d = c_full - np.bincount(self.col_of, weights=pi[self.rowind] * self.vals,
                                      minlength=self.N)
        self.d[self.basis] = 0.0

    def _call(self, dual: bool, chunk: int):
        args = (self.Binv, self.colptr, self.rowind, self.vals, self.d, self.xB, self.basis,
                self.at_upper, self.is_basic, self.lb, self.ub, chunk)
        if dual:
            return self.kernel.iterate_dual(*args, TOL_FEAS, TOL_OPT, TOL_PIV)
        code, it, self.stall = self.kernel.iterate(*args, TOL_OPT, TOL_PIV, TOL_TIE,
                                                   STALL_LIMIT, self.stall)
        return code, it

    def _run(self, c_full, dual: bool = False) -> str:
        while True:
            self._refactor(c_full)
            budget = self.max_iter - self.iterations
            if budget <= 0:
                return ITERATION_LIMIT
            chunk = min(budget, REFACTOR_EVERY)
            code, it = self._call(dual, chunk)
            self.iterations += int(it)
            status = _KERNEL_STATUS[int(code)]
            if status != ITERATION_LIMIT or it < chunk:
                if status == OPTIMAL:
                    self._refactor(c_full)
                return status

    def _primal(self) -> np.ndarray:
        full = self._nonbasic_values()
        full[self.basis] = self.xB
        x = full[:self.n]
        lo, up = self.lower, self.upper
        x = np.where(np.abs(x - lo) <= TOL_FEAS, lo, x)
        x = np.where(np.abs(x - up) <= TOL_FEAS, up, x)
        return np.clip(x, lo, up)

    def _cold(self, cost) -> str:
        if np.any(self.lower > self.upper + TOL_FEAS):
            return INFEASIBLE
        self._reset_basis()
        n = self.n
        at_up = cost < 0.0
        self.at_upper[:n] = at_up
        shift = PERTURB * (1.0 + np.abs(cost)) * _perturbation(n)
        c_pert = np.concatenate([cost + np.where(at_up, -shift, shift), np.zeros(self.m)])
        return self._run(c_pert, dual=True)

    def solve(self, cost, warm: bool = False) -> LpSolution:
        cost = np.asarray(cost, dtype=float).reshape(-1)
        if cost.shape[0] != self.n:
            raise ValueError(f"cost has length {cost.shape[0]}, expected {self.n}")
        self.iterations = 0
        # pivoting works on cost / max|cost| so tolerances are scale free
        scale = float(np.abs(cost).max()) if self.n else 0.0
        c_unit = cost / scale if scale > 0 else cost
        status = OPTIMAL if (warm and self._ready) else self._cold(c_unit)
        if status != OPTIMAL:
            self._ready = False
            return LpSolution(status, np.full(self.n, np.nan), np.nan, self.iterations)
        c_full = np.concatenate([c_unit, np.zeros(self.m)])
        status = self._run(c_full)
        self._ready = status == OPTIMAL
        x = self._primal()
        obj = float(cost @ x)
        if status == OPTIMAL and self.m:
            worst = float((self.A_dot(x) - self.b).max())
            if worst > 1e-7:
                log.warning("LP solution violates a row by %.3g", worst)
        duals = None
        if status == OPTIMAL:
            duals = -scale * (c_full[self.basis] @ self.Binv) if scale > 0 else np.zeros(self.m)
        return LpSolution(status, x, obj, self.iterations, self.basis.copy(), duals)


def solve_lp(polytope: Polytope, cost, lower=None, upper=None,
             max_iter: int | None = None, backend: str | None = None) -> LpSolution:
    """Basic optimal solution of ``min cost.x`` over ``polytope`` with box
    bounds (default ``[0, 1]``). Deterministic for identical inputs."""
    solver = BoundedSimplex(polytope, lower=lower, upper=upper,
                            backend=backend, max_iter=max_iter)
    return solver.solve(cost)
