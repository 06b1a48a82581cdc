"""Exact optima for small instances: LP-based branch and bound, and an
independent exhaustive enumerator that never looks at the constraint matrix."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .formulation import Formulation
from .io import feasibility_check, placements_value
from .lp import solve_lp
from .model import Instance

PROVED_OPTIMAL = "proved_optimal"
TIME_LIMIT = "time_limit"

INT_TOL = 1e-6


@dataclass
class ExactResult:
    optimal_value: int
    placements: list = field(default_factory=list)
    nodes_explored: int = 0
    status: str = PROVED_OPTIMAL
    root_bound: float | None = None
    wall_time: float = 0.0


class TooLarge(ValueError):
    pass


def solve_exact_bb(instance, time_limit: float | None = None, incumbent=None,
                   use_dca_incumbent: bool = True, backend: str | None = None) -> ExactResult:
    """Depth-first branch and bound on the 0-1 model.

    Bounds come from the LP relaxation over A with the branched variables
    fixed through their box bounds. Branches on the most fractional
    variable (lowest column on ties), exploring the 1-branch first.
    ``incumbent`` may be a list of placements to seed the search; by default
    the DCA pattern is used when it is feasible.
    """
    if time_limit is not None and not time_limit > 0:
        raise ValueError(f"time_limit must be > 0, got {time_limit}")
    t0 = time.perf_counter()
    form = instance if isinstance(instance, Formulation) else Formulation(instance)
    inst, n = form.instance, form.n
    cost = -form.v

    best_val, best_pl = 0, []
    if incumbent is None and use_dca_incumbent and n:
        from .dca import DcaConfig, run_dca

        t = 1.0 + float(form.v.sum())
        res = run_dca(form, DcaConfig(t=t, u=t, backend=backend))
        if res.feasible:
            incumbent = res.placements
    if incumbent:
        if not feasibility_check(inst, incumbent):
            raise ValueError("seed incumbent is infeasible")
        best_val, best_pl = placements_value(inst, incumbent), list(incumbent)

    if n == 0:
        return ExactResult(0, [], 0, PROVED_OPTIMAL, 0.0, time.perf_counter() - t0)

    nodes = 0
    root_bound = None
    status = PROVED_OPTIMAL
    stack = [(np.zeros(n), np.ones(n))]
    while stack:
        if time_limit is not None and time.perf_counter() - t0 > time_limit:
            status = TIME_LIMIT
            break
        lo, up = stack.pop()
        nodes += 1
        sol = solve_lp(form.A, cost, lower=lo, upper=up, backend=backend)
        if not sol.optimal:
            continue
        bound = -sol.objective
        if root_bound is None:
            root_bound = bound
        if math.floor(bound + 1e-9) <= best_val:
            continue
        x = sol.x
        dist = np.minimum(x, 1.0 - x)
        if dist.max() <= INT_TOL:
            pl = [form.index.triple(j) for j in np.flatnonzero(x > 0.5)]
            val = placements_value(inst, pl)
            if val > best_val and feasibility_check(inst, pl):
                best_val, best_pl = val, pl
            continue
        j = int(np.argmax(dist))
        zero_lo, zero_up = lo.copy(), up.copy()
        zero_up[j] = 0.0
        one_lo, one_up = lo.copy(), up.copy()
        one_lo[j] = 1.0
        stack.append((zero_lo, zero_up))
        stack.append((one_lo, one_up))
    return ExactResult(best_val, sorted(best_pl), nodes, status, root_bound,
                       time.perf_counter() - t0)


def solve_brute_force(instance: Instance, var_cap: int = 20) -> ExactResult:
    """Exhaustive search over all placement subsets, checked on unit cells.

    Infeasibility is monotone under adding placements, so infeasible prefixes
    are cut without losing any feasible subset.
    """
    t0 = time.perf_counter()
    form = instance if isinstance(instance, Formulation) else Formulation(instance)
    inst = form.instance
    triples = form.index.triples()
    n = len(triples)
    if n > var_cap:
        raise TooLarge(f"{n} variables exceed var_cap={var_cap}")
    cells = []
    for i, p, q in triples:
        pc = inst.pieces[i]
        cells.append(frozenset((r, s) for r in range(p, p + pc.length) for s in range(q, q + pc.width)))
    counts = [0] * inst.m
    used: set = set()
    chosen: list = []
    best = [0, []]
    visited = 0

    def rec(j: int, value: int):
        nonlocal visited
        visited += 1
        if j == n:
            if value > best[0]:
                best[0], best[1] = value, list(chosen)
            return
        i = triples[j][0]
        if counts[i] < inst.pieces[i].max_count and not (cells[j] & used):
            counts[i] += 1
            used.update(cells[j])
            chosen.append(triples[j])
            rec(j + 1, value + inst.pieces[i].value)
            chosen.pop()
            used.difference_update(cells[j])
            counts[i] -= 1
        rec(j + 1, value)

    rec(0, 0)
    return ExactResult(best[0], sorted(best[1]), visited, PROVED_OPTIMAL, None,
                       time.perf_counter() - t0)
