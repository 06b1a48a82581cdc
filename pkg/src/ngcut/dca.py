"""DCA for the exact-penalty reformulation of the cutting problem.

With ``alpha(x) = sum x_j (1 - x_j)`` the 0-1 program becomes

    min  F(x) = -v.x + t * alpha(x)   over the polytope A,

a concave minimization written as ``g - h`` with ``g = -v.x + indicator_A``
and ``h(x) = t * sum x_j (x_j - 1)``. Each DCA step linearizes ``h`` at the
current point and solves one LP over A.

The starting point comes from a second DCA loop over the looser polytope B
(availability rows only), where overlap violations are charged through
``u * beta(x)``.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from . import io as ngio
from .formulation import Formulation
from .lp import BoundedSimplex, LpSolution, solve_lp
from .model import Instance

log = logging.getLogger(__name__)

INIT_STRATEGIES = ("initial_dca", "zeros", "ones", "lp_relaxation", "given")


class LpFailure(RuntimeError):
    def __init__(self, where: str, sol: LpSolution):
        super().__init__(f"{where}: LP returned status {sol.status!r}")
        self.solution = sol


@dataclass
class DcaConfig:
    t: float = 50.0
    u: float = 100.0
    epsilon: float = 1e-6
    max_iter: int = 500
    init_strategy: str = "initial_dca"
    x0: np.ndarray | None = None
    round_tol: float = 1e-6
    keep_iterates: bool = False
    warm_start: bool = False
    backend: str | None = None

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError(f"t must be > 0, got {self.t}")
        if not self.u > 0:
            raise ValueError(f"u must be > 0, got {self.u}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.init_strategy not in INIT_STRATEGIES:
            raise ValueError(f"unknown init_strategy {self.init_strategy!r}")
        if self.init_strategy == "given" and self.x0 is None:
            raise ValueError("init_strategy 'given' needs x0")


@dataclass
class DcaTrace:
    F_values: list = field(default_factory=list)
    displacements: list = field(default_factory=list)
    lp_iterations: list = field(default_factory=list)
    iterates: list = field(default_factory=list)
    iterations: int = 0
    termination: str = ""


@dataclass
class Rounding:
    accepted: bool
    rounded: np.ndarray | None = None
    placements: list = field(default_factory=list)
    total_value: int | None = None
    feasible: bool = False
    fractional: list = field(default_factory=list)
    violations: list = field(default_factory=list)


@dataclass
class DcaResult:
    x_final: np.ndarray
    F_final: float
    rounded: np.ndarray | None
    total_value: int | None
    feasible: bool
    trace: DcaTrace
    placements: list = field(default_factory=list)
    x0: np.ndarray | None = None
    init_trace: DcaTrace | None = None
    fractional: list = field(default_factory=list)
    wall_time: float = 0.0


def _form(obj) -> Formulation:
    return obj if isinstance(obj, Formulation) else Formulation(obj)


# ------------------------------------------------------------ merit functions

def alpha(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.sum(x * (1.0 - x)))


def penalized_objective_F(x, form_or_v, t: float) -> float:
    """``-v.x + t * alpha(x)``, without the indicator of A."""
    v = form_or_v.v if isinstance(form_or_v, Formulation) else np.asarray(form_or_v, dtype=float)
    x = np.asarray(x, dtype=float)
    return float(-v @ x + t * alpha(x))


def dc_objective(x, form: Formulation, t: float, tol: float = 1e-9) -> float:
    """``g(x) - h(x)``: the penalized objective, +inf outside A."""
    if not form.A.contains(x, tol):
        return float("inf")
    return penalized_objective_F(x, form, t)


def h(x, t: float) -> float:
    x = np.asarray(x, dtype=float)
    return float(t * np.sum(x * (x - 1.0)))


def subgradient_h(x, t: float) -> np.ndarray:
    return t * (2.0 * np.asarray(x, dtype=float) - 1.0)


def overlap_activity(x, form: Formulation) -> np.ndarray:
    return form.A.activity(x)[form.overlap]


def beta(x, form: Formulation) -> float:
    """Largest overlap-row excess over 1, floored at 0."""
    act = overlap_activity(x, form)
    if act.size == 0:
        return 0.0
    return float(max(0.0, act.max() - 1.0))


def G(x, form: Formulation, t: float, u: float) -> float:
    return penalized_objective_F(x, form, t) + u * beta(x, form)


def most_violated_cell(x, form: Formulation, tol: float = 1e-9):
    """Row (in A) of the most violated overlap constraint, lowest (r, s)
    on ties; None when every overlap row holds within ``tol``."""
    act = overlap_activity(x, form)
    if act.size == 0 or act.max() <= 1.0 + tol:
        return None
    return int(form.overlap[int(np.argmax(act))])


def initial_dca_subgradient(x, t: float, u: float, form: Formulation, tol: float = 1e-9) -> np.ndarray:
    y = subgradient_h(x, t)
    row = most_violated_cell(x, form, tol)
    if row is not None:
        mat = form.A.matrix
        sel = mat.rows == row
        y[mat.cols[sel]] -= u * mat.vals[sel]
    return y


# ------------------------------------------------------------ LP steps

def dca_step(x_k, t: float, polytope_A, v, solver: BoundedSimplex | None = None,
             warm: bool = False) -> LpSolution:
    """One DCA step: minimize ``(-v - y).x`` over A with ``y = t(2x_k - 1)``."""
    cost = -np.asarray(v, dtype=float) - subgradient_h(x_k, t)
    if solver is not None:
        return solver.solve(cost, warm=warm)
    return solve_lp(polytope_A, cost)


def lp_relaxation_start(form, backend: str | None = None) -> np.ndarray:
    form = _form(form)
    sol = solve_lp(form.A, -form.v, backend=backend)
    if not sol.optimal:
        raise LpFailure("LP relaxation", sol)
    return sol.x


def _loop(x, cost_of, solver: BoundedSimplex, cfg: DcaConfig, merit, where: str):
    trace = DcaTrace()
    trace.F_values.append(merit(x))
    if cfg.keep_iterates:
        trace.iterates.append(x.copy())
    for k in range(cfg.max_iter):
        sol = solver.solve(cost_of(x), warm=cfg.warm_start)
        if not sol.optimal:
            raise LpFailure(f"{where} iteration {k + 1}", sol)
        x_new = sol.x
        disp = float(np.linalg.norm(x_new - x))
        trace.iterations += 1
        trace.displacements.append(disp)
        trace.lp_iterations.append(sol.iterations)
        trace.F_values.append(merit(x_new))
        if cfg.keep_iterates:
            trace.iterates.append(x_new.copy())
        x = x_new
        if disp <= cfg.epsilon:
            trace.termination = "displacement_below_epsilon"
            break
    else:
        trace.termination = "max_iter"
    return x, trace


def run_initial_dca(form, config: DcaConfig | None = None):
    """DCA over B on ``-v.x + t alpha + u beta``, started at the LP
    relaxation optimum. Returns ``(x, trace)``; x may violate overlap rows."""
    form = _form(form)
    cfg = config or DcaConfig()
    x = lp_relaxation_start(form, cfg.backend)
    solver = BoundedSimplex(form.B, backend=cfg.backend)
    v = form.v

    def cost_of(xk):
        return -v - initial_dca_subgradient(xk, cfg.t, cfg.u, form)

    return _loop(x, cost_of, solver, cfg, lambda z: G(z, form, cfg.t, cfg.u), "Initial-DCA")


def starting_point(form: Formulation, cfg: DcaConfig):
    n = form.n
    if cfg.init_strategy == "zeros":
        return np.zeros(n), None
    if cfg.init_strategy == "ones":
        return np.ones(n), None
    if cfg.init_strategy == "lp_relaxation":
        return lp_relaxation_start(form, cfg.backend), None
    if cfg.init_strategy == "given":
        x0 = np.asarray(cfg.x0, dtype=float).reshape(-1)
        if x0.shape[0] != n:
            raise ValueError(f"x0 has length {x0.shape[0]}, expected {n}")
        return x0.copy(), None
    return run_initial_dca(form, cfg)


# ------------------------------------------------------------ rounding

def round_and_check(x, form, tol: float = 1e-6) -> Rounding:
    """Round a nearly-binary x and verify the pattern geometrically.

    Components farther than ``tol`` from {0, 1} cause a rejection listing
    them; no repair is attempted.
    """
    form = _form(form)
    x = np.asarray(x, dtype=float)
    frac = np.flatnonzero(np.minimum(np.abs(x), np.abs(1.0 - x)) > tol)
    if frac.size:
        return Rounding(False, fractional=frac.tolist())
    z = (x > 0.5).astype(np.int64)
    placements = [form.index.triple(j) for j in np.flatnonzero(z)]
    rep = ngio.feasibility_check(form.instance, placements)
    value = ngio.placements_value(form.instance, placements)
    return Rounding(True, z, placements, value, rep.ok, violations=rep.violations)


# ------------------------------------------------------------ driver

def run_dca(instance, config: DcaConfig | None = None, x0=None) -> DcaResult:
    """Full pipeline: starting point, DCA over A, rounding check."""
    t0 = time.perf_counter()
    form = _form(instance)
    cfg = config or DcaConfig()
    init_trace = None
    if x0 is None:
        x0, init_trace = starting_point(form, cfg)
    x0 = np.asarray(x0, dtype=float).copy()

    solver = BoundedSimplex(form.A, backend=cfg.backend)
    v = form.v

    def cost_of(xk):
        return -v - subgradient_h(xk, cfg.t)

    x, trace = _loop(x0, cost_of, solver, cfg, lambda z: dc_objective(z, form, cfg.t), "DCA")
    rnd = round_and_check(x, form, cfg.round_tol)
    feasible = rnd.accepted and rnd.feasible
    if rnd.accepted and not rnd.feasible:
        log.warning("rounded DCA iterate is geometrically infeasible: %s", rnd.violations)
    return DcaResult(
        x_final=x,
        F_final=penalized_objective_F(x, form, cfg.t),
        rounded=rnd.rounded if feasible else None,
        total_value=rnd.total_value if feasible else None,
        feasible=feasible,
        trace=trace,
        placements=rnd.placements if feasible else [],
        x0=x0,
        init_trace=init_trace,
        fractional=rnd.fractional,
        wall_time=time.perf_counter() - t0,
    )


def solve_instance(instance: Instance, **kwargs) -> DcaResult:
    return run_dca(instance, DcaConfig(**kwargs))
