import numpy as np
import pytest
from hypothesis import given, settings

from ngcut import dca
from ngcut.dca import (DcaConfig, alpha, beta, dca_step, dc_objective, initial_dca_subgradient,
                       lp_relaxation_start, penalized_objective_F, round_and_check, run_dca,
                       run_initial_dca, subgradient_h)
from ngcut.exact import solve_brute_force
from ngcut.formulation import Formulation
from ngcut.model import Instance, Piece

from oracles import feasible_binaries, instances, random_instance


def test_alpha_examples():
    assert alpha(np.zeros(4)) == 0.0
    assert alpha(np.full(4, 0.5)) == 1.0
    assert alpha([1, 0, 1, 0]) == 0.0


def test_F_examples(t1):
    form = Formulation(t1)
    assert penalized_objective_F([1, 1, 0, 0], form, 30) == -18.0
    assert penalized_objective_F([1, 1, 0, 0], form, 1e6) == -18.0
    assert penalized_objective_F(np.zeros(4), form, 30) == 0.0
    assert penalized_objective_F([0.5, 0, 0, 0], form, 30) == pytest.approx(3.0)
    assert penalized_objective_F([0.5, 0, 0, 0], form.v, 30) == pytest.approx(3.0)


def test_subgradient_examples():
    assert subgradient_h([0.0, 1.0, 0.5], 30).tolist() == [-30.0, 30.0, 0.0]


def test_dca_step_examples(t1):
    form = Formulation(t1)
    assert dca_step(np.array([1.0, 1, 0, 0]), 30, form.A, form.v).x.tolist() == [1, 1, 0, 0]
    assert dca_step(np.zeros(4), 30, form.A, form.v).x.tolist() == [0, 0, 0, 0]
    relax = lp_relaxation_start(form)
    assert np.array_equal(dca_step(np.full(4, 0.3), 0.0, form.A, form.v).x, relax)


def test_run_dca_from_given_points(t1):
    res = run_dca(t1, DcaConfig(t=30), x0=np.array([1.0, 1, 0, 0]))
    assert res.feasible and res.total_value == 18 and res.trace.iterations == 1
    res = run_dca(t1, DcaConfig(t=30, init_strategy="zeros"))
    assert res.feasible and res.total_value == 0 and res.placements == []


def test_run_dca_t1_initial(t1):
    res = run_dca(t1, DcaConfig(t=30, u=10))
    assert res.feasible and res.total_value == 18
    assert sorted(res.placements) == [(0, 0, 0), (0, 2, 0)]
    assert res.init_trace is not None and res.trace.termination == "displacement_below_epsilon"


def test_beta_examples(t1):
    form = Formulation(t1)
    assert beta([1, 0, 1, 1], form) == 1.0
    assert beta(np.zeros(4), form) == 0.0
    assert beta([1, 1, 0, 0], form) == 0.0


def test_initial_subgradient_examples(t1):
    form = Formulation(t1)
    assert initial_dca_subgradient(np.array([1.0, 0, 1, 1]), 30, 10, form).tolist() == [20, -30, 20, 30]
    x = np.array([1.0, 1, 0, 0])
    assert np.array_equal(initial_dca_subgradient(x, 30, 10, form), subgradient_h(x, 30))
    assert initial_dca_subgradient(np.zeros(4), 30, 10, form).tolist() == [-30] * 4


def test_initial_dca_single_piece():
    inst = Instance(3, 2, (Piece(3, 2, 5, 1),))
    x, trace = run_initial_dca(inst, DcaConfig())
    assert x.tolist() == [1.0]
    assert lp_relaxation_start(inst).tolist() == [1.0]


def test_initial_dca_without_overlap_is_plain_dca_over_B():
    # the two positions p=0 and p=2 are disjoint, so beta vanishes on all of B
    inst = Instance(4, 2, (Piece(2, 2, 3, 2),))
    form = Formulation(inst)
    cfg = DcaConfig(t=5, u=7)
    x, trace = run_initial_dca(form, cfg)
    ref = lp_relaxation_start(form)
    for _ in range(trace.iterations):
        ref = dca_step(ref, cfg.t, form.B, form.v).x
    assert np.array_equal(x, ref)


def test_round_and_check(t1):
    form = Formulation(t1)
    r = round_and_check(np.array([1 - 1e-9, 0, 1, 0]), form, 1e-6)
    assert r.accepted and r.rounded.tolist() == [1, 0, 1, 0]
    assert not r.feasible and r.violations
    r = round_and_check(np.array([0.4, 0, 0, 0]), form)
    assert not r.accepted and r.fractional == [0]
    r = round_and_check(np.array([1.0, 1, 0, 0]), form)
    assert r.accepted and r.feasible and r.total_value == 18


def test_config_validation():
    for bad in (dict(t=0), dict(u=-1), dict(epsilon=0), dict(max_iter=0),
                dict(init_strategy="nope"), dict(init_strategy="given")):
        with pytest.raises(ValueError):
            DcaConfig(**bad)


def test_given_start_length_checked(t1):
    with pytest.raises(ValueError):
        run_dca(t1, DcaConfig(init_strategy="given", x0=np.zeros(3)))


def test_keep_iterates_and_strategies(t1):
    for strat in ("zeros", "ones", "lp_relaxation", "initial_dca"):
        res = run_dca(t1, DcaConfig(t=30, u=10, init_strategy=strat, keep_iterates=True))
        assert len(res.trace.iterates) == res.trace.iterations + 1
        assert len(res.trace.F_values) == res.trace.iterations + 1


def test_dc_objective_outside_A_is_inf(t1):
    form = Formulation(t1)
    assert dc_objective(np.ones(4), form, 30) == float("inf")
    assert dc_objective(np.array([1.0, 1, 0, 0]), form, 30) == -18.0


def _descends(trace):
    F = trace.F_values
    return all(b <= a + 1e-9 for a, b in zip(F, F[1:]))


@settings(max_examples=40, deadline=None)
@given(instances(max_side=10, max_m=3))
def test_descent_and_termination(inst):
    form = Formulation(inst)
    for strat in ("initial_dca", "ones", "lp_relaxation"):
        res = run_dca(form, DcaConfig(t=10, u=10, init_strategy=strat))
        assert _descends(res.trace)
        assert res.trace.termination == "displacement_below_epsilon"
        assert res.trace.iterations <= 200


@settings(max_examples=40, deadline=None)
@given(instances(max_side=10, max_m=3))
def test_fixed_point_is_idempotent(inst):
    form = Formulation(inst)
    cfg = DcaConfig(t=10, u=10)
    res = run_dca(form, cfg)
    again = dca_step(res.x_final, cfg.t, form.A, form.v).x
    assert np.linalg.norm(again - res.x_final) <= cfg.epsilon


@settings(max_examples=80, deadline=None)
@given(instances(max_side=10, max_m=3))
def test_beta_zero_iff_overlap_rows_hold(inst):
    form = Formulation(inst)
    rng = np.random.default_rng(form.n)
    for _ in range(10):
        x = (rng.random(form.n) < 0.4).astype(float)
        holds = bool(np.all(dca.overlap_activity(x, form) <= 1.0))
        assert beta(x, form) >= 0.0
        assert (beta(x, form) == 0.0) == holds


def test_rounded_results_are_feasible_and_bounded():
    rng = np.random.default_rng(31)
    done = 0
    while done < 25:
        form = Formulation(random_instance(rng))
        if not 0 < form.n <= 16:
            continue
        done += 1
        res = run_dca(form, DcaConfig(t=20, u=20))
        if res.feasible:
            assert res.total_value <= solve_brute_force(form).optimal_value


def test_exact_penalty_from_binary_starts():
    rng = np.random.default_rng(32)
    done = 0
    while done < 10:
        form = Formulation(random_instance(rng))
        if not 0 < form.n <= 8:
            continue
        done += 1
        t = 1.0 + sum(pc.value * pc.max_count for pc in form.instance.pieces)
        for x0 in feasible_binaries(form):
            res = run_dca(form, DcaConfig(t=t, u=t), x0=x0)
            assert alpha(res.x_final) <= 1e-7
