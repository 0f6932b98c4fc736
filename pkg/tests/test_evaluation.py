import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brute import compound_by_cuts, compound_by_sequences, naive_sa_profile, naive_window_regrets
from saol.baselines import MultiplicativeWeights, RegretBoundSpec, mw_bound
from saol.core import Ball, Box, ExpertDistribution, ExpertLosses, QuadraticLoss, RoundRecord, Trace
from saol.evaluation import (
    AdversarialExperts,
    CompoundAction,
    ConvexComparator,
    DriftingOco,
    Segment,
    StationaryExperts,
    SwitchingExperts,
    best_compound_loss,
    best_fixed_loss,
    build_report,
    convex_losses,
    generate_environment,
    interval_regret,
    lemma2_bound,
    loss_matrix,
    offline_best_point,
    read_report,
    sa_regret_profile,
    strongly_adaptive_spec,
    tau_grid,
    theorem1_bound,
    theorem1_window_bounds,
    tracking_bound,
    tracking_regret,
    window_regrets,
    write_report,
)
from saol.meta import SAOL, run


def experts_trace(matrix, realized):
    matrix = np.asarray(matrix, dtype=float)
    recs = [RoundRecord(t, (), np.ones(1), None, ExpertDistribution.unchecked(np.ones(matrix.shape[1]) / matrix.shape[1]),
                        float(x), np.array([x])) for t, x in enumerate(realized, start=1)]
    return Trace(recs, [ExpertLosses(row) for row in matrix])


def random_trace(T, N, seed):
    rng = np.random.default_rng(seed)
    return experts_trace(rng.uniform(size=(T, N)), rng.uniform(size=T))


# ---------------------------------------------------------------- comparators

def test_best_fixed_loss_examples():
    e1, e2 = (0.1, 0.2, 0.3), (0.5, 0.0, 0.0)
    matrix = np.column_stack([e1, e2])
    value, arm = best_fixed_loss(matrix, (2, 3))
    assert value == pytest.approx(0.0) and arm == 1
    value, arm = best_fixed_loss(np.array([e1]).T, (1, 3))
    assert value == pytest.approx(0.6) and arm == 0
    value, arm = best_fixed_loss(np.column_stack([e1, e1, e1]), (1, 2))
    assert value == pytest.approx(0.3) and arm == 0
    with pytest.raises(ValueError):
        best_fixed_loss(matrix, (3, 2))
    with pytest.raises(IndexError):
        best_fixed_loss(matrix, (2, 4))


def test_interval_regret_examples():
    matrix = np.column_stack([np.full(8, 0.7), np.full(8, 0.2)])
    assert all(interval_regret(experts_trace(matrix, matrix[:, 1]), (q, s)) == 0
               for q in range(1, 9) for s in range(q, 9))
    worst = experts_trace(np.column_stack([np.ones(8), np.zeros(8)]), np.ones(8))
    assert interval_regret(worst, (2, 6)) == pytest.approx(5.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 30), st.integers(1, 5))
def test_interval_regret_matches_naive(seed, T, N):
    trace = random_trace(T, N, seed)
    matrix, realized = trace.loss_matrix(), trace.realized
    for tau in range(1, T + 1):
        fast = window_regrets(trace, tau)
        slow = naive_window_regrets(realized, matrix, tau)
        assert np.allclose(fast, slow, atol=1e-10)
        q = (seed % (T - tau + 1)) + 1
        assert interval_regret(trace, (q, q + tau - 1)) == pytest.approx(slow[q - 1], abs=1e-10)


@pytest.mark.parametrize("T", [16, 100, 256])
def test_sa_profile_matches_double_loop(T):
    trace = random_trace(T, 3, T)
    fast = sa_regret_profile(trace, "all")
    slow = naive_sa_profile(trace.realized, trace.loss_matrix())
    for tau in range(1, T + 1):
        value, (q, s) = fast[tau]
        assert value == pytest.approx(slow[tau], abs=1e-9)
        assert s - q + 1 == tau
        assert interval_regret(trace, (q, s)) == pytest.approx(value, abs=1e-9)


def test_sa_profile_full_window_is_standard_regret():
    trace = random_trace(50, 4, 1)
    matrix = trace.loss_matrix()
    value, span = sa_regret_profile(trace)[50]
    assert span == (1, 50)
    assert value == pytest.approx(trace.realized.sum() - matrix.sum(axis=0).min())


def test_sa_profile_zero_for_optimal_play():
    matrix = np.column_stack([np.full(20, 0.9), np.full(20, 0.1)])
    profile = sa_regret_profile(experts_trace(matrix, matrix[:, 1]), "all")
    assert all(v == 0 for v, _ in profile.values())


def test_tau_grid():
    assert tau_grid(16) == [1, 2, 4, 8, 16]
    assert tau_grid(20) == [1, 2, 4, 8, 16, 20]
    assert tau_grid(3, "all") == [1, 2, 3]
    assert tau_grid(10, [4, 2, 4]) == [2, 4]


# ---------------------------------------------------------------- compound actions

def test_compound_zero_switches_is_best_fixed():
    matrix = np.random.default_rng(0).uniform(size=(12, 3))
    value, action = best_compound_loss(matrix, 0)
    assert value == pytest.approx(matrix.sum(axis=0).min())
    assert action.switches == 0


def test_compound_hand_example():
    matrix = np.column_stack([(0, 0, 1, 1), (1, 1, 0, 0)])
    value, action = best_compound_loss(matrix, 1)
    assert value == 0.0
    assert action.arms == (0, 0, 1, 1)
    assert action.segments() == [(1, 2, 0), (3, 4, 1)]


def test_compound_matches_sequence_enumeration_small():
    rng = np.random.default_rng(5)
    for _ in range(10):
        matrix = rng.uniform(size=(8, 3))
        for m in range(4):
            assert best_compound_loss(matrix, m)[0] == pytest.approx(compound_by_sequences(matrix, m), abs=1e-12)


@pytest.mark.parametrize("seed", range(100))
def test_compound_matches_cut_enumeration(seed):
    rng = np.random.default_rng(seed)
    T, N, m = int(rng.integers(1, 33)), int(rng.integers(1, 5)), int(rng.integers(0, 4))
    matrix = rng.uniform(size=(T, N))
    value, action = best_compound_loss(matrix, m)
    assert value == pytest.approx(compound_by_cuts(matrix, m), abs=1e-10)
    assert action.in_class(m)
    assert action.loss(matrix) == pytest.approx(value, abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 40), st.integers(1, 4))
def test_compound_monotone_in_switch_budget(seed, T, N):
    matrix = np.random.default_rng(seed).uniform(size=(T, N))
    values = [best_compound_loss(matrix, m)[0] for m in range(6)]
    assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 60), st.integers(2, 4), st.integers(0, 4))
def test_tracking_regret_splits_over_segments(seed, T, N, m):
    trace = random_trace(T, N, seed)
    _, action = best_compound_loss(trace.loss_matrix(), m)
    parts = sum(interval_regret(trace, (a, b)) for a, b, _ in action.segments())
    assert tracking_regret(trace, m) == pytest.approx(parts, abs=1e-9)


def test_compound_action_helpers():
    act = CompoundAction((2, 2, 0, 0, 1))
    assert act.switches == 2 and act.in_class(2) and not act.in_class(1)
    with pytest.raises(ValueError):
        best_compound_loss(np.zeros((3, 2)), -1)


# ---------------------------------------------------------------- OCO oracle

@pytest.mark.parametrize("feasible", [Ball([0.0, 0.0], 0.5), Box([-0.3, -0.3], [0.4, 0.3])])
@pytest.mark.parametrize("family", ["quadratic", "affine", "mixed"])
def test_convex_closed_form_matches_subgradient(feasible, family):
    losses = convex_losses(DriftingOco(feasible, 40, family=family, seed=3))
    comp = ConvexComparator(losses, feasible)
    closed, x = comp.best(1, 40)
    generic, y = offline_best_point(losses, feasible, iters=20_000)
    assert feasible.contains(x)
    assert closed <= generic + 1e-12
    assert generic - closed <= 1e-4


def test_convex_window_best_matches_pointwise():
    feasible = Ball([0.0, 0.0], 0.5)
    comp = ConvexComparator(convex_losses(DriftingOco(feasible, 30, family="mixed", seed=1)), feasible)
    vals, _ = comp.window_best(7)
    assert np.allclose(vals, [comp.best(q, q + 6)[0] for q in range(1, 25)])


def test_unconstrained_minimizer_inside_set():
    f = QuadraticLoss.bowl(0.5, [0.1, -0.2])
    comp = ConvexComparator([f, f], Ball([0.0, 0.0], 1.0))
    value, x = comp.best(1, 2)
    assert np.allclose(x, [0.1, -0.2]) and value == pytest.approx(2 * f.value(np.array([0.1, -0.2])))


# ---------------------------------------------------------------- bounds

def test_theorem1_examples():
    spec = RegretBoundSpec(1.0, 0.5)
    assert theorem1_bound(spec, (16, 31)) == pytest.approx(838.63, abs=1e-2)
    assert theorem1_bound(spec, (1, 1)) == pytest.approx(4 / (math.sqrt(2) - 1) + 40)
    windows = theorem1_window_bounds(spec, 4, 20)
    assert np.allclose(windows, [theorem1_bound(spec, (q, q + 3)) for q in range(1, 18)])


def test_lemma2_examples():
    assert lemma2_bound((1, 1)) == pytest.approx(5.0)
    assert lemma2_bound((8, 15)) == pytest.approx(56.57, abs=1e-2)
    assert lemma2_bound((4, 7)) == pytest.approx(30.0)
    with pytest.raises(ValueError):
        lemma2_bound((3, 4))


def test_tracking_bound_examples():
    spec = RegretBoundSpec(1.0, 0.5)
    assert tracking_bound(spec, 100, 4) == pytest.approx(20.0)
    assert tracking_bound(spec, 100, 1) == pytest.approx(spec(100))
    with pytest.raises(ValueError):
        tracking_bound(spec, 100, 0)


def test_strongly_adaptive_spec_dominates_interval_bound():
    spec = mw_bound(10)
    sa = strongly_adaptive_spec(spec, 1024)
    assert sa.alpha == 0.5
    for q, s in [(1, 1), (1, 1024), (100, 611), (1000, 1024)]:
        assert theorem1_bound(spec, (q, s)) <= sa(s - q + 1) + 1e-9


# ---------------------------------------------------------------- environments

def test_stationary_example():
    assert np.array_equal(loss_matrix(StationaryExperts((0.0, 1.0), 3)), [[0, 1]] * 3)


def test_switching_example():
    env = SwitchingExperts((Segment(1, 2, 0), Segment(3, 4, 1)), n_arms=2, T=4, gap=1.0)
    assert np.array_equal(loss_matrix(env), [[0, 1], [0, 1], [1, 0], [1, 0]])
    assert env.switch_count == 1


@pytest.mark.parametrize("env", [
    StationaryExperts((0.2, 0.5, 0.8), 50, noise=0.2, seed=4),
    SwitchingExperts.evenly(3, 50, 4, noise=0.3, seed=4),
    AdversarialExperts(3, 50, seed=4),
])
def test_environments_deterministic_and_in_range(env):
    a, b = loss_matrix(env), loss_matrix(env)
    assert np.array_equal(a, b)
    assert a.min() >= 0 and a.max() <= 1


def test_evenly_spaced_switches():
    env = SwitchingExperts.evenly(4, 4096, 8, seed=2)
    assert env.switch_count == 8 and len(env.segments) == 9
    assert env.segments[0].start == 1 and env.segments[-1].end == 4096


def test_bad_environments_rejected():
    with pytest.raises(ValueError):
        loss_matrix(SwitchingExperts((Segment(1, 2, 0), Segment(4, 4, 1)), 2, 4))
    with pytest.raises(ValueError):
        generate_environment(StationaryExperts((0.5,), 0))
    with pytest.raises(ValueError):
        loss_matrix(AdversarialExperts(2, 3, matrix=((0.1, 0.2),)))


def test_affine_family_needs_small_diameter():
    with pytest.raises(ValueError, match="B G"):
        convex_losses(DriftingOco(Box([-1.0, -1.0], [1.0, 1.0]), 5, family="affine"))


def test_drifting_oco_losses_valid_and_deterministic():
    feasible = Ball([0.0, 0.0, 0.0], 0.5)
    for family in ("quadratic", "affine", "mixed"):
        env = DriftingOco(feasible, 100, family=family, seed=9)
        rounds = generate_environment(env)
        again = generate_environment(env)
        assert all(np.array_equal(r.loss.g, s.loss.g) for r, s in zip(rounds, again))
        for r in rounds:
            lo, hi = r.loss.range_on(feasible)
            assert -1e-12 <= lo and hi <= 1 + 1e-12
            assert r.loss.lipschitz_on(feasible) <= 1 + 1e-12


def test_single_switch_gives_linear_regret_for_fixed_play():
    # means (0,1) then (1,0): sticking with arm 0 loses one unit per post-switch round
    T = 64
    env = SwitchingExperts((Segment(1, 32, 0), Segment(33, 64, 1)), 2, T, gap=1.0)
    matrix = loss_matrix(env)
    trace = experts_trace(matrix, matrix[:, 0])
    for tau in (1, 4, 16, 32):
        assert interval_regret(trace, (33, 32 + tau)) == pytest.approx(tau)


# ---------------------------------------------------------------- report

def test_report_round_trip(tmp_path):
    rounds = generate_environment(SwitchingExperts.evenly(3, 128, 2, seed=1))
    trace = run(SAOL(lambda h: MultiplicativeWeights(3)), rounds)
    report = build_report(trace, mw_bound(3), tracking_ms=(1, 2))
    assert report.passed
    path = write_report(report, tmp_path / "r.csv")
    sa_rows, tracking_rows = read_report(path)
    assert [int(r["tau"]) for r in sa_rows] == tau_grid(128)
    assert [int(r["m"]) for r in tracking_rows] == [1, 2]
    assert float(sa_rows[-1]["max_regret"]) == pytest.approx(report.sa_profile[-1].max_regret)
