import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from saol.baselines import MultiplicativeWeights, OnlineGradientDescent
from saol.core import ExpertDistribution, ExpertLosses, Round
from saol.evaluation import AdversarialExperts, DriftingOco, default_ball, generate_environment
from saol.intervals import DyadicInterval, active_set, level_interval
from saol.meta import SAOL, check_live_set, eta_of, normalize, run, saol_round


class Fixed:
    """Learner that always plays the same distribution."""

    def __init__(self, probs):
        self.probs = ExpertDistribution(probs)

    def reset(self):
        pass

    def predict(self, rnd=None):
        return self.probs

    def update(self, loss):
        pass


def by_length(h):
    # singletons play arm 0, longer intervals play arm 1
    return Fixed([1.0, 0.0] if h == 1 else [0.0, 1.0])


def experts_rounds(T, n, seed):
    return generate_environment(AdversarialExperts(n, T, seed))


def mw_saol(n, **kw):
    return SAOL(lambda h: MultiplicativeWeights(n), **kw)


@pytest.mark.parametrize("q, s, eta", [(1, 1, 0.5), (4, 7, 0.5), (8, 15, 1 / math.sqrt(8))])
def test_eta_of(q, s, eta):
    assert eta_of(DyadicInterval(q, s)) == pytest.approx(eta, abs=1e-12)
    assert eta_of(DyadicInterval(q, s)) <= 0.5


def test_normalize_examples():
    assert np.allclose(normalize([0.25, 0.25]), [0.5, 0.5])
    assert np.allclose(normalize([0.1, 0.3]), [0.25, 0.75])
    with pytest.raises(FloatingPointError):
        normalize([0.0, 0.0])


def test_first_round_is_the_lone_expert():
    algo = SAOL(by_length)
    assert algo.distribution() == {DyadicInterval(1, 1): 1.0}
    action, rec = algo.step(Round(1, ExpertLosses([0.3, 0.9])))
    assert np.array_equal(action.vector, [1.0, 0.0])
    assert rec.slot_losses[0] - rec.realized_loss == 0.0
    # [1,1] retired; the slots that start at round 2 enter with weight eta
    assert algo.live == [DyadicInterval(2, 2), DyadicInterval(2, 3)]
    assert np.allclose(algo.weights(), [0.5, 0.5])
    assert algo.retired[DyadicInterval(1, 1)] == 1.0


def test_one_reweighting_step_and_mixture():
    algo = SAOL(by_length)
    algo.step(Round(1, ExpertLosses([0.0, 0.0])))
    action, rec = algo.step(Round(2, ExpertLosses([1.0, 0.0])))
    assert np.allclose(action.vector, [0.5, 0.5])
    assert rec.realized_loss == pytest.approx(0.5)
    # [2,3] had weight 1/2 and regret 0.5 against it: 0.5 * (1 + 0.5 * 0.5)
    slot = next(sl for sl in algo.slots if sl.interval == DyadicInterval(2, 3))
    assert slot.weight == pytest.approx(0.625, abs=1e-15)
    assert algo.retired[DyadicInterval(2, 2)] == pytest.approx(1 - 0.5 * 0.5)


def test_saol_round_returns_state():
    algo = mw_saol(3)
    action, state, rec = saol_round(algo, Round(1, ExpertLosses([0.1, 0.2, 0.3])))
    assert state is algo and rec.t == 1 and state.t == 1
    with pytest.raises(ValueError):
        algo.step(Round(3, ExpertLosses([0.1, 0.2, 0.3])))


def test_potential_first_round_and_zero_regret():
    algo = mw_saol(2)
    assert algo.potential() == 1.0
    spawned = set()
    for t in range(1, 70):
        spawned.update(iv for iv in active_set(t))
        algo.step(Round(t, ExpertLosses([0.4, 0.4])))
        # identical arms give zero regret, so every factor is one
        assert algo.potential() == pytest.approx(len(spawned | set(active_set(t + 1))), abs=1e-12)


def test_potential_needs_diagnostics():
    with pytest.raises(RuntimeError):
        mw_saol(2, diagnostics=False).potential()


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 10), st.sampled_from(["expected", "sample"]))
def test_potential_bound(seed, n, mode):
    algo = mw_saol(n, mode=mode, seed=seed)
    for rnd in experts_rounds(64, n, seed):
        t = rnd.t
        assert algo.potential() <= t * (math.log2(t) + 1) + 1e-9
        if t == 64:
            assert algo.potential() <= 448
        algo.step(rnd)


def test_live_set_is_active_set_long_run():
    algo = SAOL(lambda h: Fixed([0.5, 0.5]), diagnostics=False)
    loss = ExpertLosses([0.2, 0.7])
    for t in range(1, 2**14 + 1):
        assert check_live_set(algo)
        algo.step(Round(t, loss))
    assert check_live_set(algo)


def test_weights_positive_and_proportional_to_pseudo_weights():
    n = 4
    algo = mw_saol(n)
    for rnd in experts_rounds(600, n, 7):
        for sl in algo.slots:
            assert sl.weight > 0
            assert sl.weight == pytest.approx(sl.eta * sl.pseudo_weight, rel=1e-12)
        algo.step(rnd)


@pytest.mark.parametrize("seed", range(5))
def test_weighted_regrets_cancel_in_expected_mode(seed):
    n = 5
    algo = mw_saol(n)
    for rnd in experts_rounds(300, n, seed):
        algo._begin()
        w = algo.weights()
        _, rec = algo.step(rnd)
        assert abs(w @ (rec.realized_loss - rec.slot_losses)) <= 1e-9


def test_convex_mixture_never_does_worse_than_average():
    feasible = default_ball(2)
    algo = SAOL(lambda h: OnlineGradientDescent(feasible))
    for rnd in generate_environment(DriftingOco(feasible, 200, family="quadratic", seed=1)):
        algo._begin()
        w = algo.weights()
        _, rec = algo.step(rnd)
        # Jensen: the mixture's loss is at most the weighted average
        assert w @ (rec.realized_loss - rec.slot_losses) <= 1e-9
        assert feasible.contains(rec.action.vector)


def test_sample_mode_identity_holds_on_average():
    n = 6
    algo = mw_saol(n, mode="sample", seed=11)
    rounds = experts_rounds(200, n, 3)
    for rnd in rounds[:150]:
        algo.step(rnd)
    draws = algo.resample_weighted_regret(rounds[150], 10_000)
    se = draws.std(ddof=1) / math.sqrt(draws.size)
    assert abs(draws.mean()) <= 3 * se


def test_sample_mode_requires_seed():
    with pytest.raises(ValueError):
        mw_saol(2, mode="sample")
    with pytest.raises(ValueError):
        mw_saol(2, mode="greedy")


def test_sampled_action_is_a_live_prediction():
    algo = mw_saol(3, mode="sample", seed=5)
    for rnd in experts_rounds(50, 3, 0):
        _, rec = algo.step(rnd)
        assert rec.chosen in rec.intervals
        idx = rec.intervals.index(rec.chosen)
        assert rec.realized_loss == pytest.approx(rec.slot_losses[idx])


@pytest.mark.parametrize("mode", ["expected", "sample"])
def test_runs_are_bit_identical(mode):
    rounds = experts_rounds(300, 4, 2)
    a = run(mw_saol(4, mode=mode, seed=9), rounds)
    b = run(mw_saol(4, mode=mode, seed=9), rounds)
    assert np.array_equal(a.realized, b.realized)
    assert [r.chosen for r in a.records] == [r.chosen for r in b.records]


def test_log_scale_agrees_with_linear_weights():
    rounds = experts_rounds(500, 4, 4)
    lin, logd = mw_saol(4), mw_saol(4, log_scale=True)
    for rnd in rounds:
        _, ra = lin.step(rnd)
        _, rb = logd.step(rnd)
        assert np.allclose(ra.probs, rb.probs, rtol=1e-10, atol=1e-14)


def test_covered_regret_sums_instantaneous_regret():
    rounds = experts_rounds(40, 3, 8)
    trace = run(mw_saol(3), rounds)
    iv = level_interval(3, 2)  # [16, 23]
    total = sum(rec.realized_loss - rec.slot_losses[rec.intervals.index(iv)]
                for rec in trace.records if iv.q <= rec.t <= iv.s)
    assert trace.covered_regret[iv] == pytest.approx(total, abs=1e-12)
