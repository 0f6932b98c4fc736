"""Strongly Adaptive Online Learner.

One black-box instance runs on every dyadic covering interval. Instances
enter with weight ``eta_I = min(1/2, |I|**-0.5)``, are reweighted each round
by ``1 + eta_I * r_t(I)`` where ``r_t(I)`` is the meta-learner's loss minus the
instance's loss, and are dropped once their interval ends. The meta-learner
either samples an instance in proportion to its weight (``mode="sample"``)
or plays the weighted mixture of all live predictions (``mode="expected"``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .core import (
    Decision,
    Learner,
    Round,
    RoundRecord,
    Trace,
    evaluate_loss,
    mixture,
)
from .intervals import DyadicInterval, active_set, entering_set

MODES = ("sample", "expected")

LearnerFactory = Callable[[int], Learner]


def eta_of(interval: DyadicInterval) -> float:
    return min(0.5, 1.0 / math.sqrt(len(interval)))


def normalize(weights) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    total = w.sum()
    if not total > 0:
        raise FloatingPointError("total weight is not positive")
    return w / total


@dataclass(frozen=True)
class ExpertSlot:
    """Snapshot of one live instance."""

    interval: DyadicInterval
    eta: float
    weight: float
    pseudo_weight: float
    learner: Any
    log_pseudo_weight: float
    regret_sum: float


class SAOL:
    """Meta-learner over a black-box learner factory.

    ``learner_factory(horizon)`` must return a fresh learner; ``horizon`` is
    the length of the interval the instance will live on.

    ``diagnostics`` keeps the frozen pseudo-weights and per-interval regret
    sums of retired instances. ``log_scale`` forms p_t from log-weights, for
    very long runs where linear weights can underflow.

    The live set holds exactly one interval per level, so slot ``k`` is the
    live level-k interval and an entering interval takes over the slot of
    the one that just ended.
    """

    def __init__(
        self,
        learner_factory: LearnerFactory,
        mode: str = "expected",
        seed: int | None = None,
        diagnostics: bool = True,
        log_scale: bool = False,
    ):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
        if mode == "sample" and seed is None:
            raise ValueError("sample mode needs a seed")
        self.factory = learner_factory
        self.mode = mode
        self.seed = seed
        self.diagnostics = diagnostics
        self.log_scale = log_scale
        self.rng = np.random.Generator(np.random.Philox(seed)) if seed is not None else None
        self.t = 0
        self._intervals: list[DyadicInterval] = []
        self._learners: list = []
        self._eta = np.zeros(0)
        self._w = np.zeros(0)
        self._pw = np.zeros(0)
        self._logpw = np.zeros(0)
        self._rsum = np.zeros(0)
        self._spawned_for = 0
        self.retired: dict[DyadicInterval, float] = {}
        self.retired_regret: dict[DyadicInterval, float] = {}
        self._retired_total = 0.0

    # ------------------------------------------------------------------ state

    def _begin(self) -> None:
        """Retire the slots that ended at round t and spawn those entering at t + 1."""
        t = self.t + 1
        if self._spawned_for == t:
            return
        entering = entering_set(t)
        grow = [iv for iv in entering if iv.k >= len(self._intervals)]
        if grow:
            extra = np.zeros(len(grow))
            self._eta, self._w, self._pw, self._logpw, self._rsum = (
                np.concatenate([arr, extra]) for arr in
                (self._eta, self._w, self._pw, self._logpw, self._rsum))
            self._intervals.extend(grow)
            self._learners.extend([None] * len(grow))
        for interval in entering:
            k = interval.k
            if self._learners[k] is not None:
                self._retire(k)
            eta = eta_of(interval)
            learner = self.factory(len(interval))
            learner.reset()
            self._intervals[k] = interval
            self._learners[k] = learner
            self._eta[k], self._w[k], self._pw[k] = eta, eta, 1.0
            self._logpw[k] = self._rsum[k] = 0.0
        self._spawned_for = t

    def _retire(self, k: int) -> None:
        interval = self._intervals[k]
        if interval.s != self.t:
            raise RuntimeError(f"slot {interval} replaced before it ended")
        pw = float(self._pw[k])
        self._retired_total += pw
        if self.diagnostics:
            self.retired[interval] = pw
            self.retired_regret[interval] = float(self._rsum[k])

    @property
    def slots(self) -> list[ExpertSlot]:
        self._begin()
        return [ExpertSlot(iv, float(self._eta[k]), float(self._w[k]), float(self._pw[k]),
                           self._learners[k], float(self._logpw[k]), float(self._rsum[k]))
                for k, iv in enumerate(self._intervals)]

    @property
    def live(self) -> list[DyadicInterval]:
        self._begin()
        return list(self._intervals)

    def weights(self) -> np.ndarray:
        self._begin()
        return self._w.copy()

    def _probs(self) -> np.ndarray:
        if self.log_scale:
            logw = np.log(self._eta) + self._logpw
            return normalize(np.exp(logw - logw.max()))
        return normalize(self._w)

    def distribution(self) -> dict[DyadicInterval, float]:
        """p_t over the intervals live at the upcoming round."""
        self._begin()
        return dict(zip(self._intervals, self._probs()))

    def potential(self) -> float:
        """Total pseudo-weight at the upcoming round, retired intervals included."""
        if not self.diagnostics:
            raise RuntimeError("potential needs diagnostics enabled")
        self._begin()
        return self._retired_total + float(self._pw.sum())

    def covered_regret(self) -> dict[DyadicInterval, float]:
        """Sum of r_t(I) so far for every interval that has started."""
        out = dict(self.retired_regret)
        out.update({iv: float(self._rsum[k]) for k, iv in enumerate(self._intervals)
                    if iv.q <= self.t and iv not in out})
        return out

    # ------------------------------------------------------------------ play

    def _pick(self, probs: np.ndarray) -> int:
        u = self.rng.random()
        return min(int(np.searchsorted(np.cumsum(probs), u, side="right")), probs.size - 1)

    def step(self, rnd: Round) -> tuple[Decision, RoundRecord]:
        """Play one round: predict, observe ``rnd.loss``, reweight, update instances."""
        if rnd.t != self.t + 1:
            raise ValueError(f"expected round {self.t + 1}, got {rnd.t}")
        self._begin()
        probs = self._probs()
        potential = self._retired_total + float(self._pw.sum()) if self.diagnostics else None
        preds = [learner.predict(rnd) for learner in self._learners]
        stacked = np.stack([p.vector for p in preds])
        if self.mode == "sample":
            idx = self._pick(probs)
            action, chosen = preds[idx], self._intervals[idx]
        else:
            action, chosen = mixture(preds, probs, stacked), None
        realized = evaluate_loss(rnd.loss, action)
        slot_losses = rnd.loss.values_at(stacked)
        self._reweight(realized - slot_losses)
        for learner in self._learners:
            learner.update(rnd.loss)
        record = RoundRecord(rnd.t, tuple(self._intervals), probs, chosen,
                             action, realized, slot_losses, potential)
        self.t = rnd.t
        self._begin()
        return action, record

    def _reweight(self, regrets: np.ndarray) -> None:
        factor = 1.0 + self._eta * regrets
        self._w *= factor
        self._pw *= factor
        self._logpw += np.log1p(self._eta * regrets)
        self._rsum += regrets

    def resample_weighted_regret(self, rnd: Round, draws: int) -> np.ndarray:
        """Sum_I w_t(I) r_t(I) for ``draws`` independent samples of the played instance.

        Weights and instance predictions are frozen at the upcoming round;
        nothing is updated.
        """
        if self.rng is None:
            raise ValueError("resampling needs a seeded generator")
        self._begin()
        w = self.weights()
        probs = self._probs()
        preds = np.stack([learner.predict(rnd).vector for learner in self._learners])
        slot_losses = rnd.loss.values_at(preds)
        picks = np.minimum(np.searchsorted(np.cumsum(probs), self.rng.random(draws), side="right"),
                           probs.size - 1)
        realized = slot_losses[picks]
        return realized * w.sum() - w @ slot_losses


def saol_round(state: SAOL, rnd: Round) -> tuple[Decision, SAOL, RoundRecord]:
    action, record = state.step(rnd)
    return action, state, record


def run(learner: Any, rounds: list[Round], metadata: dict | None = None,
        feasible=None) -> Trace:
    """Drive SAOL or a plain base learner over ``rounds`` and collect the trace."""
    records = []
    for rnd in rounds:
        if isinstance(learner, SAOL):
            _, rec = learner.step(rnd)
        else:
            action = learner.predict(rnd)
            loss = evaluate_loss(rnd.loss, action)
            learner.update(rnd.loss)
            rec = RoundRecord(rnd.t, (), np.ones(1), None, action, loss,
                              np.array([loss]), None)
        records.append(rec)
    meta = dict(metadata or {})
    trace = Trace(records, [r.loss for r in rounds], meta,
                  seed=getattr(learner, "seed", None), feasible=feasible)
    if isinstance(learner, SAOL):
        meta.setdefault("mode", learner.mode)
        trace.covered_regret = learner.covered_regret()
    return trace


def check_live_set(state: SAOL) -> bool:
    return state.live == active_set(state.t + 1)
