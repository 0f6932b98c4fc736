"""Black-box base learners: Multiplicative Weights and Online Gradient Descent.

Both satisfy ``R(T) <= C * T**alpha`` with ``alpha = 1/2``:
MW with ``C = 2 sqrt(ln N)``, OGD with ``C = 3 B G``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    ExpertDistribution,
    ExpertLosses,
    FeasibleSet,
    MalformedLoss,
    Point,
    QuadraticLoss,
    Round,
)


@dataclass(frozen=True)
class RegretBoundSpec:
    """Black-box guarantee ``R(T) <= C * T**alpha``."""

    C: float
    alpha: float

    def __post_init__(self) -> None:
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.C <= 0:
            raise ValueError("C must be positive")

    def __call__(self, horizon: float) -> float:
        return self.C * horizon ** self.alpha


def mw_bound(n_arms: int) -> RegretBoundSpec:
    # N = 1 has zero regret; keep C positive so the spec stays valid.
    return RegretBoundSpec(max(2.0 * math.sqrt(math.log(n_arms)), 1e-12), 0.5)


def ogd_bound(feasible: FeasibleSet) -> RegretBoundSpec:
    return RegretBoundSpec(3.0 * feasible.diameter * feasible.lipschitz, 0.5)


# --------------------------------------------------------------------------
# Multiplicative Weights


@dataclass(frozen=True)
class MwState:
    cum_loss: np.ndarray
    t: int = 0

    @property
    def n_arms(self) -> int:
        return self.cum_loss.size

    @classmethod
    def fresh(cls, n_arms: int) -> "MwState":
        if n_arms < 1:
            raise ValueError("need at least one arm")
        return cls(np.zeros(n_arms), 0)


def mw_rate(state: MwState, horizon: int | None = None) -> float:
    """Anytime rate sqrt(ln N / t) at the upcoming round, or sqrt(ln N / horizon)."""
    log_n = math.log(state.n_arms)
    if horizon is not None:
        return math.sqrt(log_n / horizon)
    return math.sqrt(log_n / max(state.t + 1, 1))


def mw_predict(state: MwState, eta: float | None = None) -> ExpertDistribution:
    if eta is None:
        eta = mw_rate(state)
    cum = state.cum_loss
    w = np.exp(eta * (cum.min() - cum))
    return ExpertDistribution.unchecked(w / w.sum())


def mw_update(state: MwState, loss: ExpertLosses) -> MwState:
    values = loss.values if isinstance(loss, ExpertLosses) else np.asarray(loss, dtype=float)
    if values.shape != state.cum_loss.shape:
        raise ValueError(f"expected {state.n_arms} losses, got {values.size}")
    return MwState(state.cum_loss + values, state.t + 1)


class MultiplicativeWeights:
    """Exponential weights over ``n_arms`` experts.

    ``rate="anytime"`` uses sqrt(ln N / t) on the local clock; ``rate="fixed"``
    uses sqrt(ln N / horizon) and needs the horizon up front.
    """

    def __init__(self, n_arms: int, rate: str = "anytime", horizon: int | None = None):
        if rate not in ("anytime", "fixed"):
            raise ValueError(f"unknown rate schedule {rate!r}")
        if rate == "fixed" and not horizon:
            raise ValueError("fixed rate needs a horizon")
        self.n_arms = n_arms
        self.rate = rate
        self.horizon = horizon if rate == "fixed" else None
        self._log_n = math.log(n_arms)
        self.reset()

    def reset(self) -> None:
        self._cum = np.zeros(self.n_arms)
        self._t = 0

    @property
    def state(self) -> MwState:
        return MwState(self._cum.copy(), self._t)

    def predict(self, round: Round | None = None) -> ExpertDistribution:
        clock = self.horizon if self.horizon is not None else self._t + 1
        cum = self._cum
        # ufunc reductions skip the ndarray.min/sum wrappers on this hot path
        w = np.exp((np.minimum.reduce(cum) - cum) * math.sqrt(self._log_n / clock))
        w /= np.add.reduce(w)
        return ExpertDistribution.unchecked(w)

    def update(self, loss: ExpertLosses) -> None:
        values = loss.values if isinstance(loss, ExpertLosses) else np.asarray(loss, dtype=float)
        if values.shape != self._cum.shape:
            raise ValueError(f"expected {self.n_arms} losses, got {values.size}")
        self._cum += values
        self._t += 1


# --------------------------------------------------------------------------
# Online Gradient Descent


def project(point, feasible: FeasibleSet) -> np.ndarray:
    """Euclidean projection onto a Box (clamp) or Ball (radial rescale)."""
    return feasible.project(np.asarray(point, dtype=float))


@dataclass(frozen=True)
class OgdState:
    x: np.ndarray
    feasible: FeasibleSet
    t: int = 0

    @classmethod
    def fresh(cls, feasible: FeasibleSet, x0=None) -> "OgdState":
        x = feasible.center if x0 is None else project(x0, feasible)
        return cls(np.array(x, dtype=float), feasible, 0)


def ogd_step(state: OgdState, loss: QuadraticLoss, eta: float | None = None) -> OgdState:
    """One projected step with eta_t = B / (G sqrt(t)) unless ``eta`` is given."""
    feasible = state.feasible
    g = loss.gradient(state.x) if isinstance(loss, QuadraticLoss) else np.asarray(loss, dtype=float)
    G = feasible.lipschitz
    if np.linalg.norm(g) > G * (1 + 1e-9) + 1e-12:
        raise MalformedLoss(f"gradient norm {np.linalg.norm(g):.6g} exceeds G={G}")
    t = state.t + 1
    if eta is None:
        eta = feasible.diameter / (G * math.sqrt(t))
    return OgdState(project(state.x - eta * g, feasible), feasible, t)


class OnlineGradientDescent:
    def __init__(self, feasible: FeasibleSet, x0=None):
        self.feasible = feasible
        self.x0 = x0
        self.reset()

    def reset(self) -> None:
        self.state = OgdState.fresh(self.feasible, self.x0)

    def predict(self, round: Round | None = None) -> Point:
        return Point(self.state.x)

    def update(self, loss: QuadraticLoss) -> None:
        self.state = ogd_step(self.state, loss)
