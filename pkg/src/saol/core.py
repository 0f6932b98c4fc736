"""Decisions, losses, feasible sets, rounds and traces.

Two context-free scenarios are supported: prediction with expert advice
(decisions are distributions over ``N`` arms, losses are vectors in
``[0, 1]^N``) and online convex optimization over a Box or Ball (decisions
are points, losses are isotropic quadratics ``b + g.x + a|x|^2``).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Protocol, Sequence, Union

import numpy as np

LOSS_TOL = 1e-9
PROB_TOL = 1e-9


class ScenarioMismatch(TypeError):
    """A loss was paired with a decision from another scenario."""


class MalformedLoss(ValueError):
    """An environment produced a loss outside [0, 1] or a bad gradient bound."""


# --------------------------------------------------------------------------
# decisions


@dataclass(frozen=True)
class ExpertDistribution:
    probs: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("distribution must be a non-empty vector")
        if (p < -PROB_TOL).any() or abs(p.sum() - 1.0) > PROB_TOL:
            raise ValueError(f"not a probability vector: {p}")
        object.__setattr__(self, "probs", p)

    @classmethod
    def unchecked(cls, probs: np.ndarray) -> "ExpertDistribution":
        """Wrap a vector already known to be a distribution (hot path)."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "probs", probs)
        return obj

    @property
    def vector(self) -> np.ndarray:
        return self.probs


@dataclass(frozen=True)
class Point:
    x: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", np.atleast_1d(np.asarray(self.x, dtype=float)))

    @property
    def vector(self) -> np.ndarray:
        return self.x


Decision = Union[ExpertDistribution, Point]


def mixture(decisions: Sequence[Decision], weights: np.ndarray,
            stacked: np.ndarray | None = None) -> Decision:
    """Convex combination of same-scenario decisions."""
    if stacked is None:
        stacked = np.stack([d.vector for d in decisions])
    combo = weights @ stacked
    if isinstance(decisions[0], ExpertDistribution):
        return ExpertDistribution.unchecked(combo / combo.sum())
    return Point(combo)


# --------------------------------------------------------------------------
# feasible sets


@dataclass(frozen=True)
class Box:
    lower: np.ndarray
    upper: np.ndarray
    lipschitz: float = 1.0

    def __post_init__(self) -> None:
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lo.shape != hi.shape or (lo > hi).any():
            raise ValueError("box needs lower <= upper componentwise")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.upper - self.lower))

    @property
    def center(self) -> np.ndarray:
        return (self.lower + self.upper) / 2

    def project(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)

    def contains(self, x: np.ndarray, tol: float = 1e-12) -> bool:
        return bool(((x >= self.lower - tol) & (x <= self.upper + tol)).all())

    def linear_minimizer(self, g: np.ndarray) -> np.ndarray:
        """argmin of g.x over the box; rows of ``g`` are independent problems."""
        return np.where(g > 0, self.lower, np.where(g < 0, self.upper, self.center))

    def vertices(self) -> np.ndarray:
        corners = np.array(np.meshgrid(*zip(self.lower, self.upper), indexing="ij"))
        return corners.reshape(self.dim, -1).T


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float
    lipschitz: float = 1.0

    def __post_init__(self) -> None:
        if self.radius <= 0:
            raise ValueError("ball radius must be positive")
        object.__setattr__(self, "center", np.atleast_1d(np.asarray(self.center, dtype=float)))

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    def project(self, x: np.ndarray) -> np.ndarray:
        offset = x - self.center
        norm = np.linalg.norm(offset, axis=-1, keepdims=True)
        scale = np.minimum(1.0, self.radius / np.maximum(norm, 1e-300))
        return self.center + offset * scale

    def contains(self, x: np.ndarray, tol: float = 1e-12) -> bool:
        return bool(np.linalg.norm(x - self.center) <= self.radius + tol)

    def linear_minimizer(self, g: np.ndarray) -> np.ndarray:
        norm = np.linalg.norm(g, axis=-1, keepdims=True)
        safe = np.where(norm > 0, norm, 1.0)
        return self.center - self.radius * g / safe


FeasibleSet = Union[Box, Ball]


# --------------------------------------------------------------------------
# losses


@dataclass(frozen=True)
class ExpertLosses:
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise ValueError("expert losses must be a vector")
        if (v < -LOSS_TOL).any() or (v > 1 + LOSS_TOL).any():
            raise MalformedLoss(f"expert losses outside [0,1]: {v}")
        object.__setattr__(self, "values", v)

    @property
    def n_arms(self) -> int:
        return self.values.size

    def values_at(self, vectors: np.ndarray) -> np.ndarray:
        """Expected loss of each row of a stacked distribution matrix."""
        return vectors @ self.values


@dataclass(frozen=True)
class QuadraticLoss:
    """Convex loss ``b + g.x + a*|x|^2`` with ``a >= 0``.

    Covers the affine (``a = 0``) and isotropic-bowl families. The
    subgradient is analytic.
    """

    a: float
    g: np.ndarray
    b: float

    def __post_init__(self) -> None:
        if self.a < 0:
            raise ValueError("curvature must be non-negative")
        object.__setattr__(self, "g", np.atleast_1d(np.asarray(self.g, dtype=float)))

    @classmethod
    def affine(cls, g, center, offset: float = 0.5) -> "QuadraticLoss":
        """``offset + g.(x - center)``."""
        g = np.atleast_1d(np.asarray(g, dtype=float))
        return cls(0.0, g, float(offset - g @ np.asarray(center, dtype=float)))

    @classmethod
    def bowl(cls, curvature: float, minimizer) -> "QuadraticLoss":
        """``curvature * |x - minimizer|^2``."""
        z = np.atleast_1d(np.asarray(minimizer, dtype=float))
        return cls(float(curvature), -2.0 * curvature * z, float(curvature * z @ z))

    def value(self, x: np.ndarray) -> float:
        return float(self.b + self.g @ x + self.a * (x @ x))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return self.g + 2.0 * self.a * x

    def values_at(self, points: np.ndarray) -> np.ndarray:
        return self.b + points @ self.g + self.a * np.einsum("ij,ij->i", points, points)

    def range_on(self, feasible: FeasibleSet) -> tuple[float, float]:
        """Exact (min, max) of the loss over the feasible set."""
        lo = self.value(_minimize_sum(self.a, self.g, feasible))
        if isinstance(feasible, Box):
            hi = float(self.values_at(feasible.vertices()).max())
        else:
            c, r = feasible.center, feasible.radius
            hi = self.value(c) + r * float(np.linalg.norm(self.g + 2 * self.a * c)) + self.a * r * r
        return lo, hi

    def lipschitz_on(self, feasible: FeasibleSet) -> float:
        """max |gradient| over the set (the gradient is affine in x)."""
        if isinstance(feasible, Box):
            return float(np.linalg.norm(self.gradient(feasible.vertices()), axis=1).max())
        c, r = feasible.center, feasible.radius
        return float(np.linalg.norm(self.gradient(c))) + 2 * self.a * r


ConvexLoss = QuadraticLoss
LossEvent = Union[ExpertLosses, QuadraticLoss]


def _minimize_sum(a, g, feasible: FeasibleSet) -> np.ndarray:
    """Minimizer over the set of ``g.x + a|x|^2`` (rows broadcast)."""
    a = np.asarray(a, dtype=float)
    g = np.asarray(g, dtype=float)
    if a.ndim == 0:
        if a > 0:
            return feasible.project(-g / (2 * a))
        return feasible.linear_minimizer(g)
    curved = a > 0
    safe_a = np.where(curved, a, 1.0)[:, None]
    interior = feasible.project(-g / (2 * safe_a))
    flat = feasible.linear_minimizer(g)
    return np.where(curved[:, None], interior, flat)


def validate_loss(loss: LossEvent, feasible: FeasibleSet | None = None) -> LossEvent:
    """Reject (never clamp) losses that leave [0, 1] or exceed the declared G."""
    if isinstance(loss, QuadraticLoss):
        if feasible is None:
            raise ValueError("convex losses are validated against a feasible set")
        lo, hi = loss.range_on(feasible)
        if lo < -LOSS_TOL or hi > 1 + LOSS_TOL:
            raise MalformedLoss(f"convex loss ranges over [{lo}, {hi}] on the feasible set")
        if loss.lipschitz_on(feasible) > feasible.lipschitz * (1 + 1e-9):
            raise MalformedLoss("loss gradient exceeds the declared Lipschitz bound")
    return loss


def evaluate_loss(loss: LossEvent, decision: Decision) -> float:
    if isinstance(loss, ExpertLosses):
        if not isinstance(decision, ExpertDistribution):
            raise ScenarioMismatch("expert losses need a distribution over arms")
        if decision.probs.size != loss.n_arms:
            raise ScenarioMismatch("arm count mismatch")
        value = float(decision.probs @ loss.values)
    elif isinstance(loss, QuadraticLoss):
        if not isinstance(decision, Point):
            raise ScenarioMismatch("convex losses need a point decision")
        value = loss.value(decision.x)
    else:
        raise ScenarioMismatch(f"unknown loss type {type(loss).__name__}")
    if value < -LOSS_TOL or value > 1 + LOSS_TOL:
        raise MalformedLoss(f"loss value {value} outside [0,1]")
    return value


# --------------------------------------------------------------------------
# rounds, learners, traces


@dataclass(frozen=True)
class Round:
    t: int
    loss: LossEvent
    context: Any = None

    def __post_init__(self) -> None:
        if self.t < 1:
            raise ValueError("rounds start at 1")


class Learner(Protocol):
    """Black-box online learner: ``predict`` then ``update``, once per round."""

    def reset(self) -> None: ...

    def predict(self, round: Round | None = None) -> Decision: ...

    def update(self, loss: LossEvent) -> None: ...


@dataclass
class RoundRecord:
    t: int
    intervals: tuple                     # live intervals, increasing level
    probs: np.ndarray                    # p_t over ``intervals``
    chosen: Any                          # sampled interval, None in expected-play mode
    action: Decision
    realized_loss: float
    slot_losses: np.ndarray              # loss of each live instance's prediction
    potential: float | None = None       # pseudo-weight total at round start


@dataclass
class Trace:
    records: list[RoundRecord]
    losses: list[LossEvent]
    metadata: dict = field(default_factory=dict)
    seed: int | None = None
    covered_regret: dict = field(default_factory=dict)  # interval -> sum of r_t(I)
    feasible: Any = None                                # OCO traces only

    def __post_init__(self) -> None:
        for i, rec in enumerate(self.records, start=1):
            if rec.t != i:
                raise ValueError("trace rounds must be consecutive from 1")
        self._prefix = None

    @property
    def horizon(self) -> int:
        return len(self.records)

    @property
    def realized(self) -> np.ndarray:
        return np.array([r.realized_loss for r in self.records])

    @property
    def prefix(self) -> np.ndarray:
        if self._prefix is None:
            self._prefix = np.concatenate([[0.0], np.cumsum(self.realized)])
        return self._prefix

    def loss_matrix(self) -> np.ndarray:
        """T x N matrix of expert losses (experts scenario only)."""
        return np.stack([l.values for l in self.losses])


def cumulative_loss(trace: Trace, interval) -> float:
    q, s = _bounds(interval)
    if q < 1 or s > trace.horizon or s < q:
        raise IndexError(f"interval [{q},{s}] outside horizon 1..{trace.horizon}")
    return float(trace.prefix[s] - trace.prefix[q - 1])


def _bounds(interval) -> tuple[int, int]:
    if hasattr(interval, "q"):
        return interval.q, interval.s
    q, s = interval
    return int(q), int(s)


def entropy(p: np.ndarray) -> float:
    nz = p[p > 0]
    return float(-(nz * np.log(nz)).sum()) + 0.0


TRACE_COLUMNS = ("t", "chosen_interval_q", "chosen_interval_s", "realized_loss",
                 "n_active", "entropy_of_p_t")


def write_trace(trace: Trace, path: Path) -> tuple[Path, Path]:
    """CSV trace plus ``<name>.meta.json`` sidecar; floats use repr for exact reruns."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for rec in trace.records:
            q, s = (rec.chosen.q, rec.chosen.s) if rec.chosen is not None else ("", "")
            w.writerow([rec.t, q, s, repr(float(rec.realized_loss)), len(rec.intervals),
                        repr(entropy(rec.probs))])
    meta_path = path.with_suffix(".meta.json")
    meta = dict(trace.metadata)
    meta["seed"] = trace.seed
    meta_path.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")
    return path, meta_path


def read_trace_table(path: Path) -> list[dict]:
    with Path(path).open() as fh:
        return list(csv.DictReader(fh))


def stack_losses(losses: Iterable[ExpertLosses]) -> np.ndarray:
    return np.stack([l.values for l in losses])
