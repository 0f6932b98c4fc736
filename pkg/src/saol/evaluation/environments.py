"""Seeded loss-sequence generators for the experts and OCO scenarios."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from ..core import (
    Ball,
    ExpertLosses,
    FeasibleSet,
    QuadraticLoss,
    Round,
    validate_loss,
)


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator; every random draw in a run flows from here."""
    return np.random.Generator(np.random.Philox(int(seed)))


@dataclass(frozen=True)
class StationaryExperts:
    means: tuple
    T: int
    noise: float = 0.0
    seed: int = 0

    @property
    def n_arms(self) -> int:
        return len(self.means)


@dataclass(frozen=True)
class Segment:
    start: int
    end: int
    best_arm: int


@dataclass(frozen=True)
class SwitchingExperts:
    """Piecewise-stationary experts: inside each segment the designated arm
    has mean loss ``(1 - gap)/2`` and every other arm ``(1 + gap)/2``."""

    segments: tuple
    n_arms: int
    T: int
    gap: float = 0.5
    noise: float = 0.0
    seed: int = 0

    @classmethod
    def evenly(cls, n_arms: int, T: int, n_switches: int, gap: float = 0.5,
               noise: float = 0.0, seed: int = 0) -> "SwitchingExperts":
        """``n_switches + 1`` equal segments; the best arm changes at every boundary."""
        if n_arms < 2 and n_switches:
            raise ValueError("switching needs at least two arms")
        rng = make_rng(seed)
        bounds = np.linspace(0, T, n_switches + 2).round().astype(int)
        arms = [int(rng.integers(n_arms))]
        for _ in range(n_switches):
            step = int(rng.integers(1, n_arms))
            arms.append((arms[-1] + step) % n_arms)
        segments = tuple(Segment(int(lo) + 1, int(hi), arm)
                         for lo, hi, arm in zip(bounds[:-1], bounds[1:], arms))
        return cls(segments, n_arms, T, gap, noise, seed)

    @property
    def switch_count(self) -> int:
        arms = [seg.best_arm for seg in self.segments]
        return sum(a != b for a, b in zip(arms, arms[1:]))


@dataclass(frozen=True)
class AdversarialExperts:
    """Arbitrary [0, 1] loss matrix; uniform draws unless ``matrix`` is given."""

    n_arms: int
    T: int
    seed: int = 0
    matrix: tuple | None = field(default=None, compare=False)


@dataclass(frozen=True)
class DriftingOco:
    """Convex losses whose minimizer drifts slowly through the feasible set.

    ``family``: ``"quadratic"`` bowls ``a|x - z_t|^2``, ``"affine"`` losses
    ``1/2 + g_t.(x - c)`` with ``|g_t| = G`` (requires ``B G <= 1``), or
    ``"mixed"`` (the average of both).
    """

    feasible: FeasibleSet
    T: int
    drift: float = 0.05
    family: str = "quadratic"
    seed: int = 0


Environment = Union[StationaryExperts, SwitchingExperts, AdversarialExperts, DriftingOco]


def _noisy(means: np.ndarray, noise: float, rng: np.random.Generator) -> np.ndarray:
    if noise == 0:
        return means.copy()
    return np.clip(means + noise * rng.uniform(-1.0, 1.0, size=means.shape), 0.0, 1.0)


def loss_matrix(env: Environment) -> np.ndarray:
    """T x N expert-loss matrix for an experts environment."""
    rng = make_rng(env.seed)
    if isinstance(env, StationaryExperts):
        means = np.tile(np.asarray(env.means, dtype=float), (env.T, 1))
        return _noisy(means, env.noise, rng)
    if isinstance(env, SwitchingExperts):
        _check_segments(env)
        means = np.full((env.T, env.n_arms), 0.5 + env.gap / 2)
        for seg in env.segments:
            if not 0 <= seg.best_arm < env.n_arms:
                raise ValueError(f"segment arm {seg.best_arm} out of range")
            means[seg.start - 1:seg.end, seg.best_arm] = 0.5 - env.gap / 2
        return _noisy(means, env.noise, rng)
    if isinstance(env, AdversarialExperts):
        if env.matrix is not None:
            m = np.asarray(env.matrix, dtype=float)
            if m.shape != (env.T, env.n_arms):
                raise ValueError("matrix shape does not match (T, n_arms)")
            return m
        return rng.random((env.T, env.n_arms))
    raise TypeError(f"{type(env).__name__} is not an experts environment")


def _check_segments(env: SwitchingExperts) -> None:
    if not 0 <= env.gap <= 1:
        raise ValueError("gap must lie in [0, 1]")
    expected = 1
    for seg in env.segments:
        if seg.start != expected or seg.end < seg.start:
            raise ValueError(f"segments must partition [1, {env.T}] in order; bad {seg}")
        expected = seg.end + 1
    if expected != env.T + 1:
        raise ValueError(f"segments must partition [1, {env.T}]")


def convex_losses(env: DriftingOco) -> list[QuadraticLoss]:
    rng = make_rng(env.seed)
    feas = env.feasible
    B, G, d = feas.diameter, feas.lipschitz, feas.dim
    center = feas.center
    if env.family not in ("quadratic", "affine", "mixed"):
        raise ValueError(f"unknown loss family {env.family!r}")
    if env.family == "affine" and B * G > 1 + 1e-12:
        raise ValueError(f"affine losses need B G <= 1, got {B * G:.4g}")
    curvature = min(G / (2 * B), 1.0 / B**2)
    z = feas.project(center + rng.uniform(-0.5, 0.5, d) * B / np.sqrt(d))
    u = rng.standard_normal(d)
    out = []
    for _ in range(env.T):
        z = feas.project(z + env.drift * B * rng.standard_normal(d) / np.sqrt(d))
        u = u + env.drift * rng.standard_normal(d)
        g = G * u / max(np.linalg.norm(u), 1e-12)
        bowl = QuadraticLoss.bowl(curvature, z)
        if env.family == "quadratic":
            loss = bowl
        else:
            flat = QuadraticLoss.affine(g, center)
            if env.family == "affine":
                loss = flat
            else:
                loss = QuadraticLoss(bowl.a / 2, (bowl.g + flat.g) / 2, (bowl.b + flat.b) / 2)
        out.append(validate_loss(loss, feas))
    return out


def generate_environment(env: Environment) -> list[Round]:
    """Materialize an environment as rounds 1..T; losses are validated on ingestion."""
    if env.T < 1:
        raise ValueError("horizon T must be at least 1")
    if isinstance(env, DriftingOco):
        return [Round(t, loss) for t, loss in enumerate(convex_losses(env), start=1)]
    matrix = loss_matrix(env)
    return [Round(t, ExpertLosses(row)) for t, row in enumerate(matrix, start=1)]


def default_ball(dim: int = 2) -> Ball:
    """Unit-diameter ball with G = 1, so affine losses fit in [0, 1]."""
    return Ball(np.zeros(dim), 0.5, lipschitz=1.0)
