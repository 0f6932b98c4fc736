"""Closed-form regret bounds. Every ``log`` here is base 2."""

from __future__ import annotations

import math

import numpy as np

from ..baselines import RegretBoundSpec
from ..core import _bounds
from ..intervals import is_member


def theorem1_bound(spec: RegretBoundSpec, interval) -> float:
    """Interval-regret guarantee of SAOL wrapped around a ``C T**alpha`` learner."""
    q, s = _bounds(interval)
    size = s - q + 1
    head = 4.0 / (2.0 ** spec.alpha - 1.0) * spec.C * size ** spec.alpha
    return head + 40.0 * math.log2(s + 1) * math.sqrt(size)


def theorem1_window_bounds(spec: RegretBoundSpec, tau: int, T: int) -> np.ndarray:
    """``theorem1_bound`` for every window of length ``tau`` in [1, T], indexed by q - 1."""
    ends = np.arange(tau, T + 1)
    head = 4.0 / (2.0 ** spec.alpha - 1.0) * spec.C * tau ** spec.alpha
    return head + 40.0 * np.log2(ends + 1) * math.sqrt(tau)


def lemma2_bound(interval) -> float:
    """Cap on the summed instantaneous regret against the instance living on ``interval``."""
    q, s = _bounds(interval)
    if not is_member(q, s):
        raise ValueError(f"[{q},{s}] is not a dyadic covering interval")
    return 5.0 * math.log2(s + 1) * math.sqrt(s - q + 1)


def tracking_bound(spec: RegretBoundSpec, T: int, m: int) -> float:
    if m < 1:
        raise ValueError("tracking bound needs m >= 1")
    return spec.C * T ** spec.alpha * m ** (1.0 - spec.alpha)


def strongly_adaptive_spec(spec: RegretBoundSpec, T: int) -> RegretBoundSpec:
    """Fold the interval bound into ``SA-Regret(tau) <= C' tau**alpha'`` on [1, T].

    ``C' = 4/(2**alpha - 1) C + 40 log2(T + 1)`` and ``alpha' = max(alpha, 1/2)``.
    """
    C = 4.0 / (2.0 ** spec.alpha - 1.0) * spec.C + 40.0 * math.log2(T + 1)
    return RegretBoundSpec(C, max(spec.alpha, 0.5))
