"""Exact regret accounting: best fixed strategy per interval, SA-regret scans,
and the best compound action with a bounded number of switches."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ..core import ExpertLosses, FeasibleSet, QuadraticLoss, Trace, _bounds, _minimize_sum


class ExpertsComparator:
    """Per-arm prefix sums of a T x N loss matrix."""

    def __init__(self, matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2:
            raise ValueError("expected a T x N loss matrix")
        self.matrix = matrix
        self.T = matrix.shape[0]
        self.prefix = np.vstack([np.zeros(matrix.shape[1]), np.cumsum(matrix, axis=0)])

    def best(self, q: int, s: int) -> tuple[float, int]:
        sums = self.prefix[s] - self.prefix[q - 1]
        arm = int(np.argmin(sums))
        return float(sums[arm]), arm

    def window_best(self, tau: int) -> tuple[np.ndarray, np.ndarray]:
        sums = self.prefix[tau:] - self.prefix[:-tau]
        arms = sums.argmin(axis=1)
        return sums[np.arange(arms.size), arms], arms


class ConvexComparator:
    """Closed-form best fixed point for sums of ``b + g.x + a|x|^2`` losses.

    The sum over an interval is again isotropic, so its minimizer over the
    set is the projection of the unconstrained minimizer (or the linear
    minimizer when the summed curvature is zero).
    """

    def __init__(self, losses: list[QuadraticLoss], feasible: FeasibleSet):
        self.feasible = feasible
        self.T = len(losses)
        a = np.array([l.a for l in losses])
        g = np.stack([l.g for l in losses])
        b = np.array([l.b for l in losses])
        self.pa = np.concatenate([[0.0], np.cumsum(a)])
        self.pg = np.vstack([np.zeros(g.shape[1]), np.cumsum(g, axis=0)])
        self.pb = np.concatenate([[0.0], np.cumsum(b)])

    @staticmethod
    def _value(A, Gv, Bs, x):
        return Bs + np.einsum("...i,...i->...", Gv, x) + A * np.einsum("...i,...i->...", x, x)

    def best(self, q: int, s: int) -> tuple[float, np.ndarray]:
        A = self.pa[s] - self.pa[q - 1]
        Gv = self.pg[s] - self.pg[q - 1]
        Bs = self.pb[s] - self.pb[q - 1]
        x = _minimize_sum(A, Gv, self.feasible)
        return float(self._value(A, Gv, Bs, x)), x

    def window_best(self, tau: int) -> tuple[np.ndarray, np.ndarray]:
        A = self.pa[tau:] - self.pa[:-tau]
        Gv = self.pg[tau:] - self.pg[:-tau]
        Bs = self.pb[tau:] - self.pb[:-tau]
        x = _minimize_sum(A, Gv, self.feasible)
        return self._value(A, Gv, Bs, x), x


def comparator_for(trace: Trace):
    cached = getattr(trace, "_comparator", None)
    if cached is not None:
        return cached
    if isinstance(trace.losses[0], ExpertLosses):
        comp = ExpertsComparator(trace.loss_matrix())
    else:
        if trace.feasible is None:
            raise ValueError("OCO traces need their feasible set")
        comp = ConvexComparator(trace.losses, trace.feasible)
    trace._comparator = comp
    return comp


def best_fixed_loss(losses, interval):
    """(inf_w L_w(I), minimizer) over a matrix, comparator, or trace.

    Ties between arms resolve to the lowest index.
    """
    if isinstance(losses, Trace):
        comp = comparator_for(losses)
    elif isinstance(losses, (ExpertsComparator, ConvexComparator)):
        comp = losses
    else:
        comp = ExpertsComparator(losses)
    q, s = _bounds(interval)
    if s < q:
        raise ValueError(f"empty interval [{q},{s}]")
    if q < 1 or s > comp.T:
        raise IndexError(f"interval [{q},{s}] outside horizon 1..{comp.T}")
    return comp.best(q, s)


def interval_regret(trace: Trace, interval) -> float:
    q, s = _bounds(interval)
    if q < 1 or s > trace.horizon or s < q:
        raise IndexError(f"interval [{q},{s}] outside horizon 1..{trace.horizon}")
    best, _ = best_fixed_loss(trace, (q, s))
    return float(trace.prefix[s] - trace.prefix[q - 1] - best)


def window_regrets(trace: Trace, tau: int) -> np.ndarray:
    """Regret on every window [q, q + tau - 1], indexed by q - 1."""
    if not 1 <= tau <= trace.horizon:
        raise ValueError(f"window length {tau} outside 1..{trace.horizon}")
    best, _ = comparator_for(trace).window_best(tau)
    p = trace.prefix
    return p[tau:] - p[:-tau] - best


def tau_grid(T: int, grid="dyadic") -> list[int]:
    if grid == "dyadic":
        taus = [1 << k for k in range(T.bit_length()) if (1 << k) <= T]
        return taus + ([T] if taus[-1] != T else [])
    if grid == "all":
        return list(range(1, T + 1))
    return sorted({int(t) for t in grid})


def sa_regret_profile(trace: Trace, grid="dyadic") -> dict[int, tuple[float, tuple[int, int]]]:
    """For each window length tau: the worst window regret and its earliest argmax."""
    out = {}
    for tau in tau_grid(trace.horizon, grid):
        regrets = window_regrets(trace, tau)
        q = int(np.argmax(regrets)) + 1
        out[tau] = (float(regrets[q - 1]), (q, q + tau - 1))
    return out


# --------------------------------------------------------------------------
# compound actions


@dataclass(frozen=True)
class CompoundAction:
    arms: tuple

    @property
    def switches(self) -> int:
        a = self.arms
        return sum(1 for x, y in zip(a, a[1:]) if x != y)

    def in_class(self, m: int) -> bool:
        return self.switches <= m

    def segments(self) -> list[tuple[int, int, int]]:
        """Maximal constant runs as (start, end, arm), 1-based inclusive."""
        out = []
        start = 1
        for t in range(1, len(self.arms)):
            if self.arms[t] != self.arms[t - 1]:
                out.append((start, t, self.arms[t - 1]))
                start = t + 1
        out.append((start, len(self.arms), self.arms[-1]))
        return out

    def loss(self, matrix: np.ndarray) -> float:
        return float(np.asarray(matrix)[np.arange(len(self.arms)), list(self.arms)].sum())


def best_compound_loss(matrix, m: int) -> tuple[float, CompoundAction]:
    """Minimum loss over arm sequences with at most ``m`` switches.

    Dynamic program over (round, switches used, current arm) with the
    running-min trick, O(T N m). Ties prefer staying on the current arm,
    then the lowest arm index.
    """
    L = np.asarray(matrix, dtype=float)
    T, N = L.shape
    if m < 0:
        raise ValueError("switch budget must be non-negative")
    m = min(m, T - 1)
    # best[j, a]: min loss of a prefix ending on arm a with at most j switches
    best = np.tile(L[0], (m + 1, 1))
    back = np.zeros((T, m + 1, N), dtype=np.int64)
    back[0] = -1
    arms = np.arange(N)
    for t in range(1, T):
        new = best.copy()
        back[t] = arms
        if m > 0:
            lead = best[:-1].argmin(axis=1)
            lead_val = best[np.arange(m), lead]
            switch = lead_val[:, None] < best[1:]
            new[1:] = np.where(switch, lead_val[:, None], best[1:])
            back[t, 1:] = np.where(switch, lead[:, None], arms)
        best = new + L[t]
    arm = int(best[m].argmin())
    value = float(best[m, arm])
    seq = [arm]
    j = m
    for t in range(T - 1, 0, -1):
        prev = int(back[t, j, arm])
        if prev != arm:
            j -= 1
        arm = prev
        seq.append(arm)
    return value, CompoundAction(tuple(reversed(seq)))


def tracking_regret(trace: Trace, m: int) -> float:
    value, _ = best_compound_loss(trace.loss_matrix(), m)
    return float(trace.prefix[-1] - value)


# --------------------------------------------------------------------------
# generic OCO oracle


def projected_subgradient(value, grad, feasible: FeasibleSet, lipschitz: float,
                          iters: int = 10_000, x0=None) -> tuple[float, np.ndarray]:
    """Minimize a convex function over the set; returns the better of the
    averaged iterate and the best iterate seen."""
    x = feasible.center.copy() if x0 is None else feasible.project(np.asarray(x0, dtype=float))
    B = feasible.diameter
    step0 = B / max(lipschitz, 1e-12)
    avg = np.zeros_like(x)
    best_x, best_v = x.copy(), value(x)
    for k in range(1, iters + 1):
        x = feasible.project(x - step0 / math.sqrt(k) * grad(x))
        avg += (x - avg) / k
        v = value(x)
        if v < best_v:
            best_x, best_v = x.copy(), v
    v_avg = value(avg)
    if v_avg < best_v:
        return float(v_avg), avg
    return float(best_v), best_x


def offline_best_point(losses: Iterable[QuadraticLoss], feasible: FeasibleSet,
                       iters: int = 10_000) -> tuple[float, np.ndarray]:
    """Best fixed point for an arbitrary list of convex losses, by subgradient descent."""
    losses = list(losses)
    a = np.array([l.a for l in losses])
    g = np.stack([l.g for l in losses])
    b = np.array([l.b for l in losses])

    def value(x):
        return float(b.sum() + (g @ x).sum() + a.sum() * (x @ x))

    def grad(x):
        return g.sum(axis=0) + 2.0 * a.sum() * x

    return projected_subgradient(value, grad, feasible, feasible.lipschitz * len(losses), iters)
