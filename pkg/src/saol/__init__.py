"""Strongly adaptive online learning: SAOL, base learners, and regret oracles."""

from .baselines import (
    MultiplicativeWeights,
    OnlineGradientDescent,
    RegretBoundSpec,
    mw_bound,
    ogd_bound,
)
from .core import (
    Ball,
    Box,
    ExpertDistribution,
    ExpertLosses,
    Point,
    QuadraticLoss,
    Round,
    Trace,
    cumulative_loss,
    evaluate_loss,
)
from .intervals import (
    DyadicInterval,
    GeometricPartition,
    active_set,
    entering_set,
    geometric_partition,
    level_interval,
)
from .meta import SAOL, eta_of, run

__version__ = "0.1.0"

__all__ = [
    "MultiplicativeWeights",
    "OnlineGradientDescent",
    "RegretBoundSpec",
    "mw_bound",
    "ogd_bound",
    "Ball",
    "Box",
    "ExpertDistribution",
    "ExpertLosses",
    "Point",
    "QuadraticLoss",
    "Round",
    "Trace",
    "cumulative_loss",
    "evaluate_loss",
    "DyadicInterval",
    "GeometricPartition",
    "active_set",
    "entering_set",
    "geometric_partition",
    "level_interval",
    "SAOL",
    "eta_of",
    "run",
]
