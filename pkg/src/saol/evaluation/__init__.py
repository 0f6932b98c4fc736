from .bounds import (
    lemma2_bound,
    strongly_adaptive_spec,
    theorem1_bound,
    theorem1_window_bounds,
    tracking_bound,
)
from .environments import (
    AdversarialExperts,
    DriftingOco,
    Environment,
    Segment,
    StationaryExperts,
    SwitchingExperts,
    convex_losses,
    default_ball,
    generate_environment,
    loss_matrix,
    make_rng,
)
from .oracles import (
    CompoundAction,
    ConvexComparator,
    ExpertsComparator,
    best_compound_loss,
    best_fixed_loss,
    comparator_for,
    interval_regret,
    offline_best_point,
    projected_subgradient,
    sa_regret_profile,
    tau_grid,
    tracking_regret,
    window_regrets,
)
from .report import RegretReport, build_report, read_report, write_report

__all__ = [
    "lemma2_bound",
    "strongly_adaptive_spec",
    "theorem1_bound",
    "theorem1_window_bounds",
    "tracking_bound",
    "AdversarialExperts",
    "DriftingOco",
    "Environment",
    "Segment",
    "StationaryExperts",
    "SwitchingExperts",
    "convex_losses",
    "default_ball",
    "generate_environment",
    "loss_matrix",
    "make_rng",
    "CompoundAction",
    "ConvexComparator",
    "ExpertsComparator",
    "best_compound_loss",
    "best_fixed_loss",
    "comparator_for",
    "interval_regret",
    "offline_best_point",
    "projected_subgradient",
    "sa_regret_profile",
    "tau_grid",
    "tracking_regret",
    "window_regrets",
    "RegretReport",
    "build_report",
    "read_report",
    "write_report",
]
