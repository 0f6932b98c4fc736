"""Experiment configuration and seeded single runs.

Configs are INI files with three sections::

    [experiment]
    algorithm = saol-mw          ; or: algorithms = mw, saol-mw  (compare)
    mode = expected              ; sample | expected
    T = 1024
    seeds = 0, 1, 2

    [scenario]
    kind = experts               ; experts | oco
    n_arms = 10

    [environment]
    kind = switching             ; stationary | switching | adversarial | drifting
    switches = 3
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .baselines import MultiplicativeWeights, OnlineGradientDescent, RegretBoundSpec, mw_bound, ogd_bound
from .core import Ball, Box, FeasibleSet, Trace
from .evaluation import (
    AdversarialExperts,
    DriftingOco,
    RegretReport,
    StationaryExperts,
    SwitchingExperts,
    build_report,
    generate_environment,
)
from .meta import SAOL, run

ALGORITHMS = ("saol-mw", "saol-ogd", "mw", "ogd")
ENVIRONMENTS = ("stationary", "switching", "adversarial", "drifting")
CHECKS = ("interval", "tracking", "regret")


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the offending field."""


@dataclass
class ExperimentConfig:
    scenario: str = "experts"
    n_arms: int = 2
    dim: int = 2
    feasible_kind: str = "ball"
    radius: float = 0.5
    lower: tuple = (-0.5,)
    upper: tuple = (0.5,)
    lipschitz: float = 1.0
    environment: str = "stationary"
    means: tuple = ()
    noise: float = 0.0
    gap: float = 0.5
    switches: int = 1
    drift: float = 0.05
    family: str = "quadratic"
    algorithms: tuple = ("saol-mw",)
    mode: str = "expected"
    T: int = 1024
    seeds: tuple = (0,)
    out: str = "runs"
    tau_grid: str = "dyadic"
    tracking_m: tuple = (1, 2, 4, 8)
    checks: str = "auto"
    mw_rate: str = "anytime"
    diagnostics: bool = True
    log_scale: bool = False

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.T < 1:
            raise ConfigError(f"experiment.T must be >= 1, got {self.T}")
        if not self.seeds:
            raise ConfigError("experiment.seeds must list at least one seed")
        if self.scenario not in ("experts", "oco"):
            raise ConfigError(f"scenario.kind must be experts or oco, got {self.scenario!r}")
        if self.mode not in ("sample", "expected"):
            raise ConfigError(f"experiment.mode must be sample or expected, got {self.mode!r}")
        if self.tau_grid not in ("dyadic", "all"):
            raise ConfigError(f"experiment.tau_grid must be dyadic or all, got {self.tau_grid!r}")
        if self.tau_grid == "all" and self.T > 4096:
            raise ConfigError("experiment.tau_grid = all is limited to T <= 4096")
        if self.environment not in ENVIRONMENTS:
            raise ConfigError(f"environment.kind must be one of {ENVIRONMENTS}")
        for alg in self.algorithms:
            if alg not in ALGORITHMS:
                raise ConfigError(f"experiment.algorithm {alg!r} not in {ALGORITHMS}")
            if alg.endswith("mw") and self.scenario != "experts":
                raise ConfigError(f"experiment.algorithm {alg} needs scenario.kind = experts")
            if alg.endswith("ogd") and self.scenario != "oco":
                raise ConfigError(f"experiment.algorithm {alg} needs scenario.kind = oco")
        if self.scenario == "experts":
            if self.n_arms < 1:
                raise ConfigError("scenario.n_arms must be >= 1")
            if self.environment == "drifting":
                raise ConfigError("environment.kind = drifting needs scenario.kind = oco")
            if self.means and len(self.means) != self.n_arms:
                raise ConfigError("environment.means must list one mean per arm")
            if any(not 0 <= m <= 1 for m in self.means):
                raise ConfigError("environment.means must lie in [0, 1]")
        else:
            if self.environment != "drifting":
                raise ConfigError("scenario.kind = oco needs environment.kind = drifting")
            if self.lipschitz <= 0:
                raise ConfigError("scenario.G must be positive")
        if self.mw_rate not in ("anytime", "fixed"):
            raise ConfigError("experiment.mw_rate must be anytime or fixed")
        if self.checks not in ("auto", "none"):
            bad = [c.strip() for c in self.checks.split(",") if c.strip() not in CHECKS]
            if bad:
                raise ConfigError(f"experiment.checks: unknown check(s) {bad}; use auto, none or {CHECKS}")

    @property
    def feasible(self) -> FeasibleSet:
        if self.feasible_kind == "ball":
            return Ball(np.zeros(self.dim), self.radius, self.lipschitz)
        lo, hi = np.asarray(self.lower, float), np.asarray(self.upper, float)
        if lo.size == 1:
            lo, hi = np.full(self.dim, lo[0]), np.full(self.dim, hi[0])
        return Box(lo, hi, self.lipschitz)


def _floats(text: str) -> tuple:
    return tuple(float(x) for x in text.replace(",", " ").split())


def _ints(text: str) -> tuple:
    return tuple(int(x) for x in text.replace(",", " ").split())


_FIELDS = {
    # (section, key): (attribute, parser)
    ("experiment", "algorithm"): ("algorithms", lambda v: (v.strip(),)),
    ("experiment", "algorithms"): ("algorithms", lambda v: tuple(x.strip() for x in v.split(",") if x.strip())),
    ("experiment", "mode"): ("mode", str.strip),
    ("experiment", "t"): ("T", int),
    ("experiment", "seeds"): ("seeds", _ints),
    ("experiment", "out"): ("out", str.strip),
    ("experiment", "tau_grid"): ("tau_grid", str.strip),
    ("experiment", "tracking_m"): ("tracking_m", _ints),
    ("experiment", "checks"): ("checks", str.strip),
    ("experiment", "mw_rate"): ("mw_rate", str.strip),
    ("experiment", "diagnostics"): ("diagnostics", lambda v: v.strip().lower() in ("on", "true", "1", "yes")),
    ("experiment", "log_scale"): ("log_scale", lambda v: v.strip().lower() in ("on", "true", "1", "yes")),
    ("scenario", "kind"): ("scenario", str.strip),
    ("scenario", "n_arms"): ("n_arms", int),
    ("scenario", "d"): ("dim", int),
    ("scenario", "set"): ("feasible_kind", str.strip),
    ("scenario", "radius"): ("radius", float),
    ("scenario", "lower"): ("lower", _floats),
    ("scenario", "upper"): ("upper", _floats),
    ("scenario", "g"): ("lipschitz", float),
    ("environment", "kind"): ("environment", str.strip),
    ("environment", "means"): ("means", _floats),
    ("environment", "noise"): ("noise", float),
    ("environment", "gap"): ("gap", float),
    ("environment", "switches"): ("switches", int),
    ("environment", "drift"): ("drift", float),
    ("environment", "family"): ("family", str.strip),
}


def parse_config(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    values = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            spec = _FIELDS.get((section.lower(), key.lower()))
            if spec is None:
                raise ConfigError(f"unknown config key {section}.{key}")
            attr, conv = spec
            try:
                values[attr] = conv(raw)
            except ValueError as exc:
                raise ConfigError(f"{section}.{key}: {exc}") from exc
    return ExperimentConfig(**values)


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())


def environment_for(cfg: ExperimentConfig, seed: int):
    if cfg.environment == "stationary":
        means = cfg.means or tuple(np.linspace(0.25, 0.75, cfg.n_arms).tolist())
        return StationaryExperts(tuple(means), cfg.T, cfg.noise, seed)
    if cfg.environment == "switching":
        return SwitchingExperts.evenly(cfg.n_arms, cfg.T, cfg.switches, cfg.gap, cfg.noise, seed)
    if cfg.environment == "adversarial":
        return AdversarialExperts(cfg.n_arms, cfg.T, seed)
    return DriftingOco(cfg.feasible, cfg.T, cfg.drift, cfg.family, seed)


def bound_spec(cfg: ExperimentConfig) -> RegretBoundSpec:
    return mw_bound(cfg.n_arms) if cfg.scenario == "experts" else ogd_bound(cfg.feasible)


def checks_for(cfg: ExperimentConfig, algorithm: str) -> tuple:
    if cfg.checks == "auto":
        return ("interval", "tracking") if algorithm.startswith("saol") else ("regret",)
    if cfg.checks == "none":
        return ()
    return tuple(c.strip() for c in cfg.checks.split(",") if c.strip())


def build_learner(cfg: ExperimentConfig, algorithm: str, seed: int):
    n, feasible = cfg.n_arms, cfg.feasible
    if algorithm.endswith("mw"):
        if cfg.mw_rate == "fixed":
            def base(h):
                return MultiplicativeWeights(n, "fixed", h)
        else:
            def base(h):
                return MultiplicativeWeights(n)
    else:
        def base(h):
            return OnlineGradientDescent(feasible)
    if algorithm.startswith("saol"):
        return SAOL(base, cfg.mode, seed=np.random.SeedSequence([seed, 1]),
                    diagnostics=cfg.diagnostics, log_scale=cfg.log_scale)
    return base(cfg.T)


@dataclass
class SeedResult:
    algorithm: str
    seed: int
    trace: Trace
    report: RegretReport
    files: list = field(default_factory=list)


def run_seed(cfg: ExperimentConfig, algorithm: str, seed: int) -> SeedResult:
    rounds = generate_environment(environment_for(cfg, seed))
    learner = build_learner(cfg, algorithm, seed)
    meta = {"scenario": cfg.scenario, "algorithm": algorithm, "T": cfg.T,
            "environment": cfg.environment,
            "mode": cfg.mode if algorithm.startswith("saol") else "deterministic"}
    if cfg.scenario == "experts":
        meta["N"] = cfg.n_arms
    else:
        feas = cfg.feasible
        meta.update(d=feas.dim, B=feas.diameter, G=feas.lipschitz, set=cfg.feasible_kind)
    trace = run(learner, rounds, meta, feasible=cfg.feasible if cfg.scenario == "oco" else None)
    trace.seed = seed
    report = build_report(trace, bound_spec(cfg), cfg.tau_grid,
                          cfg.tracking_m if cfg.scenario == "experts" else (),
                          checks_for(cfg, algorithm))
    return SeedResult(algorithm, seed, trace, report)


def summarize(result: SeedResult, cfg: ExperimentConfig) -> str:
    rep = result.report
    lines = [f"algorithm: {result.algorithm}", f"seed: {result.seed}",
             f"scenario: {cfg.scenario}", f"environment: {cfg.environment}",
             f"T: {cfg.T}", f"regret R(T): {rep.regret:.6f}"]
    for row in rep.sa_profile:
        status = "" if row.passed is None else ("  PASS" if row.passed else "  FAIL")
        bound = "" if row.bound is None else f"  bound {row.bound:.3f}"
        lines.append(f"  SA-regret tau={row.tau:<6d} {row.max_regret:10.4f} on "
                     f"[{row.argmax[0]},{row.argmax[1]}]{bound}{status}")
    if "interval" in rep.checks:
        lines.append(f"interval regret bound: {'PASS' if rep.checks['interval'] else 'FAIL'}")
    for row in rep.tracking:
        lines.append(f"  tracking m={row.m:<3d} {row.regret:10.4f} <= {row.bound:.3f}  "
                     f"{'PASS' if row.passed else 'FAIL'}")
    if "tracking" in rep.checks:
        lines.append(f"tracking regret bound: {'PASS' if rep.checks['tracking'] else 'FAIL'}")
    if "regret" in rep.checks:
        lines.append(f"base-learner regret bound: {'PASS' if rep.checks['regret'] else 'FAIL'}")
    return "\n".join(lines) + "\n"


def with_overrides(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    kw = {k: v for k, v in kw.items() if v is not None}
    return replace(cfg, **kw) if kw else cfg

