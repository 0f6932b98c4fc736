"""Command-line experiment runner.

Exit status: 0 all requested bound checks pass, 1 a bound check failed,
2 bad configuration or arguments, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .core import write_trace
from .evaluation import write_report
from .experiment import ConfigError, ExperimentConfig, load_config, run_seed, summarize, with_overrides
from .intervals import active_set, entering_set, geometric_partition

EXIT_OK, EXIT_BOUND, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3


def _defaults_epilog() -> str:
    lines = ["config defaults (INI sections [experiment], [scenario], [environment]):"]
    for f in dataclasses.fields(ExperimentConfig):
        lines.append(f"  {f.name} = {f.default!r}")
    lines.append("environment variable SAOL_THREADS caps the number of seeds run concurrently")
    return "\n".join(lines)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="saol", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter,
                                epilog=_defaults_epilog())
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (("run", "run each seed and check the regret bounds"),
                        ("compare", "SA-regret side by side for several algorithms")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", required=True, type=Path, help="INI experiment config")
        sp.add_argument("--out", type=Path, help="output directory (overrides experiment.out)")
        sp.add_argument("--seed-override", type=int, metavar="K", help="run only seed K")
        sp.add_argument("--tau-grid", choices=("dyadic", "all"), help="window lengths to scan")
    sp = sub.add_parser("scan-intervals", help="dump active sets and covering partitions")
    sp.add_argument("--from", dest="t_from", type=int, default=1)
    sp.add_argument("--to", dest="t_to", type=int, default=32)
    sp.add_argument("--start", type=int, default=1,
                    help="left end q of the partitioned interval [q, t]")
    return p


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("SAOL_THREADS", "1")))
    except ValueError:
        return 1


def _configure(args) -> ExperimentConfig:
    cfg = load_config(args.config)
    return with_overrides(
        cfg,
        out=str(args.out) if args.out else None,
        seeds=(args.seed_override,) if args.seed_override is not None else None,
        tau_grid=args.tau_grid,
    )


def _run_all(cfg: ExperimentConfig, algorithms) -> list:
    jobs = [(alg, seed) for alg in algorithms for seed in cfg.seeds]
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        # map preserves submission order, so merges are deterministic
        return list(pool.map(lambda job: run_seed(cfg, *job), jobs))


def cmd_run(cfg: ExperimentConfig) -> int:
    out = Path(cfg.out)
    results = _run_all(cfg, cfg.algorithms)
    out.mkdir(parents=True, exist_ok=True)
    ok = True
    for res in results:
        stem = f"{res.algorithm}_seed{res.seed}"
        write_trace(res.trace, out / f"{stem}_trace.csv")
        write_report(res.report, out / f"{stem}_report.csv")
        text = summarize(res, cfg)
        (out / f"{stem}_summary.txt").write_text(text)
        sys.stdout.write(text)
        ok &= res.report.passed
    return EXIT_OK if ok else EXIT_BOUND


COMPARE_COLUMNS = ("algorithm", "tau", "sa_regret_mean", "sa_regret_max", "n_seeds")


def compare_rows(results, n_seeds: int) -> list[tuple]:
    """Per-algorithm SA-regret statistics; ``results`` is algorithm-major."""
    rows = []
    for start in range(0, len(results), n_seeds):
        group = results[start:start + n_seeds]
        for i, row in enumerate(group[0].report.sa_profile):
            vals = np.array([r.report.sa_profile[i].max_regret for r in group])
            rows.append((group[0].algorithm, row.tau, float(vals.mean()), float(vals.max()), len(group)))
    return rows


def cmd_compare(cfg: ExperimentConfig) -> int:
    if len(cfg.algorithms) < 2:
        raise ConfigError("experiment.algorithms must list at least two algorithms for compare")
    # listing the same algorithm twice yields identical rows
    results = _run_all(dataclasses.replace(cfg, checks="none"), cfg.algorithms)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = compare_rows(results, len(cfg.seeds))
    with (out / "compare.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COMPARE_COLUMNS)
        for alg, tau, mean, mx, n in rows:
            w.writerow([alg, tau, repr(mean), repr(mx), n])
    sys.stdout.write(f"{'algorithm':<10} {'tau':>6} {'SA-regret (mean)':>18} {'max':>10}\n")
    for alg, tau, mean, mx, _ in rows:
        sys.stdout.write(f"{alg:<10} {tau:>6d} {mean:>18.4f} {mx:>10.4f}\n")
    return EXIT_OK


def cmd_scan(t_from: int, t_to: int, start: int) -> int:
    if not 1 <= t_from <= t_to or start < 1:
        raise ConfigError("scan-intervals needs 1 <= --from <= --to and --start >= 1")
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(("t", "active", "entering", "partition_left", "partition_right"))
    for t in range(t_from, t_to + 1):
        part = geometric_partition(start, t) if t >= start else None
        w.writerow((t, " ".join(map(repr, active_set(t))), " ".join(map(repr, entering_set(t))),
                    " ".join(map(repr, part.left)) if part else "",
                    " ".join(map(repr, part.right)) if part else ""))
    return EXIT_OK


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "scan-intervals":
            return cmd_scan(args.t_from, args.t_to, args.start)
        cfg = _configure(args)
        return cmd_run(cfg) if args.command == "run" else cmd_compare(cfg)
    except ConfigError as exc:
        print(f"saol: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"saol: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
