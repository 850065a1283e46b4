"""Command-line interface.

Subcommands: sweep (Monte Carlo sweep to trials.csv/summary.json), bounds
(constants table and optimized betas), check-lemma (one-node difference
violations), compare-poisson (binomial vs Poissonized model), plot-data
(tidy x,y,series CSV for external plotting).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .bounds import BoundParams, bounds_table, optimize_betas
from .config import ExperimentConfig, _from_dict, load_config
from .errors import ConfigurationError
from .experiments import (one_node_difference_check, poissonization_comparison,
                          run_sweep, variance_scaling_report)


def _load(args) -> ExperimentConfig:
    path = Path(args.config)
    if not path.is_file():
        raise ConfigurationError(f"config file not found: {path}")
    config = load_config(path)
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.out is not None:
        overrides["output_dir"] = args.out
    if getattr(args, "n", None):
        overrides["n_values"] = tuple(args.n)
    if getattr(args, "trials", None) is not None:
        overrides["trials"] = args.trials
    if getattr(args, "alpha", None) is not None:
        overrides["alpha"] = args.alpha
    return config.replace(**overrides) if overrides else config


def _add_common(sub, with_sweep_overrides=True):
    sub.add_argument("--config", required=True, help="TOML experiment config")
    sub.add_argument("--seed", type=int, help="override master_seed")
    sub.add_argument("--workers", type=int, help="override worker count")
    sub.add_argument("--out", help="override output_dir")
    if with_sweep_overrides:
        sub.add_argument("--n", type=int, nargs="+", help="override n_values")
        sub.add_argument("--trials", type=int, help="override trials")
        sub.add_argument("--alpha", type=float, help="override alpha")


def _cmd_sweep(args) -> int:
    config = _load(args)
    result = run_sweep(config, write=True)
    report = variance_scaling_report(result.records, config)
    out = Path(config.output_dir)
    print(f"wrote {out / 'trials.csv'} ({len(result.records)} records) "
          f"and {out / 'summary.json'}")
    for k, n in enumerate(report.n):
        print(f"  n={n}: var={report.variance[k]:.6g} "
              f"bound={report.bound[k]:.6g} ratio={report.ratio[k]:.6g}")
    if not math.isnan(report.spearman_rho):
        print(f"  ratio trend: spearman rho={report.spearman_rho:.3f} "
              f"p={report.spearman_p:.3f} "
              f"upward_significant={report.upward_trend_significant}")
    return 0


def _bound_params(args) -> BoundParams:
    if args.homogeneous:
        return BoundParams.homogeneous(alpha=args.alpha, delta_rule=args.delta_rule)
    return BoundParams(eps1=args.eps1, eps2=args.eps2, xi_min=args.xi_min,
                       xi_max=args.xi_max, alpha=args.alpha,
                       delta_rule=args.delta_rule)


def _cmd_bounds(args) -> int:
    params = _bound_params(args)
    opt = optimize_betas(params, tol=args.tol)
    print(f"beta_low  = {opt.beta_low:.7g}  at A = {opt.argmax_A:.6g}")
    print(f"beta_up   = {opt.beta_up:.7g}  at A = {opt.argmin_A:.6g}")
    if opt.c1_multimodal or opt.c2_multimodal:
        print("warning: multiple grid-local optima detected")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        a_grid = np.geomspace(args.a_min, args.a_max, args.a_points)
        with open(out / "bounds.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["A", "C1", "C2"])
            for row in bounds_table(params, a_grid):
                writer.writerow([repr(row.A), repr(row.c1), repr(row.c2)])
        with open(out / "betas.json", "w") as fh:
            json.dump({"beta_low": opt.beta_low, "argmax_A": opt.argmax_A,
                       "beta_up": opt.beta_up, "argmin_A": opt.argmin_A,
                       "params": asdict(params)}, fh, indent=2, sort_keys=True)
        print(f"wrote {out / 'bounds.csv'} and {out / 'betas.json'}")
    return 0


def _cmd_check_lemma(args) -> int:
    config = _load(args)
    n = config.n_values[0]
    report = one_node_difference_check(n, config, pairs_target=args.pairs)
    print(f"n={n}: {report.pairs} (instance, removed-node) pairs on "
          f"{report.gated_instances}/{report.instances} gated instances")
    print(f"  violations       = {report.violations}")
    print(f"  max forest degree = {report.max_degree} "
          f"(bound {report.degree_bound:.1f}, ok={report.degree_ok})")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "lemma_check.json", "w") as fh:
            json.dump(asdict(report), fh, indent=2, sort_keys=True)
        print(f"wrote {out / 'lemma_check.json'}")
    return 0 if report.violations == 0 else 3


def _cmd_compare_poisson(args) -> int:
    config = _load(args)
    report = poissonization_comparison(config)
    print(f"n={report.n}, {report.trials} trials per model")
    print(f"  scaled mean binomial={report.mean_binomial:.6g} "
          f"poisson={report.mean_poisson:.6g} "
          f"diff={report.mean_diff_sigmas:.2f} pooled SE")
    print(f"  KS statistic={report.ks_statistic:.4f} p={report.ks_pvalue:.3f}")
    print(f"  P(N=n)={report.freq_count_equals_n:.5f} vs "
          f"1/sqrt(2 pi n)={report.stirling_value:.5f} "
          f"({report.count_match_sigmas:.2f} sigma)")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "poisson_comparison.json", "w") as fh:
            json.dump(asdict(report), fh, indent=2, sort_keys=True)
        print(f"wrote {out / 'poisson_comparison.json'}")
    return 0


def _cmd_plot_data(args) -> int:
    in_dir = Path(args.input)
    summary_path = in_dir / "summary.json"
    if not summary_path.is_file():
        raise ConfigurationError(f"no summary.json under {in_dir}")
    with open(summary_path) as fh:
        summary = json.load(fh)
    config = _from_dict(summary["config"])

    rows = []
    for entry in summary["per_n"].values():
        n = entry["n"]
        rows.append((n, entry["scaled_mst_var"], "var_empirical"))
        rows.append((n, entry["var_bound"], "var_bound"))
        if entry["var_bound"]:
            rows.append((n, entry["scaled_mst_var"] / entry["var_bound"], "var_ratio"))
    params = config.bound_params()
    for bset in bounds_table(params, np.geomspace(args.a_min, args.a_max,
                                                  args.a_points)):
        rows.append((bset.A, bset.c1, "c1_curve"))
        rows.append((bset.A, bset.c2, "c2_curve"))

    out = Path(args.out) if args.out else in_dir
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "plotdata.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "series"])
        for x, y, series in rows:
            writer.writerow([repr(float(x)), repr(float(y)), series])
    print(f"wrote {out / 'plotdata.csv'} ({len(rows)} rows)")
    return 0


def cli_main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="rggmst",
        description="Random geometric graph spanning-forest experiments")
    subs = parser.add_subparsers(dest="command", required=True)

    sweep = subs.add_parser("sweep", help="run a Monte Carlo sweep")
    _add_common(sweep)
    sweep.set_defaults(func=_cmd_sweep)

    bounds_p = subs.add_parser("bounds", help="constants table and beta optima")
    bounds_p.add_argument("--homogeneous", action="store_true",
                          help="eps1=eps2=xi_min=xi_max=1")
    bounds_p.add_argument("--alpha", type=float, default=1.0)
    bounds_p.add_argument("--eps1", type=float, default=1.0)
    bounds_p.add_argument("--eps2", type=float, default=1.0)
    bounds_p.add_argument("--xi-min", type=float, default=1.0)
    bounds_p.add_argument("--xi-max", type=float, default=1.0)
    bounds_p.add_argument("--delta-rule", default="section1",
                          choices=["section1", "section3"])
    bounds_p.add_argument("--tol", type=float, default=1e-6)
    bounds_p.add_argument("--a-min", type=float, default=0.05)
    bounds_p.add_argument("--a-max", type=float, default=5.0)
    bounds_p.add_argument("--a-points", type=int, default=200)
    bounds_p.add_argument("--out")
    bounds_p.set_defaults(func=_cmd_bounds)

    lemma = subs.add_parser("check-lemma", help="one-node difference check")
    _add_common(lemma, with_sweep_overrides=False)
    lemma.add_argument("--pairs", type=int, default=1000)
    lemma.set_defaults(func=_cmd_check_lemma)

    cmp_p = subs.add_parser("compare-poisson",
                            help="binomial vs Poissonized model")
    _add_common(cmp_p)
    cmp_p.set_defaults(func=_cmd_compare_poisson)

    plot = subs.add_parser("plot-data", help="tidy CSV for external plotting")
    plot.add_argument("--input", required=True, help="sweep output directory")
    plot.add_argument("--out")
    plot.add_argument("--a-min", type=float, default=0.05)
    plot.add_argument("--a-max", type=float, default=5.0)
    plot.add_argument("--a-points", type=int, default=200)
    plot.set_defaults(func=_cmd_plot_data)

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
