"""Monte Carlo orchestration and statistics.

One trial = sample a configuration, build the RGG, compute its minimum
spanning forest, the tiling occupancy report, the constructive upper-bound
tree (when the occupancy event holds), the isolated-square lower bound and
the deviation-threshold flags. Trials are independent tasks over a process
pool; each derives its RNG stream from (master_seed, n index, trial index),
so the record multiset is independent of the worker count, and records are
sorted by (n, trial_index) before writing.

trials.csv holds one record per row. Wall-clock time is tracked in memory
and summarized in summary.json but deliberately kept out of trials.csv so
that identical (config, seed) runs produce byte-identical files.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from scipy import stats as _stats

from . import __version__
from .bounds import Thresholds, theorem_thresholds
from .config import ExperimentConfig
from .mst import minimum_spanning_forest
from .rgg import build_rgg
from .sampling import sample_binomial, sample_poisson
from .tiling import (TilingPlan, build_tuni, gap_sum, lower_bound_count,
                     occupancy, plan_tiling)

TRIALS_CSV_COLUMNS = [
    "n", "trial_index", "n_points", "mst_total", "scaled_mst", "connected",
    "e_dense", "e_poi", "isolated_count", "y_alpha", "tuni_weight",
    "above_lower", "below_upper", "lower_pathwise_ok",
]


@dataclass
class TrialRecord:
    n: int
    trial_index: int
    n_points: int
    mst_total: float
    scaled_mst: float
    connected: bool
    e_dense: bool
    e_poi: bool
    isolated_count: int
    y_alpha: float
    tuni_weight: float       # nan when the occupancy event fails
    above_lower: bool        # true by definition when the threshold is vacuous
    below_upper: bool
    lower_pathwise_ok: bool  # vacuously true when disconnected
    wall_time: float

    def csv_row(self) -> str:
        vals = [self.n, self.trial_index, self.n_points, repr(self.mst_total),
                repr(self.scaled_mst), int(self.connected), int(self.e_dense),
                int(self.e_poi), self.isolated_count, repr(self.y_alpha),
                repr(self.tuni_weight), int(self.above_lower),
                int(self.below_upper), int(self.lower_pathwise_ok)]
        return ",".join(str(v) for v in vals)


def wilson_interval(successes: int, total: int, z: float = 1.959963984540054):
    """Wilson 95% score interval for a binomial proportion."""
    if total == 0:
        return 0.0, 1.0
    phat = successes / total
    denom = 1.0 + z * z / total
    centre = (phat + z * z / (2 * total)) / denom
    half = z * math.sqrt(phat * (1 - phat) / total + z * z / (4 * total * total)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


_PLAN_CACHE: dict = {}


def _cached_plan(n: int, r: float, A: float) -> TilingPlan:
    key = (n, r, A)
    if key not in _PLAN_CACHE:
        _PLAN_CACHE[key] = plan_tiling(n, r, A)
    return _PLAN_CACHE[key]


def run_trial(config: ExperimentConfig, n: int, n_idx: int, trial_idx: int,
              process: str | None = None) -> TrialRecord:
    """One complete trial; a pure function of (config, n_idx, trial_idx)."""
    t0 = time.perf_counter()
    seed = np.random.SeedSequence(entropy=config.master_seed,
                                  spawn_key=(n_idx, trial_idx))
    density = config.density_spec()
    weights = config.weight_spec()
    r = config.radius_for_n(n)
    plan = _cached_plan(n, r, config.a_param)
    thresholds = _cached_thresholds(config, n, plan.A_eff)

    process = process or config.process
    if process == "binomial":
        points = sample_binomial(n, density, seed)
    else:
        points = sample_poisson(n, density, seed)

    g = build_rgg(points, r, weights)
    m = minimum_spanning_forest(g)
    rep = occupancy(points, plan, density)
    y_alpha = gap_sum(rep, config.alpha)
    connected = m.components == 1

    tuni_weight = math.nan
    if rep.e_poi and points.n > 0:
        tuni_weight = build_tuni(g, plan, rep).total_weight
    lb = lower_bound_count(g, m, plan, rep, weights)

    scaled = m.total_weight * n ** (config.alpha / 2.0 - 1.0)
    above = True if thresholds.lower_vacuous else m.total_weight >= thresholds.lower
    below = m.total_weight <= thresholds.upper
    return TrialRecord(
        n=n, trial_index=trial_idx, n_points=points.n,
        mst_total=m.total_weight, scaled_mst=scaled, connected=connected,
        e_dense=rep.e_dense, e_poi=rep.e_poi,
        isolated_count=rep.isolated_count, y_alpha=y_alpha,
        tuni_weight=tuni_weight, above_lower=above, below_upper=below,
        lower_pathwise_ok=(lb.pathwise_ok if lb.checked else True),
        wall_time=time.perf_counter() - t0)


_THRESHOLD_CACHE: dict = {}


def _cached_thresholds(config: ExperimentConfig, n: int, a_eff: float) -> Thresholds:
    key = (config.master_seed, n, a_eff, config.alpha, config.delta_rule,
           config.density.eps1, config.density.eps2)
    if key not in _THRESHOLD_CACHE:
        _THRESHOLD_CACHE[key] = theorem_thresholds(n, a_eff, config.bound_params())
    return _THRESHOLD_CACHE[key]


def _run_block(args):
    config, n, n_idx, lo, hi, process = args
    return [run_trial(config, n, n_idx, t, process) for t in range(lo, hi)]


@dataclass
class SweepResult:
    records: list
    summary: dict


def run_sweep(config: ExperimentConfig, write: bool = True,
              process: str | None = None) -> SweepResult:
    """All (n, trial) records plus the per-n summary; optionally written to
    output_dir as trials.csv and summary.json."""
    t_start = time.perf_counter()
    records: list[TrialRecord] = []
    out_dir = Path(config.output_dir)
    csv_path = out_dir / "trials.csv"
    fh = None
    if write:
        out_dir.mkdir(parents=True, exist_ok=True)
        fh = open(csv_path, "w")
        fh.write(",".join(TRIALS_CSV_COLUMNS) + "\n")

    try:
        order = sorted(range(len(config.n_values)),
                       key=lambda i: config.n_values[i])
        for n_idx in order:
            n = config.n_values[n_idx]
            block: list[TrialRecord] = []
            if config.workers <= 1:
                for t in range(config.trials):
                    block.append(run_trial(config, n, n_idx, t, process))
            else:
                chunk = max(1, math.ceil(config.trials / (config.workers * 8)))
                tasks = [(config, n, n_idx, lo, min(lo + chunk, config.trials), process)
                         for lo in range(0, config.trials, chunk)]
                with ProcessPoolExecutor(max_workers=config.workers) as pool:
                    for part in pool.map(_run_block, tasks):
                        block.extend(part)
            block.sort(key=lambda rec: rec.trial_index)
            records.extend(block)
            if fh is not None:
                for rec in block:
                    fh.write(rec.csv_row() + "\n")
                fh.flush()
    finally:
        if fh is not None:
            fh.close()

    summary = summarize(config, records)
    summary["wall_time_total"] = time.perf_counter() - t_start
    if write:
        with open(out_dir / "summary.json", "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True, allow_nan=True)
    return SweepResult(records, summary)


def _var_bound(n: int, r: float, alpha: float) -> float:
    return r * r * (n * r * r) ** alpha


def summarize(config: ExperimentConfig, records) -> dict:
    per_n = {}
    for n_idx, n in enumerate(config.n_values):
        rows = [rec for rec in records if rec.n == n]
        if not rows:
            continue
        r = config.radius_for_n(n)
        plan = _cached_plan(n, r, config.a_param)
        thr = _cached_thresholds(config, n, plan.A_eff)
        scaled = np.array([rec.scaled_mst for rec in rows])
        t = len(rows)
        n_above = sum(rec.above_lower for rec in rows)
        n_below = sum(rec.below_upper for rec in rows)
        per_n[str(n)] = {
            "n": n, "radius": r, "trials": t,
            "plan": plan.to_json(),
            "thresholds": {"lower": thr.lower, "upper": thr.upper,
                           "lower_vacuous": thr.lower_vacuous},
            "scaled_mst_mean": float(scaled.mean()),
            "scaled_mst_var": float(scaled.var(ddof=1)) if t > 1 else 0.0,
            "var_bound": _var_bound(n, r, config.alpha),
            "freq_connected": sum(rec.connected for rec in rows) / t,
            "freq_e_dense": sum(rec.e_dense for rec in rows) / t,
            "freq_e_poi": sum(rec.e_poi for rec in rows) / t,
            "freq_above_lower": n_above / t,
            "wilson_above_lower": wilson_interval(n_above, t),
            "freq_below_upper": n_below / t,
            "wilson_below_upper": wilson_interval(n_below, t),
            "mean_isolated": float(np.mean([rec.isolated_count for rec in rows])),
            "mean_y_alpha": float(np.mean([rec.y_alpha for rec in rows])),
            "mean_wall_time": float(np.mean([rec.wall_time for rec in rows])),
        }
    return {"version": __version__, "config": asdict(config), "per_n": per_n}


@dataclass
class VarianceScalingReport:
    n: list
    variance: list
    variance_se: list
    bound: list
    ratio: list
    degenerate: list
    slope: float
    spearman_rho: float
    spearman_p: float
    upward_trend_significant: bool  # one-sided test at 5%


def variance_scaling_report(records, config: ExperimentConfig,
                            level: float = 0.05) -> VarianceScalingReport:
    """Empirical var(scaled_mst) against the r^2 (n r^2)^alpha envelope.

    The envelope constant is not reproducible, so the check is boundedness:
    the per-n ratio must show no statistically significant upward trend
    (one-sided Spearman test).
    """
    ns, variances, ses, bnds, ratios, degen = [], [], [], [], [], []
    for n in sorted(set(rec.n for rec in records)):
        rows = [rec.scaled_mst for rec in records if rec.n == n]
        if len(rows) < 2:
            continue
        v = float(np.var(rows, ddof=1))
        bound = _var_bound(n, config.radius_for_n(n), config.alpha)
        ns.append(n)
        variances.append(v)
        ses.append(v * math.sqrt(2.0 / (len(rows) - 1)))
        bnds.append(bound)
        ratios.append(v / bound)
        degen.append(v == 0.0)

    usable = [k for k in range(len(ns)) if not degen[k]]
    slope = math.nan
    rho, pval, upward = math.nan, math.nan, False
    if len(usable) >= 2:
        slope = float(np.polyfit(np.log([bnds[k] for k in usable]),
                                 np.log([variances[k] for k in usable]), 1)[0])
    if len(usable) >= 3:
        res = _stats.spearmanr([ns[k] for k in usable],
                               [ratios[k] for k in usable])
        rho, pval = float(res.statistic), float(res.pvalue)
        upward = rho > 0 and pval / 2.0 < level
    return VarianceScalingReport(ns, variances, ses, bnds, ratios, degen,
                                 slope, rho, pval, upward)


@dataclass
class DeviationRow:
    n: int
    trials: int
    freq_above_lower: float
    wilson_above: tuple
    lower_vacuous: bool
    freq_below_upper: float
    wilson_below: tuple
    scaled_mean: float


def deviation_report(records, thresholds_by_n: dict) -> list[DeviationRow]:
    """Frequencies of the lower/upper deviation events per n."""
    rows = []
    for n in sorted(set(rec.n for rec in records)):
        sub = [rec for rec in records if rec.n == n]
        t = len(sub)
        n_above = sum(rec.above_lower for rec in sub)
        n_below = sum(rec.below_upper for rec in sub)
        thr = thresholds_by_n[n]
        rows.append(DeviationRow(
            n=n, trials=t,
            freq_above_lower=n_above / t, wilson_above=wilson_interval(n_above, t),
            lower_vacuous=thr.lower_vacuous,
            freq_below_upper=n_below / t, wilson_below=wilson_interval(n_below, t),
            scaled_mean=float(np.mean([rec.scaled_mst for rec in sub]))))
    return rows


@dataclass
class OneNodeReport:
    instances: int
    gated_instances: int
    pairs: int
    violations: int
    max_degree: int
    degree_bound: float
    degree_ok: bool


def one_node_difference_check(n: int, config: ExperimentConfig,
                              pairs_target: int = 1000,
                              removals_per_instance: int = 20) -> OneNodeReport:
    """Single-node stability of the spanning-forest weight.

    Samples n+1 nodes, then removes single nodes keeping the same adjacency
    radius, asserting |MST_{n+1} - MST(i)| <= xi_max * d_i * r^alpha on
    instances where the leave-one-out count window holds (which keeps both
    graphs connected). Also checks the degree bound
    d_i <= 200 * eps2 * n * r^2 on those instances.
    """
    density = config.density_spec()
    weights = config.weight_spec()
    r = config.radius_for_n(n + 1)
    plan = plan_tiling(n, r, config.a_param)
    bound_factor = weights.xi_max * r ** config.alpha
    degree_bound = 200.0 * config.density.eps2 * n * r * r

    instances = gated = pairs = violations = 0
    max_degree = 0
    instance_idx = 0
    while pairs < pairs_target:
        seed = np.random.SeedSequence(entropy=config.master_seed,
                                      spawn_key=(0x1E44A, instance_idx))
        instance_idx += 1
        instances += 1
        if instances > 50 * max(1, pairs_target // removals_per_instance) + 100:
            raise RuntimeError("count-window event too rare for this configuration")
        points = sample_binomial(n + 1, density, seed)
        rep = occupancy(points, plan, density)
        if not rep.e_dense_loo:
            continue
        gated += 1
        g = build_rgg(points, r, weights)
        m = minimum_spanning_forest(g)
        max_degree = max(max_degree, int(m.degrees.max()))
        rng = np.random.default_rng(np.random.SeedSequence(
            entropy=config.master_seed, spawn_key=(0x1E44B, instance_idx)))
        k = min(removals_per_instance, n + 1, pairs_target - pairs)
        for i in rng.choice(n + 1, size=k, replace=False).tolist():
            keep = np.ones(n + 1, dtype=bool)
            keep[i] = False
            sub_points = type(points)(points.xs[keep], points.ys[keep],
                                      process=points.process)
            sub_m = minimum_spanning_forest(build_rgg(sub_points, r, weights))
            diff = abs(m.total_weight - sub_m.total_weight)
            allowed = bound_factor * int(m.degrees[i])
            if diff > allowed * (1 + 1e-9) + 1e-12:
                violations += 1
            pairs += 1
    return OneNodeReport(instances, gated, pairs, violations,
                         max_degree, degree_bound, max_degree <= degree_bound)


@dataclass
class PoissonComparisonReport:
    n: int
    trials: int
    mean_binomial: float
    mean_poisson: float
    var_binomial: float
    var_poisson: float
    pooled_se: float
    mean_diff_sigmas: float
    ks_statistic: float
    ks_pvalue: float
    freq_count_equals_n: float
    stirling_value: float       # 1/sqrt(2 pi n)
    count_match_sigmas: float


def poissonization_comparison(config: ExperimentConfig) -> PoissonComparisonReport:
    """Matched binomial/poisson sweeps at the first configured n.

    Reports scaled-weight means/variances with the pooled standard error, the
    two-sample KS statistic, and the frequency of the Poisson total count
    hitting exactly n against its Stirling approximation 1/sqrt(2 pi n).
    """
    n = config.n_values[0]
    sub = config.replace(n_values=(n,))
    rec_b = run_sweep(sub, write=False, process="binomial").records
    rec_p = run_sweep(sub, write=False, process="poisson").records
    sb = np.array([rec.scaled_mst for rec in rec_b])
    sp = np.array([rec.scaled_mst for rec in rec_p])
    t = len(sb)
    pooled = math.sqrt(sb.var(ddof=1) / t + sp.var(ddof=1) / t)
    ks = _stats.ks_2samp(sb, sp)
    hits = sum(rec.n_points == n for rec in rec_p)
    stirling = 1.0 / math.sqrt(2.0 * math.pi * n)
    sigma = math.sqrt(stirling * (1 - stirling) / t)
    return PoissonComparisonReport(
        n=n, trials=t,
        mean_binomial=float(sb.mean()), mean_poisson=float(sp.mean()),
        var_binomial=float(sb.var(ddof=1)), var_poisson=float(sp.var(ddof=1)),
        pooled_se=pooled,
        mean_diff_sigmas=abs(float(sb.mean() - sp.mean())) / pooled,
        ks_statistic=float(ks.statistic), ks_pvalue=float(ks.pvalue),
        freq_count_equals_n=hits / t, stirling_value=stirling,
        count_match_sigmas=abs(hits / t - stirling) / sigma)


def thresholds_for(config: ExperimentConfig) -> dict:
    """Theorem thresholds per configured n, using each plan's realized A."""
    out = {}
    for n in config.n_values:
        plan = _cached_plan(n, config.radius_for_n(n), config.a_param)
        out[n] = _cached_thresholds(config, n, plan.A_eff)
    return out
