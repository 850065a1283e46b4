"""Minimum spanning forests of random geometric graphs with
location-dependent edge weights: samplers, graph/forest construction,
tiling-based bounds machinery and Monte Carlo verification harness."""

__version__ = "0.1.0"

from ._kernels import HAVE_COMPILED
from .bounds import (BoundParams, BoundSet, a_n_sequence, bound_set, c1, c2,
                     geometric_moment, optimize_betas, theorem_thresholds)
from .config import ExperimentConfig, dump_config, load_config
from .mst import MstResult, brute_force_mst, minimum_spanning_forest, mst_degree_stats
from .rgg import Rgg, WeightSpec, build_rgg, is_connected, l2_scaling_term, radius_for
from .sampling import (DensitySpec, PointSet, sample_binomial, sample_coupled,
                       sample_homogeneous, sample_poisson)
from .tiling import (OccupancyReport, TilingPlan, build_tuni, gap_sum,
                     independence_families, lower_bound_count, occupancy,
                     plan_tiling, point_labels)

__all__ = [
    "HAVE_COMPILED", "__version__",
    "DensitySpec", "PointSet", "sample_binomial", "sample_poisson",
    "sample_homogeneous", "sample_coupled",
    "WeightSpec", "Rgg", "radius_for", "build_rgg", "is_connected",
    "l2_scaling_term",
    "MstResult", "minimum_spanning_forest", "brute_force_mst", "mst_degree_stats",
    "TilingPlan", "OccupancyReport", "plan_tiling", "occupancy", "point_labels",
    "independence_families", "gap_sum", "build_tuni", "lower_bound_count",
    "BoundParams", "BoundSet", "geometric_moment", "c1", "c2", "bound_set",
    "optimize_betas", "a_n_sequence", "theorem_thresholds",
    "ExperimentConfig", "load_config", "dump_config",
]
