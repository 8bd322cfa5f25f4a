"""Nondominated Minkowski sums, generator sets, and bounding-set pruning."""

from .core import (
    DominanceOutcome,
    MSPInstance,
    StableSet,
    compare,
    dominates,
    set_leq,
    set_leqq,
    set_lt,
    shift,
    strictly_dominates,
    weakly_dominates,
)
from .ndfilter import (
    Provenance,
    compute_provenance,
    filter_nondominated,
    filter_nondominated_naive,
    minkowski_pair,
    nd_sum,
)
from .classify import (
    Classification,
    SearchDirection,
    classify_point,
    classify_set,
    extreme_points,
    minimizers,
)
from .generator import (
    Flag,
    GeneratorSet,
    MGSResult,
    SolverPath,
    candidate_sets,
    combinations_of,
    fixed_sets,
    is_redundant,
    minimum_generator_set,
    solve_mgs_ip,
    verify_generator,
)
from .bounding import (
    BoundingSet,
    PairScope,
    Side,
    bound_nd_sum,
    conditionally_dominated,
    exact_bound,
    lower_hull_bound,
    prune_with_bounds,
)
from .instgen import ConfigSpec, GenSpec, assemble_instance, generate_local_set
from .experiments import GridSpec, RunRecord, fit_growth, metric_q, metric_r, run_grid

__version__ = "0.1.0"
