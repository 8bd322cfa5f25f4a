"""Desk-scale experiment harness: grids of instances, growth fits, and reduction metrics.

Each grid cell generates one instance and records the nondominated-sum size,
extreme counts, minimum-generator-set sizes, and the sizes left by
bounding-set pruning.  Resource-cap failures are recorded per cell, never
fatal.  Wall times are measured but kept out of the deterministic record, so
identical grids always serialize identically.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import bounding, classify
from .bounding import BoundingSet, Side
from .core import MSPInstance, StableSet
from .errors import ResourceLimitError
from .generator import (
    DEFAULT_NODE_CAP,
    SolverPath,
    minimum_generator_set,
)
from .instgen import ConfigSpec, GeneratedInstance, assemble_instance
from .ndfilter import DEFAULT_BUFFER_LIMIT, DEFAULT_PROVENANCE_CAP, nd_sum

DEFAULT_CLASSIFY_CAP = 4000
SWEEP_PERCENTS = (0, 25, 50, 75, 100)


@dataclass(frozen=True)
class GridSpec:
    p_values: tuple[int, ...] = (2, 3)
    S_values: tuple[int, ...] = (2, 3, 4)
    n_values: tuple[int, ...] = (10, 20, 40)
    configurations: tuple[str, ...] = ("L", "M", "U", "LU")
    seeds: tuple[int, ...] = (1, 2, 3)
    hypercube_max: int = 10_000
    buffer_limit: int = DEFAULT_BUFFER_LIMIT
    provenance_cap: int = DEFAULT_PROVENANCE_CAP
    node_cap: int = DEFAULT_NODE_CAP
    classify_cap: int = DEFAULT_CLASSIFY_CAP
    lower_mode: str = "exact"
    prune_lambda: int = 100
    prune_gamma: int = 100

    def cells(self) -> list[ConfigSpec]:
        out = []
        for p in self.p_values:
            for S in self.S_values:
                for n in self.n_values:
                    for config in self.configurations:
                        for seed in self.seeds:
                            out.append(
                                ConfigSpec(p, S, n, config, seed, self.hypercube_max)
                            )
        return out


@dataclass(frozen=True)
class SetRecord:
    index: int
    method: str
    seed: int
    local_size: int
    extreme_count: Optional[int]
    mgs_size: Optional[int]
    pruned_size: Optional[int]


@dataclass(frozen=True)
class RunRecord:
    p: int
    S: int
    n: int
    config: str
    seed: int
    hypercube_max: int
    methods: tuple[str, ...]
    set_seeds: tuple[int, ...]
    yn_size: Optional[int]
    ynse_size: Optional[int]
    solver_path: Optional[str]
    unique: Optional[bool]
    sets: tuple[SetRecord, ...]
    error: Optional[str] = None
    timings: dict = field(default_factory=dict, compare=False)

    def spec(self) -> ConfigSpec:
        return ConfigSpec(self.p, self.S, self.n, self.config, self.seed, self.hypercube_max)


@dataclass(frozen=True)
class MetricValue:
    method: str
    value: float
    contributing: int


def _shuffled_upper_subset(
    ynse: StableSet,
    non_extreme: Sequence,
    pct: int,
    instance_seed: int,
    set_index: int,
) -> StableSet:
    """Extreme points plus a seeded nested prefix of the non-extreme ones.

    Prefixes of one fixed shuffle keep the subsets nested as the percentage
    rises, which makes pruning exactly monotone in the percentage.
    """
    if not 0 <= pct <= 100:
        raise ValueError("percentage outside [0, 100]")
    pts = list(ynse.points)
    if non_extreme and pct > 0:
        rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence([instance_seed, set_index, 9]))
        )
        order = rng.permutation(len(non_extreme))
        take = (len(non_extreme) * pct) // 100
        pts.extend(non_extreme[i] for i in order[:take])
    return StableSet(pts, validate=False)


def build_bounds_for_scan(
    instance: MSPInstance,
    classifications: Sequence[tuple[StableSet, StableSet, StableSet]],
    s_bar: int,
    lam: int,
    gam: int,
    lower_mode: str,
    subset_seed: int,
) -> tuple[list[BoundingSet], list[BoundingSet]]:
    """Bounds used while scanning local set ``s_bar`` for removable vectors."""
    lowers: list[BoundingSet] = []
    uppers: list[BoundingSet] = []
    for s, Y in enumerate(instance.local_sets):
        ynse = classifications[s][0]
        non_extreme = [pt for pt in Y.points if pt not in set(ynse.points)]
        pct = lam if s == s_bar else gam
        uppers.append(
            bounding.finite_bound(
                _shuffled_upper_subset(ynse, non_extreme, pct, subset_seed, s),
                Side.UPPER,
            )
        )
        if lower_mode == "exact":
            lowers.append(bounding.exact_bound(Y, Side.LOWER))
        elif lower_mode == "hull":
            lowers.append(bounding.BoundingSet(Side.LOWER, ynse, envelope=True))
        else:
            raise ValueError(f"unknown lower mode {lower_mode!r}")
    return lowers, uppers


def prune_sizes(
    gen: GeneratedInstance,
    classifications: Sequence[tuple[StableSet, StableSet, StableSet]],
    lam: int,
    gam: int,
    lower_mode: str,
) -> list[int]:
    """Per-set surviving cardinalities of the pairwise pruning pass.

    The upper bound of the set under scan keeps ``lam`` percent of its
    non-extreme vectors, the sets compared against keep ``gam`` percent, so
    the bounds differ per scanned set.
    """
    instance = gen.instance
    sizes = []
    for s_bar in range(instance.S):
        lowers, uppers = build_bounds_for_scan(
            instance, classifications, s_bar, lam, gam, lower_mode, gen.config.seed
        )
        sizes.append(len(bounding.prune_one_set(instance, s_bar, lowers, uppers)))
    return sizes


def run_cell(cfg: ConfigSpec, grid: GridSpec) -> RunRecord:
    timings: dict[str, float] = {}

    def clock(name: str, start: float) -> None:
        timings[name] = time.perf_counter() - start

    t0 = time.perf_counter()
    gen = assemble_instance(cfg)
    clock("generate", t0)
    instance = gen.instance

    base = dict(
        p=cfg.p,
        S=cfg.S,
        n=cfg.cardinality,
        config=cfg.configuration,
        seed=cfg.seed,
        hypercube_max=cfg.hypercube_max,
        methods=gen.methods,
        set_seeds=gen.set_seeds,
    )

    try:
        t0 = time.perf_counter()
        nd, _ = nd_sum(instance, grid.buffer_limit)
        clock("nd_sum", t0)

        t0 = time.perf_counter()
        classifications = [classify.classify_set(Y) for Y in instance.local_sets]
        clock("classify_locals", t0)

        t0 = time.perf_counter()
        if cfg.p == 2:
            ynse_size = len(classify.extreme_points(nd))
        else:
            reduced, _ = nd_sum(
                MSPInstance([c[0] for c in classifications]), grid.buffer_limit
            )
            if len(reduced) > grid.classify_cap:
                raise ResourceLimitError("classify_cap", grid.classify_cap)
            ynse_size = len(classify.extreme_points(reduced))
        clock("classify_sum", t0)

        t0 = time.perf_counter()
        mgs = minimum_generator_set(
            instance,
            buffer_limit=grid.buffer_limit,
            provenance_cap=grid.provenance_cap,
            node_cap=grid.node_cap,
        )
        clock("mgs", t0)

        t0 = time.perf_counter()
        pruned = prune_sizes(
            gen, classifications, grid.prune_lambda, grid.prune_gamma, grid.lower_mode
        )
        clock("prune", t0)
    except ResourceLimitError as exc:
        sets = tuple(
            SetRecord(s, gen.methods[s], gen.set_seeds[s], len(Y), None, None, None)
            for s, Y in enumerate(instance.local_sets)
        )
        return RunRecord(
            **base,
            yn_size=None,
            ynse_size=None,
            solver_path=None,
            unique=None,
            sets=sets,
            error=exc.cap_name,
            timings=timings,
        )

    sets = tuple(
        SetRecord(
            index=s,
            method=gen.methods[s],
            seed=gen.set_seeds[s],
            local_size=len(instance.local_sets[s]),
            extreme_count=len(classifications[s][0]),
            mgs_size=len(mgs.generator.chosen[s]),
            pruned_size=pruned[s],
        )
        for s in range(instance.S)
    )
    return RunRecord(
        **base,
        yn_size=len(nd),
        ynse_size=ynse_size,
        solver_path=mgs.solver_path.value,
        unique=mgs.unique,
        sets=sets,
        error=None,
        timings=timings,
    )


def run_grid(grid: GridSpec) -> list[RunRecord]:
    """One record per (cell, seed), in deterministic cell order."""
    return [run_cell(cfg, grid) for cfg in grid.cells()]


@dataclass(frozen=True)
class GrowthFit:
    c1: float
    c2: float
    c3: float
    r_squared: float
    cells: int


def fit_growth(records: Sequence[RunRecord]) -> GrowthFit:
    """Least squares of log size = log c1 + c2 p log n + c3 p log S."""
    complete = [r for r in records if r.error is None and r.yn_size]
    cells = {(r.n, r.S, r.p) for r in complete}
    if len(cells) < 8:
        raise ValueError(f"need at least 8 distinct (n, S, p) cells, got {len(cells)}")
    X = np.array(
        [[1.0, r.p * np.log(r.n), r.p * np.log(r.S)] for r in complete], dtype=float
    )
    if np.linalg.matrix_rank(X) < 3:
        raise ValueError("degenerate design matrix: the grid does not vary enough")
    y = np.log(np.array([r.yn_size for r in complete], dtype=float))
    theta, *_ = np.linalg.lstsq(X, y, rcond=None)
    pred = X @ theta
    ss_res = float(((y - pred) ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return GrowthFit(
        c1=float(np.exp(theta[0])),
        c2=float(theta[1]),
        c3=float(theta[2]),
        r_squared=r2,
        cells=len(cells),
    )


def metric_r(records: Sequence[RunRecord]) -> dict[str, MetricValue]:
    """Mean relative minimum-generator cardinality (percent) pooled per method."""
    pools: dict[str, list[float]] = {}
    for rec in records:
        if rec.error is not None:
            continue
        for sr in rec.sets:
            if sr.mgs_size is None:
                continue
            pools.setdefault(sr.method, []).append(100.0 * sr.mgs_size / sr.local_size)
    return {
        m: MetricValue(m, sum(vals) / len(vals), len(vals)) for m, vals in pools.items()
    }


def metric_q(
    records: Sequence[RunRecord],
    lam: int,
    gam: int,
    lower_mode: str,
) -> dict[str, MetricValue]:
    """Share of redundant vectors that pruning finds (percent), pooled per method.

    Sets whose minimum generator needs the whole local set are excluded; when
    every set of a method is excluded, the method has no entry at all rather
    than a zero.
    """
    pools: dict[str, list[float]] = {}
    for rec in records:
        if rec.error is not None:
            continue
        gen = assemble_instance(rec.spec())
        classifications = [classify.classify_set(Y) for Y in gen.instance.local_sets]
        pruned = prune_sizes(gen, classifications, lam, gam, lower_mode)
        for sr, ghat in zip(rec.sets, pruned):
            if sr.mgs_size is None or sr.local_size == sr.mgs_size:
                continue
            found = 100.0 * (sr.local_size - ghat) / (sr.local_size - sr.mgs_size)
            pools.setdefault(sr.method, []).append(found)
    return {
        m: MetricValue(m, sum(vals) / len(vals), len(vals)) for m, vals in pools.items()
    }
