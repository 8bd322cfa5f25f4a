"""Reproducible generation of local nondominated sets and whole instances.

Three sampling shapes inside the hypercube [0, hypercube_max]^p:

* ``L``: the part of a sphere centred at the far corner that faces the
  origin; the frontier bulges toward the origin, so almost every point is
  extreme.
* ``U``: the part of a sphere centred at the origin that faces away from it;
  concave toward the origin, so most points end up unsupported.
* ``M``: uniform in a diagonal slab (coordinate sum between two fractions of
  the hypercube edge); a mix of both kinds.

Candidates are rounded to integers and folded into a nondominated working set
one by one until the requested cardinality is hit exactly.  All randomness
flows from a named, seedable generator (PCG64), so identical seeds reproduce
identical sets on any platform.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import MSPInstance, StableSet, Vector, weakly_dominates
from .errors import GenerationCapError

METHODS = ("L", "M", "U")
CONFIGURATIONS = ("L", "M", "U", "LU")
DEFAULT_HYPERCUBE = 10_000
_BATCH = 128


@dataclass(frozen=True)
class GenSpec:
    """Parameters for one local set."""

    p: int
    cardinality: int
    method: str
    seed: int
    hypercube_max: int = DEFAULT_HYPERCUBE
    slab_lo: float = 0.9
    slab_hi: float = 1.1
    sample_cap: int = 0  # 0 means the default derived from the cardinality

    def __post_init__(self):
        if self.p < 2:
            raise ValueError("need at least two objectives")
        if self.cardinality < 1:
            raise ValueError("cardinality must be positive")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.hypercube_max < 1:
            raise ValueError("hypercube_max must be positive")

    def effective_cap(self) -> int:
        return self.sample_cap if self.sample_cap > 0 else max(20_000, 800 * self.cardinality)


@dataclass(frozen=True)
class ConfigSpec:
    """Parameters for a whole instance."""

    p: int
    S: int
    cardinality: int
    configuration: str
    seed: int
    hypercube_max: int = DEFAULT_HYPERCUBE

    def __post_init__(self):
        if self.configuration not in CONFIGURATIONS:
            raise ValueError(f"unknown configuration {self.configuration!r}")
        if self.S < 1:
            raise ValueError("need at least one local set")
        if self.p < 2:
            raise ValueError("need at least two objectives")
        if self.cardinality < 1:
            raise ValueError("cardinality must be positive")


@dataclass(frozen=True)
class GeneratedInstance:
    instance: MSPInstance
    config: ConfigSpec
    methods: tuple[str, ...]
    set_seeds: tuple[int, ...]


def _sample_batch(rng: np.random.Generator, spec: GenSpec) -> np.ndarray:
    R = spec.hypercube_max
    p = spec.p
    if spec.method in ("L", "U"):
        g = np.abs(rng.standard_normal((_BATCH, p)))
        norms = np.sqrt((g * g).sum(axis=1))
        ok = norms > 0
        d = g[ok] / norms[ok, None]
        return R - R * d if spec.method == "L" else R * d
    pts = rng.uniform(0.0, float(R), (_BATCH, p))
    sums = pts.sum(axis=1)
    keep = (sums >= spec.slab_lo * R) & (sums <= spec.slab_hi * R)
    return pts[keep]


def _insert_nondominated(current: list[Vector], pt: Vector) -> None:
    for c in current:
        if weakly_dominates(c, pt):
            return
    current[:] = [c for c in current if not weakly_dominates(pt, c)]
    current.append(pt)


def generate_local_set(spec: GenSpec) -> StableSet:
    """A stable set of exactly ``spec.cardinality`` integer points, deterministic in the seed."""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    cap = spec.effective_cap()
    current: list[Vector] = []
    drawn = 0
    while drawn < cap:
        batch = np.floor(_sample_batch(rng, spec) + 0.5).astype(np.int64)
        for row in batch:
            drawn += 1
            _insert_nondominated(current, tuple(int(c) for c in row))
            if len(current) == spec.cardinality:
                return StableSet(current, validate=False)
            if drawn >= cap:
                break
    raise GenerationCapError(
        "generation_sample_cap",
        cap,
        f"method {spec.method}, p={spec.p}, target {spec.cardinality}",
    )


def _methods_for(cfg: ConfigSpec, rng: np.random.Generator) -> tuple[str, ...]:
    if cfg.configuration != "LU":
        return (cfg.configuration,) * cfg.S
    n_first = cfg.S // 2
    if cfg.S % 2 == 1:
        extra_to_first = int(rng.integers(0, 2)) == 1
        if extra_to_first:
            n_first += 1
    return ("L",) * n_first + ("U",) * (cfg.S - n_first)


def assemble_instance(cfg: ConfigSpec) -> GeneratedInstance:
    """Draw the local sets with independent sub-seeds split off the instance seed."""
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    methods = _methods_for(cfg, rng)
    set_seeds = tuple(int(s) for s in rng.integers(0, 2**63, size=cfg.S))
    sets = [
        generate_local_set(
            GenSpec(cfg.p, cfg.cardinality, methods[s], set_seeds[s], cfg.hypercube_max)
        )
        for s in range(cfg.S)
    ]
    return GeneratedInstance(MSPInstance(sets), cfg, methods, set_seeds)
