"""Bounding sets around local nondominated sets and pruning of redundant vectors.

A bounding set pins a local set from below (every local point weakly dominated
by some bound point) or above (every bound point weakly dominated by some
local point).  Bounds are either finite stable sets, or, for two objectives,
the nondominated frontier of the convex hull of the extreme points, stored as
its vertex chain.

The pruning pass walks every ordered pair of local sets and removes a vector
once the pair's upper-bound sum strictly set-dominates the vector's translated
lower bound; each removal is certified redundant by construction.  All curve
comparisons reduce to integer cross products, never floating point.
"""

from __future__ import annotations

import enum
from bisect import bisect_right
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .classify import extreme_points
from .core import MSPInstance, StableSet, Vector, set_leqq, vec_add
from .errors import DimensionMismatchError
from .generator import Flag, GeneratorSet
from .ndfilter import filter_nondominated, minkowski_pair, nd_sum


class Side(enum.Enum):
    LOWER = "lower"
    UPPER = "upper"


class PairScope(enum.Enum):
    ALL_PAIRS = "all_pairs"


@dataclass(frozen=True)
class BoundingSet:
    """A finite stable set, or (p = 2) a convex frontier given by its vertices.

    With ``envelope`` set, ``points`` holds the chain vertices; canonical
    stable-set order already runs strictly right-down, which is exactly the
    chain invariant.  The bound then denotes the piecewise-linear curve
    between the first and last vertex.
    """

    side: Side
    points: StableSet
    envelope: bool = False

    def __post_init__(self):
        if self.points.is_empty():
            raise ValueError("a bounding set cannot be empty")
        if self.envelope and self.points.dim != 2:
            raise ValueError("envelope bounds exist only for two objectives")


def exact_bound(Y: StableSet, side: Side) -> BoundingSet:
    """The set itself as its own (tightest) finite bound."""
    return BoundingSet(side, Y, envelope=False)


def finite_bound(points: StableSet, side: Side) -> BoundingSet:
    return BoundingSet(side, points, envelope=False)


def lower_hull_bound(Y: StableSet) -> BoundingSet:
    """Convex-frontier lower bound of a bi-objective stable set.

    The vertices are the extreme supported points; every member of Y is
    weakly dominated by a point of the chain.
    """
    if Y.dim != 2:
        raise DimensionMismatchError("hull envelope bounds need exactly two objectives")
    return BoundingSet(Side.LOWER, extreme_points(Y), envelope=True)


def _curve_value_at_least(a: Vector, b: Vector, x: int, level: int) -> bool:
    """Whether the segment a->b satisfies y(x) >= level, by cross multiplication."""
    dx = b[0] - a[0]
    return (a[1] - level) * dx + (x - a[0]) * (b[1] - a[1]) >= 0


def _curve_y_leq(a: Vector, b: Vector, x: int, value: int) -> bool:
    """Whether y(x) <= value on segment a->b."""
    dx = b[0] - a[0]
    return a[1] * dx + (x - a[0]) * (b[1] - a[1]) <= value * dx


def envelope_leqq_points(vertices: StableSet, pts: Sequence[Vector]) -> bool:
    """Every point weakly dominated by some point of the chain curve."""
    v = vertices.points
    first, last = v[0], v[-1]
    for y in pts:
        if y[0] < first[0]:
            return False
        if y[0] >= last[0]:
            if last[1] > y[1]:
                return False
            continue
        idx = bisect_right([q[0] for q in v], y[0]) - 1
        a, b = v[idx], v[min(idx + 1, len(v) - 1)]
        if a[0] == y[0]:
            if a[1] > y[1]:
                return False
            continue
        if not _curve_y_leq(a, b, y[0], y[1]):
            return False
    return True


def bound_leqq(bound: BoundingSet, Y: StableSet) -> bool:
    """Validity of a lower bound: bound <= Y under weak set dominance."""
    if bound.envelope:
        return envelope_leqq_points(bound.points, Y.points)
    return set_leqq(bound.points, Y)


def upper_bound_valid(Y: StableSet, bound: BoundingSet) -> bool:
    """Validity of an upper bound: Y <= bound under weak set dominance."""
    if bound.envelope:
        raise ValueError("upper bounds must be finite point sets")
    return set_leqq(Y, bound.points)


def _point_strictly_dominated(u_pts: Sequence[Vector], u_xs: Sequence[int], r: Vector) -> bool:
    """Some u <= r with u != r; u_pts is a stable bi-objective set in order."""
    idx = bisect_right(u_xs, r[0]) - 1
    if idx < 0:
        return False
    u = u_pts[idx]
    return u[1] <= r[1] and u != r


def _finite_set_strictly_dominated(U: StableSet, pts, offset: Optional[Vector]) -> bool:
    """Every offset point properly dominated by some member of U (any dimension)."""
    u_arr = U.to_array()
    for pt in pts:
        r = vec_add(pt, offset) if offset is not None else tuple(pt)
        r_arr = np.asarray(r, dtype=np.int64)
        weak = (u_arr <= r_arr).all(axis=1)
        proper = weak & (u_arr != r_arr).any(axis=1)
        if not proper.any():
            return False
    return True


def _envelope_strictly_dominated(U: StableSet, vertices: StableSet, offset: Vector) -> bool:
    """Every point of the translated chain curve properly dominated by some u in U.

    Between two chain vertices the curve is a falling segment and the
    staircase of U is piecewise constant, so it is enough to check the curve
    at each step change against the level that held just before it.
    """
    if U.dim != 2:
        raise DimensionMismatchError("envelope comparisons need two objectives")
    u_pts = U.points
    u_xs = [u[0] for u in u_pts]
    verts = [vec_add(v, offset) for v in vertices.points]
    for v in verts:
        if not _point_strictly_dominated(u_pts, u_xs, v):
            return False
    for a, b in zip(verts, verts[1:]):
        start = bisect_right(u_xs, a[0]) - 1
        if start < 0:
            return False  # leftmost part of the segment has no dominator at all
        level = u_pts[start][1]
        k = start + 1
        while k < len(u_pts) and u_xs[k] <= b[0]:
            if not _curve_value_at_least(a, b, u_xs[k], level):
                return False
            level = u_pts[k][1]
            k += 1
        if not _curve_value_at_least(a, b, b[0], level):
            return False
    return True


def _to_envelope_vertices(bound: BoundingSet) -> StableSet:
    """Chain vertices of a lower bound; finite bounds are relaxed to their hull."""
    if bound.envelope:
        return bound.points
    if bound.points.dim != 2:
        raise DimensionMismatchError("only bi-objective bounds can become envelopes")
    return extreme_points(bound.points)


def _envelope_vertex_sum(chains: Sequence[StableSet]) -> StableSet:
    """Vertices of the frontier of a Minkowski sum of convex chains."""
    acc = chains[0]
    for nxt in chains[1:]:
        summed = minkowski_pair(acc, nxt)
        acc = extreme_points(summed)
    return acc


def bound_nd_sum(
    lowers: Sequence[BoundingSet], uppers: Sequence[BoundingSet]
) -> tuple[BoundingSet, StableSet]:
    """Bounds on the nondominated sum from one bound per local set per side.

    The upper side is always the finite nondominated sum of the upper bounds.
    The lower side stays finite when every lower bound is finite; as soon as
    one is an envelope, all are relaxed to their hulls and summed as chains
    (still a valid lower bound, merely weaker).
    """
    if len(lowers) != len(uppers):
        raise ValueError("need one lower and one upper bound per local set")
    for b in uppers:
        if b.envelope:
            raise ValueError("upper bounds must be finite point sets")
        if b.side is not Side.UPPER:
            raise ValueError("upper-side bound expected")
    for b in lowers:
        if b.side is not Side.LOWER:
            raise ValueError("lower-side bound expected")
    dims = {b.points.dim for b in lowers} | {b.points.dim for b in uppers}
    if len(dims) != 1:
        raise DimensionMismatchError("mixed dimensions across bounds")

    upper, _ = nd_sum(MSPInstance([b.points for b in uppers]))

    if all(not b.envelope for b in lowers):
        lower_pts, _ = nd_sum(MSPInstance([b.points for b in lowers]))
        return BoundingSet(Side.LOWER, lower_pts, envelope=False), upper

    chains = [_to_envelope_vertices(b) for b in lowers]
    return BoundingSet(Side.LOWER, _envelope_vertex_sum(chains), envelope=True), upper


def _right_side_strictly_dominated(
    left: StableSet, lower_rest: Sequence[BoundingSet], y_bar: Vector
) -> bool:
    """left < ND({y_bar} + sum of lower_rest) under the strict set relation."""
    if not lower_rest:
        return _finite_set_strictly_dominated(left, [tuple(y_bar)], None)
    if all(not b.envelope for b in lower_rest):
        if len(lower_rest) == 1:
            rest_pts = lower_rest[0].points
        else:
            rest_pts, _ = nd_sum(MSPInstance([b.points for b in lower_rest]))
        return _finite_set_strictly_dominated(left, rest_pts.points, tuple(y_bar))
    chains = [_to_envelope_vertices(b) for b in lower_rest]
    vertices = _envelope_vertex_sum(chains)
    return _envelope_strictly_dominated(left, vertices, tuple(y_bar))


def conditionally_dominated(
    y_bar: Vector,
    s_bar: int,
    uppers: Sequence[BoundingSet],
    lowers: Sequence[BoundingSet],
) -> bool:
    """Conditional-dominance test for one local vector against set bounds.

    True means every vector sum through ``y_bar`` is dominated, so the vector
    is redundant; false is inconclusive (the test is conservative).
    """
    for b in uppers:
        if b.envelope:
            raise ValueError("upper bounds must be finite point sets")
    upper_nd, _ = nd_sum(MSPInstance([b.points for b in uppers]))
    rest = [b for s, b in enumerate(lowers) if s != s_bar]
    return _right_side_strictly_dominated(upper_nd, rest, tuple(y_bar))


def prune_one_set(
    instance: MSPInstance,
    s_bar: int,
    lowers: Sequence[BoundingSet],
    uppers: Sequence[BoundingSet],
) -> list[Vector]:
    """Survivors of local set ``s_bar`` after pairwise conditional-dominance tests.

    Against every other set, a vector is dropped once the pair's upper-bound
    sum strictly dominates the vector's translated lower bound.  Tests never
    look at earlier removals, so the scan order cannot change the result.
    """
    current = list(instance.local_sets[s_bar].points)
    for s in range(instance.S):
        if s == s_bar:
            continue
        left = minkowski_pair(uppers[s_bar].points, uppers[s].points)
        current = [
            y_bar
            for y_bar in current
            if not _right_side_strictly_dominated(left, [lowers[s]], y_bar)
        ]
    return current


def prune_with_bounds(
    instance: MSPInstance,
    lowers: Sequence[BoundingSet],
    uppers: Sequence[BoundingSet],
    pair_scope: PairScope = PairScope.ALL_PAIRS,
) -> GeneratorSet:
    """Pairwise pruning of local vectors whose sums are provably dominated.

    Every removal is certified redundant by the conditional-dominance test, so
    the returned subsets always form a generator set.
    """
    if pair_scope is not PairScope.ALL_PAIRS:
        raise ValueError("only the all-pairs scope is implemented")
    S = instance.S
    if len(lowers) != S or len(uppers) != S:
        raise ValueError("need one bound per local set per side")
    kept = [prune_one_set(instance, s_bar, lowers, uppers) for s_bar in range(S)]
    flags = []
    for s_bar in range(S):
        kept_set = set(kept[s_bar])
        flags.append(
            tuple(
                Flag.CANDIDATE_ONLY if pt in kept_set else Flag.EXCLUDED
                for pt in instance.local_sets[s_bar].points
            )
        )
    chosen = tuple(StableSet(k, validate=False) for k in kept)
    return GeneratorSet(chosen, tuple(flags))
