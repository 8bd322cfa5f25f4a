"""Partition a stable set into extreme supported, supported non-extreme, and unsupported points.

Two exact routes produce the same answer:

* ``classify_point`` solves the defining linear programs directly: a point is
  supported iff no convex combination of the set weakly dominates it with a
  smaller coordinate sum, and a supported point is extreme iff the convex
  combinations of the *other* points cannot weakly dominate it at all.
* for p = 2, ``classify_set`` walks the lower-left convex chain with integer
  cross products; for p >= 3 it runs the same LPs per point, generating
  columns on demand so the exact tableau stays small.

Everything is exact; there are no tolerances anywhere.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Optional, Sequence

from . import exactlp
from .core import StableSet, Vector
from .exactlp import Constraint, LinearProgram, Relation, Status

_DIRECT_COLUMN_LIMIT = 140


class Classification(enum.Enum):
    EXTREME_SUPPORTED = "extreme_supported"
    SUPPORTED_NON_EXTREME = "supported_non_extreme"
    UNSUPPORTED = "unsupported"


@dataclass(frozen=True)
class SearchDirection:
    """A strictly positive weight vector for weighted-sum scalarization."""

    weights: tuple[Fraction, ...]

    def __init__(self, weights: Sequence):
        ws = tuple(exactlp.frac(w) for w in weights)
        if not ws:
            raise ValueError("empty search direction")
        if any(w <= 0 for w in ws):
            raise ValueError("search direction must be strictly positive")
        object.__setattr__(self, "weights", ws)


def _require_multiobjective(Y: StableSet) -> None:
    if Y.dim < 2:
        raise ValueError("classification needs at least two objectives")


def minimizers(Y: StableSet, direction: SearchDirection) -> StableSet:
    """All points of Y minimizing the weighted coordinate sum; exact rational ties."""
    _require_multiobjective(Y)
    if len(direction.weights) != Y.dim:
        raise ValueError("direction length differs from set dimension")
    w = direction.weights
    best: Optional[Fraction] = None
    argmin: list[Vector] = []
    for pt in Y:
        val = sum((wk * c for wk, c in zip(w, pt)), Fraction(0))
        if best is None or val < best:
            best = val
            argmin = [pt]
        elif val == best:
            argmin.append(pt)
    return StableSet(argmin, validate=False)


def _coordinate_sum(y: Vector) -> int:
    return sum(y)


def _supported_lp(y: Vector, columns: Sequence[Vector]) -> LinearProgram:
    """min sum-of-coordinates of a convex combination pinned under y."""
    p = len(y)
    objective = [_coordinate_sum(pt) for pt in columns]
    cons = [
        Constraint([pt[k] for pt in columns], Relation.LE, y[k]) for k in range(p)
    ]
    cons.append(Constraint([1] * len(columns), Relation.EQ, 1))
    return LinearProgram(objective, cons)


def _exclusion_lp(y: Vector, columns: Sequence[Vector]) -> LinearProgram:
    """Feasibility of a convex combination of ``columns`` weakly dominating y.

    Encoded as min sum(u) with slack u soaking the violation; feasible iff the
    optimum is zero.
    """
    p = len(y)
    n = len(columns)
    objective = [0] * n + [1] * p
    cons = []
    for k in range(p):
        coeffs = [pt[k] for pt in columns] + [0] * p
        coeffs[n + k] = -1
        cons.append(Constraint(coeffs, Relation.LE, y[k]))
    cons.append(Constraint([1] * n + [0] * p, Relation.EQ, 1))
    return LinearProgram(objective, cons)


def _int_duals(duals: Sequence[Fraction]) -> tuple[list[int], int]:
    denom = 1
    for d in duals:
        denom = lcm(denom, d.denominator)
    return [int(d * denom) for d in duals], denom


def _supported_exact(y: Vector, pts: Sequence[Vector]) -> bool:
    """Supported test by column generation over the full point list."""
    p = len(y)
    target = _coordinate_sum(y)
    y_idx = pts.index(y)
    working = _seed_columns(len(pts), y_idx)
    in_working = set(working)
    while True:
        cols = [pts[i] for i in working]
        sol = exactlp.solve(_supported_lp(y, cols))
        assert sol.status is Status.OPTIMAL and sol.duals is not None
        nums, denom = _int_duals(sol.duals)
        mu, nu = nums[:p], nums[p]
        best_rc = 0
        best_i = -1
        for i, pt in enumerate(pts):
            if i in in_working:
                continue
            rc = _coordinate_sum(pt) * denom - sum(m * c for m, c in zip(mu, pt)) - nu
            if rc < best_rc:
                best_rc = rc
                best_i = i
        if best_i < 0:
            return sol.value == target
        working.append(best_i)
        in_working.add(best_i)


def _exclusion_feasible_exact(y: Vector, pts: Sequence[Vector]) -> bool:
    """Column-generation version of the exclusion feasibility system."""
    if not pts:
        return False
    p = len(y)
    working = list(range(min(len(pts), 2 * (p + 1))))
    in_working = set(working)
    while True:
        cols = [pts[i] for i in working]
        sol = exactlp.solve(_exclusion_lp(y, cols))
        assert sol.status is Status.OPTIMAL and sol.duals is not None
        if sol.value == 0:
            return True
        nums, denom = _int_duals(sol.duals)
        mu, nu = nums[:p], nums[p]
        best_rc = 0
        best_i = -1
        for i, pt in enumerate(pts):
            if i in in_working:
                continue
            rc = -(sum(m * c for m, c in zip(mu, pt)) + nu)
            if rc < best_rc:
                best_rc = rc
                best_i = i
        if best_i < 0:
            return sol.value == 0
        working.append(best_i)
        in_working.add(best_i)


def _seed_columns(n: int, center: int) -> list[int]:
    lo = max(0, center - 4)
    hi = min(n, center + 5)
    return list(range(lo, hi))


def is_supported(y: Vector, Y: StableSet) -> bool:
    y = tuple(y)
    _require_multiobjective(Y)
    if y not in Y:
        raise ValueError(f"{y} is not a member of the set")
    if len(Y) > _DIRECT_COLUMN_LIMIT:
        return _supported_exact(y, list(Y.points))
    sol = exactlp.solve(_supported_lp(y, Y.points))
    assert sol.status is Status.OPTIMAL
    return sol.value == _coordinate_sum(y)


def is_extreme(y: Vector, Y: StableSet) -> bool:
    """Whether no convex combination of the other points weakly dominates y.

    For a nondominated y this is exactly extreme supportedness: an unsupported
    point is weakly dominated by the convex envelope of the others, and a
    supported non-extreme point is a combination of its neighbours.
    """
    y = tuple(y)
    _require_multiobjective(Y)
    if y not in Y:
        raise ValueError(f"{y} is not a member of the set")
    others = [pt for pt in Y.points if pt != y]
    if not others:
        return True
    if len(others) > _DIRECT_COLUMN_LIMIT:
        return not _exclusion_feasible_exact(y, others)
    sol = exactlp.solve(_exclusion_lp(y, others))
    assert sol.status is Status.OPTIMAL
    return sol.value != 0


def classify_point(y: Vector, Y: StableSet) -> Classification:
    """Classify one member of a stable set per the supported/extreme definitions."""
    y = tuple(y)
    _require_multiobjective(Y)
    if y not in Y:
        raise ValueError(f"{y} is not a member of the set")
    if not is_supported(y, Y):
        return Classification.UNSUPPORTED
    if is_extreme(y, Y):
        return Classification.EXTREME_SUPPORTED
    return Classification.SUPPORTED_NON_EXTREME


def classify_set(Y: StableSet) -> tuple[StableSet, StableSet, StableSet]:
    """Partition Y into (extreme supported, supported non-extreme, unsupported)."""
    _require_multiobjective(Y)
    if Y.dim == 2:
        labels = _classify_chain_2d(Y.points)
    else:
        labels = [classify_point(pt, Y) for pt in Y.points]
    buckets: dict[Classification, list[Vector]] = {c: [] for c in Classification}
    for pt, lab in zip(Y.points, labels):
        buckets[lab].append(pt)
    return (
        StableSet(buckets[Classification.EXTREME_SUPPORTED], validate=False),
        StableSet(buckets[Classification.SUPPORTED_NON_EXTREME], validate=False),
        StableSet(buckets[Classification.UNSUPPORTED], validate=False),
    )


def extreme_points(Y: StableSet) -> StableSet:
    """The extreme supported subset, using the cheapest exact route available."""
    _require_multiobjective(Y)
    if Y.dim == 2:
        labels = _classify_chain_2d(Y.points)
        keep = [
            pt
            for pt, lab in zip(Y.points, labels)
            if lab is Classification.EXTREME_SUPPORTED
        ]
        return StableSet(keep, validate=False)
    return StableSet([pt for pt in Y.points if is_extreme(pt, Y)], validate=False)


def _cross(o: Vector, a: Vector, b: Vector) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _classify_chain_2d(pts: Sequence[Vector]) -> list[Classification]:
    """Integer convex-chain classification for p = 2.

    Canonical order of a stable bi-objective set runs left to right with
    strictly falling second coordinate; the supported points are exactly those
    on the lower-left convex chain, and the chain's corners are the extreme
    ones.
    """
    n = len(pts)
    if n == 0:
        return []
    if n <= 2:
        return [Classification.EXTREME_SUPPORTED] * n
    stack: list[Vector] = [pts[0]]
    for pt in pts[1:]:
        while len(stack) >= 2 and _cross(stack[-2], stack[-1], pt) <= 0:
            stack.pop()
        stack.append(pt)
    vertices = set(stack)
    labels: list[Classification] = []
    vi = 0
    for pt in pts:
        if pt in vertices:
            labels.append(Classification.EXTREME_SUPPORTED)
            continue
        while vi + 1 < len(stack) and stack[vi + 1][0] < pt[0]:
            vi += 1
        a, b = stack[vi], stack[vi + 1]
        if _cross(a, pt, b) == 0:
            labels.append(Classification.SUPPORTED_NON_EXTREME)
        else:
            labels.append(Classification.UNSUPPORTED)
    return labels
