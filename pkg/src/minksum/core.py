"""Objective vectors, dominance relations, stable sets, and the problem instance model.

Conventions used throughout the package:

* an objective vector is a plain tuple of Python ints (minimization in every
  coordinate);
* a :class:`StableSet` stores its points in lexicographic ascending order, so
  equal contents always serialize identically;
* all arithmetic is exact; coordinates must fit in signed 64 bits and any
  addition that could leave that range raises :class:`CoordinateOverflowError`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import CoordinateOverflowError, DimensionMismatchError

INT64_MAX = 2**63 - 1
INT64_MIN = -(2**63)

Vector = tuple[int, ...]


class DominanceOutcome(enum.Enum):
    """Relation of an ordered vector pair (a, b), strongest applicable label.

    ``WEAKLY_DOMINATES_ONLY`` is part of the contract for completeness: for
    exact integer vectors, componentwise <= together with a != b already
    implies dominance, so the label is unreachable here.
    """

    EQUAL = "equal"
    STRICTLY_DOMINATES = "strictly_dominates"
    DOMINATES = "dominates"
    WEAKLY_DOMINATES_ONLY = "weakly_dominates_only"
    INCOMPARABLE = "incomparable"


def _check_same_dim(a: Sequence[int], b: Sequence[int]) -> None:
    if len(a) != len(b):
        raise DimensionMismatchError(f"dimension mismatch: {len(a)} vs {len(b)}")


def weakly_dominates(a: Vector, b: Vector) -> bool:
    """a <= b in every coordinate."""
    _check_same_dim(a, b)
    return all(x <= y for x, y in zip(a, b))


def dominates(a: Vector, b: Vector) -> bool:
    """a weakly dominates b and a != b."""
    _check_same_dim(a, b)
    return a != b and all(x <= y for x, y in zip(a, b))


def strictly_dominates(a: Vector, b: Vector) -> bool:
    """a < b in every coordinate."""
    _check_same_dim(a, b)
    return all(x < y for x, y in zip(a, b))


def compare(a: Vector, b: Vector) -> DominanceOutcome:
    """Classify the ordered pair (a, b) into exactly one dominance outcome."""
    _check_same_dim(a, b)
    if a == b:
        return DominanceOutcome.EQUAL
    if all(x < y for x, y in zip(a, b)):
        return DominanceOutcome.STRICTLY_DOMINATES
    if all(x <= y for x, y in zip(a, b)):
        return DominanceOutcome.DOMINATES
    return DominanceOutcome.INCOMPARABLE


def check_coordinate_range(points: Iterable[Vector]) -> None:
    """Raise if any coordinate leaves the signed 64-bit range."""
    for pt in points:
        for c in pt:
            if not (INT64_MIN <= c <= INT64_MAX):
                raise CoordinateOverflowError(f"coordinate {c} outside signed 64-bit range")


def vec_add(a: Vector, b: Vector) -> Vector:
    """Checked componentwise addition."""
    _check_same_dim(a, b)
    out = tuple(x + y for x, y in zip(a, b))
    for c in out:
        if not (INT64_MIN <= c <= INT64_MAX):
            raise CoordinateOverflowError(f"sum coordinate {c} outside signed 64-bit range")
    return out


@dataclass(frozen=True)
class StableSet:
    """A finite, mutually nondominating set of integer vectors in canonical order.

    Construction validates the invariants (no duplicates, pairwise
    nondominating, one common dimension, 64-bit coordinates) unless
    ``validate=False`` is passed by internal code that guarantees them.
    """

    points: tuple[Vector, ...]

    def __init__(self, points: Iterable[Vector], validate: bool = True):
        pts = sorted(tuple(int(c) for c in p) for p in points)
        object.__setattr__(self, "points", tuple(pts))
        if validate:
            self._validate()

    def _validate(self) -> None:
        pts = self.points
        if not pts:
            return
        dim = len(pts[0])
        if dim < 1:
            raise ValueError("vectors must have at least one coordinate")
        check_coordinate_range(pts)
        for i in range(1, len(pts)):
            if len(pts[i]) != dim:
                raise DimensionMismatchError("mixed dimensions inside a stable set")
            if pts[i] == pts[i - 1]:
                raise ValueError(f"duplicate point {pts[i]}")
        # After lexicographic sorting a dominator always precedes the point it
        # dominates, so one direction suffices.
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if weakly_dominates(pts[i], pts[j]):
                    raise ValueError(f"{pts[i]} dominates {pts[j]}: set is not stable")

    @property
    def dim(self) -> int:
        if not self.points:
            raise ValueError("empty set has no dimension")
        return len(self.points[0])

    def is_empty(self) -> bool:
        return not self.points

    def to_array(self) -> np.ndarray:
        """Points as an (n, p) int64 array in canonical order."""
        return np.asarray(self.points, dtype=np.int64).reshape(len(self.points), -1)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, item) -> bool:
        return tuple(item) in set(self.points)

    def index(self, point: Vector) -> int:
        return self.points.index(tuple(point))


def set_leqq(A: StableSet, B: StableSet) -> bool:
    """Every b in B is weakly dominated by some a in A."""
    if A.is_empty() or B.is_empty():
        raise ValueError("set relations need nonempty operands")
    if A.dim != B.dim:
        raise DimensionMismatchError(f"dimension mismatch: {A.dim} vs {B.dim}")
    a_arr = A.to_array()
    for b in B.to_array():
        if not (a_arr <= b).all(axis=1).any():
            return False
    return True


def set_leq(A: StableSet, B: StableSet) -> bool:
    """set_leqq(A, B) and A != B."""
    return A.points != B.points and set_leqq(A, B)


def set_lt(A: StableSet, B: StableSet) -> bool:
    """Every b in B is dominated (not merely equalled) by some a in A."""
    if A.is_empty() or B.is_empty():
        raise ValueError("set relations need nonempty operands")
    if A.dim != B.dim:
        raise DimensionMismatchError(f"dimension mismatch: {A.dim} vs {B.dim}")
    a_arr = A.to_array()
    for b in B.to_array():
        weak = (a_arr <= b).all(axis=1)
        proper = weak & (a_arr != b).any(axis=1)
        if not proper.any():
            return False
    return True


def shift(A: StableSet, z: Vector) -> StableSet:
    """Translate every point of A by z; stability is preserved."""
    if A.is_empty():
        return A
    z = tuple(int(c) for c in z)
    if len(z) != A.dim:
        raise DimensionMismatchError(f"dimension mismatch: {A.dim} vs {len(z)}")
    return StableSet([vec_add(p, z) for p in A], validate=False)


@dataclass(frozen=True)
class MSPInstance:
    """A Minkowski-sum problem: S nonempty stable local sets in Z^p."""

    p: int
    local_sets: tuple[StableSet, ...]

    def __init__(self, local_sets: Sequence[StableSet]):
        sets = tuple(local_sets)
        if not sets:
            raise ValueError("an instance needs at least one local set")
        for Y in sets:
            if Y.is_empty():
                raise ValueError("local sets must be nonempty")
        p = sets[0].dim
        for Y in sets:
            if Y.dim != p:
                raise DimensionMismatchError("local sets have mixed dimensions")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "local_sets", sets)

    @property
    def S(self) -> int:
        return len(self.local_sets)

    def product_size(self) -> int:
        return reduce(lambda acc, Y: acc * len(Y), self.local_sets, 1)

    def check_addition_safe(self) -> None:
        """Verify that no sum of one point per local set can overflow int64."""
        lo = [0] * self.p
        hi = [0] * self.p
        for Y in self.local_sets:
            arr = Y.to_array()
            mins = arr.min(axis=0)
            maxs = arr.max(axis=0)
            for k in range(self.p):
                lo[k] += int(mins[k])
                hi[k] += int(maxs[k])
        for k in range(self.p):
            if lo[k] < INT64_MIN or hi[k] > INT64_MAX:
                raise CoordinateOverflowError(
                    f"sums along coordinate {k} can leave the signed 64-bit range"
                )
