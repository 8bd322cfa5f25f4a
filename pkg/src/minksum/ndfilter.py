"""Nondominance filtering and buffered construction of nondominated Minkowski sums.

Two filter implementations sit behind one contract: a naive pairwise filter
(the oracle) and a divide-and-conquer filter used everywhere speed matters.
Both return the same canonical :class:`~minksum.core.StableSet` bit for bit.

``nd_sum`` folds the local sets pairwise and filters its working buffer
whenever it grows past ``buffer_limit``, so the full Minkowski sum is never
materialized.  Combination provenance is recovered by a targeted second pass
over the index product, restricted to sums that land in the result.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .core import MSPInstance, StableSet, Vector
from .errors import ResourceLimitError

DEFAULT_BUFFER_LIMIT = 2**20
DEFAULT_PROVENANCE_CAP = 10**7

# Index combination: one point index per local set.
Combination = tuple[int, ...]


@dataclass(frozen=True)
class Provenance:
    """All index combinations producing each vector of a nondominated sum."""

    combinations: dict[Vector, tuple[Combination, ...]]

    def of(self, y: Vector) -> tuple[Combination, ...]:
        return self.combinations[tuple(y)]

    def __contains__(self, y) -> bool:
        return tuple(y) in self.combinations

    def total_combinations(self) -> int:
        return sum(len(v) for v in self.combinations.values())


def _unique_lex_sorted(arr: np.ndarray) -> np.ndarray:
    """Deduplicate rows and sort them lexicographically."""
    if arr.shape[0] == 0:
        return arr
    return np.unique(arr, axis=0)


def _naive_keep_mask(arr: np.ndarray) -> np.ndarray:
    """Pairwise dominance scan over deduplicated rows."""
    n = arr.shape[0]
    keep = np.ones(n, dtype=bool)
    for i in range(n):
        weak = (arr <= arr[i]).all(axis=1)
        weak[i] = False
        if weak.any():
            keep[i] = False
    return keep


def _dominated_by_reference(block: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """Mask of rows in ``block`` weakly dominated by some row of ``ref``.

    ``block`` and ``ref`` are disjoint by construction (lex-split halves), so
    weak dominance is proper dominance here.
    """
    out = np.zeros(block.shape[0], dtype=bool)
    # Chunk both sides to bound the broadcast product.
    row_chunk = max(1, 2**22 // max(1, ref.shape[0] * block.shape[1]))
    for start in range(0, block.shape[0], row_chunk):
        sub = block[start : start + row_chunk]
        dominated = (ref[None, :, :] <= sub[:, None, :]).all(axis=2).any(axis=1)
        out[start : start + row_chunk] = dominated
    return out


def _filter_sorted_2d(arr: np.ndarray) -> np.ndarray:
    """Sweep for p = 2: x ascends, a point survives iff its y undercuts the best so far."""
    ys = arr[:, 1]
    best = np.minimum.accumulate(ys)
    keep = np.empty(arr.shape[0], dtype=bool)
    keep[0] = True
    keep[1:] = ys[1:] < best[:-1]
    return arr[keep]


_BASE_CASE = 128


def _filter_sorted(arr: np.ndarray) -> np.ndarray:
    """Filter lex-sorted deduplicated rows by divide and conquer.

    A later row can never dominate an earlier one in lexicographic order, so
    after filtering both halves it suffices to delete the right-half rows that
    some surviving left-half row dominates.
    """
    n = arr.shape[0]
    if n <= 1:
        return arr
    if arr.shape[1] == 2:
        return _filter_sorted_2d(arr)
    if n <= _BASE_CASE:
        return arr[_naive_keep_mask(arr)]
    mid = n // 2
    left = _filter_sorted(arr[:mid])
    right = _filter_sorted(arr[mid:])
    dominated = _dominated_by_reference(right, left)
    return np.concatenate([left, right[~dominated]])


def _array_to_stable(arr: np.ndarray) -> StableSet:
    return StableSet([tuple(int(c) for c in row) for row in arr], validate=False)


def _points_to_array(points: Iterable[Vector]) -> np.ndarray:
    pts = list(points)
    if not pts:
        return np.empty((0, 0), dtype=np.int64)
    return np.asarray(pts, dtype=np.int64)


def filter_nondominated(points: Iterable[Vector]) -> StableSet:
    """Nondominated subset of a point multiset, duplicates collapsed."""
    arr = _points_to_array(points)
    if arr.shape[0] == 0:
        return StableSet([], validate=False)
    return _array_to_stable(_filter_sorted(_unique_lex_sorted(arr)))


def filter_nondominated_naive(points: Iterable[Vector]) -> StableSet:
    """Reference O(n^2) pairwise filter; the oracle the fast path is tested against."""
    arr = _points_to_array(points)
    if arr.shape[0] == 0:
        return StableSet([], validate=False)
    arr = _unique_lex_sorted(arr)
    return _array_to_stable(arr[_naive_keep_mask(arr)])


def _pairwise_sums(a: np.ndarray, b: np.ndarray) -> Iterable[np.ndarray]:
    """Yield blocks of all row sums a_i + b_j."""
    p = a.shape[1]
    row_chunk = max(1, 2**20 // max(1, b.shape[0]))
    for start in range(0, a.shape[0], row_chunk):
        sub = a[start : start + row_chunk]
        yield (sub[:, None, :] + b[None, :, :]).reshape(-1, p)


def _fold_pair(acc: np.ndarray, nxt: np.ndarray, buffer_limit: int) -> np.ndarray:
    """ND(acc + nxt) with intermediate filtering once the buffer overflows."""
    blocks: list[np.ndarray] = []
    held = 0
    base: list[np.ndarray] = []
    for block in _pairwise_sums(acc, nxt):
        blocks.append(block)
        held += block.shape[0]
        if held > buffer_limit:
            merged = np.concatenate(base + blocks)
            merged = _filter_sorted(_unique_lex_sorted(merged))
            base = [merged]
            blocks = []
            held = merged.shape[0]
    merged = np.concatenate(base + blocks)
    return _filter_sorted(_unique_lex_sorted(merged))


def minkowski_pair(A: StableSet, B: StableSet) -> StableSet:
    """ND(A + B) for two stable sets."""
    inst = MSPInstance([A, B])
    inst.check_addition_safe()
    return _array_to_stable(_fold_pair(A.to_array(), B.to_array(), DEFAULT_BUFFER_LIMIT))


def nd_sum(
    instance: MSPInstance,
    buffer_limit: int = DEFAULT_BUFFER_LIMIT,
    want_provenance: bool = False,
    provenance_cap: int = DEFAULT_PROVENANCE_CAP,
) -> tuple[StableSet, Optional[Provenance]]:
    """Nondominated sum of the instance's local sets.

    The fold is sequential in the given set order; the result is independent
    of both the order and ``buffer_limit``.  With ``want_provenance`` the full
    combination list of every surviving vector is reconstructed afterwards,
    subject to ``provenance_cap`` on the number of stored combinations.
    """
    max_local = max(len(Y) for Y in instance.local_sets)
    if buffer_limit < max_local:
        raise ValueError(
            f"buffer_limit {buffer_limit} below largest local set size {max_local}"
        )
    instance.check_addition_safe()
    acc = _filter_sorted(_unique_lex_sorted(instance.local_sets[0].to_array()))
    for Y in instance.local_sets[1:]:
        acc = _fold_pair(acc, Y.to_array(), buffer_limit)
    result = _array_to_stable(acc)
    if not want_provenance:
        return result, None
    return result, compute_provenance(instance, result, provenance_cap)


def compute_provenance(
    instance: MSPInstance,
    nd: StableSet,
    provenance_cap: int = DEFAULT_PROVENANCE_CAP,
) -> Provenance:
    """Enumerate C(y) for every y in the nondominated sum.

    Per-target depth-first search over the local sets; a partial choice is
    abandoned as soon as the residual leaves the componentwise [min, max]
    envelope of what the remaining sets can still contribute.
    """
    S = instance.S
    p = instance.p
    sets_pts = [Y.points for Y in instance.local_sets]
    # Componentwise bounds of the achievable remainder for sets s..S-1.
    suffix_min = [[0] * p for _ in range(S + 1)]
    suffix_max = [[0] * p for _ in range(S + 1)]
    for s in range(S - 1, -1, -1):
        arr = instance.local_sets[s].to_array()
        mn = arr.min(axis=0)
        mx = arr.max(axis=0)
        for k in range(p):
            suffix_min[s][k] = int(mn[k]) + suffix_min[s + 1][k]
            suffix_max[s][k] = int(mx[k]) + suffix_max[s + 1][k]
    last_index = {pt: i for i, pt in enumerate(sets_pts[-1])}

    stored = 0
    combos: dict[Vector, tuple[Combination, ...]] = {}

    def search(s: int, residual: Vector, prefix: list[int], out: list[Combination]) -> None:
        nonlocal stored
        if s == S - 1:
            idx = last_index.get(residual)
            if idx is not None:
                out.append(tuple(prefix + [idx]))
                stored += 1
                if stored > provenance_cap:
                    raise ResourceLimitError("provenance_cap", provenance_cap)
            return
        nxt_min = suffix_min[s + 1]
        nxt_max = suffix_max[s + 1]
        for i, pt in enumerate(sets_pts[s]):
            ok = True
            for k in range(p):
                rem = residual[k] - pt[k]
                if rem < nxt_min[k] or rem > nxt_max[k]:
                    ok = False
                    break
            if ok:
                prefix.append(i)
                search(s + 1, tuple(r - c for r, c in zip(residual, pt)), prefix, out)
                prefix.pop()

    for y in nd:
        found: list[Combination] = []
        search(0, y, [], found)
        if not found:
            raise RuntimeError(f"no combination found for nondominated vector {y}")
        combos[y] = tuple(found)
    return Provenance(combos)


def enumerate_full_sum(instance: MSPInstance) -> list[Vector]:
    """Materialize the entire Minkowski sum (no filtering).  Oracle-sized inputs only."""
    instance.check_addition_safe()
    acc = instance.local_sets[0].to_array()
    for Y in instance.local_sets[1:]:
        b = Y.to_array()
        acc = (acc[:, None, :] + b[None, :, :]).reshape(-1, instance.p)
    return [tuple(int(c) for c in row) for row in acc]
