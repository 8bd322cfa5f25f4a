"""Generator sets: fixings, candidates, redundancy, and exact minimum generator sets.

A generator set keeps one subset per local set whose nondominated Minkowski
sum still equals the full nondominated sum.  ``minimum_generator_set`` first
tries two shortcuts (fixed = candidate everywhere, or the fixed sets already
generating) and otherwise solves a 0-1 covering program exactly by
depth-first branch and bound with integer arithmetic throughout.

Key facts used here (each also validated by the test-suite oracles):

* a vector fixed in every combination of some nondominated sum member must be
  chosen in any generator set;
* a vector appearing in no combination of any nondominated sum member is
  redundant for any minimal generator set;
* the nondominated sum stays exactly reproducible iff every member keeps at
  least one fully chosen combination.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import MSPInstance, StableSet, Vector, vec_add
from .errors import NodeLimitError, ResourceLimitError
from .ndfilter import (
    DEFAULT_BUFFER_LIMIT,
    DEFAULT_PROVENANCE_CAP,
    Combination,
    Provenance,
    compute_provenance,
    enumerate_full_sum,
    filter_nondominated_naive,
    nd_sum,
)

DEFAULT_NODE_CAP = 10**7
DEFAULT_ORACLE_CAP = 10**7


class Flag(enum.Enum):
    FIXED_REQUIRED = "fixed"
    CANDIDATE_ONLY = "candidate"
    EXCLUDED = "excluded"


class SolverPath(enum.Enum):
    FIXED_SHORTCUT = "fixed_shortcut"
    GENERATING_SHORTCUT = "generating_shortcut"
    EXACT_IP = "exact_ip"
    EXHAUSTIVE_ORACLE = "exhaustive_oracle"  # CLI --oracle mode only


@dataclass(frozen=True)
class GeneratorSet:
    """Chosen subset per local set plus a flag for every local vector.

    ``flags[s][i]`` refers to the i-th point of local set s in canonical
    order.
    """

    chosen: tuple[StableSet, ...]
    flags: tuple[tuple[Flag, ...], ...]

    def total_cardinality(self) -> int:
        return sum(len(c) for c in self.chosen)

    def chosen_index_sets(self, instance: MSPInstance) -> tuple[frozenset[int], ...]:
        out = []
        for s, sub in enumerate(self.chosen):
            pts = instance.local_sets[s].points
            out.append(frozenset(pts.index(pt) for pt in sub))
        return tuple(out)


@dataclass(frozen=True)
class MGSResult:
    generator: GeneratorSet
    total_cardinality: int
    unique: bool
    solver_path: SolverPath
    optima: Optional[tuple[GeneratorSet, ...]] = None


def combinations_of(
    y: Vector,
    instance: MSPInstance,
    provenance: Optional[Provenance] = None,
    nd: Optional[StableSet] = None,
) -> tuple[Combination, ...]:
    """All index combinations whose vector sum equals the nondominated vector y."""
    y = tuple(int(c) for c in y)
    if provenance is not None:
        if y not in provenance:
            raise ValueError(f"{y} is not part of the nondominated sum")
        return provenance.of(y)
    if nd is None:
        nd, _ = nd_sum(instance)
    if y not in nd:
        raise ValueError(f"{y} is not part of the nondominated sum")
    single = compute_provenance(instance, StableSet([y], validate=False))
    return single.of(y)


def fixed_sets(
    instance: MSPInstance, nd: StableSet, provenance: Provenance
) -> tuple[StableSet, ...]:
    """Per local set, the vectors used at that position by *every* combination
    of some nondominated sum member; these appear in every generator set."""
    fixed_idx: list[set[int]] = [set() for _ in range(instance.S)]
    for y in nd:
        combos = provenance.of(y)
        first = combos[0]
        for s in range(instance.S):
            i = first[s]
            if all(c[s] == i for c in combos):
                fixed_idx[s].add(i)
    return tuple(
        StableSet(
            [instance.local_sets[s].points[i] for i in sorted(fixed_idx[s])],
            validate=False,
        )
        for s in range(instance.S)
    )


def candidate_sets(
    instance: MSPInstance, nd: StableSet, provenance: Provenance
) -> tuple[StableSet, ...]:
    """Per local set, the vectors appearing in at least one combination of some
    nondominated sum member; minimal generator sets never leave this set."""
    cand_idx: list[set[int]] = [set() for _ in range(instance.S)]
    for y in nd:
        for c in provenance.of(y):
            for s, i in enumerate(c):
                cand_idx[s].add(i)
    return tuple(
        StableSet(
            [instance.local_sets[s].points[i] for i in sorted(cand_idx[s])],
            validate=False,
        )
        for s in range(instance.S)
    )


def is_redundant(
    y_s: Vector,
    s: int,
    instance: MSPInstance,
    nd: Optional[StableSet] = None,
    enumeration_cap: int = DEFAULT_ORACLE_CAP,
) -> bool:
    """Brute-force redundancy oracle: every vector sum using ``y_s`` is dominated.

    Equivalently, no sum of ``y_s`` with one point from every other local set
    lands in the nondominated sum.  This is the reference the bounding-set
    pruning is verified against.
    """
    y_s = tuple(int(c) for c in y_s)
    if y_s not in instance.local_sets[s]:
        raise ValueError(f"{y_s} is not in local set {s}")
    if nd is None:
        nd, _ = nd_sum(instance)
    others = [Y for t, Y in enumerate(instance.local_sets) if t != s]
    if not others:
        return False  # a single local set generates itself
    rest = MSPInstance(others)
    if rest.product_size() > enumeration_cap:
        raise ResourceLimitError("redundancy_enumeration_cap", enumeration_cap)
    nd_members = set(nd.points)
    for t in enumerate_full_sum(rest):
        if vec_add(y_s, t) in nd_members:
            return False
    return True


def verify_generator(
    G: GeneratorSet, instance: MSPInstance, nd: Optional[StableSet] = None
) -> bool:
    """True iff the chosen subsets reproduce the nondominated sum exactly."""
    for s, sub in enumerate(G.chosen):
        full = set(instance.local_sets[s].points)
        for pt in sub:
            if pt not in full:
                raise ValueError(f"chosen point {pt} is not in local set {s}")
    if any(sub.is_empty() for sub in G.chosen):
        return False
    if nd is None:
        nd, _ = nd_sum(instance)
    sub_nd, _ = nd_sum(MSPInstance(list(G.chosen)))
    return sub_nd.points == nd.points


def _flags_from_index_sets(
    instance: MSPInstance,
    fixed_idx: Sequence[frozenset[int]],
    cand_idx: Sequence[frozenset[int]],
) -> tuple[tuple[Flag, ...], ...]:
    flags = []
    for s, Y in enumerate(instance.local_sets):
        row = []
        for i in range(len(Y)):
            if i in fixed_idx[s]:
                row.append(Flag.FIXED_REQUIRED)
            elif i in cand_idx[s]:
                row.append(Flag.CANDIDATE_ONLY)
            else:
                row.append(Flag.EXCLUDED)
        flags.append(tuple(row))
    return tuple(flags)


def _index_sets(instance: MSPInstance, sets: Sequence[StableSet]) -> tuple[frozenset[int], ...]:
    out = []
    for s, sub in enumerate(sets):
        pts = instance.local_sets[s].points
        out.append(frozenset(pts.index(pt) for pt in sub))
    return tuple(out)


def _generator_from_indices(
    instance: MSPInstance,
    chosen_idx: Sequence[frozenset[int]],
    fixed_idx: Sequence[frozenset[int]],
    cand_idx: Sequence[frozenset[int]],
) -> GeneratorSet:
    chosen = tuple(
        StableSet(
            [instance.local_sets[s].points[i] for i in sorted(chosen_idx[s])],
            validate=False,
        )
        for s in range(instance.S)
    )
    return GeneratorSet(chosen, _flags_from_index_sets(instance, fixed_idx, cand_idx))


class _CoverProblem:
    """0-1 covering model behind the exact search.

    One binary per candidate-but-not-fixed local vector; a nondominated sum
    member outside the fixed sum is covered when some combination has all its
    non-fixed positions chosen.  Combinations whose member has a unique
    combination force their variables up front.
    """

    def __init__(
        self,
        instance: MSPInstance,
        nd: StableSet,
        provenance: Provenance,
        fixed_idx: Sequence[frozenset[int]],
        cand_idx: Sequence[frozenset[int]],
    ):
        self.var_key: list[tuple[int, int]] = []
        var_id: dict[tuple[int, int], int] = {}
        for s in range(instance.S):
            for i in sorted(cand_idx[s] - fixed_idx[s]):
                var_id[(s, i)] = len(self.var_key)
                self.var_key.append((s, i))

        forced: set[int] = set()
        elements: list[tuple[frozenset[int], ...]] = []
        for y in nd:
            combos = provenance.of(y)
            needed = []
            covered_by_fixed = False
            for c in combos:
                free = frozenset(
                    var_id[(s, i)] for s, i in enumerate(c) if i not in fixed_idx[s]
                )
                if not free:
                    covered_by_fixed = True
                    break
                needed.append(free)
            if covered_by_fixed:
                continue
            if len(combos) == 1:
                forced.update(needed[0])
            else:
                elements.append(tuple(sorted(set(needed), key=sorted)))
        self.forced = frozenset(forced)
        self.elements = [
            el
            for el in elements
            if not any(req <= self.forced for req in el)
        ]
        counts = [0] * len(self.var_key)
        for el in self.elements:
            for req in el:
                for v in req:
                    counts[v] += 1
        order = [
            v
            for v in range(len(self.var_key))
            if v not in self.forced and counts[v] > 0
        ]
        order.sort(key=lambda v: (-counts[v], self.var_key[v]))
        self.branch_order = order

    def solve(
        self,
        node_cap: int,
        cutoff: Optional[int] = None,
        no_goods: Sequence[frozenset[int]] = (),
    ) -> Optional[tuple[int, frozenset[int]]]:
        """Minimum number of extra variables, or None if nothing fits the cutoff
        and no-good cuts.  Deterministic depth-first search."""
        best_value: Optional[int] = None
        best_support: Optional[frozenset[int]] = None
        nodes = 0
        forced = self.forced

        def covered(el, chosen: set[int]) -> bool:
            return any(req <= chosen or req <= (chosen | forced) for req in el)

        def search(chosen: set[int], excluded: set[int], depth: int) -> None:
            nonlocal best_value, best_support, nodes
            nodes += 1
            if nodes > node_cap:
                raise NodeLimitError("ip_node_cap", node_cap)
            if any(bg <= chosen for bg in no_goods):
                return
            uncovered = []
            for el in self.elements:
                if covered(el, chosen):
                    continue
                viable = [req for req in el if not (req & excluded)]
                if not viable:
                    return
                uncovered.append(viable)
            if not uncovered:
                value = len(chosen)
                limit = cutoff if cutoff is not None else (
                    best_value if best_value is not None else None
                )
                if limit is not None and value > limit:
                    return
                if best_value is None or value < best_value:
                    best_value = value
                    best_support = frozenset(chosen)
                return
            bound = len(chosen) + self._packing_bound(uncovered, chosen)
            if cutoff is not None and bound > cutoff:
                return
            if best_value is not None and cutoff is None and bound >= best_value:
                return
            branch_var = next(
                (
                    v
                    for v in self.branch_order
                    if v not in chosen
                    and v not in excluded
                    and any(any(v in req for req in el) for el in uncovered)
                ),
                -1,
            )
            if branch_var < 0:
                return
            chosen.add(branch_var)
            search(chosen, excluded, depth + 1)
            chosen.discard(branch_var)
            excluded.add(branch_var)
            search(chosen, excluded, depth + 1)
            excluded.discard(branch_var)

        search(set(), set(), 0)
        if best_value is None:
            return None
        return best_value, best_support if best_support is not None else frozenset()

    def _packing_bound(self, uncovered, chosen: set[int]) -> int:
        """Additive bound from elements with pairwise disjoint variable pools."""
        items = []
        for viable in uncovered:
            need = min(len(req - chosen - self.forced) for req in viable)
            pool = frozenset().union(*viable) - chosen - self.forced
            items.append((need, pool))
        items.sort(key=lambda t: (-t[0], sorted(t[1])))
        used: set[int] = set()
        bound = 0
        for need, pool in items:
            if not (pool & used):
                bound += need
                used |= pool
        return bound


def solve_mgs_ip(
    instance: MSPInstance,
    fixed: Sequence[StableSet],
    candidates: Sequence[StableSet],
    nd: StableSet,
    provenance: Provenance,
    node_cap: int = DEFAULT_NODE_CAP,
    enumerate_optima: bool = False,
) -> MGSResult:
    """Exact optimum of the covering program over candidate-but-not-fixed vectors."""
    fixed_idx = _index_sets(instance, fixed)
    cand_idx = _index_sets(instance, candidates)
    problem = _CoverProblem(instance, nd, provenance, fixed_idx, cand_idx)

    first = problem.solve(node_cap)
    if first is None:
        raise RuntimeError("covering search found no solution; provenance is inconsistent")
    extra, support = first
    base = sum(len(f) for f in fixed_idx)
    total = base + len(problem.forced) + extra

    supports = [support]
    no_goods = [support]
    while True:
        nxt = problem.solve(node_cap, cutoff=extra, no_goods=no_goods)
        if nxt is None:
            break
        supports.append(nxt[1])
        no_goods.append(nxt[1])
        if not enumerate_optima:
            break
        if len(supports) > 10_000:
            raise ResourceLimitError("optima_enumeration_cap", 10_000)
    unique = len(supports) == 1

    def build(sup: frozenset[int]) -> GeneratorSet:
        chosen_idx = [set(fixed_idx[s]) for s in range(instance.S)]
        for v in problem.forced | sup:
            s, i = problem.var_key[v]
            chosen_idx[s].add(i)
        return _generator_from_indices(
            instance, [frozenset(c) for c in chosen_idx], fixed_idx, cand_idx
        )

    optima = tuple(build(sup) for sup in supports) if enumerate_optima else None
    return MGSResult(
        generator=build(support),
        total_cardinality=total,
        unique=unique,
        solver_path=SolverPath.EXACT_IP,
        optima=optima,
    )


def minimum_generator_set(
    instance: MSPInstance,
    buffer_limit: int = DEFAULT_BUFFER_LIMIT,
    provenance_cap: int = DEFAULT_PROVENANCE_CAP,
    node_cap: int = DEFAULT_NODE_CAP,
    enumerate_optima: bool = False,
    force_ip: bool = False,
) -> MGSResult:
    """Minimum generator set via the shortcut ladder, falling back to exact search.

    Shortcut 1: candidate = fixed everywhere, so the fixed sets are the unique
    answer.  Shortcut 2: the fixed sets already generate the nondominated sum;
    every generator contains them, so they are again the unique optimum.
    ``force_ip`` skips both (used to cross-check the shortcuts).
    """
    nd, provenance = nd_sum(
        instance, buffer_limit, want_provenance=True, provenance_cap=provenance_cap
    )
    assert provenance is not None
    fixed = fixed_sets(instance, nd, provenance)
    candidates = candidate_sets(instance, nd, provenance)
    fixed_idx = _index_sets(instance, fixed)
    cand_idx = _index_sets(instance, candidates)

    if not force_ip:
        path = None
        if all(fixed_idx[s] == cand_idx[s] for s in range(instance.S)):
            path = SolverPath.FIXED_SHORTCUT
        elif not any(f.is_empty() for f in fixed):
            fixed_nd, _ = nd_sum(MSPInstance(list(fixed)), buffer_limit)
            if fixed_nd.points == nd.points:
                path = SolverPath.GENERATING_SHORTCUT
        if path is not None:
            gen = _generator_from_indices(instance, fixed_idx, fixed_idx, cand_idx)
            result = MGSResult(
                generator=gen,
                total_cardinality=gen.total_cardinality(),
                unique=True,
                solver_path=path,
                optima=(gen,) if enumerate_optima else None,
            )
            return result

    return solve_mgs_ip(
        instance, fixed, candidates, nd, provenance, node_cap, enumerate_optima
    )


def exhaustive_minimum_generator(
    instance: MSPInstance,
    subset_cap: int = 2**22,
) -> tuple[int, list[tuple[frozenset[int], ...]]]:
    """Reference search over every subset combination; returns the optimum
    cardinality and all optimal index-set tuples.

    Exercised against ``minimum_generator_set`` on small instances; the
    generator test is pure coverage (a nondominated vector is generated iff
    one of its combinations survives), verified independently by a naive
    filter cross-check in the tests.
    """
    sizes = [len(Y) for Y in instance.local_sets]
    total_subsets = 1
    for n in sizes:
        total_subsets *= 2**n - 1
    if total_subsets > subset_cap:
        raise ResourceLimitError("exhaustive_subset_cap", subset_cap)
    nd, provenance = nd_sum(instance, want_provenance=True)
    assert provenance is not None
    combos_per_y = [provenance.of(y) for y in nd]

    if instance.S == 2:
        return _exhaustive_two_sets(sizes, combos_per_y)

    best: Optional[int] = None
    optima: list[tuple[frozenset[int], ...]] = []
    masks_per_set = [range(1, 2 ** n) for n in sizes]
    for masks in itertools.product(*masks_per_set):
        card = sum(bin(m).count("1") for m in masks)
        if best is not None and card > best:
            continue
        ok = all(
            any(all(masks[s] >> i & 1 for s, i in enumerate(c)) for c in combos)
            for combos in combos_per_y
        )
        if not ok:
            continue
        if best is None or card < best:
            best = card
            optima = []
        optima.append(
            tuple(
                frozenset(i for i in range(sizes[s]) if masks[s] >> i & 1)
                for s in range(instance.S)
            )
        )
    assert best is not None
    return best, optima


def _exhaustive_two_sets(
    sizes: Sequence[int], combos_per_y: Sequence[Sequence[Combination]]
) -> tuple[int, list[tuple[frozenset[int], ...]]]:
    n0, n1 = sizes
    popcount = np.array([bin(m).count("1") for m in range(2 ** max(n0, n1))])
    # For every y and first-set mask A: which second-set indices complete a combination.
    per_i_masks = []
    for combos in combos_per_y:
        by_i: dict[int, int] = {}
        for i, j in combos:
            by_i[i] = by_i.get(i, 0) | (1 << j)
        per_i_masks.append(by_i)

    best: Optional[int] = None
    optima: list[tuple[frozenset[int], ...]] = []
    b_values = np.arange(1, 2 ** n1, dtype=np.int64)
    for A in range(1, 2 ** n0):
        reqs = set()
        dead = False
        for by_i in per_i_masks:
            r = 0
            for i, jm in by_i.items():
                if A >> i & 1:
                    r |= jm
            if r == 0:
                dead = True
                break
            reqs.add(r)
        if dead:
            continue
        valid = np.ones(len(b_values), dtype=bool)
        for r in reqs:
            valid &= (b_values & r) != 0
        if not valid.any():
            continue
        cards = popcount[A] + popcount[b_values[valid]]
        local_best = int(cards.min())
        if best is not None and local_best > best:
            continue
        if best is None or local_best < best:
            best = local_best
            optima = []
        for B in b_values[valid][cards == local_best]:
            optima.append(
                (
                    frozenset(i for i in range(n0) if A >> i & 1),
                    frozenset(j for j in range(n1) if int(B) >> j & 1),
                )
            )
    assert best is not None
    return best, optima
