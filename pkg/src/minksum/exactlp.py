"""Exact linear programming over rational arithmetic.

A dense two-phase tableau simplex with Bland's rule: slow by LP-solver
standards, but every number is a ``fractions.Fraction``, the pivot sequence is
deterministic, and termination is guaranteed.  Problem sizes in this package
are a few hundred columns at most.

All variables are nonnegative; constraints may be <=, =, or >=; the objective
is minimized.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

ZERO = Fraction(0)
ONE = Fraction(1)


def frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class Relation(enum.Enum):
    LE = "<="
    EQ = "="
    GE = ">="


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[Fraction, ...]
    relation: Relation
    rhs: Fraction

    def __init__(self, coeffs: Sequence, relation: Relation, rhs):
        object.__setattr__(self, "coeffs", tuple(frac(c) for c in coeffs))
        object.__setattr__(self, "relation", relation)
        object.__setattr__(self, "rhs", frac(rhs))


@dataclass(frozen=True)
class LinearProgram:
    """min objective . x  subject to the constraints and x >= 0."""

    objective: tuple[Fraction, ...]
    constraints: tuple[Constraint, ...]

    def __init__(self, objective: Sequence, constraints: Sequence[Constraint] = ()):
        obj = tuple(frac(c) for c in objective)
        if not obj:
            raise ValueError("a linear program needs at least one variable")
        cons = tuple(constraints)
        for con in cons:
            if len(con.coeffs) != len(obj):
                raise ValueError("constraint width differs from variable count")
        object.__setattr__(self, "objective", obj)
        object.__setattr__(self, "constraints", cons)

    @property
    def n_vars(self) -> int:
        return len(self.objective)


@dataclass(frozen=True)
class LPSolution:
    """Solver outcome; ``value``/``x``/``duals`` are set only when optimal.

    ``duals`` holds one multiplier per original constraint (redundant rows get
    zero), oriented so that for any column a, the reduced cost
    ``c_a - duals . A_a`` is nonnegative at the optimum.
    """

    status: Status
    value: Fraction | None = None
    x: tuple[Fraction, ...] | None = None
    duals: tuple[Fraction, ...] | None = None


class _Tableau:
    def __init__(self, lp: LinearProgram):
        n = lp.n_vars
        rows: list[list[Fraction]] = []
        rhs: list[Fraction] = []
        flips: list[bool] = []
        relations: list[Relation] = []
        for con in lp.constraints:
            coeffs = list(con.coeffs)
            b = con.rhs
            rel = con.relation
            if b < 0:
                coeffs = [-c for c in coeffs]
                b = -b
                rel = {Relation.LE: Relation.GE, Relation.GE: Relation.LE, Relation.EQ: Relation.EQ}[rel]
                flips.append(True)
            else:
                flips.append(False)
            rows.append(coeffs)
            rhs.append(b)
            relations.append(rel)

        m = len(rows)
        self.m = m
        self.n = n
        self.flips = flips
        self.orig_rows = list(range(m))

        slack_of: list[int | None] = [None] * m
        ncols = n
        for i, rel in enumerate(relations):
            if rel is not Relation.EQ:
                slack_of[i] = ncols
                ncols += 1
        art_start = ncols
        art_of: list[int | None] = [None] * m
        for i, rel in enumerate(relations):
            if rel is not Relation.LE:
                art_of[i] = ncols
                ncols += 1
        self.ncols = ncols
        self.art_start = art_start
        # Initially-basic identity column per row; its final reduced cost
        # yields that row's dual multiplier.
        self.identity_col = [
            slack_of[i] if relations[i] is Relation.LE else art_of[i] for i in range(m)
        ]

        T = [[ZERO] * ncols for _ in range(m)]
        for i in range(m):
            T[i][: n] = rows[i]
            if slack_of[i] is not None:
                T[i][slack_of[i]] = ONE if relations[i] is Relation.LE else -ONE
            if art_of[i] is not None:
                T[i][art_of[i]] = ONE
        self.T = T
        self.b = rhs
        self.basis = [self.identity_col[i] for i in range(m)]
        self.cost2 = [frac(c) for c in lp.objective] + [ZERO] * (ncols - n)
        self.cost1 = [ZERO] * ncols
        self.infeas = ZERO
        for i in range(m):
            if self.basis[i] >= art_start:
                for j in range(ncols):
                    self.cost1[j] -= T[i][j]
                self.infeas += self.b[i]
        for j in range(art_start, ncols):
            self.cost1[j] += ONE

    def pivot(self, row: int, col: int) -> None:
        T, b = self.T, self.b
        inv = ONE / T[row][col]
        T[row] = [v * inv for v in T[row]]
        b[row] *= inv
        for i in range(self.m):
            if i != row and T[i][col] != 0:
                f = T[i][col]
                T[i] = [vi - f * vr for vi, vr in zip(T[i], T[row])]
                b[i] -= f * b[row]
        for cost in (self.cost1, self.cost2):
            f = cost[col]
            if f != 0:
                row_vals = T[row]
                for j in range(self.ncols):
                    cost[j] -= f * row_vals[j]
        self.basis[row] = col

    def run(self, phase: int) -> Status:
        cost = self.cost1 if phase == 1 else self.cost2
        while True:
            enter = -1
            for j in range(self.art_start):  # artificials never re-enter
                if cost[j] < 0:
                    enter = j
                    break
            if enter < 0:
                return Status.OPTIMAL
            leave = -1
            best = None
            for i in range(self.m):
                t = self.T[i][enter]
                if t > 0:
                    ratio = self.b[i] / t
                    if best is None or ratio < best or (
                        ratio == best and self.basis[i] < self.basis[leave]
                    ):
                        best = ratio
                        leave = i
            if leave < 0:
                return Status.UNBOUNDED
            self.pivot(leave, enter)

    def phase1_value(self) -> Fraction:
        value = ZERO
        for i in range(self.m):
            if self.basis[i] >= self.art_start:
                value += self.b[i]
        return value

    def drop_redundant_rows(self) -> None:
        """After phase 1, pivot out or delete rows stuck on a zero artificial."""
        i = 0
        while i < self.m:
            if self.basis[i] >= self.art_start:
                pivot_col = next(
                    (j for j in range(self.art_start) if self.T[i][j] != 0), -1
                )
                if pivot_col >= 0:
                    self.pivot(i, pivot_col)
                    i += 1
                else:
                    del self.T[i], self.b[i], self.basis[i], self.orig_rows[i]
                    self.m -= 1
            else:
                i += 1


def solve(lp: LinearProgram) -> LPSolution:
    """Exact optimum, or infeasibility/unboundedness, of a linear program."""
    tab = _Tableau(lp)
    if any(col >= tab.art_start for col in tab.basis):
        status = tab.run(1)
        if status is not Status.OPTIMAL or tab.phase1_value() != 0:
            return LPSolution(Status.INFEASIBLE)
        tab.drop_redundant_rows()
    if tab.run(2) is Status.UNBOUNDED:
        return LPSolution(Status.UNBOUNDED)

    x = [ZERO] * lp.n_vars
    for i in range(tab.m):
        if tab.basis[i] < lp.n_vars:
            x[tab.basis[i]] = tab.b[i]
    value = sum((c * v for c, v in zip(lp.objective, x)), ZERO)

    alive = set(tab.orig_rows)
    duals = []
    for orig in range(len(lp.constraints)):
        if orig not in alive:
            duals.append(ZERO)
            continue
        pi = -tab.cost2[tab.identity_col[orig]]
        if tab.flips[orig]:
            pi = -pi
        duals.append(pi)

    return LPSolution(Status.OPTIMAL, value, tuple(x), tuple(duals))


def verify_solution(lp: LinearProgram, sol: LPSolution) -> bool:
    """Substitute an optimal solution back into the program; exact checks only."""
    if sol.status is not Status.OPTIMAL:
        raise ValueError("only optimal solutions can be verified")
    x = sol.x
    assert x is not None
    if any(v < 0 for v in x):
        return False
    for con in lp.constraints:
        lhs = sum((c * v for c, v in zip(con.coeffs, x)), ZERO)
        if con.relation is Relation.LE and not lhs <= con.rhs:
            return False
        if con.relation is Relation.GE and not lhs >= con.rhs:
            return False
        if con.relation is Relation.EQ and lhs != con.rhs:
            return False
    return sum((c * v for c, v in zip(lp.objective, x)), ZERO) == sol.value
