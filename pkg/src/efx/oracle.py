"""Exhaustive ground truth on small instances.

Walks all n**m complete allocations in a fixed order (the first good is the
most significant digit, agents count up within each position) keeping exact
incremental bundle sums and per-bundle minima, so each leaf costs a handful
of comparisons.  Classification uses raw values with ties allowed: the
counterexample claims this oracle checks are statements about true
valuations, not about any tie-broken refinement.  Everything is exact; rows
of integral rationals are downcast to machine-exact ints for speed.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .allocation import Allocation
from .errors import GuardError
from .instance import Instance
from .solver import SolveResult, solve

DEFAULT_MAX_GOODS = 16
_GUARD_ENV = "EFX_MAX_GOODS"


def goods_guard(max_goods: int | None = None) -> int:
    if max_goods is not None:
        return max_goods
    env = os.environ.get(_GUARD_ENV)
    return int(env) if env else DEFAULT_MAX_GOODS


def _check_guard(inst: Instance, max_goods: int | None) -> None:
    guard = goods_guard(max_goods)
    if inst.num_goods > guard:
        raise GuardError(
            f"instance has {inst.num_goods} goods, above the exhaustive-search guard of "
            f"{guard}; raise --max-goods or {_GUARD_ENV} to force"
        )


def _rows(inst: Instance) -> list[list]:
    rows = []
    for row in inst.values:
        if all(isinstance(v, Fraction) and v.denominator == 1 for v in row):
            rows.append([int(v) for v in row])
        else:
            rows.append(list(row))
    return rows


def iter_efx_assignments(inst: Instance) -> Iterator[tuple[tuple[int, ...], list]]:
    """Yield (assignment, own-values) for every complete EFX allocation, in enumeration order.

    An assignment maps good position to agent index.  EFX is checked per
    ordered pair through the additive shortcut: i strongly envies bundle k
    exactly when the bundle minus its (for i) least valuable good still beats
    i's own sum.
    """
    n, m = inst.num_agents, inst.num_goods
    rows = _rows(inst)
    sums = [[0] * n for _ in range(n)]        # sums[i][k]: agent i's value of bundle k
    mins = [[None] * n for _ in range(n)]     # mins[i][k]: least valuable good of bundle k for i
    counts = [0] * n
    assignment = [0] * m

    def leaf_is_efx() -> bool:
        for i in range(n):
            own = sums[i][i]
            row_sums, row_mins = sums[i], mins[i]
            for k in range(n):
                if k != i and counts[k] and row_sums[k] - row_mins[k] > own:
                    return False
        return True

    def rec(j: int) -> Iterator[tuple[tuple[int, ...], list]]:
        if j == m:
            if leaf_is_efx():
                yield tuple(assignment), [sums[i][i] for i in range(n)]
            return
        for k in range(n):
            assignment[j] = k
            saved = [mins[i][k] for i in range(n)]
            for i in range(n):
                v = rows[i][j]
                sums[i][k] = sums[i][k] + v
                if saved[i] is None or v < saved[i]:
                    mins[i][k] = v
            counts[k] += 1
            yield from rec(j + 1)
            counts[k] -= 1
            for i in range(n):
                sums[i][k] = sums[i][k] - rows[i][j]
                mins[i][k] = saved[i]

    if m == 0:
        # The single (empty) complete allocation is trivially EFX.
        yield (), [0] * n
        return
    yield from rec(0)


@dataclass(frozen=True)
class EnumerationReport:
    """Results of one exhaustive scan; optional slots hold whatever the query asked for."""

    total: int
    efx_count: int
    assignments: tuple[tuple[int, ...], ...] | None = None
    best_nash: tuple | None = None            # (raw-value product, earliest witness assignment)
    dominator: tuple[int, ...] | None = None  # first EFX assignment Pareto-dominating the query
    dominator_searched: bool = False

    def allocations(self, inst: Instance) -> list[Allocation]:
        if self.assignments is None:
            raise ValueError("enumeration ran without include_allocations")
        return [Allocation.from_assignment(inst, a) for a in self.assignments]


def scan(inst: Instance, max_goods: int | None = None, include_allocations: bool = False,
         track_nash: bool = False, dominate: Allocation | None = None) -> EnumerationReport:
    """One pass over all complete allocations, collecting whatever was asked for."""
    _check_guard(inst, max_goods)
    targets = None
    if dominate is not None:
        dominate.validate_for(inst)
        rows = _rows(inst)
        targets = [
            sum((rows[i][inst.good_index(g) - 1] for g in dominate.bundles[i]), 0)
            for i in inst.agents
        ]
    kept: list[tuple[int, ...]] = []
    count = 0
    best = None
    best_assignment = None
    dominator = None
    for assignment, own in iter_efx_assignments(inst):
        count += 1
        if include_allocations:
            kept.append(assignment)
        if track_nash:
            product = 1
            for v in own:
                product = product * v
            if best is None or product > best:
                best, best_assignment = product, assignment
        if targets is not None and dominator is None:
            if all(own[i] >= targets[i] for i in inst.agents) and any(
                own[i] > targets[i] for i in inst.agents
            ):
                dominator = assignment
    return EnumerationReport(
        total=inst.num_agents ** inst.num_goods,
        efx_count=count,
        assignments=tuple(kept) if include_allocations else None,
        best_nash=None if best is None else (best, best_assignment),
        dominator=dominator,
        dominator_searched=targets is not None,
    )


def enumerate_efx(inst: Instance, max_goods: int | None = None,
                  include_allocations: bool = False) -> EnumerationReport:
    """Count (and optionally list) all complete EFX allocations."""
    return scan(inst, max_goods=max_goods, include_allocations=include_allocations)


def exists_pareto_dominator(inst: Instance, partial: Allocation,
                            max_goods: int | None = None) -> Allocation | None:
    """First complete EFX allocation Pareto-dominating `partial` over raw values, or None."""
    report = scan(inst, max_goods=max_goods, dominate=partial)
    if report.dominator is None:
        return None
    return Allocation.from_assignment(inst, report.dominator)


def max_nash_efx(inst: Instance, max_goods: int | None = None):
    """Maximum raw-value product over complete EFX allocations, with the earliest witness.

    Returns (product, Allocation) or None when the scan finds no complete EFX
    allocation (never the case for three agents, but the scan must not
    presuppose the property it is used to certify).
    """
    report = scan(inst, max_goods=max_goods, track_nash=True)
    if report.best_nash is None:
        return None
    product, assignment = report.best_nash
    return product, Allocation.from_assignment(inst, assignment)


def certify_solver(inst: Instance, max_goods: int | None = None,
                   result: SolveResult | None = None) -> bool:
    """Run the solver and check its output against the exhaustive scan.

    Verifies completeness, membership of the returned allocation in the
    enumerated EFX set, and that the recorded potential triples strictly
    increase step over step.
    """
    _check_guard(inst, max_goods)
    if result is None:
        result = solve(inst)
    if not result.allocation.is_complete(inst):
        return False
    report = scan(inst, max_goods=max_goods, include_allocations=True)
    if result.allocation.assignment(inst) not in set(report.assignments):
        return False
    prev = None
    for record in result.trace:
        if record.phi_after <= record.phi_before:
            return False
        if prev is not None and record.phi_before != prev:
            return False
        prev = record.phi_after
    return True
