"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (or ``-s`` to see the lines).
Everything is exact arithmetic; the only tolerances are the stated wall-clock
budgets.
"""

from __future__ import annotations

import itertools
import random
import time

import pytest

from efx import diagnostics
from efx.allocation import Allocation, is_efx, nash_product, potential
from efx.cli import generate_instance
from efx.counterexamples import (
    dominance_barrier_instance,
    dominance_barrier_partial,
    welfare_barrier_instance,
    welfare_barrier_partial,
    welfare_barrier_reference_complete,
)
from efx.graphs import champion_cut, most_envious, smallest_envy_size
from efx.instance import (
    EQUAL,
    GREATER,
    BaseValuation,
    Instance,
    PerturbedValuation,
    compare_bundles,
)
from efx.oracle import certify_solver, enumerate_efx, exists_pareto_dominator
from efx.solver import IDENTICAL_BASELINE, _Engine, solve, solve_identical

from conftest import random_partial_allocation, random_tied_instance
from test_solver_cases import CASES, load_case

BATTERY_SEEDS = range(1, 501)


def report(criterion: str, ok: bool, detail: str = "") -> None:
    line = f"{'PASS' if ok else 'FAIL'}  {criterion}"
    if detail:
        line += f"  ({detail})"
    print(line)
    assert ok, line


def battery_instance(seed: int) -> Instance:
    m = random.Random(seed ^ 0xA5A5).randint(1, 8)
    return generate_instance(3, m, 20, seed)


@pytest.fixture(scope="module")
def battery():
    """The 500-run harness shared by criteria 1, 2, 6 and 8."""
    diagnostics.reset()
    start = time.perf_counter()
    runs = []
    for seed in BATTERY_SEEDS:
        inst = battery_instance(seed)
        result = solve(inst)
        certified = certify_solver(inst, result=result)
        runs.append((inst, result, certified))
    elapsed = time.perf_counter() - start
    return runs, elapsed, diagnostics.snapshot()


def test_criterion_1_existence_at_desk_scale(battery):
    runs, elapsed, _ = battery
    failures = [(inst, result) for inst, result, certified in runs if not certified]
    complete = all(result.allocation.is_complete(inst) for inst, result, _ in runs)
    report(
        "criterion 1: 500 random instances solved and oracle-certified EFX under 2 minutes",
        not failures and complete and elapsed < 120.0,
        f"{len(runs)} runs, {len(failures)} failures, {elapsed:.1f}s",
    )


def test_criterion_2_potential_monotonicity(battery):
    runs, _, _ = battery
    violations = 0
    for inst, result, _ in runs:
        val = PerturbedValuation(inst)
        prev = Allocation.empty(inst)
        for record in result.trace:
            ok_phi = (
                record.phi_before == potential(val, result.agent_order, prev)
                and record.phi_after == potential(val, result.agent_order, record.allocation_after)
                and record.phi_after > record.phi_before
            )
            if not ok_phi or not is_efx(val, record.allocation_after):
                violations += 1
            prev = record.allocation_after
    steps = sum(len(result.trace) for _, result, _ in runs)
    report(
        "criterion 2: every step is EFX with strictly lex-increasing potential",
        violations == 0,
        f"{steps} steps checked, {violations} violations",
    )


def test_criterion_3_dominance_barrier_reproduction():
    start = time.perf_counter()
    inst = dominance_barrier_instance()
    partial = dominance_barrier_partial()
    base = BaseValuation(inst)
    values = [base.bundle(i, partial.bundles[i]) for i in inst.agents]
    ok_values = values == [16, 15, 10]
    ok_efx = is_efx(base, partial)
    report_scan = enumerate_efx(inst)
    ok_total = report_scan.total == 2187
    witness = exists_pareto_dominator(inst, partial)
    elapsed = time.perf_counter() - start
    report(
        "criterion 3: bundled 7-good instance has values (16,15,10), partial EFX, no dominator, <1s",
        ok_values and ok_efx and ok_total and witness is None and elapsed < 1.0,
        f"values={values}, witness={witness}, {elapsed:.3f}s",
    )


def test_criterion_4_welfare_barrier_reproduction():
    start = time.perf_counter()
    inst = welfare_barrier_instance()
    partial = welfare_barrier_partial()
    reference = welfare_barrier_reference_complete()
    base = BaseValuation(inst)
    threshold = nash_product(inst, partial)
    scan = enumerate_efx(inst, include_allocations=True)
    all_below = True
    all_spread = True
    big = ("g3", "g5", "g6")
    for alloc in scan.allocations(inst):
        if not nash_product(inst, alloc) < threshold:
            all_below = False
        owners = {next(i for i in inst.agents if g in alloc.bundles[i]) for g in big}
        if len(owners) != 3:
            all_spread = False
    ok_partial = is_efx(base, partial)
    ok_reference = reference.is_complete(inst) and is_efx(base, reference)
    elapsed = time.perf_counter() - start
    report(
        "criterion 4: every complete EFX allocation of the eps instance has strictly "
        "lower Nash product; reference allocation EFX; big goods spread; <5s",
        ok_partial and ok_reference and all_below and all_spread and elapsed < 5.0,
        f"{scan.efx_count} complete EFX allocations checked, {elapsed:.2f}s",
    )


def test_criterion_5_perturbation_transfer():
    rng = random.Random(20_26)
    checked_pairs = checked_allocs = 0
    violations = 0
    for n in range(200):
        inst = random_tied_instance(rng.randrange(1 << 30))
        base, pert = BaseValuation(inst), PerturbedValuation(inst)
        goods = list(inst.goods)
        for _ in range(12):
            s = frozenset(g for g in goods if rng.random() < 0.5)
            t = frozenset(g for g in goods if rng.random() < 0.5)
            if s == t:
                continue
            checked_pairs += 1
            for agent in inst.agents:
                cmp_ = compare_bundles(inst, agent, s, t)
                if cmp_ == EQUAL:
                    violations += 1
                if base.bundle(agent, s) > base.bundle(agent, t) and cmp_ != GREATER:
                    violations += 1
        for _ in range(8):
            alloc = random_partial_allocation(inst, rng.randrange(1 << 30))
            checked_allocs += 1
            if is_efx(pert, alloc) and not is_efx(base, alloc):
                violations += 1
    report(
        "criterion 5: tie-broken order is strict, refines the raw order, and its EFX implies raw EFX",
        violations == 0,
        f"200 tied instances, {checked_pairs} bundle pairs, {checked_allocs} allocations",
    )


def fixture_bank_labels_and_marks():
    labels = set()
    diagnostics.reset()
    for name, rows, goods, bundles, order, expected_label, _ in CASES:
        inst, alloc = load_case(rows, goods, bundles)
        engine = _Engine(inst, order)
        engine.alloc = alloc
        label, _, _ = engine.dispatch()
        labels.add(label)
    return labels, diagnostics.snapshot()


def test_criterion_6_observation_suite(battery):
    _, _, battery_marks = battery
    _, fixture_marks = fixture_bank_labels_and_marks()
    required = {
        "cut_upper_minimal",        # removing anything from an upper half satisfies everyone
        "cut_lower_below_good",     # non-envying champion: lower half below the new good
        "cut_lower_covers_good",    # owner keeps at least the good's worth in the lower half
        "upper_half_preference",    # champions prefer the upper half they championed
        "shift_half_tables",        # pre-shift upper/lower orderings
        "shift_envier_ordering",    # post-shift envier orderings
        "shift_middle_ordering",    # post-patch middle-agent orderings
        "outer_prefer_nonsource",   # outer agents prefer the non-source bundle
        "trimmed_winner_content",   # after trimming, the winner envies nobody
        "loser_unique_champion",    # the loser uniquely champions the trimmed winner
    }
    combined = {k: battery_marks.get(k, 0) + fixture_marks.get(k, 0) for k in required}
    missing = sorted(k for k, v in combined.items() if v == 0)
    report(
        "criterion 6: structural observations checked wherever their hypotheses fire, 0 violations",
        not missing,
        f"fired: { {k: v for k, v in sorted(combined.items())} }",
    )


def test_criterion_7_greedy_matches_exhaustive():
    rng = random.Random(77)
    mismatches = 0
    queries = 0
    for _ in range(60):
        m = rng.randint(1, 6)
        inst = generate_instance(3, m, 12, rng.randrange(1 << 30))
        val = PerturbedValuation(inst)
        alloc = random_partial_allocation(inst, rng.randrange(1 << 30))
        if not alloc.pool:
            continue
        for g in sorted(alloc.pool, key=inst.good_index):
            for j in inst.agents:
                pot = alloc.bundles[j] | {g}
                exhaustive = {}
                for i in inst.agents:
                    own = val.bundle(i, alloc.bundles[i])
                    best = None
                    for size in range(1, len(pot) + 1):
                        if any(val.bundle(i, c) > own for c in itertools.combinations(pot, size)):
                            best = size
                            break
                    exhaustive[i] = best
                    if smallest_envy_size(val, alloc, i, pot) != best:
                        mismatches += 1
                    queries += 1
                for i in most_envious(val, alloc, pot):
                    cut = champion_cut(val, alloc, i, j, g)
                    own = val.bundle(i, alloc.bundles[i])
                    best_removal = max(
                        (size for size in range(len(pot) + 1)
                         for c in itertools.combinations(sorted(pot), size)
                         if val.bundle(i, pot - set(c)) > own),
                        default=None,
                    )
                    if len(cut.lower) != best_removal or not val.bundle(i, cut.upper) > own:
                        mismatches += 1
                    queries += 1
    report(
        "criterion 7: greedy envy sizes and cuts equal exhaustive subset search",
        mismatches == 0 and queries > 500,
        f"{queries} queries, {mismatches} mismatches",
    )


def test_criterion_8_case_coverage(battery):
    runs, _, _ = battery
    seen = {record.case for _, result, _ in runs for record in result.trace}
    fixture_labels, _ = fixture_bank_labels_and_marks()
    seen |= fixture_labels
    required = {
        "CycleElim", "SingleSource", "SelfChampion", "ThreeSrc2Cycle",
        "ThreeSrc3Cycle", "TwoSrcQuick", "TwoSrcA13", "TwoSrcA2",
    }
    missing = required - seen
    report(
        "criterion 8: every dispatch case fires across the battery and fixture bank",
        not missing,
        f"missing: {sorted(missing)}" if missing else f"{sorted(seen & required)}",
    )


def test_criterion_9_identical_valuations_baseline():
    rng = random.Random(99)
    failures = 0
    for _ in range(100):
        m = rng.randint(0, 8)
        row = [rng.randint(0, 20) for _ in range(m)]
        inst = Instance.from_rows([row, row, row])
        result = solve_identical(inst)
        ok = result.allocation.is_complete(inst)
        if ok:
            scan = enumerate_efx(inst, include_allocations=True)
            ok = result.allocation.assignment(inst) in set(scan.assignments)
        ok = ok and all(r.case == IDENTICAL_BASELINE for r in result.trace)
        if not ok:
            failures += 1
    report(
        "criterion 9: identical-valuations baseline oracle-certified on 100 instances",
        failures == 0,
        f"{failures} failures",
    )
