"""One dispatch round driven from curated EFX states, one fixture per handler branch.

The solver's deep branches are rare from an empty start, so these states were
found by randomized search over instances biased toward near-threshold values
(plus a few hand-built ones) and frozen here as literal matrices.  Each case
pins the dispatch label it must take and the structural checkpoints it must
pass through, and re-verifies the output is EFX and lexicographically ahead.
"""

from __future__ import annotations

import pytest

from efx import diagnostics
from efx.allocation import Allocation, is_efx, lex_dominates
from efx.graphs import champion_graph, envy_graph
from efx.instance import Instance, PerturbedValuation
from efx.solver import (
    THREE_SRC_2CYCLE,
    THREE_SRC_3CYCLE,
    TWO_SRC_A13,
    TWO_SRC_A2,
    TWO_SRC_QUICK,
    _Engine,
)

G7 = ["b1", "b2", "b3", "f1", "f2", "f3", "gg"]
B7 = (["b1", "f1"], ["b2", "f2"], ["b3", "f3"])
G10 = ["b1", "b2", "b3", "f1a", "f1b", "f2a", "f2b", "f3a", "f3b", "gg"]
B10 = (["b1", "f1a", "f1b"], ["b2", "f2a", "f2b"], ["b3", "f3a", "f3b"])
G11 = ["b1", "b2", "b3", "f1a", "f1b", "f2a", "f2b", "f3a", "f3b", "f3c", "gg"]
B11 = (["b1", "f1a", "f1b"], ["b2", "f2a", "f2b"], ["b3", "f3a", "f3b", "f3c"])

CASES = [
    # name, rows, goods, bundles, order, expected label, expected checkpoints
    (
        "three_cycle_clean_shift",
        [[100, 5, 132, 40, 2, 5, 10],
         [132, 100, 5, 5, 40, 2, 10],
         [5, 132, 100, 2, 5, 40, 10]],
        G7, B7, (0, 1, 2), THREE_SRC_3CYCLE, ["shift_half_tables", "shift_direct"],
    ),
    (
        "three_cycle_full_rotation",
        [[100, 0, 120, 20, 20, 65, 65, 8, 4, 25],
         [120, 100, 0, 8, 4, 20, 20, 65, 65, 25],
         [0, 120, 100, 65, 65, 8, 4, 20, 20, 25]],
        G10, B10, (0, 1, 2), THREE_SRC_3CYCLE, ["shift_full_rotation"],
    ),
    (
        "three_cycle_patched_with_new_good",
        [[103, 9, 113, 15, 17, 50, 21, 6, 5, 24],
         [129, 103, 9, 10, 7, 27, 26, 32, 28, 30],
         [14, 104, 97, 32, 44, 9, 9, 24, 20, 38]],
        G10, B10, (0, 1, 2), THREE_SRC_3CYCLE,
        ["shift_envier_ordering", "shift_patched"],
    ),
    (
        "three_cycle_carve_for_middle",
        [[115, 6, 118, 10, 20, 22, 36, 0, 3, 28],
         [142, 123, 2, 3, 3, 13, 14, 23, 36, 11],
         [10, 149, 125, 18, 38, 1, 0, 13, 17, 25]],
        G10, B10, (0, 1, 2), THREE_SRC_3CYCLE,
        ["shift_middle_ordering", "shift_slice_middle"],
    ),
    (
        "three_cycle_carve_for_third",
        [[100, 0, 120, 20, 20, 69, 69, 8, 4, 25],
         [120, 100, 0, 8, 4, 20, 20, 68, 68, 25],
         [125, 132, 100, 5, 5, 3, 3, 20, 20, 12]],
        G10, B10, (0, 1, 2), THREE_SRC_3CYCLE,
        ["shift_middle_ordering", "shift_slice_third"],
    ),
    (
        "two_cycle_swap_patched",
        [[109, 19, 124, 26, 25, 40, 22, 8, 11, 45],
         [130, 109, 16, 10, 12, 24, 20, 30, 8, 17],
         [151, 130, 109, 1, 4, 4, 11, 26, 29, 51]],
        G10, B10, (0, 1, 2), THREE_SRC_2CYCLE, ["swap_patched"],
    ),
    (
        "two_sources_champion_path",
        [[100, 135, 75, 40, 2, 72, 10],
         [5, 100, 74, 2, 40, 73, 10],
         [135, 4, 100, 2, 3, 40, 10]],
        G7, B7, (0, 1, 2), TWO_SRC_QUICK, [],
    ),
    (
        "two_sources_swap_with_weak_envy_toward_third",
        [[100, 135, 75, 40, 2, 72, 10],
         [135, 100, 74, 2, 40, 73, 10],
         [5, 4, 100, 2, 3, 40, 10]],
        G7, B7, (0, 1, 2), TWO_SRC_QUICK, ["swap_direct"],
    ),
    (
        "two_sources_outer_clean",
        [[100, 5, 135, 40, 2, 10, 10],
         [132, 100, 5, 5, 40, 2, 10],
         [5, 132, 100, 2, 5, 40, 10]],
        G7, B7, (0, 1, 2), TWO_SRC_A13, ["outer_direct"],
    ),
    (
        "two_sources_outer_carve_for_middle",
        [[73, 13, 89, 20, 23, 22, 40, 1, 1, 35],
         [97, 74, 9, 7, 10, 22, 16, 48, 37, 36],
         [13, 122, 86, 42, 25, 7, 1, 22, 22, 8]],
        G10, B10, (0, 1, 2), TWO_SRC_A13, ["outer_slice_middle"],
    ),
    (
        "two_sources_outer_carve_for_lead",
        [[91, 7, 121, 33, 22, 55, 36, 12, 2, 40],
         [125, 94, 4, 10, 13, 23, 22, 47, 55, 23],
         [6, 108, 95, 38, 54, 6, 13, 23, 27, 37]],
        G10, B10, (1, 0, 2), TWO_SRC_A13, ["outer_slice_lead"],
    ),
    (
        "two_sources_outer_single_source_continuation",
        [[91, 7, 121, 33, 22, 55, 36, 12, 2, 40],
         [125, 94, 4, 10, 13, 23, 22, 47, 55, 23],
         [6, 108, 95, 38, 54, 6, 13, 23, 27, 37]],
        G10, B10, (0, 1, 2), TWO_SRC_A13, ["outer_continue_single_source"],
    ),
    (
        "two_sources_middle_direct",
        [[100, 5, 135, 40, 2, 10, 10],
         [132, 100, 5, 5, 40, 2, 10],
         [5, 132, 100, 2, 5, 40, 10]],
        G7, B7, (1, 0, 2), TWO_SRC_A2, ["outer_prefer_nonsource", "mid_direct"],
    ),
    (
        "two_sources_middle_single_source_continuation",
        [[73, 13, 89, 20, 23, 22, 40, 1, 1, 35],
         [97, 74, 9, 7, 10, 22, 16, 48, 37, 36],
         [13, 122, 86, 42, 25, 7, 1, 22, 22, 8]],
        G10, B10, (2, 0, 1), TWO_SRC_A2, ["mid_continue_single_source"],
    ),
    (
        "two_sources_middle_champion_move",
        [[100, 5, 40, 20, 20, 2, 2, 20, 12, 75, 30],
         [131, 100, 10, 4, 4, 20, 20, 5, 5, 2, 10],
         [130, 131, 96, 2, 2, 5, 2, 30, 18, 2, 12]],
        G11, B11, (1, 0, 2), TWO_SRC_A2,
        ["trimmed_winner_content", "mid_champion_move"],
    ),
    (
        "two_sources_middle_double_champion_rotation",
        [[100, 111, 40, 24, 16, 2, 2, 20, 12, 75, 26],
         [131, 100, 10, 4, 4, 20, 20, 5, 5, 2, 10],
         [130, 131, 96, 2, 2, 5, 2, 30, 18, 2, 12]],
        G11, B11, (1, 0, 2), TWO_SRC_A2,
        ["trimmed_winner_content", "loser_unique_champion", "mid_double_rotation"],
    ),
]


def load_case(rows, goods, bundles):
    inst = Instance.from_rows(rows, goods=goods)
    assigned = {g for b in bundles for g in b}
    alloc = Allocation(
        tuple(frozenset(b) for b in bundles),
        frozenset(inst.goods) - assigned,
    )
    return inst, alloc


@pytest.mark.parametrize(
    "name,rows,goods,bundles,order,expected_label,expected_marks",
    CASES,
    ids=[c[0] for c in CASES],
)
def test_dispatch_case(name, rows, goods, bundles, order, expected_label, expected_marks):
    inst, alloc = load_case(rows, goods, bundles)
    val = PerturbedValuation(inst)
    assert is_efx(val, alloc), "fixture state must be EFX"
    assert envy_graph(val, alloc).find_cycle() is None
    assert not champion_graph(val, alloc, min(alloc.pool, key=inst.good_index)).self_champions()

    engine = _Engine(inst, order)
    engine.alloc = alloc
    diagnostics.reset()
    label, good, out = engine.dispatch()

    assert label == expected_label
    snapshot = diagnostics.snapshot()
    for mark in expected_marks:
        assert snapshot.get(mark), f"expected checkpoint {mark}, saw {sorted(snapshot)}"
    assert is_efx(val, out)
    assert lex_dominates(val, order, out, alloc)
    assert out.universe == alloc.universe


def test_fixture_bank_covers_every_deep_label():
    assert {c[5] for c in CASES} == {
        THREE_SRC_2CYCLE, THREE_SRC_3CYCLE, TWO_SRC_QUICK, TWO_SRC_A13, TWO_SRC_A2,
    }


def test_kappa_tie_prefers_the_envying_source():
    # Two smallest-subset sizes tie, so the envying source (structural role 1)
    # must be picked as the winner and receive the non-source's bundle.
    rows = [[100, 5, 105, 40, 2, 40, 10],
            [132, 100, 5, 5, 40, 2, 10],
            [5, 132, 100, 2, 5, 40, 10]]
    inst, alloc = load_case(rows, G7, B7)
    val = PerturbedValuation(inst)
    engine = _Engine(inst, (1, 0, 2))
    engine.alloc = alloc
    label, good, out = engine.dispatch()
    assert label == TWO_SRC_A2
    assert out.bundles[0] == frozenset({"b3", "f3"})
