"""Bundled three-agent, seven-good counterexample instances.

Two instances ship with the package, each paired with the partial allocation
({g2,g3,g4}, {g1,g5}, {g6}) that leaves g7 unallocated:

* the *dominance barrier*: integer values for which no complete EFX
  allocation Pareto-dominates the partial allocation, showing that a solver
  cannot always make progress on the Pareto front alone;
* the *welfare barrier*: values polynomial in an infinitesimal eps for which
  every complete EFX allocation has strictly lower Nash welfare than the
  partial allocation, refuting the conjecture that adding a good never forces
  the achievable EFX Nash welfare down.

The CLI exposes these as ``efx repro table1`` and ``efx repro table2``.
"""

from __future__ import annotations

from .allocation import Allocation
from .epspoly import eps
from .instance import Instance

PARTIAL_BUNDLES = (("g2", "g3", "g4"), ("g1", "g5"), ("g6",))


def _partial(inst: Instance) -> Allocation:
    return Allocation(
        tuple(frozenset(b) for b in PARTIAL_BUNDLES),
        frozenset(inst.goods) - {g for b in PARTIAL_BUNDLES for g in b},
    )


def dominance_barrier_instance() -> Instance:
    return Instance.from_rows(
        [
            [8, 2, 12, 2, 0, 17, 1],
            [5, 0, 9, 4, 10, 0, 3],
            [0, 0, 0, 0, 9, 10, 2],
        ],
        comment="bundled instance: partial EFX allocation with no Pareto-dominating complete EFX allocation",
    )


def dominance_barrier_partial() -> Allocation:
    return _partial(dominance_barrier_instance())


def welfare_barrier_instance() -> Instance:
    e = eps
    return Instance.from_rows(
        [
            [e(3) + e(5, 6), e(5, 2), 10 - e(3), e(3), 10 - e(3, 2), 10 + e(5, 3), e(5)],
            [e(1), 0, 10 - e(2) + e(6), e(2, 2), 10, 0, e(1) - e(2)],
            [0, 0, 0, 0, 10 - e(4), 10, e(4, 2)],
        ],
        comment="bundled instance: partial EFX allocation with higher Nash welfare than any complete EFX allocation",
    )


def welfare_barrier_partial() -> Allocation:
    return _partial(welfare_barrier_instance())


def welfare_barrier_reference_complete() -> Allocation:
    """A complete EFX allocation of the welfare-barrier instance, used as a sanity anchor."""
    return Allocation(
        (frozenset({"g6"}), frozenset({"g3", "g4", "g7"}), frozenset({"g1", "g2", "g5"})),
        frozenset(),
    )
