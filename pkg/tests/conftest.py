from __future__ import annotations

import random

import pytest

from efx.allocation import Allocation
from efx.cli import generate_instance
from efx.counterexamples import (
    dominance_barrier_instance,
    dominance_barrier_partial,
)
from efx.instance import Instance


@pytest.fixture(scope="session")
def barrier_instance() -> Instance:
    return dominance_barrier_instance()


@pytest.fixture(scope="session")
def barrier_partial(barrier_instance) -> Allocation:
    return dominance_barrier_partial()


@pytest.fixture(scope="session")
def intro_instance() -> Instance:
    """Two agents, three goods, identical values (1, 1, 2)."""
    return Instance.from_rows([[1, 1, 2], [1, 1, 2]])


def random_instance(seed: int, agents: int = 3, goods: int | None = None,
                    max_value: int = 20) -> Instance:
    rng = random.Random(seed)
    m = goods if goods is not None else rng.randint(1, 8)
    return generate_instance(agents, m, max_value, seed)


def random_tied_instance(seed: int, agents: int = 3, goods: int | None = None) -> Instance:
    """Small value range plus duplicated columns, to force plenty of exact ties."""
    rng = random.Random(seed)
    m = goods if goods is not None else rng.randint(2, 7)
    rows = [[rng.randint(0, 3) for _ in range(m)] for _ in range(agents)]
    dup = rng.randrange(m)
    for row in rows:
        row[dup] = row[(dup + 1) % m]
    return Instance.from_rows(rows)


def random_partial_allocation(inst: Instance, seed: int) -> Allocation:
    rng = random.Random(seed)
    bundles = [set() for _ in inst.agents]
    pool = set()
    for g in inst.goods:
        slot = rng.randrange(inst.num_agents + 1)
        if slot == inst.num_agents:
            pool.add(g)
        else:
            bundles[slot].add(g)
    return Allocation(tuple(frozenset(b) for b in bundles), frozenset(pool))
