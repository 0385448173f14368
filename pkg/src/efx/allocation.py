"""Partial allocations and fairness predicates.

An allocation assigns each agent a bundle of goods and keeps the rest in an
unallocated pool ("charity").  The predicates are generic over a valuation
view: pass a :class:`~efx.instance.PerturbedValuation` for the strictly total
order the solver needs, or a :class:`~efx.instance.BaseValuation` for raw
sums with ties (how the enumeration oracle and the welfare statements work).

Strong envy of i toward bundle S means some single removal from S still
leaves it preferable to i's own bundle; an allocation is EFX exactly when no
agent strongly envies another's bundle.  With additive non-negative values,
removing the envier's least valuable good maximizes what is left, so each
pair needs only one comparison.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

from .errors import InputError
from .instance import BaseValuation, GoodId, Instance

AgentOrder = tuple[int, ...]


@dataclass(frozen=True)
class Allocation:
    """Disjoint per-agent bundles plus the pool of unallocated goods."""

    bundles: tuple[frozenset[GoodId], ...]
    pool: frozenset[GoodId]

    def __post_init__(self):
        seen: set[GoodId] = set()
        for b in self.bundles:
            if b & seen:
                raise InputError(f"goods allocated twice: {sorted(b & seen)}")
            seen |= b
        if seen & self.pool:
            raise InputError(f"goods both allocated and pooled: {sorted(seen & self.pool)}")

    @property
    def num_agents(self) -> int:
        return len(self.bundles)

    @property
    def universe(self) -> frozenset[GoodId]:
        out = set(self.pool)
        for b in self.bundles:
            out |= b
        return frozenset(out)

    @classmethod
    def empty(cls, inst: Instance) -> "Allocation":
        return cls(tuple(frozenset() for _ in inst.agents), frozenset(inst.goods))

    @classmethod
    def from_assignment(cls, inst: Instance, assignment: Sequence[int]) -> "Allocation":
        """Complete allocation from a goods-indexed vector of agent indices."""
        if len(assignment) != inst.num_goods:
            raise InputError("assignment length does not match the number of goods")
        buckets: list[set[GoodId]] = [set() for _ in inst.agents]
        for g, agent in zip(inst.goods, assignment):
            buckets[agent].add(g)
        return cls(tuple(frozenset(b) for b in buckets), frozenset())

    def with_bundles(self, new_bundles: Sequence[Iterable[GoodId]]) -> "Allocation":
        """Rebundle over the same good universe; whatever is not assigned returns to the pool."""
        bundles = tuple(frozenset(b) for b in new_bundles)
        assigned: set[GoodId] = set()
        for b in bundles:
            assigned |= b
        universe = self.universe
        if not assigned <= universe:
            raise InputError(f"unknown goods in rebundle: {sorted(assigned - universe)}")
        return Allocation(bundles, frozenset(universe - assigned))

    def is_complete(self, inst: Instance) -> bool:
        return not self.pool and self.universe == frozenset(inst.goods)

    def assignment(self, inst: Instance) -> tuple[int, ...]:
        """Inverse of :meth:`from_assignment`; only meaningful for complete allocations."""
        owner: dict[GoodId, int] = {}
        for i, b in enumerate(self.bundles):
            for g in b:
                owner[g] = i
        return tuple(owner[g] for g in inst.goods)

    def validate_for(self, inst: Instance) -> None:
        if len(self.bundles) != inst.num_agents:
            raise InputError(
                f"allocation has {len(self.bundles)} bundles for {inst.num_agents} agents"
            )
        unknown = self.universe - frozenset(inst.goods)
        if unknown:
            raise InputError(f"unknown goods: {sorted(unknown)}")


# -- envy predicates ---------------------------------------------------------

def _least_valuable(val, agent: int, goods: frozenset[GoodId]) -> GoodId:
    return min(goods, key=lambda g: (val.good(agent, g), g))


def strong_envy(val, alloc: Allocation, i: int, j: int) -> bool:
    """True iff i prefers j's bundle minus its (for i) least valuable good over its own."""
    other = alloc.bundles[j]
    if not other:
        return False
    drop = _least_valuable(val, i, other)
    return val.bundle(i, other - {drop}) > val.bundle(i, alloc.bundles[i])


def envies(val, alloc: Allocation, i: int, j: int) -> bool:
    return val.bundle(i, alloc.bundles[j]) > val.bundle(i, alloc.bundles[i])


def weak_envy(val, alloc: Allocation, i: int, j: int) -> bool:
    """Envy that disappears after removing the least valuable good."""
    return envies(val, alloc, i, j) and not strong_envy(val, alloc, i, j)


def strong_envy_pairs(val, alloc: Allocation) -> list[tuple[int, int]]:
    n = alloc.num_agents
    return [(i, j) for i in range(n) for j in range(n) if i != j and strong_envy(val, alloc, i, j)]


def strong_envy_witnesses(val, alloc: Allocation) -> list[tuple[int, int, GoodId]]:
    """All (i, j, g) with g in X_j such that X_j minus g is still preferred by i over X_i."""
    out = []
    n = alloc.num_agents
    for i in range(n):
        own = val.bundle(i, alloc.bundles[i])
        for j in range(n):
            if i == j:
                continue
            for g in sorted(alloc.bundles[j]):
                if val.bundle(i, alloc.bundles[j] - {g}) > own:
                    out.append((i, j, g))
    return out


def is_efx(val, alloc: Allocation) -> bool:
    n = alloc.num_agents
    return not any(strong_envy(val, alloc, i, j) for i in range(n) for j in range(n) if i != j)


def is_ef1(val, alloc: Allocation) -> bool:
    """Envy-free up to one good: removing i's most valuable good from X_j kills the envy."""
    n = alloc.num_agents
    for i in range(n):
        own = val.bundle(i, alloc.bundles[i])
        for j in range(n):
            if i == j or not envies(val, alloc, i, j):
                continue
            other = alloc.bundles[j]
            best = max(other, key=lambda g: (val.good(i, g), g))
            if val.bundle(i, other - {best}) > own:
                return False
    return True


def is_envy_free(val, alloc: Allocation) -> bool:
    n = alloc.num_agents
    return not any(envies(val, alloc, i, j) for i in range(n) for j in range(n) if i != j)


# -- welfare and dominance ---------------------------------------------------

def nash_product(inst: Instance, alloc: Allocation):
    """Product of the agents' raw bundle values (the n-th power of Nash welfare).

    Always computed over base values: the welfare statements this package
    reproduces concern true valuations, not the tie-broken order.
    """
    base = BaseValuation(inst)
    total = Fraction(1)
    for i in inst.agents:
        total = total * base.bundle(i, alloc.bundles[i])
    return total


def potential(val, order: AgentOrder, alloc: Allocation) -> tuple:
    """The valuation triple of a fixed agent order, compared lexicographically."""
    return tuple(val.bundle(a, alloc.bundles[a]) for a in order)


def pareto_dominates(val, better: Allocation, worse: Allocation) -> bool:
    """Every agent at least as well off in `better`, at least one strictly."""
    strict = False
    for i in range(worse.num_agents):
        b = val.bundle(i, better.bundles[i])
        w = val.bundle(i, worse.bundles[i])
        if b < w:
            return False
        if b > w:
            strict = True
    return strict


def lex_dominates(val, order: AgentOrder, better: Allocation, worse: Allocation) -> bool:
    return potential(val, order, better) > potential(val, order, worse)


# -- JSON ---------------------------------------------------------------------

def allocation_from_json(doc: Any, inst: Instance) -> Allocation:
    if not isinstance(doc, Mapping):
        raise InputError("allocation document must be a JSON object")
    bundles_doc = doc.get("bundles")
    if not isinstance(bundles_doc, list):
        raise InputError('allocation document needs a "bundles" array')
    if len(bundles_doc) != inst.num_agents:
        raise InputError(
            f"allocation has {len(bundles_doc)} bundles for {inst.num_agents} agents"
        )
    bundles = []
    for row in bundles_doc:
        if not isinstance(row, list):
            raise InputError("each bundle must be an array of good identifiers")
        bundle = frozenset(row)
        if len(bundle) != len(row):
            raise InputError(f"bundle lists a good twice: {row}")
        bundles.append(bundle)
    assigned: set[GoodId] = set()
    for b in bundles:
        assigned |= b
    for g in assigned:
        inst.good_index(g)  # raises on unknown goods
    pool_doc = doc.get("pool")
    if pool_doc is None:
        pool = frozenset(inst.goods) - assigned
    else:
        if not isinstance(pool_doc, list):
            raise InputError('"pool" must be an array of good identifiers')
        pool = frozenset(pool_doc)
        for g in pool:
            inst.good_index(g)
        leftover = frozenset(inst.goods) - assigned - pool
        if leftover:
            raise InputError(f"goods neither allocated nor pooled: {sorted(leftover)}")
    alloc = Allocation(tuple(bundles), pool)
    alloc.validate_for(inst)
    return alloc


def allocation_to_json(alloc: Allocation, inst: Instance) -> dict:
    return {
        "bundles": [inst.sorted_goods(b) for b in alloc.bundles],
        "pool": inst.sorted_goods(alloc.pool),
    }


def parse_allocation(text: str, inst: Instance) -> Allocation:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from exc
    return allocation_from_json(doc, inst)


def serialize_allocation(alloc: Allocation, inst: Instance) -> str:
    return json.dumps(allocation_to_json(alloc, inst), indent=2)
