"""Instances, exact values, and the symbolic tie-breaking order.

An instance is an agents x goods matrix of exact non-negative values
(Fractions, or eps-polynomials from :mod:`efx.epspoly`).  All arithmetic in
this package is exact; floats are rejected on input and never produced.

Bundle comparisons for the allocation procedure use a *perturbed* order: each
bundle is valued by the pair ``(sum of entries, sum of 2**j over member
goods)`` compared lexicographically, where j is the good's 1-based position
in the instance.  Distinct bundles always differ in the second component, so
the perturbed order is a strict total order per agent, and it refines every
strict comparison of the raw sums.  This is the exact limit of adding an
infinitesimal bonus of 2**j to good j, realized without picking a concrete
bonus size.  Raw ("base") sums remain available for the enumeration oracle
and welfare computations, where ties are meaningful.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Any, Iterable, Mapping

from .epspoly import EpsPoly
from .errors import InputError

GoodId = str

LESS, EQUAL, GREATER = -1, 0, 1


def value_sign(v) -> int:
    """Sign of an exact value (Fraction/int, or EpsPoly in the eps -> 0+ order)."""
    if isinstance(v, EpsPoly):
        return v.sign()
    return (v > 0) - (v < 0)


def parse_value(raw: Any):
    """Parse a matrix entry: int, exact-rational string like "2/3", or an eps-poly mapping."""
    if isinstance(raw, bool):
        raise InputError(f"value entries must be numbers, got {raw!r}")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, str):
        try:
            return Fraction(raw)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse rational value {raw!r}: {exc}") from exc
    if isinstance(raw, Mapping):
        try:
            return EpsPoly.from_json(raw)
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse eps-polynomial value {raw!r}: {exc}") from exc
    if isinstance(raw, float):
        raise InputError(
            f"float value {raw!r} rejected: use an integer or an exact string like \"1/3\""
        )
    raise InputError(f"unsupported value entry {raw!r}")


def value_to_json(v) -> Any:
    if isinstance(v, EpsPoly):
        return v.to_json()
    v = Fraction(v)
    return int(v) if v.denominator == 1 else str(v)


class Instance:
    """An immutable fair-division instance: ordered goods and one value row per agent."""

    def __init__(self, goods: Iterable[GoodId], values: Iterable[Iterable[Any]],
                 comment: str | None = None):
        self.goods: tuple[GoodId, ...] = tuple(goods)
        self.values: tuple[tuple[Any, ...], ...] = tuple(tuple(row) for row in values)
        self.comment = comment

        if len(set(self.goods)) != len(self.goods):
            raise InputError("duplicate good identifiers")
        for g in self.goods:
            if not isinstance(g, str) or not g:
                raise InputError(f"good identifiers must be non-empty strings, got {g!r}")
        if not self.values:
            raise InputError("instance needs at least one agent row")
        for row in self.values:
            if len(row) != len(self.goods):
                raise InputError(
                    f"value row has {len(row)} entries for {len(self.goods)} goods"
                )
            for v in row:
                if value_sign(v) < 0:
                    raise InputError(f"negative value {v!r}")
        # 1-based position of each good; this index feeds the 2**j tie-break key,
        # so it must be stable across runs.
        self._index: dict[GoodId, int] = {g: j + 1 for j, g in enumerate(self.goods)}

    @property
    def num_agents(self) -> int:
        return len(self.values)

    @property
    def num_goods(self) -> int:
        return len(self.goods)

    @property
    def agents(self) -> range:
        return range(self.num_agents)

    def good_index(self, g: GoodId) -> int:
        """1-based position of good g in the input order."""
        try:
            return self._index[g]
        except KeyError:
            raise InputError(f"unknown good {g!r}") from None

    def key_of(self, goods: Iterable[GoodId]) -> int:
        """Tie-break key of a bundle: sum of 2**j over member goods (distinct subset sums)."""
        return sum(1 << self.good_index(g) for g in goods)

    def value_of(self, agent: int, g: GoodId):
        return self.values[agent][self.good_index(g) - 1]

    def sorted_goods(self, goods: Iterable[GoodId]) -> list[GoodId]:
        return sorted(goods, key=self.good_index)

    def has_identical_valuations(self) -> bool:
        return all(row == self.values[0] for row in self.values)

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[Any]], goods: Iterable[GoodId] | None = None,
                  comment: str | None = None) -> "Instance":
        rows = [[parse_value(v) if not isinstance(v, (Fraction, EpsPoly)) else v for v in row]
                for row in rows]
        if goods is None:
            width = len(rows[0]) if rows else 0
            goods = [f"g{j + 1}" for j in range(width)]
        return cls(goods, rows, comment=comment)

    def __eq__(self, other):
        return (isinstance(other, Instance)
                and self.goods == other.goods
                and self.values == other.values
                and self.comment == other.comment)

    def __repr__(self):
        return f"Instance({self.num_agents} agents, {self.num_goods} goods)"


@total_ordering
@dataclass(frozen=True)
class PerturbedValue:
    """A bundle value in the perturbed order: exact base sum plus the 2**j tie-break key.

    Ordering is lexicographic on (base, key).  Two bundles share a key only if
    they are the same set, so distinct bundles never compare equal.
    """

    base: Any
    key: int

    def __add__(self, other: "PerturbedValue") -> "PerturbedValue":
        return PerturbedValue(self.base + other.base, self.key + other.key)

    def __eq__(self, other):
        if not isinstance(other, PerturbedValue):
            return NotImplemented
        return self.base == other.base and self.key == other.key

    def __lt__(self, other):
        if not isinstance(other, PerturbedValue):
            return NotImplemented
        if self.base != other.base:
            return self.base < other.base
        return self.key < other.key

    def __hash__(self):
        return hash((self.base, self.key))

    def to_json(self) -> dict:
        return {"value": str(self.base), "key": self.key}


class BaseValuation:
    """Bundle values as raw exact sums; ties between distinct bundles are possible."""

    perturbed = False

    def __init__(self, inst: Instance):
        self.inst = inst

    @property
    def num_agents(self) -> int:
        return self.inst.num_agents

    def good(self, agent: int, g: GoodId):
        return self.inst.value_of(agent, g)

    def bundle(self, agent: int, goods: Iterable[GoodId]):
        total = Fraction(0)
        for g in goods:
            total = total + self.inst.value_of(agent, g)
        return total


class PerturbedValuation:
    """Bundle values in the perturbed (strictly total) order used by the solver."""

    perturbed = True

    def __init__(self, inst: Instance):
        self.inst = inst

    @property
    def num_agents(self) -> int:
        return self.inst.num_agents

    def good(self, agent: int, g: GoodId) -> PerturbedValue:
        return PerturbedValue(self.inst.value_of(agent, g), 1 << self.inst.good_index(g))

    def bundle(self, agent: int, goods: Iterable[GoodId]) -> PerturbedValue:
        total = Fraction(0)
        key = 0
        for g in goods:
            total = total + self.inst.value_of(agent, g)
            key += 1 << self.inst.good_index(g)
        return PerturbedValue(total, key)


def perturbed_value(inst: Instance, agent: int, goods: Iterable[GoodId]) -> PerturbedValue:
    """Value of a bundle for one agent in the perturbed order."""
    return PerturbedValuation(inst).bundle(agent, goods)


def compare_bundles(inst: Instance, agent: int, left: Iterable[GoodId],
                    right: Iterable[GoodId]) -> int:
    """Strict perturbed comparison: GREATER/LESS, EQUAL only when the bundles are the same set."""
    a = perturbed_value(inst, agent, set(left))
    b = perturbed_value(inst, agent, set(right))
    if a == b:
        return EQUAL
    return GREATER if a > b else LESS


# -- JSON ------------------------------------------------------------------

def instance_from_json(doc: Any) -> Instance:
    if not isinstance(doc, Mapping):
        raise InputError("instance document must be a JSON object")
    goods = doc.get("goods")
    values = doc.get("values")
    if not isinstance(goods, list) or not isinstance(values, list):
        raise InputError('instance document needs "goods" and "values" arrays')
    agents = doc.get("agents", len(values))
    if agents != len(values):
        raise InputError(f'"agents" is {agents} but {len(values)} value rows were given')
    rows = []
    for row in values:
        if not isinstance(row, list):
            raise InputError("each value row must be an array")
        rows.append([parse_value(v) for v in row])
    comment = doc.get("comment")
    if comment is not None and not isinstance(comment, str):
        raise InputError('"comment" must be a string')
    return Instance(goods, rows, comment=comment)


def instance_to_json(inst: Instance) -> dict:
    doc: dict[str, Any] = {}
    if inst.comment is not None:
        doc["comment"] = inst.comment
    doc["agents"] = inst.num_agents
    doc["goods"] = list(inst.goods)
    doc["values"] = [[value_to_json(v) for v in row] for row in inst.values]
    return doc


def parse_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from exc
    return instance_from_json(doc)


def serialize_instance(inst: Instance) -> str:
    return json.dumps(instance_to_json(inst), indent=2)
