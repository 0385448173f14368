"""Envy graphs, champions, and champion cuts.

The envy graph has an edge i -> j when i prefers j's bundle to its own.  For
an unallocated good g, agent i *champions* owner j when i needs the fewest
goods from X_j + g to beat its own bundle; the champion graph collects those
edges, and every owner has at least one champion (the owner itself always
prefers its bundle plus g in the strictly total perturbed order).

A champion's cut splits X_j + g into a lower half (the largest set of least
valuable goods whose removal the champion tolerates) and an upper half (the
smallest top segment the champion still prefers to its own bundle).  Greedy
top-k / bottom-k segments are optimal here only because values are additive
and, in the perturbed order, strictly positive: any k goods are worth at most
the k most valuable ones.  The test suite checks this greedy choice against
exhaustive subset search on small instances.

These functions expect a valuation with a strict total order per agent
(:class:`~efx.instance.PerturbedValuation`); under ties, "most envious" and
cut boundaries would be ambiguous.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from . import diagnostics
from .allocation import Allocation, is_efx
from .errors import ContractError, SolverDefectError
from .instance import GoodId


class EnvyGraph:
    """Directed envy relation over agents; deterministic helpers for sources, cycles, paths."""

    def __init__(self, succ: Sequence[Iterable[int]]):
        self.succ: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(set(s))) for s in succ)
        self.n = len(self.succ)

    def has_edge(self, i: int, j: int) -> bool:
        return j in self.succ[i]

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in self.succ[i]]

    def sources(self) -> list[int]:
        envied = {j for _, j in self.edges}
        return [v for v in range(self.n) if v not in envied]

    def find_cycle(self) -> list[int] | None:
        """First cycle found by DFS from the lowest vertex, as an ordered vertex list."""
        color = [0] * self.n  # 0 new, 1 on stack, 2 done
        stack: list[int] = []

        def dfs(v: int) -> list[int] | None:
            color[v] = 1
            stack.append(v)
            for w in self.succ[v]:
                if color[w] == 1:
                    return stack[stack.index(w):]
                if color[w] == 0:
                    cyc = dfs(w)
                    if cyc is not None:
                        return cyc
            color[v] = 2
            stack.pop()
            return None

        for v in range(self.n):
            if color[v] == 0:
                cyc = dfs(v)
                if cyc is not None:
                    return cyc
        return None

    def is_acyclic(self) -> bool:
        return self.find_cycle() is None

    def shortest_path(self, start: int, goal: int) -> list[int] | None:
        """BFS path along envy edges, expanding lower-indexed vertices first."""
        if start == goal:
            return [start]
        prev: dict[int, int] = {start: start}
        frontier = [start]
        while frontier:
            nxt = []
            for v in frontier:
                for w in self.succ[v]:
                    if w not in prev:
                        prev[w] = v
                        if w == goal:
                            path = [w]
                            while path[-1] != start:
                                path.append(prev[path[-1]])
                            return path[::-1]
                        nxt.append(w)
            frontier = nxt
        return None


def envy_graph(val, alloc: Allocation) -> EnvyGraph:
    n = alloc.num_agents
    own = [val.bundle(i, alloc.bundles[i]) for i in range(n)]
    succ = [
        [j for j in range(n) if j != i and val.bundle(i, alloc.bundles[j]) > own[i]]
        for i in range(n)
    ]
    return EnvyGraph(succ)


# -- envy measure and champions ----------------------------------------------

def _descending(val, agent: int, goods: Iterable[GoodId]) -> list[GoodId]:
    return sorted(goods, key=lambda g: (val.good(agent, g), g), reverse=True)


def smallest_beating_subset(val, agent: int, goods: Iterable[GoodId], threshold):
    """Smallest-cardinality subset of `goods` the agent values above `threshold`, or None.

    Takes the most valuable goods first; with additive non-negative values no
    subset of equal size can be worth more, so the first prefix that clears
    the threshold has minimum cardinality.
    """
    goods = set(goods)
    total = val.bundle(agent, goods)
    if not total > threshold:
        return None
    picked: set[GoodId] = set()
    running = val.bundle(agent, ())
    for g in _descending(val, agent, goods):
        picked.add(g)
        running = running + val.good(agent, g)
        if running > threshold:
            return frozenset(picked)
    raise SolverDefectError("prefix scan missed a subset it proved to exist")


def smallest_envy_size(val, alloc: Allocation, agent: int, goods: Iterable[GoodId]) -> int | None:
    """Size of the smallest subset of `goods` the agent prefers to its own bundle, or None."""
    subset = smallest_beating_subset(val, agent, goods, val.bundle(agent, alloc.bundles[agent]))
    return None if subset is None else len(subset)


def most_envious(val, alloc: Allocation, goods: Iterable[GoodId]) -> list[int]:
    """Agents attaining the minimum smallest-envy size for `goods` (empty if nobody envies)."""
    goods = set(goods)
    sizes = {}
    for i in range(alloc.num_agents):
        k = smallest_envy_size(val, alloc, i, goods)
        if k is not None:
            sizes[i] = k
    if not sizes:
        return []
    best = min(sizes.values())
    return sorted(i for i, k in sizes.items() if k == best)


class ChampionGraph:
    """Champion edges (i, j) for a fixed unallocated good: i is most envious of X_j + g."""

    def __init__(self, edges: Iterable[tuple[int, int]], n: int):
        self.edges = frozenset(edges)
        self.n = n

    def has_edge(self, i: int, j: int) -> bool:
        return (i, j) in self.edges

    def champions_of(self, j: int) -> list[int]:
        return sorted(i for i, owner in self.edges if owner == j)

    def self_champions(self) -> list[int]:
        return sorted(i for i, j in self.edges if i == j)


def champion_analysis(val, alloc: Allocation, g: GoodId) -> tuple[ChampionGraph, dict]:
    """Champion graph for g plus the full smallest-envy-size table it derives from.

    The table maps owner -> agent -> size (None when the agent does not envy
    the owner's bundle plus g).
    """
    if g not in alloc.pool:
        raise ContractError(f"good {g!r} is not unallocated")
    n = alloc.num_agents
    edges = []
    sizes: dict[int, dict[int, int | None]] = {}
    for j in range(n):
        pot = alloc.bundles[j] | {g}
        sizes[j] = {i: smallest_envy_size(val, alloc, i, pot) for i in range(n)}
        known = [k for k in sizes[j].values() if k is not None]
        if not known:
            raise SolverDefectError(f"no champion for owner {j}: owner must envy its bundle plus {g!r}")
        best = min(known)
        edges.extend((i, j) for i in range(n) if sizes[j][i] == best)
    return ChampionGraph(edges, n), sizes


def champion_graph(val, alloc: Allocation, g: GoodId) -> ChampionGraph:
    return champion_analysis(val, alloc, g)[0]


@dataclass(frozen=True)
class ChampionCut:
    """Split of X_owner + good into the champion's tolerated lower half and kept upper half."""

    champion: int
    owner: int
    good: GoodId
    lower: frozenset[GoodId]
    upper: frozenset[GoodId]


def champion_cut(val, alloc: Allocation, champion: int, owner: int, g: GoodId) -> ChampionCut:
    """Cut X_owner + g for a champion; checks the structural facts the split guarantees."""
    pot = alloc.bundles[owner] | {g}
    champs = most_envious(val, alloc, pot)
    if champion not in champs:
        raise ContractError(
            f"agent {champion} is not a most envious agent for bundle of {owner} plus {g!r}"
        )
    k = smallest_envy_size(val, alloc, champion, pot)
    ascending = _descending(val, champion, pot)[::-1]
    lower = frozenset(ascending[: len(pot) - k])
    upper = frozenset(ascending[len(pot) - k:])
    cut = ChampionCut(champion, owner, g, lower, upper)

    _check_cut(val, alloc, cut, k, owner_self_champions=(owner in champs))
    return cut


def _check_cut(val, alloc: Allocation, cut: ChampionCut, k: int, owner_self_champions: bool) -> None:
    i, j, g = cut.champion, cut.owner, cut.good
    own = val.bundle(i, alloc.bundles[i])
    if len(cut.upper) != k:
        raise SolverDefectError("upper half size disagrees with the smallest envy size")
    if not val.bundle(i, cut.upper) > own:
        raise SolverDefectError("champion does not prefer the upper half")
    # Minimality: dropping anything from the upper half loses the preference,
    # for every agent (no smaller subset can beat any agent's own bundle).
    for h in cut.upper:
        rest = cut.upper - {h}
        for agent in range(alloc.num_agents):
            if val.bundle(agent, rest) > val.bundle(agent, alloc.bundles[agent]):
                raise SolverDefectError(
                    f"agent {agent} prefers a sub-minimal part of the cut of ({i}, {j})"
                )
    diagnostics.record("cut_upper_minimal")

    if not val.bundle(i, alloc.bundles[j]) > own:
        # Champion does not envy the owner: the lower half avoids g and is
        # worth less than g to the champion.
        if g in cut.lower or not cut.lower <= alloc.bundles[j]:
            raise SolverDefectError("non-envying champion's lower half should avoid the new good")
        if not val.good(i, g) > val.bundle(i, cut.lower):
            raise SolverDefectError("non-envying champion should value the new good above the lower half")
        diagnostics.record("cut_lower_below_good")
    if not owner_self_champions:
        # Owner keeps at least the value of g in the lower half.
        if not cut.lower:
            raise SolverDefectError("lower half empty although the owner is not a self-champion")
        if val.good(j, g) > val.bundle(j, cut.lower):
            raise SolverDefectError("owner values the new good above its lower half")
        diagnostics.record("cut_lower_covers_good")


def favorite_upper_exceeds(val, alloc: Allocation, cut_a: ChampionCut, cut_b: ChampionCut) -> bool:
    """Check that cut_a's champion prefers its own upper half (minus the good) to cut_b's.

    Applies when both champions do not envy their owners and cut_a's champion
    does not champion cut_b's owner; callers assert the result.
    """
    i = cut_a.champion
    a = val.bundle(i, cut_a.upper - {cut_a.good})
    b = val.bundle(i, cut_b.upper - {cut_b.good})
    diagnostics.record("upper_half_preference")
    return a > b


# -- envy-cycle elimination ----------------------------------------------------

def eliminate_envy_cycles(val, alloc: Allocation) -> Allocation:
    """Rotate bundles along envy cycles until the envy graph is acyclic.

    Every agent on a rotated cycle receives the bundle it envied, so each
    rotation strictly improves all agents on the cycle and leaves the rest
    untouched; bundles are only permuted, so an EFX input stays EFX.
    """
    if not is_efx(val, alloc):
        raise ContractError("cycle elimination expects an EFX allocation")
    while True:
        graph = envy_graph(val, alloc)
        cycle = graph.find_cycle()
        if cycle is None:
            return alloc
        bundles = list(alloc.bundles)
        for pos, agent in enumerate(cycle):
            bundles[agent] = alloc.bundles[cycle[(pos + 1) % len(cycle)]]
        rotated = alloc.with_bundles(bundles)
        for agent in cycle:
            if not val.bundle(agent, rotated.bundles[agent]) > val.bundle(agent, alloc.bundles[agent]):
                raise SolverDefectError("cycle rotation failed to improve an agent on the cycle")
        alloc = rotated
