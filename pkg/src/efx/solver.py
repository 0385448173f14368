"""Constructive EFX solver for three agents with additive valuations.

Starting from the empty allocation (trivially EFX), each round produces
another EFX allocation whose valuation triple, read in a fixed agent order,
is strictly lexicographically larger.  The triple ranges over a finite set,
so the loop terminates, and it only stops once every good is allocated.

Round dispatch, in priority order:

1. Rotate away any envy cycles (everyone on a cycle strictly improves).
2. Pick the lowest-index unallocated good g.
3. If the envy graph has a single source, or some agent champions itself,
   shift bundles along an envy path to a champion and hand it the upper half
   of the source's bundle plus g (everyone on the path strictly improves).
4. Envy-free allocation (three sources): swap the champions' upper halves
   around a champion 2-cycle, or cyclically shift favorite upper halves
   around the champion 3-cycle, patching any strong envy that appears by
   substituting g for a lower half, and in the last resort carving a
   smallest bundle the middle agent prefers and handing out the rest.
5. Two sources: quick reductions to (3) or (4) when champions line up;
   otherwise the structural construction keyed to which role the fixed lead
   agent plays (see the handlers below).

Every intermediate allocation is checked to be EFX in the perturbed order,
and every round is checked to raise the potential; a failure of either is a
bug and raises SolverDefectError with the trace so far.  Being EFX in the
perturbed order implies EFX under the raw values, so the final complete
allocation is EFX in the ordinary sense as well.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import diagnostics
from .allocation import (
    AgentOrder,
    Allocation,
    allocation_to_json,
    envies,
    is_efx,
    potential,
    strong_envy,
    strong_envy_pairs,
)
from .errors import InputError, SolverDefectError
from .graphs import (
    champion_analysis,
    champion_cut,
    eliminate_envy_cycles,
    envy_graph,
    favorite_upper_exceeds,
    most_envious,
    smallest_beating_subset,
)
from .instance import GoodId, Instance, PerturbedValuation

CYCLE_ELIM = "CycleElim"
SINGLE_SOURCE = "SingleSource"
SELF_CHAMPION = "SelfChampion"
THREE_SRC_2CYCLE = "ThreeSrc2Cycle"
THREE_SRC_3CYCLE = "ThreeSrc3Cycle"
TWO_SRC_QUICK = "TwoSrcQuick"
TWO_SRC_A13 = "TwoSrcA13"
TWO_SRC_A2 = "TwoSrcA2"
IDENTICAL_BASELINE = "IdenticalBaseline"

ALL_CASE_LABELS = (
    CYCLE_ELIM,
    SINGLE_SOURCE,
    SELF_CHAMPION,
    THREE_SRC_2CYCLE,
    THREE_SRC_3CYCLE,
    TWO_SRC_QUICK,
    TWO_SRC_A13,
    TWO_SRC_A2,
    IDENTICAL_BASELINE,
)


@dataclass(frozen=True)
class StepRecord:
    iteration: int
    case: str
    good: GoodId | None
    phi_before: tuple
    phi_after: tuple
    allocation_after: Allocation
    graphs: dict | None = None  # envy/champion edges and envy-size tables seen at dispatch

    def to_json(self, inst: Instance) -> dict:
        return {
            "iteration": self.iteration,
            "case": self.case,
            "good": self.good,
            "phi_before": [v.to_json() for v in self.phi_before],
            "phi_after": [v.to_json() for v in self.phi_after],
            "allocation_after": allocation_to_json(self.allocation_after, inst),
            "graphs": self.graphs,
        }


@dataclass(frozen=True)
class SolveResult:
    allocation: Allocation
    trace: tuple[StepRecord, ...]
    agent_order: AgentOrder


def solve(inst: Instance, agent_order: AgentOrder | None = None) -> SolveResult:
    """Compute a complete EFX allocation for a three-agent instance.

    `agent_order` fixes the lexicographic potential (default: input order);
    it is held for the whole run.  Deterministic given the instance and order.
    """
    if inst.num_agents != 3:
        raise InputError(f"the solver handles exactly 3 agents, got {inst.num_agents}")
    if agent_order is None:
        agent_order = (0, 1, 2)
    agent_order = tuple(agent_order)
    if sorted(agent_order) != [0, 1, 2]:
        raise InputError(f"agent order must be a permutation of (0, 1, 2), got {agent_order}")
    return _Engine(inst, agent_order).run()


class _Engine:
    """One solver run: current allocation, fixed agent order, and the step trace."""

    def __init__(self, inst: Instance, order: AgentOrder):
        self.inst = inst
        self.val = PerturbedValuation(inst)
        self.order = order
        self.alloc = Allocation.empty(inst)
        self.records: list[StepRecord] = []
        self._snapshot: dict | None = None

    def check(self, cond: bool, message: str) -> None:
        if not cond:
            raise SolverDefectError(message, trace=self.records)

    def run(self) -> SolveResult:
        universe = frozenset(self.inst.goods)
        while self.alloc.pool:
            before = potential(self.val, self.order, self.alloc)
            label, good, nxt = self.dispatch()
            self.check(is_efx(self.val, nxt), f"{label}: produced a non-EFX allocation")
            after = potential(self.val, self.order, nxt)
            self.check(after > before, f"{label}: potential did not strictly increase")
            self.check(nxt.universe == universe, f"{label}: goods were lost or invented")
            self.records.append(
                StepRecord(len(self.records) + 1, label, good, before, after, nxt,
                           self._snapshot)
            )
            self.alloc = nxt
        return SolveResult(self.alloc, tuple(self.records), self.order)

    # -- dispatch ---------------------------------------------------------

    def dispatch(self) -> tuple[str, GoodId | None, Allocation]:
        graph = envy_graph(self.val, self.alloc)
        self._snapshot = {
            "envy_edges": [list(e) for e in graph.edges],
            "sources": graph.sources(),
        }
        if graph.find_cycle() is not None:
            return CYCLE_ELIM, None, eliminate_envy_cycles(self.val, self.alloc)

        g = min(self.alloc.pool, key=self.inst.good_index)
        champions, envy_sizes = champion_analysis(self.val, self.alloc, g)
        self._snapshot["good"] = g
        self._snapshot["champion_edges"] = [list(e) for e in sorted(champions.edges)]
        self._snapshot["envy_sizes"] = {
            str(owner): {str(agent): k for agent, k in table.items()}
            for owner, table in envy_sizes.items()
        }
        sources = graph.sources()

        if len(sources) == 1:
            return SINGLE_SOURCE, g, self.champion_path_move(self.alloc, sources[0], g)

        self_champs = champions.self_champions()
        if self_champs:
            s = self_champs[0]
            return SELF_CHAMPION, g, self.champion_path_move(self.alloc, s, g, champion=s)

        if len(sources) == 3:
            return self.three_sources(g, champions)
        self.check(len(sources) == 2, f"unexpected source count {len(sources)}")
        return self.two_sources(g, graph, champions)

    # -- champion path (single source / self-champion / quick reductions) --

    def champion_path_move(self, alloc: Allocation, source: int, g: GoodId,
                           champion: int | None = None) -> Allocation:
        """Shift bundles backward along an envy path from `source` to a champion of it.

        The champion receives the upper half of the source's bundle plus g;
        everyone on the path takes the bundle it envied.  All path agents
        strictly improve and nobody else changes.
        """
        candidates = most_envious(self.val, alloc, alloc.bundles[source] | {g})
        self.check(bool(candidates), "no champion for the source's bundle plus the new good")
        graph = envy_graph(self.val, alloc)
        if champion is None:
            reachable = [c for c in candidates if graph.shortest_path(source, c) is not None]
            self.check(bool(reachable), "no champion of the source is reachable from it")
            champion = reachable[0]
        path = graph.shortest_path(source, champion)
        self.check(path is not None, f"champion {champion} unreachable from source {source}")
        cut = champion_cut(self.val, alloc, champion, source, g)
        bundles = list(alloc.bundles)
        for pos in range(len(path) - 1):
            bundles[path[pos]] = alloc.bundles[path[pos + 1]]
        bundles[champion] = cut.upper
        return alloc.with_bundles(bundles)

    # -- three sources (envy-free allocation) -------------------------------

    def three_sources(self, g: GoodId, champions) -> tuple[str, GoodId, Allocation]:
        two_cycles = [
            (p, q)
            for p in range(3)
            for q in range(p + 1, 3)
            if champions.has_edge(p, q) and champions.has_edge(q, p)
        ]
        if two_cycles:
            p, q = two_cycles[0]
            r = 3 - p - q
            return THREE_SRC_2CYCLE, g, self.two_cycle_swap(self.alloc, p, q, r, g)

        # No 1- or 2-cycles, so every agent has a unique champion and the
        # champion edges form a 3-cycle.
        champ_of = []
        for j in range(3):
            champs = champions.champions_of(j)
            self.check(len(champs) == 1, f"owner {j} should have a unique champion, got {champs}")
            champ_of.append(champs[0])
        s1 = 0
        s2 = champ_of[s1]
        s3 = champ_of[s2]
        self.check({s1, s2, s3} == {0, 1, 2} and champ_of[s3] == s1,
                   "champion edges do not form a 3-cycle")
        return THREE_SRC_3CYCLE, g, self.three_cycle_shift(self.alloc, (s1, s2, s3), g)

    def two_cycle_swap(self, alloc: Allocation, p: int, q: int, r: int, g: GoodId) -> Allocation:
        """Champion 2-cycle between p and q, with r envying neither: swap upper halves.

        If the bystander r then strongly envies one of the swapped bundles,
        replace that bundle's lower half with g; nobody can strongly envy the
        resulting champion upper-half-plus-g bundle.
        """
        val = self.val
        self.check(not envies(val, alloc, p, q) and not envies(val, alloc, q, p),
                   "2-cycle champions must not envy each other")
        self.check(not envies(val, alloc, r, p) and not envies(val, alloc, r, q),
                   "the bystander must envy neither 2-cycle agent")
        cut_pq = champion_cut(val, alloc, p, q, g)
        cut_qp = champion_cut(val, alloc, q, p, g)
        upper_q = alloc.bundles[q] - cut_pq.lower  # q's upper half, championed by p
        upper_p = alloc.bundles[p] - cut_qp.lower
        self.check(favorite_upper_exceeds(val, alloc, cut_pq, cut_qp),
                   "champion p should prefer q's upper half to its own")
        self.check(favorite_upper_exceeds(val, alloc, cut_qp, cut_pq),
                   "champion q should prefer p's upper half to its own")

        bundles = list(alloc.bundles)
        bundles[p] = upper_q | cut_qp.lower
        bundles[q] = upper_p | cut_pq.lower
        swapped = alloc.with_bundles(bundles)
        if is_efx(val, swapped):
            diagnostics.record("swap_direct")
            return swapped

        pairs = strong_envy_pairs(val, swapped)
        self.check(set(pairs) <= {(r, p), (r, q)} and len(pairs) == 1,
                   f"only the bystander may strongly envy exactly one swapped bundle, got {pairs}")
        victim = pairs[0][1]
        if victim == q:
            bundles[q] = upper_p | {g}
        else:
            bundles[p] = upper_q | {g}
        diagnostics.record("swap_patched")
        return alloc.with_bundles(bundles)

    def three_cycle_shift(self, alloc: Allocation, roles: tuple[int, int, int],
                          g: GoodId) -> Allocation:
        """Champion 3-cycle: everyone takes its favorite upper half, then patch strong envy.

        `roles` lists the agents so that roles[i+1] is the unique champion of
        roles[i] (cyclically).
        """
        val = self.val

        def cuts_for(order: tuple[int, int, int]):
            s1, s2, s3 = order
            c21 = champion_cut(val, alloc, s2, s1, g)
            c32 = champion_cut(val, alloc, s3, s2, g)
            c13 = champion_cut(val, alloc, s1, s3, g)
            up1 = alloc.bundles[s1] - c21.lower
            up2 = alloc.bundles[s2] - c32.lower
            up3 = alloc.bundles[s3] - c13.lower
            return c21, c32, c13, up1, up2, up3

        s1, s2, s3 = roles
        c21, c32, c13, up1, up2, up3 = cuts_for(roles)
        self._check_shift_tables(roles, (c21, c32, c13), (up1, up2, up3))

        bundles = list(alloc.bundles)
        bundles[s1] = up3 | c21.lower
        bundles[s2] = up1 | c32.lower
        bundles[s3] = up2 | c13.lower
        shifted = alloc.with_bundles(bundles)
        if is_efx(val, shifted):
            diagnostics.record("shift_direct")
            return shifted

        forward = {(s1, s2), (s2, s3), (s3, s1)}
        pairs = set(strong_envy_pairs(val, shifted))
        self.check(pairs <= forward, f"strong envy against the shift direction: {pairs}")

        if len(pairs) == 3:
            # Strong envy all the way around: rotate the shifted bundles once more.
            rotated = [
                shifted.bundles[s2],  # for s1
                shifted.bundles[s3],  # for s2
                shifted.bundles[s1],  # for s3
            ]
            bundles = list(shifted.bundles)
            bundles[s1], bundles[s2], bundles[s3] = rotated
            diagnostics.record("shift_full_rotation")
            return shifted.with_bundles(bundles)

        # Re-anchor the roles so the strong edge leaves the first agent and
        # none enters it; scan the cyclic rotations in increasing order.
        for shift_by in range(3):
            cand = (roles[shift_by], roles[(shift_by + 1) % 3], roles[(shift_by + 2) % 3])
            if (cand[0], cand[1]) in pairs and (cand[2], cand[0]) not in pairs:
                break
        else:
            raise SolverDefectError("no rotation isolates the strong envy edge", self.records)
        s1, s2, s3 = cand
        c21, c32, c13, up1, up2, up3 = cuts_for(cand)

        # The first agent improved and still envies: its own upper half beats
        # the second's, and it values the second's lower half above its own.
        self.check(val.bundle(s1, up1) > val.bundle(s1, up2),
                   "envier should prefer its old upper half to the envied one")
        self.check(val.bundle(s1, c32.lower) > val.bundle(s1, c21.lower),
                   "envier should value the envied lower half above its own")
        diagnostics.record("shift_envier_ordering")

        bundles = list(alloc.bundles)
        bundles[s1] = up3 | c21.lower
        bundles[s2] = up1 | {g}
        bundles[s3] = up2 | c13.lower
        patched = alloc.with_bundles(bundles)
        if is_efx(val, patched):
            diagnostics.record("shift_patched")
            return patched

        pairs = set(strong_envy_pairs(val, patched))
        self.check(pairs == {(s2, s3)}, f"only the middle agent may still strongly envy, got {pairs}")
        self.check(val.bundle(s2, up2) > val.bundle(s2, up3),
                   "middle agent should prefer its old upper half to the third's")
        self.check(val.bundle(s2, c13.lower) > val.bundle(s2, c32.lower),
                   "middle agent should value the third's lower half above its own")
        diagnostics.record("shift_middle_ordering")

        # Give the middle agent the smallest top slice it prefers to its old
        # bundle, carved from the first upper half plus the third lower half.
        source_set = up1 | c13.lower
        own_before = val.bundle(s2, alloc.bundles[s2])
        self.check(val.bundle(s2, source_set) > own_before,
                   "carving pool should beat the middle agent's old bundle")
        slice_ = smallest_beating_subset(val, s2, source_set, own_before)
        self.check(slice_ is not None and g not in slice_, "carved slice must exist and avoid g")

        bundles = list(alloc.bundles)
        if val.bundle(s3, slice_) > val.bundle(s3, alloc.bundles[s3]):
            diagnostics.record("shift_slice_third")
            bundles[s1] = up3 | {g}
            bundles[s2] = alloc.bundles[s2]
            bundles[s3] = slice_
        else:
            diagnostics.record("shift_slice_middle")
            bundles[s1] = up3 | c32.lower
            bundles[s2] = slice_
            bundles[s3] = up2 | {g}
        return alloc.with_bundles(bundles)

    def _check_shift_tables(self, roles, cuts, uppers) -> None:
        """Upper/lower half orderings that must hold before the cyclic shift."""
        val, alloc = self.val, self.alloc
        s1, s2, s3 = roles
        c21, c32, c13 = cuts
        up1, up2, up3 = uppers
        gval = lambda a, cut: val.good(a, cut.good)

        for agent, mine, others in ((s1, up3, (up1, up2)), (s2, up1, (up2, up3)),
                                    (s3, up2, (up3, up1))):
            for other in others:
                self.check(val.bundle(agent, mine) > val.bundle(agent, other),
                           "championed upper half is not the favorite")
        for agent, above, below in ((s1, c21, c13), (s2, c32, c21), (s3, c13, c32)):
            self.check(val.bundle(agent, above.lower) > gval(agent, above),
                       "own lower half should beat the new good")
            self.check(gval(agent, below) > val.bundle(agent, below.lower),
                       "the new good should beat the championed lower half")
        diagnostics.record("shift_half_tables")

    # -- two sources --------------------------------------------------------

    def two_sources(self, g: GoodId, graph, champions) -> tuple[str, GoodId, Allocation]:
        sources = graph.sources()
        (t,) = [v for v in range(3) if v not in sources]
        enviers = [s for s in sources if graph.has_edge(s, t)]
        self.check(bool(enviers), "the non-source must be envied by some source")

        if len(enviers) == 2:
            champ_sources = [s for s in sources if champions.has_edge(t, s)]
            if champ_sources:
                alloc = self.champion_path_move(self.alloc, champ_sources[0], g, champion=t)
                return TWO_SRC_QUICK, g, alloc
            p, q = sorted(sources)
            self.check(champions.has_edge(p, q) and champions.has_edge(q, p),
                       "sources must champion each other when the non-source champions neither")
            return TWO_SRC_QUICK, g, self.two_cycle_swap(self.alloc, p, q, t, g)

        s1 = enviers[0]
        (s2,) = [s for s in sources if s != s1]
        if champions.has_edge(t, s1):
            return TWO_SRC_QUICK, g, self.champion_path_move(self.alloc, s1, g, champion=t)
        self.check(champions.has_edge(s2, s1), "the other source must champion the envier")
        if champions.has_edge(s1, s2):
            return TWO_SRC_QUICK, g, self.two_cycle_swap(self.alloc, s1, s2, t, g)
        self.check(champions.has_edge(t, s2), "the non-source must champion the other source")

        roles = (s1, s2, t)
        if self.order[0] == s2:
            return TWO_SRC_A2, g, self.two_sources_lead_middle(self.alloc, roles, g)
        return TWO_SRC_A13, g, self.two_sources_lead_outer(self.alloc, roles, g)

    def two_sources_lead_outer(self, alloc: Allocation, roles: tuple[int, int, int],
                               g: GoodId) -> Allocation:
        """Two sources, lead agent is the envying source or the non-source.

        Roles: s1 and s2 are the sources, s1 envies s3, s2 champions s1, s3
        champions s2.  Rotate: s1 takes s3's bundle, s2 takes s1's upper half
        plus s2's lower half, s3 takes its championed upper half plus g.  Any
        strong envy can only be s1 toward s2 and is resolved by carving.
        """
        val = self.val
        s1, s2, s3 = roles
        c21 = champion_cut(val, alloc, s2, s1, g)
        c32 = champion_cut(val, alloc, s3, s2, g)
        up1 = alloc.bundles[s1] - c21.lower
        up2 = alloc.bundles[s2] - c32.lower
        self.check(favorite_upper_exceeds(val, alloc, c21, c32),
                   "the middle agent should prefer the envier's upper half")

        bundles = list(alloc.bundles)
        bundles[s1] = alloc.bundles[s3]
        bundles[s2] = up1 | c32.lower
        bundles[s3] = up2 | {g}
        rotated = alloc.with_bundles(bundles)
        if is_efx(val, rotated):
            diagnostics.record("outer_direct")
            return rotated

        pairs = strong_envy_pairs(val, rotated)
        self.check(set(pairs) == {(s1, s2)},
                   f"only the envier may strongly envy the middle agent, got {pairs}")

        threshold = max(val.bundle(s2, up2 | {g}), val.bundle(s2, alloc.bundles[s3]))
        slice_ = smallest_beating_subset(val, s2, up1 | c32.lower, threshold)
        self.check(slice_ is not None, "the middle agent's own bundle should beat both alternatives")

        if not val.bundle(s1, slice_) > val.bundle(s1, alloc.bundles[s3]):
            diagnostics.record("outer_slice_middle")
            bundles = list(alloc.bundles)
            bundles[s1] = alloc.bundles[s3]
            bundles[s2] = slice_
            bundles[s3] = up2 | {g}
            return alloc.with_bundles(bundles)

        # The envier prefers the carved slice even to s3's bundle: give it the
        # slice and let the middle agent pick between the two leftovers.
        first_choice = up2 | {g}
        second_choice = alloc.bundles[s3]
        if val.bundle(s2, second_choice) > val.bundle(s2, first_choice):
            first_choice, second_choice = second_choice, first_choice
        bundles = list(alloc.bundles)
        bundles[s1] = slice_
        bundles[s2] = first_choice
        bundles[s3] = second_choice
        settled = alloc.with_bundles(bundles)

        lead = self.order[0]
        if lead == s1 or second_choice is not alloc.bundles[s3]:
            diagnostics.record("outer_slice_lead")
            return settled

        # Lead agent is s3 and kept exactly its old bundle: continue with a
        # single-source move on a good from the freed lower half, which
        # strictly improves s3.
        self.check(is_efx(val, settled), "intermediate allocation must be EFX before continuing")
        inner = envy_graph(val, settled)
        self.check(inner.sources() == [s3], "continuation expects the lead as the only source")
        self.check(bool(c21.lower), "the freed lower half should be non-empty")
        g2 = min(c21.lower, key=self.inst.good_index)
        self.check(g2 in settled.pool, "the freed lower half should be unallocated")
        diagnostics.record("outer_continue_single_source")
        return self.champion_path_move(settled, s3, g2)

    def two_sources_lead_middle(self, alloc: Allocation, roles: tuple[int, int, int],
                                g: GoodId) -> Allocation:
        """Two sources, lead agent is the non-envying source (middle role).

        The middle agent covets the envier's upper half plus g.  Give the
        non-source's bundle to whichever of the outer agents is easier to
        satisfy from it (the winner), let the loser pick between the old
        middle bundle and the coveted one, trim the winner's bundle until the
        loser tolerates it, and if that still strands the middle agent,
        finish with a champion move or the two-champion rotation.
        """
        val = self.val
        s1, s2, s3 = roles
        X = alloc.bundles
        c21 = champion_cut(val, alloc, s2, s1, g)
        self.check(bool(c21.lower), "the envier's lower half should be non-empty")
        coveted = (X[s1] - c21.lower) | {g}
        self.check(val.bundle(s2, coveted) > val.bundle(s2, X[s2]),
                   "the middle agent should prefer the envier's upper half plus g")

        for i in (s1, s3):
            self.check(
                val.bundle(i, X[s3]) > max(val.bundle(i, X[s2]), val.bundle(i, coveted)),
                "outer agents should prefer the non-source's bundle to both alternatives",
            )
        diagnostics.record("outer_prefer_nonsource")

        def need(i: int) -> int:
            threshold = max(val.bundle(i, coveted), val.bundle(i, X[s2]))
            subset = smallest_beating_subset(val, i, X[s3], threshold)
            self.check(subset is not None, "winner selection needs a beating subset")
            return len(subset)

        winner, loser = (s1, s3) if need(s1) <= need(s3) else (s3, s1)
        if val.bundle(loser, X[s2]) > val.bundle(loser, coveted):
            loser_pick, middle_pick = X[s2], coveted
        else:
            loser_pick, middle_pick = coveted, X[s2]

        def assemble(winner_bundle: frozenset[GoodId]) -> Allocation:
            bundles = list(alloc.bundles)
            bundles[winner] = winner_bundle
            bundles[loser] = loser_pick
            bundles[s2] = middle_pick
            return alloc.with_bundles(bundles)

        trimmed = frozenset(X[s3])
        last_removed: GoodId | None = None
        candidate = assemble(trimmed)
        if strong_envy(val, candidate, loser, winner):
            remaining = set(trimmed)
            while remaining and strong_envy(val, assemble(frozenset(remaining)), loser, winner):
                last_removed = min(remaining, key=lambda h: (val.good(winner, h), h))
                remaining.remove(last_removed)
            trimmed = frozenset(remaining)
            candidate = assemble(trimmed)
            self.check(
                not envies(val, candidate, winner, loser)
                and not envies(val, candidate, winner, s2),
                "after trimming, the winner should envy nobody",
            )
            diagnostics.record("trimmed_winner_content")
        self.check(is_efx(val, candidate), "candidate after winner trim must be EFX")

        if middle_pick is coveted:
            diagnostics.record("mid_direct")
            return candidate  # the lead agent already improved strictly

        g2 = min(c21.lower, key=self.inst.good_index)
        self.check(g2 in candidate.pool, "the freed lower half should be unallocated")

        if envies(val, candidate, loser, winner):
            # Envy path s2 -> loser -> winner with the lead as only source.
            inner = envy_graph(val, candidate)
            self.check(inner.sources() == sorted([s2]),
                       "continuation expects the lead as the only source")
            diagnostics.record("mid_continue_single_source")
            return self.champion_path_move(candidate, s2, g2)

        champs = most_envious(val, candidate, candidate.bundles[s2] | {g2})
        reachable = sorted(c for c in champs if c in (s2, loser))
        if reachable:
            diagnostics.record("mid_champion_move")
            return self.champion_path_move(candidate, s2, g2, champion=reachable[0])

        self.check(champs == [winner], f"the winner should champion the lead, got {champs}")
        self.check(last_removed is not None, "the deep case requires at least one trimmed good")
        champs_w = most_envious(val, candidate, candidate.bundles[winner] | {last_removed})
        self.check(champs_w == [loser], "the loser should uniquely champion the winner")
        diagnostics.record("loser_unique_champion")

        diagnostics.record("mid_double_rotation")
        cut_w = champion_cut(val, candidate, winner, s2, g2)
        cut_l = champion_cut(val, candidate, loser, winner, last_removed)
        bundles = list(candidate.bundles)
        bundles[winner] = cut_w.upper
        bundles[loser] = cut_l.upper
        bundles[s2] = candidate.bundles[loser]
        return candidate.with_bundles(bundles)


# -- identical valuations baseline --------------------------------------------

def solve_identical(inst: Instance) -> SolveResult:
    """Complete EFX allocation when all agents share one valuation row.

    Start from a round-robin complete allocation; while the poorest agent
    strongly envies someone, move the envied bundle's least valuable good to
    the poorest agent.  Both touched agents end above the old minimum, and in
    the strictly total perturbed order the minimum value rises every move, so
    the loop terminates with no strong envy anywhere.
    """
    if not inst.has_identical_valuations():
        raise InputError("identical-valuations baseline requires identical value rows")
    n = inst.num_agents
    val = PerturbedValuation(inst)
    order = tuple(range(n))
    assignment = [j % n for j in range(inst.num_goods)]
    alloc = Allocation.from_assignment(inst, assignment)
    records: list[StepRecord] = []

    while True:
        own = [val.bundle(i, alloc.bundles[i]) for i in range(n)]
        poorest = min(range(n), key=lambda i: own[i])
        target = next(
            (j for j in range(n) if j != poorest and strong_envy(val, alloc, poorest, j)),
            None,
        )
        if target is None:
            break
        moved = min(alloc.bundles[target], key=lambda h: (val.good(poorest, h), h))
        before = potential(val, order, alloc)
        bundles = list(alloc.bundles)
        bundles[target] = bundles[target] - {moved}
        bundles[poorest] = bundles[poorest] | {moved}
        alloc = alloc.with_bundles(bundles)
        records.append(
            StepRecord(len(records) + 1, IDENTICAL_BASELINE, moved, before,
                       potential(val, order, alloc), alloc)
        )

    if not is_efx(val, alloc):
        raise SolverDefectError("identical baseline ended without reaching EFX", records)
    return SolveResult(alloc, tuple(records), order)
