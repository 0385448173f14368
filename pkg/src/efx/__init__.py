"""Exact-arithmetic EFX allocations for three agents.

Library surface: instances and exact values (:mod:`efx.instance`), partial
allocations and fairness predicates (:mod:`efx.allocation`), envy/champion
graph machinery (:mod:`efx.graphs`), the constructive solver
(:mod:`efx.solver`), the exhaustive oracle (:mod:`efx.oracle`), infinitesimal
polynomials (:mod:`efx.epspoly`), and the bundled counterexample instances
(:mod:`efx.counterexamples`).  The ``efx`` console script wraps all of it.
"""

from .allocation import (
    Allocation,
    allocation_from_json,
    allocation_to_json,
    is_ef1,
    is_efx,
    is_envy_free,
    lex_dominates,
    nash_product,
    pareto_dominates,
    parse_allocation,
    potential,
    serialize_allocation,
    strong_envy,
    weak_envy,
)
from .epspoly import EpsPoly, eps
from .errors import ContractError, GuardError, InputError, SolverDefectError
from .graphs import (
    ChampionCut,
    ChampionGraph,
    EnvyGraph,
    champion_cut,
    champion_graph,
    eliminate_envy_cycles,
    envy_graph,
    most_envious,
    smallest_envy_size,
)
from .instance import (
    BaseValuation,
    Instance,
    PerturbedValuation,
    PerturbedValue,
    compare_bundles,
    instance_from_json,
    instance_to_json,
    parse_instance,
    perturbed_value,
    serialize_instance,
)
from .oracle import (
    EnumerationReport,
    certify_solver,
    enumerate_efx,
    exists_pareto_dominator,
    max_nash_efx,
    scan,
)
from .solver import SolveResult, StepRecord, solve, solve_identical

__version__ = "0.1.0"
