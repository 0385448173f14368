"""Command-line interface.

Subcommands: solve, check, oracle, gen, repro.  Every command prints a human
summary by default and a single machine-readable JSON document under
``--json``.  Exit codes: 0 when the requested property holds / the command
succeeds, 1 when a checked property fails (not EFX, dominator found, ...),
2 for malformed input or usage errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import counterexamples
from .allocation import (
    Allocation,
    allocation_from_json,
    allocation_to_json,
    is_ef1,
    is_efx,
    is_envy_free,
    nash_product,
    strong_envy_witnesses,
)
from .epspoly import EpsPoly
from .errors import GuardError, InputError
from .instance import (
    BaseValuation,
    Instance,
    instance_to_json,
    parse_instance,
    value_to_json,
)
from .oracle import enumerate_efx, exists_pareto_dominator, max_nash_efx
from .solver import solve


def _load_instance(path: str) -> Instance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    return parse_instance(text)


def _load_allocation(path: str, inst: Instance) -> Allocation:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc
    return allocation_from_json(doc, inst)


def _emit(payload: dict, as_json: bool, human_lines: list[str]) -> None:
    if as_json:
        print(json.dumps(payload, indent=2))
    else:
        for line in human_lines:
            print(line)


def _fmt_value(v) -> str:
    return str(v)


# -- solve ---------------------------------------------------------------------

def _cmd_solve(args) -> int:
    inst = _load_instance(args.instance)
    result = solve(inst)
    alloc_doc = allocation_to_json(result.allocation, inst)
    base = BaseValuation(inst)
    values = [base.bundle(i, result.allocation.bundles[i]) for i in inst.agents]

    if args.trace:
        trace_doc = [record.to_json(inst) for record in result.trace]
        Path(args.trace).write_text(json.dumps(trace_doc, indent=2))
    if args.plot:
        _plot_potential(result, inst, args.plot)

    payload = {
        "allocation": alloc_doc,
        "agent_values": [_fmt_value(v) for v in values],
        "steps": len(result.trace),
        "cases": [record.case for record in result.trace],
    }
    human = [
        "complete EFX allocation:",
        json.dumps(alloc_doc, indent=2),
        "agent values: " + ", ".join(
            f"agent {i + 1}: {_fmt_value(v)}" for i, v in enumerate(values)
        ),
        f"steps: {len(result.trace)}",
    ]
    _emit(payload, args.json, human)
    return 0


def _plot_potential(result, inst: Instance, path: str) -> None:
    # Exact values are converted to floats here only for drawing.
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    def as_float(base) -> float:
        if isinstance(base, EpsPoly):
            return float(base.substitute(Fraction(1, 10**6)))
        return float(Fraction(base))

    steps = range(len(result.trace) + 1)
    fig, ax = plt.subplots(figsize=(7, 4))
    for pos, agent in enumerate(result.agent_order):
        series = [0.0]
        for record in result.trace:
            series.append(as_float(record.phi_after[pos].base))
        ax.step(steps, series, where="post", label=f"agent {agent + 1}")
    ax.set_xlabel("step")
    ax.set_ylabel("bundle value")
    ax.set_title("potential trajectory (lexicographic agent order)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


# -- check ---------------------------------------------------------------------

def _cmd_check(args) -> int:
    inst = _load_instance(args.instance)
    alloc = _load_allocation(args.allocation, inst)
    val = BaseValuation(inst)
    predicate = {"efx": is_efx, "ef1": is_ef1, "ef": is_envy_free}[args.criterion]
    holds = predicate(val, alloc)
    witnesses = strong_envy_witnesses(val, alloc) if args.strong_envy_witness else []

    payload = {
        "criterion": args.criterion,
        "holds": holds,
        "witnesses": [
            {"agent": i + 1, "envied": j + 1, "good": g} for i, j, g in witnesses
        ],
    }
    human = [f"{args.criterion}: {'holds' if holds else 'fails'}"]
    human += [
        f"strong envy witness: agent {i + 1} envies agent {j + 1} minus {g}"
        for i, j, g in witnesses
    ]
    _emit(payload, args.json, human)
    return 0 if holds else 1


# -- oracle ----------------------------------------------------------------------

def _cmd_oracle(args) -> int:
    inst = _load_instance(args.instance)
    max_goods = args.max_goods
    payload: dict = {
        "query": {
            "instance": args.instance,
            "agents": inst.num_agents,
            "goods": inst.num_goods,
        }
    }

    if args.dominates:
        partial = _load_allocation(args.dominates, inst)
        witness = exists_pareto_dominator(inst, partial, max_goods=max_goods)
        payload["query"]["mode"] = "dominates"
        payload["dominator"] = None if witness is None else allocation_to_json(witness, inst)
        human = [
            "no complete EFX allocation Pareto-dominates the given allocation"
            if witness is None
            else "found a Pareto-dominating complete EFX allocation:\n"
            + json.dumps(allocation_to_json(witness, inst), indent=2)
        ]
        _emit(payload, args.json, human)
        return 1 if witness is not None else 0

    if args.max_nsw:
        best = max_nash_efx(inst, max_goods=max_goods)
        payload["query"]["mode"] = "max-nsw"
        if best is None:
            payload["max_nash"] = None
            _emit(payload, args.json, ["no complete EFX allocation exists"])
            return 1
        product, witness = best
        payload["max_nash"] = {
            "product": value_to_json(_as_exact(product)),
            "witness": allocation_to_json(witness, inst),
        }
        human = [
            f"maximum Nash product over complete EFX allocations: {product}",
            json.dumps(allocation_to_json(witness, inst), indent=2),
        ]
        _emit(payload, args.json, human)
        return 0

    report = enumerate_efx(inst, max_goods=max_goods, include_allocations=args.list)
    payload["query"]["mode"] = "list" if args.list else "count"
    payload["total"] = report.total
    payload["efx_count"] = report.efx_count
    if args.list:
        payload["efx"] = [
            allocation_to_json(a, inst) for a in report.allocations(inst)
        ]
    human = [
        f"complete allocations scanned: {report.total}",
        f"EFX among them: {report.efx_count}",
    ]
    if args.list:
        human.append(json.dumps(payload["efx"], indent=2))
    _emit(payload, args.json, human)
    return 0


def _as_exact(v):
    if isinstance(v, EpsPoly):
        return v
    return Fraction(v)


# -- gen --------------------------------------------------------------------------

def _cmd_gen(args) -> int:
    if args.agents < 1:
        raise InputError("--agents must be at least 1")
    if args.goods < 0:
        raise InputError("--goods must be non-negative")
    if args.max_value < 0:
        raise InputError("--max-value must be non-negative")
    inst = generate_instance(args.agents, args.goods, args.max_value, args.seed)
    print(json.dumps(instance_to_json(inst), indent=2))
    return 0


def generate_instance(agents: int, goods: int, max_value: int, seed: int) -> Instance:
    """Uniform integer values in [0, max_value]; identical output for identical seeds."""
    rng = random.Random(seed)
    rows = [[rng.randint(0, max_value) for _ in range(goods)] for _ in range(agents)]
    comment = f"efx gen --agents {agents} --goods {goods} --max-value {max_value} --seed {seed}"
    return Instance.from_rows(rows, comment=comment)


# -- repro ---------------------------------------------------------------------------

def _cmd_repro(args) -> int:
    checks = _repro_table1() if args.target == "table1" else _repro_table2()
    ok = all(passed for _, passed, _ in checks)
    payload = {
        "target": args.target,
        "ok": ok,
        "checks": [
            {"name": name, "ok": passed, "detail": detail} for name, passed, detail in checks
        ],
    }
    human = [
        f"{'PASS' if passed else 'FAIL'}  {name}" + (f"  [{detail}]" if detail else "")
        for name, passed, detail in checks
    ]
    human.append("result: " + ("PASS" if ok else "FAIL"))
    _emit(payload, args.json, human)
    return 0 if ok else 1


def _repro_table1() -> list[tuple[str, bool, str]]:
    inst = counterexamples.dominance_barrier_instance()
    partial = counterexamples.dominance_barrier_partial()
    val = BaseValuation(inst)
    checks = []

    values = [val.bundle(i, partial.bundles[i]) for i in inst.agents]
    expected = [Fraction(16), Fraction(15), Fraction(10)]
    checks.append((
        "partial allocation values are (16, 15, 10)",
        values == expected,
        ", ".join(map(str, values)),
    ))
    checks.append(("partial allocation is EFX", is_efx(val, partial), ""))
    witness = exists_pareto_dominator(inst, partial)
    checks.append((
        "no complete EFX allocation Pareto-dominates it (3^7 scanned)",
        witness is None,
        "" if witness is None else json.dumps(allocation_to_json(witness, inst)),
    ))
    return checks


def _repro_table2(inst: Instance | None = None) -> list[tuple[str, bool, str]]:
    if inst is None:
        inst = counterexamples.welfare_barrier_instance()
    partial = counterexamples.welfare_barrier_partial()
    reference = counterexamples.welfare_barrier_reference_complete()
    val = BaseValuation(inst)
    checks = []

    checks.append(("partial allocation is EFX", is_efx(val, partial), ""))
    checks.append((
        "reference complete allocation is complete and EFX",
        reference.is_complete(inst) and is_efx(val, reference),
        "",
    ))

    report = enumerate_efx(inst, include_allocations=True)
    partial_product = nash_product(inst, partial)
    below = True
    offender = None
    spread = True
    spread_offender = None
    big_goods = ("g3", "g5", "g6")
    for alloc in report.allocations(inst):
        if not nash_product(inst, alloc) < partial_product:
            below = False
            offender = alloc
        owners = {next(i for i in inst.agents if g in alloc.bundles[i]) for g in big_goods}
        if len(owners) != 3:
            spread = False
            spread_offender = alloc
    checks.append((
        "every complete EFX allocation has strictly lower Nash product "
        f"(checked {report.efx_count} of {report.total})",
        below,
        "" if below else json.dumps(allocation_to_json(offender, inst)),
    ))
    checks.append((
        "g3, g5, g6 go to distinct agents in every complete EFX allocation",
        spread,
        "" if spread else json.dumps(allocation_to_json(spread_offender, inst)),
    ))
    return checks


# -- entry point -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="efx",
        description="Exact EFX allocations for three agents: solver, checker, exhaustive oracle.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute a complete EFX allocation for a 3-agent instance")
    p.add_argument("instance")
    p.add_argument("--trace", metavar="FILE", help="write the step trace as JSON")
    p.add_argument("--plot", metavar="FILE", help="render the potential trajectory to an image file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("check", help="check an allocation against a fairness criterion")
    p.add_argument("instance")
    p.add_argument("allocation")
    p.add_argument("--criterion", choices=("efx", "ef1", "ef"), default="efx")
    p.add_argument("--strong-envy-witness", action="store_true",
                   help="list every (agent, envied, good) strong-envy witness")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("oracle", help="exhaustively enumerate complete allocations")
    p.add_argument("instance")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--list", action="store_true", help="include the full EFX list")
    mode.add_argument("--max-nsw", action="store_true",
                      help="report the maximum Nash product over complete EFX allocations")
    mode.add_argument("--dominates", metavar="ALLOCATION",
                      help="search for a complete EFX allocation Pareto-dominating this one")
    p.add_argument("--max-goods", type=int, default=None,
                   help="override the exhaustive-search guard (default 16, env EFX_MAX_GOODS)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("gen", help="generate a random integer-valued instance")
    p.add_argument("--agents", type=int, default=3)
    p.add_argument("--goods", type=int, required=True)
    p.add_argument("--max-value", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("repro", help="re-check the bundled counterexample instances")
    p.add_argument("target", choices=("table1", "table2"))
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_repro)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
