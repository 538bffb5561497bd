"""Scenario-driven command line: parse a scenario, run one command, report.

Exit codes: 0 success, 1 invariant violation or model error, 2 usage,
3 scenario parse error.  Reports are CSV or plain text on stdout; DOT and
figure outputs go to files and are byte-stable for identical input.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

from .checks import run_all_checks
from .core import rank_decomposition
from .dispatch import dispatch, flood
from .errors import ScenarioParseError, SemspaceError, UnknownAgentError
from .export import spacetime_to_dot
from .randgen import random_partition, random_spacetime, seeded_rng
from .routing import (
    ClosFabric,
    FlatSpace,
    LatticeSpace,
    MetricAddress,
    TreeSpace,
    _find_structure,
    route,
    table_cost,
)
from .scaling import coarse_grain, gauss_check, resolve
from .scenario import (
    Scenario,
    directories_from_text,
    directories_to_text,
    parse_scenario,
    spacetime_to_statements,
)
from .valency import valence

VALENCE_HEADER = "type_tag,offered,consumed,net,utilization_num,utilization_den,queue_length"
DELIVERY_HEADER = "mode,reached_count,accepted_count,max_hops"
TABLECOST_HEADER = "scheme,N,total_entries,max_per_agent"


def load_scenario(ref: str) -> Scenario:
    """Read a scenario from a path, or fall back to a bundled scenario name."""
    path = Path(ref)
    if path.exists():
        return parse_scenario(path.read_text())
    bundle = resources.files("semspace").joinpath("scenarios", f"{ref}.sst")
    if bundle.is_file():
        return parse_scenario(bundle.read_text())
    raise SemspaceError(f"no scenario file or bundled scenario named {ref!r}")


def bundled_scenarios() -> tuple[str, ...]:
    folder = resources.files("semspace").joinpath("scenarios")
    return tuple(sorted(p.name[:-4] for p in folder.iterdir() if p.name.endswith(".sst")))


def _cmd_rank(scenario: Scenario, args) -> int:
    buckets = rank_decomposition(scenario.spacetime)
    print("rank,count")
    for rank in sorted(buckets):
        print(f"{rank},{len(buckets[rank])}")
    return 0


def _cmd_valence(scenario: Scenario, args) -> int:
    st = scenario.spacetime
    agents = None
    if args.agents:
        agents = frozenset(args.agents.split(","))
    report = valence(st, args.type, agents if agents is not None else frozenset(st.agents))
    print(VALENCE_HEADER)
    print(report.csv_row())
    if args.figure:
        from . import viz

        viz.save_valence_figure([report], args.figure)
    return 0


def _cmd_coarsegrain(scenario: Scenario, args) -> int:
    coarse, dirs = coarse_grain(scenario.spacetime, args.scale)
    sys.stdout.write(spacetime_to_statements(coarse))
    if args.emit_directory:
        Path(args.emit_directory).write_text(directories_to_text(dirs))
    return 0


def _cmd_resolve(scenario: Scenario, args) -> int:
    dirs = directories_from_text(Path(args.directory).read_text())
    fine = resolve(scenario.spacetime, dirs)
    sys.stdout.write(spacetime_to_statements(fine))
    return 0


def _cmd_gauss(scenario: Scenario, args) -> int:
    report = gauss_check(args.super, scenario.spacetime)
    verdict = "OK" if report.balanced else "FAIL"
    print(f"{verdict} flux={report.render()}")
    return 0 if report.balanced else 1


def _cmd_deliver(scenario: Scenario, args) -> int:
    st = scenario.spacetime
    sign = args.sign
    candidates = [
        p for p in st.sorted_promises()
        if p.promiser == args.source
        and args.super in p.promisees
        and p.body.type_tag == args.type
        and p.body.sign == sign
    ]
    if not candidates:
        raise UnknownAgentError(
            f"scenario has no promise {args.source} -> {args.super} of type {sign}{args.type}"
        )
    promise = candidates[0]
    if args.mode == "flood":
        outcome = flood(st, promise, args.super)
    else:
        outcome = dispatch(st, promise, args.super)
    print(DELIVERY_HEADER)
    print(outcome.csv_row())
    return 0


def _parse_destination(to: str):
    if to.startswith("(") and to.endswith(")"):
        return MetricAddress(tuple(int(x) for x in to[1:-1].split(",")))
    return to


def _endpoints(st, space):
    if isinstance(space, LatticeSpace):
        return tuple(space.agent_id(c) for c in sorted(space.occupied))
    if isinstance(space, TreeSpace):
        return tuple(sorted(space.leaves))
    if isinstance(space, ClosFabric):
        return tuple(sorted(space.leaves))
    if isinstance(space, FlatSpace):
        return space.agents
    return st.agent_ids()


def _cmd_route(scenario: Scenario, args) -> int:
    st = scenario.spacetime
    if args.all_pairs:
        space = _find_structure(st, args.scheme)
        endpoints = _endpoints(st, space)
        print("src,dst,hops")
        for src in endpoints:
            for dst in endpoints:
                if src == dst:
                    continue
                path = route(st, src, dst, args.scheme)
                print(f"{src},{dst},{len(path)}")
        return 0
    if not args.source or not args.to:
        raise SemspaceError("route needs --from and --to (or --all-pairs)")
    path = route(st, args.source, _parse_destination(args.to), args.scheme)
    print(" -> ".join((args.source,) + tuple(path)))
    print(f"hops,{len(path)}")
    return 0


def _cmd_tablecost(scenario: Scenario, args) -> int:
    report = table_cost(scenario.spacetime, args.scheme)
    print(TABLECOST_HEADER)
    print(report.csv_row())
    if args.figure:
        from . import viz

        viz.save_table_cost_figure([report], args.figure)
    return 0


def _cmd_export_dot(scenario: Scenario, args) -> int:
    dot = spacetime_to_dot(scenario.spacetime)
    Path(args.file).write_text(dot)
    if args.figure:
        from . import viz

        viz.save_graph_figure(scenario.spacetime, args.figure)
    return 0


def _cmd_check(scenario: Scenario, args) -> int:
    results = run_all_checks(scenario.spacetime)
    failures = 0
    for result in results:
        status = "ok" if result.ok else "FAIL"
        suffix = f": {result.detail}" if result.detail else ""
        print(f"{status} {result.name}{suffix}")
        if not result.ok:
            failures += 1
    for i in range(args.random or 0):
        rng = seeded_rng(i)
        st = random_spacetime(rng)
        st, groups = random_partition(rng, st)
        coarse, dirs = coarse_grain(st, "random")
        ok = resolve(coarse, dirs).promises == st.promises
        ok = ok and all(gauss_check(g, st).balanced for g in groups)
        print(("ok" if ok else "FAIL") + f" random-spacetime-{i}")
        if not ok:
            failures += 1
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semspace",
        description="Promise-calculus semantic spacetime engine",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.add_argument("scenario", help="scenario file path or bundled scenario name")
        p.set_defaults(func=func)
        return p

    add("rank", _cmd_rank, help="tensor-rank decomposition of the promise set")

    p = add("valence", _cmd_valence, help="valence report for one promise type")
    p.add_argument("--type", required=True)
    p.add_argument("--agents", help="comma-separated agent subset")
    p.add_argument("--figure", help="write a bar-chart PNG next to the CSV")

    p = add("coarsegrain", _cmd_coarsegrain, help="apply a scale; print the coarse scenario")
    p.add_argument("--scale", required=True)
    p.add_argument("--emit-directory", help="write the coarse-graining directories here")

    p = add("resolve", _cmd_resolve, help="resolve a coarse scenario through directories")
    p.add_argument("--directory", required=True)

    p = add("gauss", _cmd_gauss, help="flux balance check for one super-agent")
    p.add_argument("--super", required=True)

    p = add("deliver", _cmd_deliver, help="flood or dispatch a promise to a super-agent")
    p.add_argument("--mode", choices=["flood", "dispatch"], required=True)
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--super", required=True)
    p.add_argument("--type", required=True)
    p.add_argument("--sign", default="+", choices=["+", "-"])

    p = add("route", _cmd_route, help="route a message under a scheme")
    p.add_argument("--scheme", required=True)
    p.add_argument("--from", dest="source")
    p.add_argument("--to")
    p.add_argument("--all-pairs", action="store_true")

    p = add("tablecost", _cmd_tablecost, help="forwarding-table cost of a scheme")
    p.add_argument("--scheme", required=True)
    p.add_argument("--figure", help="write a bar-chart PNG next to the CSV")

    p = add("export-dot", _cmd_export_dot, help="write the promise graph as DOT")
    p.add_argument("file")
    p.add_argument("--figure", help="also render the graph to a PNG")

    p = add("check", _cmd_check, help="run every invariant check on the scenario")
    p.add_argument("--random", type=int, default=0,
                   help="also check N seeded random spacetimes (SEMSPACE_SEED)")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        scenario = load_scenario(args.scenario)
        return args.func(scenario, args)
    except ScenarioParseError as err:
        print(f"scenario error: {err}", file=sys.stderr)
        return 3
    except SemspaceError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
