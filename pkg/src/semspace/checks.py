"""Whole-scenario invariant checks backing the `check` command."""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    SemanticSpacetime,
    promise_adjacency_matrix,
    rank_decomposition,
)
from .errors import SemspaceError
from .routing import ClosFabric, LatticeSpace, TreeSpace
from .scaling import coarse_grain, gauss_check, get_superagent, resolve
from .tenancy import check_binding, tenancy_cycles


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str = ""


def run_all_checks(st: SemanticSpacetime) -> list[CheckResult]:
    results: list[CheckResult] = []

    def record(name: str, ok: bool, detail: str = ""):
        results.append(CheckResult(name, ok, detail))

    try:
        for p in st.promises:
            st._check_refs(p)
        record("referential-integrity", True)
    except SemspaceError as err:
        record("referential-integrity", False, str(err))

    matrix = promise_adjacency_matrix(st)
    boolean = all(v in (0, 1) for row in matrix.entries for v in row)
    zero_diag = all(matrix.entries[i][i] == 0 for i in range(len(matrix.labels)))
    record("adjacency-boolean-zero-diagonal", boolean and zero_diag)

    buckets = rank_decomposition(st)
    total = sum(len(ps) for ps in buckets.values())
    record(
        "rank-buckets-partition",
        total == len(st.promises),
        f"{total} bucketed of {len(st.promises)}",
    )

    for sa_id in sorted(st.superagents):
        try:
            sa = get_superagent(st, sa_id)
            ok = bool(sa.interior) and sa.surface_agents <= sa.interior
            record(f"superagent-{sa_id}-split", ok)
            flux = gauss_check(sa, st)
            record(f"gauss-{sa_id}", flux.balanced, f"flux={flux.render()}")
        except SemspaceError as err:
            record(f"superagent-{sa_id}-split", False, str(err))

    for scale_name in sorted(st.scales):
        try:
            coarse, dirs = coarse_grain(st, scale_name)
            fine = resolve(coarse, dirs)
            ok = fine.promises == st.promises and set(fine.agents) == set(st.agents)
            record(f"directory-roundtrip-{scale_name}", ok)
        except SemspaceError as err:
            record(f"directory-roundtrip-{scale_name}", False, str(err))

    for binding in st.tenancies:
        name = f"tenancy-{binding.host}-{binding.tenant}"
        try:
            check_binding(st, binding)
            record(name, True)
        except SemspaceError as err:
            record(name, False, str(err))
    cycles = tenancy_cycles(st.tenancies)
    if cycles:
        joined = " / ".join("->".join(c) for c in cycles)
        record("tenancy-orientation", True, f"cycles reported: {joined}")
    elif st.tenancies:
        record("tenancy-orientation", True, "acyclic")

    for ns_name in sorted(st.namespaces):
        ns = st.namespaces[ns_name]
        exported = list(ns.exterior_transform.values())
        record(
            f"namespace-{ns_name}-injective",
            len(set(exported)) == len(exported),
        )

    for name in sorted(st.structures):
        space = st.structures[name]
        if isinstance(space, TreeSpace):
            record(
                f"tree-{name}-unique-addresses",
                len(set(space.leaves)) == len(space.leaves)
                and len(space.leaves) == space.branching ** space.depth,
            )
        elif isinstance(space, LatticeSpace):
            limit = 2 * len(space.dims)
            record(
                f"lattice-{name}-local-tables",
                all(t.size() <= limit for t in space.tables()),
            )
        elif isinstance(space, ClosFabric):
            non_top = [aid for tier in space.tiers[:-1] for aid in tier]
            record(
                f"clos-{name}-dual-homed",
                all(len(space.parents.get(aid, ())) == 2 for aid in non_top),
            )

    return results
