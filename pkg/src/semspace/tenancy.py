"""Occupancy, the five-promise tenancy template, multi-tenancy and namespaces.

Tenancy is conditional occupancy: the host offers a bounded resource R
conditionally on C, the tenant pays C and quenches one slot of R, and the
host promises services f(C,R) conditionally on the tenant's use of R.
"""

from __future__ import annotations

import graphlib
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Optional, Sequence

from .core import WILDCARD, Body, Promise, SemanticSpacetime
from .errors import (
    DuplicateNameError,
    IncompleteBindingError,
    MultiTenancyError,
    SlotExhaustedError,
    UnknownAgentError,
)
from .valency import valence

STRICT = "strict"
LENIENT = "lenient"


@dataclass(frozen=True)
class TenancyBinding:
    """One host-tenant binding and its five constituent promises.

    Under multi-tenancy the host's resource offer is shared between the
    bindings and conditioned on the common condition; ``offer_condition``
    records it when it differs from this tenant's own C.
    """

    host: str
    tenant: str
    resource: Body
    condition: Body
    service: Body
    promises: tuple[Promise, ...]
    offer_condition: Optional[Body] = None

    def csv_row(self, st: SemanticSpacetime, policy: str) -> str:
        report = valence(st, self.resource.type_tag)
        n = "inf" if report.offered is None else str(report.offered)
        net = "inf" if report.net is None else str(report.net)
        return ",".join(
            [self.host, self.tenant, self.resource.type_tag, n,
             str(report.consumed), net, policy]
        )


@dataclass(frozen=True)
class Namespace:
    """Boundary inside which names are unique, with an injective export map."""

    boundary: str
    interior_names: frozenset[str]
    exterior_transform: Mapping[str, str]


def _policy(st: SemanticSpacetime, policy: Optional[str]) -> str:
    return st.policy if policy is None else policy


def _host_offer(st: SemanticSpacetime, host: str, resource_type: str) -> Promise:
    offers = [
        p
        for p in st.promises
        if p.promiser == host and p.body.sign == "+" and p.body.type_tag == resource_type
    ]
    if not offers:
        raise UnknownAgentError(
            f"{host!r} offers no resource of type {resource_type!r}"
        )
    return sorted(offers, key=lambda p: p.render())[0]


def bind_occupancy(
    st: SemanticSpacetime,
    host: str,
    occupier: str,
    resource_type: str,
    policy: Optional[str] = None,
) -> SemanticSpacetime:
    """Let an occupier quench one valency slot of the host's resource offer.

    Strict policy refuses once the offer is saturated; lenient policy lets
    the use-promise through and the excess shows up as queue length.
    """
    policy = _policy(st, policy)
    offer = _host_offer(st, host, resource_type)
    report = valence(st, resource_type, frozenset(st.agents))
    if report.net is not None and report.net < 1 and policy == STRICT:
        raise SlotExhaustedError(
            f"{host!r} has no remaining {resource_type!r} slots (net {report.net})"
        )
    use = Body("-", resource_type, offer.body.symbols, valency=1)
    return st.promise(occupier, frozenset((host,)), use)


def _tenancy_promises(
    host: str, tenant: str, r: Body, c: Body, f: Body,
    offer_condition: Optional[Body] = None,
) -> tuple[Promise, ...]:
    cond_c = offer_condition or Body("+", c.type_tag, c.symbols)
    cond_minus_r = Body("-", r.type_tag, r.symbols)
    offer = Promise(host, frozenset((WILDCARD,)),
                    replace(r, sign="+", condition=cond_c))
    accept_c = Promise(host, frozenset((tenant,)), Body("-", c.type_tag, c.symbols, valency=1))
    give_c = Promise(tenant, frozenset((host,)), Body("+", c.type_tag, c.symbols))
    use_r = Promise(tenant, frozenset((host,)), Body("-", r.type_tag, r.symbols, valency=1))
    serve = Promise(host, frozenset((tenant,)),
                    replace(f, sign="+", condition=cond_minus_r))
    return (offer, accept_c, give_c, use_r, serve)


def bind_tenancy(
    st: SemanticSpacetime,
    host: str,
    tenant: str,
    r: Body,
    c: Body,
    f: Body,
    policy: Optional[str] = None,
    offer_condition: Optional[Body] = None,
) -> tuple[SemanticSpacetime, TenancyBinding]:
    """Install the five-promise tenancy template between host and tenant."""
    if host == tenant:
        raise IncompleteBindingError("host and tenant must be distinct agents")
    for aid in (host, tenant):
        if aid not in st.agents:
            raise UnknownAgentError(aid)
    policy = _policy(st, policy)
    if r.valency is not None:
        report = valence(st, r.type_tag, frozenset(st.agents))
        already = report.consumed
        if already >= r.valency and policy == STRICT:
            raise SlotExhaustedError(
                f"resource {r.type_tag!r} is saturated ({already} of {r.valency} slots used)"
            )
    promises = _tenancy_promises(host, tenant, r, c, f, offer_condition)
    binding = TenancyBinding(host, tenant, r, c, f, promises, offer_condition)
    st = st.with_promises(promises)
    st = replace(st, tenancies=st.tenancies + (binding,))
    return st, binding


def check_binding(st: SemanticSpacetime, binding: TenancyBinding) -> None:
    """Verify all five template promises exist and reference each other.

    Re-derives the template from the binding's R, C and f and demands exact
    presence; a missing or inconsistent promise rejects the binding.
    """
    expected = _tenancy_promises(
        binding.host, binding.tenant, binding.resource, binding.condition,
        binding.service, binding.offer_condition,
    )
    missing = [p for p in expected if p not in st.promises]
    if missing:
        lines = "; ".join(p.render() for p in missing)
        raise IncompleteBindingError(
            f"binding {binding.host}->{binding.tenant} is incomplete: missing {lines}"
        )
    offer, _, _, _, serve = expected
    if offer.body.condition is None or offer.body.condition.type_tag != binding.condition.type_tag:
        raise IncompleteBindingError("resource offer must be conditional on C")
    if serve.body.condition is None or serve.body.condition != Body(
        "-", binding.resource.type_tag, binding.resource.symbols
    ):
        raise IncompleteBindingError("service promise must be conditional on -R")


def tenancy_direction(binding: TenancyBinding) -> tuple[str, str]:
    """Tenancy flows toward the host, the source of the resource being used."""
    return (binding.tenant, binding.host)


def tenancy_cycles(bindings: Iterable[TenancyBinding]) -> tuple[tuple[str, ...], ...]:
    """Report (not forbid) cycles in the layered tenant->host orientation."""
    graph: dict[str, set[str]] = {}
    for b in bindings:
        tenant, host = tenancy_direction(b)
        graph.setdefault(tenant, set()).add(host)
        graph.setdefault(host, set())
    sorter = graphlib.TopologicalSorter(graph)
    try:
        sorter.prepare()
        return ()
    except graphlib.CycleError as err:
        cycle = tuple(err.args[1])
        return (cycle,)


def symmetrize_to_adjacency(
    st: SemanticSpacetime, a: str, b: str, r: Body
) -> SemanticSpacetime:
    """Mutual tenancy with empty services collapses into plain adjacency.

    Installs the +-R exchange in both directions with f empty, so the pair's
    structure reduces to an adjacency of type R.  Symmetric in a and b.
    """
    st = bind_half_adjacency(st, a, b, r)
    return bind_half_adjacency(st, b, a, r)


def bind_half_adjacency(st: SemanticSpacetime, giver: str, taker: str, r: Body) -> SemanticSpacetime:
    """One directed half of a mutual-tenancy adjacency: +R offered, -R used."""
    offer = Promise(giver, frozenset((taker,)), replace(r, sign="+", condition=None))
    use = Promise(taker, frozenset((giver,)), Body("-", r.type_tag, r.symbols, valency=1))
    return st.with_promises((offer, use))


def bind_multitenancy(
    st: SemanticSpacetime,
    host: str,
    tenants: Sequence[str],
    r: Body,
    c_list: Sequence[Body],
    capacity: Optional[int] = None,
    shares: Optional[Sequence[int]] = None,
    policy: Optional[str] = None,
) -> tuple[SemanticSpacetime, tuple[TenancyBinding, ...]]:
    """Bind m >= 2 tenants to one host's shared resource.

    Enforces the valency constraint m <= n and, when a capacity is given,
    the fair-sharing constraint sum(shares) <= capacity.  No promise of any
    kind is installed between tenants: isolation is the default state.
    """
    tenants = tuple(sorted(tenants))
    if len(tenants) < 2:
        raise MultiTenancyError("multi-tenancy needs at least two tenants")
    if len(c_list) != len(tenants):
        raise MultiTenancyError("each tenant must supply its own condition C")
    policy = _policy(st, policy)
    n = r.valency
    if n is not None and len(tenants) > n and policy == STRICT:
        overflow = tenants[n:]
        raise MultiTenancyError(
            f"tenant count {len(tenants)} exceeds valency {n}; "
            f"overflow: {', '.join(overflow)}",
            overflow=overflow,
        )
    if capacity is not None:
        shares = tuple(shares) if shares is not None else tuple(1 for _ in tenants)
        if len(shares) != len(tenants):
            raise MultiTenancyError("one share per tenant is required")
        total = sum(shares)
        if total > capacity:
            raise MultiTenancyError(
                f"fair sharing violated: shares sum to {total} > capacity {capacity}"
            )
    # one shared conditional offer: the resource is promised once, not per tenant
    c_types = {c.type_tag for c in c_list}
    if len(c_types) == 1:
        shared = Body("+", c_list[0].type_tag)
    else:
        shared = Body("+", "C")
    bindings = []
    by_tenant = dict(zip(tenants, c_list))
    for tenant in tenants:
        st, binding = bind_tenancy(st, host, tenant, r, by_tenant[tenant],
                                   Body("+", "service"), policy=LENIENT,
                                   offer_condition=shared)
        bindings.append(binding)
    return st, tuple(bindings)


def tenant_isolation_scan(
    st: SemanticSpacetime, tenants: Iterable[str]
) -> tuple[Promise, ...]:
    """Promises of any type between distinct tenants (empty means isolated)."""
    tenants = frozenset(tenants)
    violations = []
    for p in st.promises:
        if p.promiser not in tenants:
            continue
        others = (st.resolve_promisees(p) & tenants) - {p.promiser}
        if others:
            violations.append(p)
    return tuple(sorted(violations, key=lambda p: p.render()))


def make_namespace(
    st: SemanticSpacetime,
    boundary_sa: str,
    transform_kind: str = "prefix",
    table: Optional[Mapping[str, str]] = None,
) -> tuple[SemanticSpacetime, Namespace]:
    """Export the interior names of a boundary through an injective transform.

    Prefix mode extends each name with "<boundary>/"; table mode uses an
    explicit translation.  Duplicate interior names are rejected before any
    transform is attempted.
    """
    if boundary_sa not in st.superagents:
        raise UnknownAgentError(f"{boundary_sa!r} is not a declared super-agent")
    members = sorted(st.superagents[boundary_sa])
    names = [st.agents[m].name for m in members]
    duplicates = sorted({n for n in names if names.count(n) > 1})
    if duplicates:
        raise DuplicateNameError(
            f"namespace {boundary_sa!r} has duplicate interior names: {', '.join(duplicates)}"
        )
    if transform_kind == "prefix":
        transform = {name: f"{boundary_sa}/{name}" for name in names}
    elif transform_kind == "table":
        if table is None:
            raise ValueError("table mode needs an explicit translation table")
        missing = [n for n in names if n not in table]
        if missing:
            raise DuplicateNameError(
                f"translation table misses names: {', '.join(sorted(missing))}"
            )
        transform = {name: table[name] for name in names}
    else:
        raise ValueError(f"unknown transform kind {transform_kind!r}")
    exported = list(transform.values())
    if len(set(exported)) != len(exported):
        raise DuplicateNameError(
            f"namespace {boundary_sa!r} transform is not injective"
        )
    ns = Namespace(boundary_sa, frozenset(names), transform)
    namespaces = dict(st.namespaces)
    namespaces[boundary_sa] = ns
    return replace(st, namespaces=namespaces), ns
