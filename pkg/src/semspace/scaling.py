"""Agency scales: super-agents, coarse-graining directories and flux checks.

Coarse-graining merges same-type exterior promises under the promiser rule
(body union, per-symbol coefficient max), rewrites promisees and scope via
the group substitution, and removes interior promises.  Everything removed
or merged is preserved in per-super-agent directories so a coarse view is
exactly resolvable back to the fine one.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Optional, Union

from .core import (
    WILDCARD,
    Agent,
    Body,
    Promise,
    Scale,
    SemanticSpacetime,
    any_promise_neighbors,
)
from .errors import PartialResolutionError, ScaleError, SizeLimitError, UnknownAgentError


@dataclass(frozen=True)
class SuperAgent:
    """Materialized view of one group: interior, boundary-crossing split, surface."""

    id: str
    interior: frozenset[str]
    interior_promises: frozenset[Promise]
    exterior_promises: frozenset[Promise]
    irreducible_promises: frozenset[Promise]
    surface_agents: frozenset[str]


@dataclass(frozen=True)
class Directory:
    """Information lost by coarse-graining one super-agent.

    ``entries`` maps each promise type to the fine promises it replaced
    (with their body languages); ``produced`` lists the coarse promises the
    graining emitted in their place; ``member_agents`` is the interior
    roster, kept so promise-less members survive a round trip.
    """

    owner: str
    member_agents: tuple[Agent, ...]
    entries: Mapping[str, tuple[Promise, ...]]
    produced: frozenset[Promise] = frozenset()

    def members(self) -> frozenset[str]:
        return frozenset(a.id for a in self.member_agents)

    def agents_for(self, type_tag: str, sign: Optional[str] = None) -> frozenset[str]:
        """Sub-agents the directory resolves for one promise type."""
        found = set()
        members = self.members()
        for p in self.entries.get(type_tag, ()):
            if sign is not None and p.body.sign != sign:
                continue
            if p.promiser in members:
                found.add(p.promiser)
        return frozenset(found)


def declare_superagent(st: SemanticSpacetime, name: str, members: Iterable[str]) -> SemanticSpacetime:
    """Register a super-agent boundary around existing agents."""
    members = frozenset(members)
    if not members:
        raise ScaleError(f"super-agent {name!r} must have a non-empty interior")
    for m in members:
        if m not in st.agents:
            raise UnknownAgentError(m)
    if name in members:
        raise ScaleError(f"super-agent {name!r} cannot contain itself")
    if name not in st.agents:
        st = st.with_agent(Agent(name, residents=members))
    supers = dict(st.superagents)
    supers[name] = members
    return replace(st, superagents=supers)


def get_superagent(st: SemanticSpacetime, sa_id: str) -> SuperAgent:
    """Materialize the interior/exterior split for a declared super-agent."""
    if sa_id not in st.superagents:
        raise UnknownAgentError(f"{sa_id!r} is not a declared super-agent")
    interior = st.superagents[sa_id]
    interior_promises = set()
    exterior_promises = set()
    surface = set()
    for p in st.promises:
        targets = st.resolve_promisees(p)
        from_in = p.promiser in interior
        inside_targets = targets & interior
        outside_targets = targets - interior
        if from_in and not outside_targets:
            interior_promises.add(p)
        elif from_in and outside_targets:
            exterior_promises.add(p)
            surface.add(p.promiser)
        elif not from_in and inside_targets:
            exterior_promises.add(p)
            surface |= inside_targets
    sa = SuperAgent(
        id=sa_id,
        interior=interior,
        interior_promises=frozenset(interior_promises),
        exterior_promises=frozenset(exterior_promises),
        irreducible_promises=frozenset(),
        surface_agents=frozenset(surface),
    )
    return replace(sa, irreducible_promises=irreducible_promises(sa, st))


def surface(sa: SuperAgent) -> frozenset[str]:
    """Interior agents exposed through at least one boundary-crossing promise."""
    return sa.surface_agents


def irreducible_promises(sa: Union[SuperAgent, str], st: SemanticSpacetime) -> frozenset[Promise]:
    """Collective promises not covered by any union of sub-agent promises.

    A promise made by the boundary agent itself is reducible when, for every
    external promisee, sub-agents already promise bodies whose union spans
    it.  Whatever is left over is genuinely collective.
    """
    if isinstance(sa, str):
        sa = get_superagent(st, sa)
    irreducible = set()
    for pc in st.promises:
        if pc.promiser != sa.id:
            continue
        targets = st.resolve_promisees(pc) - sa.interior - {sa.id}
        if not targets:
            continue
        needed = dict(pc.body.symbols)
        covered_everywhere = True
        for t in targets:
            union: dict[str, int] = {}
            for p in st.promises:
                if p.promiser not in sa.interior or p.body.sign != pc.body.sign:
                    continue
                if t not in st.resolve_promisees(p):
                    continue
                for sym, coeff in p.body.symbols:
                    union[sym] = max(union.get(sym, 0), coeff)
            if not all(union.get(sym, 0) >= coeff for sym, coeff in needed.items()):
                covered_everywhere = False
                break
        if not covered_everywhere:
            irreducible.add(pc)
    return frozenset(irreducible)


# -- scales -------------------------------------------------------------------


def define_scale(st: SemanticSpacetime, name: str, groups: Mapping[str, Iterable[str]]) -> SemanticSpacetime:
    """Register a named partition and materialize its super-agents.

    Groups must be disjoint, and every member of a multi-agent group must be
    adjacent (by any non-empty promise) to at least one other member: a
    super-agent is a subspace, not an arbitrary scatter.
    """
    normalized: list[tuple[str, frozenset[str]]] = []
    seen: set[str] = set()
    neighbors = any_promise_neighbors(st)
    for gname, members in sorted(groups.items()):
        members = frozenset(members)
        if not members:
            raise ScaleError(f"group {gname!r} is empty")
        for m in members:
            if m not in st.agents:
                raise UnknownAgentError(m)
            if m in seen:
                raise ScaleError(f"groups overlap on agent {m!r}")
        seen |= members
        if len(members) > 1:
            for m in members:
                if not (neighbors.get(m, frozenset()) & (members - {m})):
                    raise ScaleError(
                        f"group {gname!r} is disconnected: {m!r} is adjacent to no other member"
                    )
        normalized.append((gname, members))
    for gname, members in normalized:
        if len(members) > 1:
            if gname in st.superagents:
                if st.superagents[gname] != members:
                    raise ScaleError(
                        f"super-agent {gname!r} is already declared with a different interior"
                    )
            else:
                st = declare_superagent(st, gname, members)
    scale = Scale(name, tuple(normalized))
    scales = dict(st.scales)
    scales[name] = scale
    return replace(st, scales=scales)


# -- coarse graining ------------------------------------------------------------


def _merge_bodies(bodies: list[Body], subst, coarse_promiser: str) -> Body:
    """Promiser rule: union of symbols with per-symbol coefficient max.

    Valency slots are pooled (summed); any unbounded contribution keeps the
    merged offer unbounded.  Agent references survive group substitution.
    """
    first = bodies[0]
    symbols: dict[str, int] = {}
    refs: list[str] = []
    valency: Optional[int] = 0
    for b in bodies:
        for sym, coeff in b.symbols:
            symbols[sym] = max(symbols.get(sym, 0), coeff)
        for ref in b.agent_refs:
            mapped = subst(ref)
            if mapped != coarse_promiser and mapped not in refs:
                refs.append(mapped)
        if b.valency is None:
            valency = None
        elif valency is not None:
            valency += b.valency
    if valency == 0:
        valency = None
    return Body(
        sign=first.sign,
        type_tag=first.type_tag,
        symbols=tuple(sorted(symbols.items())),
        valency=valency,
        condition=first.condition,
        agent_refs=tuple(sorted(refs)),
    )


def coarse_grain(st: SemanticSpacetime, scale_name: str) -> tuple[SemanticSpacetime, tuple[Directory, ...]]:
    """Apply a registered scale, returning the coarse view plus directories."""
    if scale_name not in st.scales:
        raise ScaleError(f"scale {scale_name!r} is not registered")
    scale = st.scales[scale_name]
    super_groups = dict(scale.super_groups())
    member_to_group: dict[str, str] = {}
    for gname, members in super_groups.items():
        for m in members:
            member_to_group[m] = gname

    def subst(aid: str) -> str:
        return member_to_group.get(aid, aid)

    removed: dict[str, dict[str, list[Promise]]] = {g: {} for g in super_groups}
    produced: dict[str, set[Promise]] = {g: set() for g in super_groups}
    kept: set[Promise] = set()
    merge_bins: dict[tuple, list[Promise]] = {}

    def record(gname: str, p: Promise):
        removed[gname].setdefault(p.body.type_tag, []).append(p)

    for p in st.promises:
        g = member_to_group.get(p.promiser)
        new_promisees = frozenset(subst(t) for t in p.promisees)
        if g is not None:
            new_promisees -= {g}
            if not new_promisees:
                # wholly inside the boundary: invisible at the coarse scale
                record(g, p)
                continue
            key = (g, new_promisees, p.body.type_tag, p.body.sign, p.body.condition)
            merge_bins.setdefault(key, []).append(p)
            record(g, p)
            continue
        new_scope = frozenset(subst(x) for x in p.scope) - {p.promiser}
        new_refs = tuple(
            dict.fromkeys(subst(r) for r in p.body.agent_refs if subst(r) != p.promiser)
        )
        touched = {member_to_group[x] for x in (set(p.promisees) | set(p.scope) | set(p.body.agent_refs))
                   if x in member_to_group}
        if not touched:
            kept.add(p)
            continue
        # A boundary agent's promise into its own interior would substitute
        # into a self-promise; it is swallowed by the boundary instead.
        new_promisees -= {p.promiser}
        if not new_promisees:
            for gname in touched:
                record(gname, p)
            continue
        rewritten = Promise(
            p.promiser,
            new_promisees,
            replace(p.body, agent_refs=new_refs),
            new_scope,
        )
        kept.add(rewritten)
        for gname in touched:
            record(gname, p)
            produced[gname].add(rewritten)

    for (gname, promisees, _tag, _sign, _cond), bunch in sorted(
        merge_bins.items(), key=lambda kv: repr(kv[0])
    ):
        bodies = [p.body for p in sorted(bunch, key=lambda p: p.render())]
        merged_body = _merge_bodies(bodies, subst, gname)
        scope = set()
        for p in bunch:
            scope |= {subst(x) for x in p.scope}
        scope -= {gname}
        merged = Promise(gname, promisees, merged_body, frozenset(scope))
        kept.add(merged)
        produced[gname].add(merged)

    # A rewrite may collide with a promise that also exists untouched; keep
    # the untouched one recoverable by filing it as a directory entry too.
    produced_all = set().union(*produced.values()) if produced else set()
    untouched = {p for p in st.promises if p in kept}
    for p in untouched & produced_all:
        for gname, ps in produced.items():
            if p in ps:
                record(gname, p)

    members_removed = set(member_to_group)
    coarse_agents = {aid: a for aid, a in st.agents.items() if aid not in members_removed}
    coarse = replace(
        st,
        agents=coarse_agents,
        promises=frozenset(kept),
        applied_scale=scale_name,
    )
    directories = []
    for gname in sorted(super_groups):
        entries = {
            tag: tuple(sorted(ps, key=lambda p: p.render()))
            for tag, ps in sorted(removed[gname].items())
        }
        roster = tuple(st.agents[m] for m in sorted(super_groups[gname]))
        directories.append(
            Directory(gname, roster, entries, frozenset(produced[gname]))
        )
    return coarse, tuple(directories)


def resolve(coarse: SemanticSpacetime, dirs: Iterable[Directory]) -> SemanticSpacetime:
    """Reconstruct the fine view from a coarse one and its directories.

    With complete directories the exterior promise set equals the original
    exactly.  A coarse promise whose type has no directory entry cannot be
    resolved and is reported, by type, as a partial resolution.
    """
    dirs = tuple(dirs)
    by_owner = {d.owner: d for d in dirs}
    produced_by: dict[Promise, list[Directory]] = {}
    for d in dirs:
        for p in d.produced:
            produced_by.setdefault(p, []).append(d)

    scale = None
    if coarse.applied_scale is not None and coarse.applied_scale in coarse.scales:
        scale = coarse.scales[coarse.applied_scale]
    scale_supers = frozenset(g for g, m in (scale.super_groups() if scale else ()))

    fine_agents = dict(coarse.agents)
    for d in dirs:
        for agent in d.member_agents:
            fine_agents[agent.id] = agent

    fine_promises: set[Promise] = set()
    missing_types: set[str] = set()
    unresolved: list[Promise] = []
    for p in coarse.promises:
        owners = produced_by.get(p)
        if owners:
            tag = p.body.type_tag
            for d in owners:
                if not d.entries.get(tag):
                    missing_types.add(tag)
                    unresolved.append(p)
            continue
        if p.promiser in scale_supers and p.promiser not in by_owner:
            # produced by a graining whose directory was withheld wholesale
            missing_types.add(p.body.type_tag)
            unresolved.append(p)
            continue
        fine_promises.add(p)
    if missing_types:
        raise PartialResolutionError(missing_types, unresolved)

    for d in dirs:
        for ps in d.entries.values():
            fine_promises.update(ps)

    return replace(
        coarse,
        agents=fine_agents,
        promises=frozenset(fine_promises),
        applied_scale=None,
    )


# -- Gauss' law -------------------------------------------------------------------


def _flux_label(body: Body) -> str:
    if body.symbols:
        inner = "∪".join(
            sym if coeff == 1 else f"{sym}:{coeff}" for sym, coeff in body.symbols
        )
    else:
        inner = body.type_tag
    return f"{body.sign}{inner}"


@dataclass(frozen=True)
class FluxReport:
    """Volume-vs-surface body flux for one super-agent."""

    balanced: bool
    outgoing: tuple[Body, ...]
    incoming: tuple[Body, ...]

    def __bool__(self):
        return self.balanced

    def render(self) -> str:
        labels = sorted(_flux_label(b) for b in self.outgoing)
        labels += sorted("<" + _flux_label(b) for b in self.incoming)
        return "{" + ",".join(labels) + "}"


def gauss_check(sa: Union[SuperAgent, str], st: SemanticSpacetime) -> FluxReport:
    """Divergence bookkeeping: interior pairs cancel, leaving the surface flux.

    The volume side tallies every promise pair at its interior endpoints
    (+body at the promiser, -body at the promisee), so interior vector
    promises cancel pairwise.  The surface side sums the classified
    exterior promises crossing the boundary.  Both sides must agree.
    """
    if isinstance(sa, str):
        sa = get_superagent(st, sa)
    interior = sa.interior
    volume: Counter = Counter()
    for p in st.promises:
        for target in st.resolve_promisees(p):
            if p.promiser in interior:
                volume[p.body] += 1
            if target in interior:
                volume[p.body] -= 1
    surface_net: Counter = Counter()
    outgoing: list[Body] = []
    incoming: list[Body] = []
    for p in sa.exterior_promises:
        for target in st.resolve_promisees(p):
            out = p.promiser in interior and target not in interior
            inbound = target in interior and p.promiser not in interior
            if out:
                surface_net[p.body] += 1
                outgoing.append(p.body)
            if inbound:
                surface_net[p.body] -= 1
                incoming.append(p.body)
    balanced = {k: v for k, v in volume.items() if v} == {
        k: v for k, v in surface_net.items() if v
    }
    return FluxReport(
        balanced,
        tuple(sorted(outgoing, key=_flux_label)),
        tuple(sorted(incoming, key=_flux_label)),
    )


# -- spacetime equivalence -----------------------------------------------------------


def _body_shape(body: Body):
    return (body.sign, body.type_tag, body.symbols, body.valency, body.condition,
            len(body.agent_refs))


def _signature(st: SemanticSpacetime, aid: str):
    # shapes mix ints and None, so sort by repr for a stable canonical order
    outs = sorted(
        ((_body_shape(p.body), len(p.promisees), WILDCARD in p.promisees)
         for p in st.promises if p.promiser == aid),
        key=repr,
    )
    ins = sorted(
        (_body_shape(p.body) for p in st.promises if aid in p.promisees),
        key=repr,
    )
    return (tuple(outs), tuple(ins))


def _mapped_promises(st: SemanticSpacetime, mapping: dict[str, str]) -> frozenset[Promise]:
    def m(x):
        return x if x == WILDCARD else mapping[x]

    mapped = set()
    for p in st.promises:
        body = replace(p.body, agent_refs=tuple(m(r) for r in p.body.agent_refs))
        mapped.add(
            Promise(
                m(p.promiser),
                frozenset(m(t) for t in p.promisees),
                body,
                frozenset(m(x) for x in p.scope),
            )
        )
    return frozenset(mapped)


def spacetime_equivalent(
    st1: SemanticSpacetime, st2: SemanticSpacetime, max_agents: int = 12
) -> bool:
    """True iff some agent relabelling makes the promise structures identical.

    Backtracking isomorphism search over signature-compatible candidates;
    refuses inputs above the configured bound since the cost is factorial.
    """
    ids1, ids2 = st1.agent_ids(), st2.agent_ids()
    if len(ids1) != len(ids2):
        return False
    if len(ids1) > max_agents:
        raise SizeLimitError(
            f"equivalence check refused for {len(ids1)} agents (bound {max_agents})"
        )
    sig1 = {a: _signature(st1, a) for a in ids1}
    sig2 = {a: _signature(st2, a) for a in ids2}
    if Counter(map(repr, sig1.values())) != Counter(map(repr, sig2.values())):
        return False
    candidates = {a: [b for b in ids2 if sig2[b] == sig1[a]] for a in ids1}
    order = sorted(ids1, key=lambda a: len(candidates[a]))
    target = st2.promises

    def backtrack(i: int, mapping: dict[str, str], used: set[str]) -> bool:
        if i == len(order):
            return _mapped_promises(st1, mapping) == target
        a = order[i]
        for b in candidates[a]:
            if b in used:
                continue
            mapping[a] = b
            used.add(b)
            if backtrack(i + 1, mapping, used):
                return True
            del mapping[a]
            used.discard(b)
        return False

    return backtrack(0, {}, set())


def build_directory(st: SemanticSpacetime, sa_id: str) -> Directory:
    """The directory coarse-graining would emit for one super-agent alone."""
    scale_name = f"__directory_of_{sa_id}"
    scratch = define_scale(st, scale_name, {sa_id: st.superagents[sa_id]})
    _, dirs = coarse_grain(scratch, scale_name)
    return dirs[0]
