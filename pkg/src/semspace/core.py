"""Agents, promise bodies, promises and the semantic-spacetime snapshot.

A spacetime is the doublet of an agent set and a promise set.  Every
operation here is a pure transformation: it takes a snapshot and returns a
new one, so snapshots can be shared freely between threads and scenarios.

Sign conventions: "+" offers behaviour, "-" promises to accept (use) it.
The wildcard promisee "*" stands for "all current agents" and is resolved
lazily at query time against the snapshot it is queried on.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional

from .errors import (
    DuplicateAliasError,
    AutonomyViolationError,
    SelfPromiseError,
    SelfReferenceError,
    UnknownAgentError,
)

WILDCARD = "*"


def _normalize_symbols(symbols) -> tuple[tuple[str, int], ...]:
    """Coerce a dict / iterable of symbols into a sorted (symbol, coeff) tuple."""
    if symbols is None:
        return ()
    if isinstance(symbols, Mapping):
        items = symbols.items()
    elif isinstance(symbols, str):
        items = [(symbols, 1)]
    else:
        items = []
        for entry in symbols:
            if isinstance(entry, tuple):
                items.append(entry)
            else:
                items.append((entry, 1))
    merged: dict[str, int] = {}
    for sym, coeff in items:
        coeff = int(coeff)
        if coeff <= 0:
            raise ValueError(f"symbol coefficient must be a positive integer: {sym}={coeff}")
        merged[sym] = merged.get(sym, 0) + coeff
    return tuple(sorted(merged.items()))


@dataclass(frozen=True)
class Body:
    """Signed, typed, discrete-alphabet content of a promise.

    Bodies compare by (sign, type tag, symbol multiset, valency, condition);
    coefficients are small positive integers, valency None means unbounded.
    ``agent_refs`` are the other agencies named by the body (its tensor
    structure); they never include the promiser.
    """

    sign: str
    type_tag: str
    symbols: tuple[tuple[str, int], ...] = ()
    valency: Optional[int] = None
    condition: Optional["Body"] = None
    agent_refs: tuple[str, ...] = ()

    def __post_init__(self):
        if self.sign not in ("+", "-"):
            raise ValueError(f"body sign must be '+' or '-', got {self.sign!r}")
        if self.valency is not None and self.valency < 1:
            raise ValueError("bounded valency must be >= 1")
        object.__setattr__(self, "symbols", _normalize_symbols(self.symbols))
        object.__setattr__(self, "agent_refs", tuple(self.agent_refs))

    @property
    def symbol_set(self) -> frozenset[str]:
        return frozenset(sym for sym, _ in self.symbols)

    def coefficient(self, symbol: str) -> int:
        for sym, coeff in self.symbols:
            if sym == symbol:
                return coeff
        return 0

    def is_empty(self) -> bool:
        """An empty body carries no intent: no type and no symbols."""
        return not self.type_tag and not self.symbols

    def slot_count(self) -> Optional[int]:
        """Slots taken or offered; an omitted count on a use-promise means 1.

        Unbounded offers (+ with no valency) have no slot count and return None.
        """
        if self.valency is not None:
            return self.valency
        return 1 if self.sign == "-" else None

    def render(self) -> str:
        text = f"{self.sign}{self.type_tag}"
        if self.symbols:
            parts = [sym if coeff == 1 else f"{sym}:{coeff}" for sym, coeff in self.symbols]
            text += "{" + ",".join(parts) + "}"
        if self.valency is not None:
            text += f" #{self.valency}"
        if self.agent_refs:
            text += "(" + ",".join(self.agent_refs) + ")"
        if self.condition is not None:
            text += f" | {self.condition.sign}{self.condition.type_tag}"
        return text

    def __str__(self):
        return self.render()


def _as_idset(value) -> frozenset[str]:
    if value is None:
        return frozenset()
    if isinstance(value, str):
        return frozenset((value,))
    return frozenset(value)


@dataclass(frozen=True)
class Promise:
    """A scoped promise from one agent to a set of promisees.

    The scope is always a superset of the promisees: whoever is promised-to
    also knows of the promise.  Self-promises are rejected outright rather
    than ignored, so scenario typos surface immediately.
    """

    promiser: str
    promisees: frozenset[str]
    body: Body
    scope: frozenset[str] = frozenset()

    def __post_init__(self):
        promisees = _as_idset(self.promisees)
        scope = _as_idset(self.scope) | promisees
        if not promisees:
            raise ValueError("a promise needs at least one promisee (use '*' for all)")
        if self.promiser == WILDCARD:
            raise ValueError("the wildcard cannot promise")
        if self.promiser in promisees:
            raise SelfPromiseError(f"{self.promiser} cannot promise to itself")
        if self.promiser in self.body.agent_refs:
            raise SelfReferenceError(
                f"{self.promiser} cannot name itself in its own promise body"
            )
        object.__setattr__(self, "promisees", promisees)
        object.__setattr__(self, "scope", scope)

    def render(self) -> str:
        to = ",".join(sorted(self.promisees))
        return f"{self.promiser} -> {to} : {self.body.render()}"

    def __str__(self):
        return self.render()


@dataclass(frozen=True)
class Agent:
    """Identity-bearing node.  The name is itself the agent's scalar promise."""

    id: str
    name: str = ""
    residents: frozenset[str] = frozenset()

    def __post_init__(self):
        if not self.name:
            object.__setattr__(self, "name", self.id)
        residents = _as_idset(self.residents)
        if self.id in residents:
            raise ValueError(f"agent {self.id} cannot be resident in itself")
        object.__setattr__(self, "residents", residents)


@dataclass(frozen=True)
class Alias:
    """A scoped scalar label for an agent; empty scope means wildcard."""

    label: str
    agent: str
    scope: frozenset[str]
    wildcard: bool = False


@dataclass(frozen=True)
class Scale:
    """A named partition of the agent set into singleton or super-agent groups."""

    name: str
    groups: tuple[tuple[str, frozenset[str]], ...]

    def group_of(self, agent_id: str) -> Optional[str]:
        for gname, members in self.groups:
            if agent_id in members:
                return gname
        return None

    def super_groups(self) -> tuple[tuple[str, frozenset[str]], ...]:
        return tuple((n, m) for n, m in self.groups if len(m) > 1)


@dataclass(frozen=True)
class SemanticSpacetime:
    """Immutable snapshot of agents, promises and scale bookkeeping."""

    agents: Mapping[str, Agent] = field(default_factory=dict)
    promises: frozenset[Promise] = frozenset()
    superagents: Mapping[str, frozenset[str]] = field(default_factory=dict)
    scales: Mapping[str, Scale] = field(default_factory=dict)
    aliases: tuple[Alias, ...] = ()
    adjacency_type: str = "adj"
    gateways: Mapping[str, str] = field(default_factory=dict)
    structures: Mapping[str, object] = field(default_factory=dict)
    tenancies: tuple = ()
    namespaces: Mapping[str, object] = field(default_factory=dict)
    policy: str = "strict"
    applied_scale: Optional[str] = None

    # -- construction -----------------------------------------------------

    def with_agent(self, agent_or_id, name: str = "") -> "SemanticSpacetime":
        agent = agent_or_id if isinstance(agent_or_id, Agent) else Agent(agent_or_id, name)
        if agent.id == WILDCARD:
            raise ValueError("'*' is reserved for the wildcard")
        if agent.id in self.agents:
            raise ValueError(f"duplicate agent id {agent.id!r}")
        agents = dict(self.agents)
        agents[agent.id] = agent
        return replace(self, agents=agents)

    def replace_agent(self, agent: Agent) -> "SemanticSpacetime":
        if agent.id not in self.agents:
            raise UnknownAgentError(agent.id)
        agents = dict(self.agents)
        agents[agent.id] = agent
        return replace(self, agents=agents)

    def _check_refs(self, p: Promise):
        referenced = {p.promiser}
        referenced |= set(p.promisees) | set(p.scope) | set(p.body.agent_refs)
        referenced.discard(WILDCARD)
        for aid in referenced:
            if aid not in self.agents:
                raise UnknownAgentError(f"promise references unknown agent {aid!r}")

    def with_promise(self, p: Promise) -> "SemanticSpacetime":
        self._check_refs(p)
        return replace(self, promises=self.promises | {p})

    def with_promises(self, ps: Iterable[Promise]) -> "SemanticSpacetime":
        ps = tuple(ps)
        for p in ps:
            self._check_refs(p)
        return replace(self, promises=self.promises | set(ps))

    def without_promise(self, p: Promise) -> "SemanticSpacetime":
        return replace(self, promises=self.promises - {p})

    def promise(self, promiser, promisees, body, scope=None) -> "SemanticSpacetime":
        """Convenience: build and record a promise in one step."""
        return self.with_promise(
            Promise(promiser, _as_idset(promisees), body, _as_idset(scope))
        )

    # -- queries -----------------------------------------------------------

    def agent_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.agents))

    def resolve_promisees(self, p: Promise) -> frozenset[str]:
        if WILDCARD in p.promisees:
            rest = p.promisees - {WILDCARD}
            return frozenset(self.agents) - {p.promiser} | rest
        return p.promisees

    def resolve_scope(self, p: Promise) -> frozenset[str]:
        if WILDCARD in p.scope:
            rest = p.scope - {WILDCARD}
            return frozenset(self.agents) - {p.promiser} | rest
        return p.scope | self.resolve_promisees(p)

    def promises_from(self, agent_id: str) -> tuple[Promise, ...]:
        return tuple(sorted(
            (p for p in self.promises if p.promiser == agent_id),
            key=lambda p: p.render(),
        ))

    def promises_of_type(self, type_tag: str) -> tuple[Promise, ...]:
        return tuple(sorted(
            (p for p in self.promises if p.body.type_tag == type_tag),
            key=lambda p: p.render(),
        ))

    def sorted_promises(self) -> tuple[Promise, ...]:
        return tuple(sorted(self.promises, key=lambda p: p.render()))

    def resident_host(self, child_id: str) -> Optional[str]:
        for agent in self.agents.values():
            if child_id in agent.residents:
                return agent.id
        return None


# -- tensor rank ------------------------------------------------------------


def promise_rank(body: Body) -> int:
    """Number of distinct agencies a body relates, with the use-promise floor.

    A use-promise quenches an offer initiated by a remote promiser, so even
    with no explicit references it binds one other agency and has rank 1.
    """
    rank = len(set(body.agent_refs))
    if body.sign == "-":
        return max(rank, 1)
    return rank


def rank_decomposition(st: SemanticSpacetime) -> dict[int, frozenset[Promise]]:
    """Partition the promise set into buckets keyed by tensor rank."""
    buckets: dict[int, set[Promise]] = {}
    for p in st.promises:
        buckets.setdefault(promise_rank(p.body), set()).add(p)
    return {rank: frozenset(ps) for rank, ps in buckets.items()}


# -- adjacency ----------------------------------------------------------------


@dataclass(frozen=True)
class AdjacencyMatrix:
    """0/1 matrix over sorted agent ids; entry (i,j)=1 iff a non-empty promise runs i->j."""

    labels: tuple[str, ...]
    entries: tuple[tuple[int, ...], ...]

    def entry(self, i_id: str, j_id: str) -> int:
        i = self.labels.index(i_id)
        j = self.labels.index(j_id)
        return self.entries[i][j]

    def nonzero_count(self) -> int:
        return sum(sum(row) for row in self.entries)

    def is_symmetric(self) -> bool:
        n = len(self.labels)
        return all(
            self.entries[i][j] == self.entries[j][i] for i in range(n) for j in range(n)
        )


def promise_adjacency_matrix(st: SemanticSpacetime) -> AdjacencyMatrix:
    labels = st.agent_ids()
    index = {aid: i for i, aid in enumerate(labels)}
    rows = [[0] * len(labels) for _ in labels]
    for p in st.promises:
        if p.body.is_empty():
            continue
        i = index[p.promiser]
        for target in st.resolve_promisees(p):
            if target == p.promiser:
                continue
            rows[i][index[target]] = 1
    return AdjacencyMatrix(labels, tuple(tuple(r) for r in rows))


def adjacency_neighbors(st: SemanticSpacetime, type_tag: Optional[str] = None) -> dict[str, frozenset[str]]:
    """Undirected neighbour map over the adjacency substrate.

    The substrate is the promise graph restricted to the designated adjacency
    type (``st.adjacency_type`` unless overridden); promises of that type in
    either direction make two agents mutually adjacent.
    """
    tag = st.adjacency_type if type_tag is None else type_tag
    neighbors: dict[str, set[str]] = {aid: set() for aid in st.agents}
    for p in st.promises:
        if p.body.type_tag != tag or p.body.is_empty():
            continue
        for target in st.resolve_promisees(p):
            if target == p.promiser:
                continue
            neighbors[p.promiser].add(target)
            neighbors[target].add(p.promiser)
    return {aid: frozenset(ns) for aid, ns in neighbors.items()}


def any_promise_neighbors(st: SemanticSpacetime) -> dict[str, frozenset[str]]:
    """Undirected neighbour map over every non-empty promise (any type)."""
    neighbors: dict[str, set[str]] = {aid: set() for aid in st.agents}
    for p in st.promises:
        if p.body.is_empty():
            continue
        for target in st.resolve_promisees(p):
            if target == p.promiser:
                continue
            neighbors[p.promiser].add(target)
            neighbors[target].add(p.promiser)
    return {aid: frozenset(ns) for aid, ns in neighbors.items()}


# -- information completeness -------------------------------------------------


def complete_information(p: Promise, st: Optional[SemanticSpacetime] = None) -> bool:
    """True iff every agency named in the body is in scope of the promise."""
    if WILDCARD in p.scope:
        return True
    scope = st.resolve_scope(p) if st is not None else p.scope
    return all(ref in scope for ref in p.body.agent_refs)


# -- labels ---------------------------------------------------------------------


def relabel_by_scalar(
    st: SemanticSpacetime, agent_id: str, label: str, scope=None
) -> SemanticSpacetime:
    """Attach a scalar name-promise so the agent is addressable by ``label``.

    The label is an alias local to the given scope (wildcard when omitted).
    A second label that would be ambiguous anywhere inside that scope is an
    error: two agents may share a label only over disjoint scopes.
    """
    if agent_id not in st.agents:
        raise UnknownAgentError(agent_id)
    wildcard = scope is None
    scope_set = frozenset() if wildcard else _as_idset(scope)
    for alias in st.aliases:
        if alias.label != label:
            continue
        overlap = (
            alias.wildcard
            or wildcard
            or bool(alias.scope & scope_set)
        )
        if overlap:
            raise DuplicateAliasError(
                f"label {label!r} is already bound within an overlapping scope"
            )
    body = Body("+", "name", {label: 1})
    promisees = frozenset((WILDCARD,)) if wildcard else scope_set
    st = st.promise(agent_id, promisees, body, scope=promisees)
    alias = Alias(label, agent_id, scope_set, wildcard)
    return replace(st, aliases=st.aliases + (alias,))


def resolve_name(st: SemanticSpacetime, label: str, observer: Optional[str] = None) -> str:
    """Map a label back to an agent id, honouring alias scopes."""
    for alias in st.aliases:
        if alias.label != label:
            continue
        if alias.wildcard or observer is None or observer in alias.scope:
            return alias.agent
    if label in st.agents:
        return label
    for agent in st.agents.values():
        if agent.name == label:
            return agent.id
    raise UnknownAgentError(f"no agent answers to {label!r}")


# -- emission and absorption ---------------------------------------------------


def emit(st: SemanticSpacetime, parent_id: str, child_id: str, recipient_id: str) -> SemanticSpacetime:
    """Release a resident child as a free agent, promised to the recipient.

    Autonomy requires the child to be resident at the outset; emitting a
    non-resident is rejected.  The child keeps its own promises.
    """
    for aid in (parent_id, child_id, recipient_id):
        if aid not in st.agents:
            raise UnknownAgentError(aid)
    parent = st.agents[parent_id]
    if child_id not in parent.residents:
        raise AutonomyViolationError(
            f"{parent_id} cannot emit {child_id}: not resident at the outset"
        )
    st = st.replace_agent(replace(parent, residents=parent.residents - {child_id}))
    body = Body("+", "emit", agent_refs=(child_id,))
    return st.promise(parent_id, frozenset((recipient_id,)), body)


def absorb(st: SemanticSpacetime, recipient_id: str, child_id: str, sender_id: str) -> SemanticSpacetime:
    """Incorporate a free child into the recipient's resident set."""
    for aid in (recipient_id, child_id, sender_id):
        if aid not in st.agents:
            raise UnknownAgentError(aid)
    host = st.resident_host(child_id)
    if host is not None:
        raise AutonomyViolationError(
            f"{child_id} is already resident in {host}; absorb rejected"
        )
    recipient = st.agents[recipient_id]
    if child_id == recipient_id:
        raise AutonomyViolationError(f"{recipient_id} cannot absorb itself")
    st = st.replace_agent(replace(recipient, residents=recipient.residents | {child_id}))
    body = Body("-", "emit", agent_refs=(child_id,))
    return st.promise(recipient_id, frozenset((sender_id,)), body)
