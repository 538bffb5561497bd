"""Delivery of promises across super-agent boundaries.

A promise made to a boundary either floods blindly through the adjacency
substrate, or is dispatched to the directory-resolved subset of interior
agents.  Either way, acceptance stays with the sub-agents: only a matching
use-promise turns a reached agent into an accepting one.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping, Optional, Union

from .core import WILDCARD, Body, Promise, SemanticSpacetime, adjacency_neighbors
from .errors import NoChannelError, OpacityError, UnknownAgentError
from .scaling import Directory, SuperAgent, build_directory, get_superagent

DIRECTORY_TYPE = "directory"


@dataclass(frozen=True)
class DeliveryOutcome:
    """Who a delivery reached, who accepted it, and how far it travelled."""

    mode: str
    reached: frozenset[str]
    accepted: frozenset[str]
    hops: Mapping[str, int]

    @property
    def max_hops(self) -> int:
        return max(self.hops.values(), default=0)

    def csv_row(self) -> str:
        return ",".join(
            [self.mode, str(len(self.reached)), str(len(self.accepted)), str(self.max_hops)]
        )


def _bfs_hops(neighbors, start: str) -> dict[str, int]:
    hops = {start: 0}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for nxt in sorted(neighbors.get(current, ())):
            if nxt not in hops:
                hops[nxt] = hops[current] + 1
                queue.append(nxt)
    return hops


def _acceptors(st: SemanticSpacetime, promise: Promise, sa: SuperAgent, among) -> frozenset[str]:
    """Interior agents holding a matching use-promise for the delivery."""
    accepted = set()
    want_sign = "-" if promise.body.sign == "+" else "+"
    for p in st.promises:
        if p.promiser not in among:
            continue
        if p.body.sign != want_sign or p.body.type_tag != promise.body.type_tag:
            continue
        targets = st.resolve_promisees(p)
        if promise.promiser in targets or sa.id in targets:
            accepted.add(p.promiser)
    return frozenset(accepted)


def flood(st: SemanticSpacetime, promise: Promise, target_sa: Union[str, SuperAgent]) -> DeliveryOutcome:
    """Broadcast to every interior agent reachable over the substrate.

    Flooding needs a channel: if no surface agent is reachable from the
    promiser along adjacency promises, there is nothing to flood into.
    Visits are breadth-first in sorted-neighbour order, each agent at most
    once, so outcomes are deterministic.
    """
    sa = get_superagent(st, target_sa) if isinstance(target_sa, str) else target_sa
    neighbors = adjacency_neighbors(st)
    hops = _bfs_hops(neighbors, promise.promiser)
    if not (set(hops) & sa.surface_agents):
        raise NoChannelError(
            f"no adjacency channel from {promise.promiser!r} to the surface of {sa.id!r}"
        )
    reached = frozenset(aid for aid in hops if aid in sa.interior)
    accepted = _acceptors(st, promise, sa, reached)
    return DeliveryOutcome(
        "flood", reached, accepted, {aid: hops[aid] for aid in sorted(reached)}
    )


def dispatch(
    st: SemanticSpacetime,
    promise: Promise,
    target_sa: Union[str, SuperAgent],
    directory: Optional[Directory] = None,
) -> DeliveryOutcome:
    """Deliver to the directory-resolved subset for the promise's type.

    Direction requires sight through the boundary: an explicit directory, a
    published one (transparency), or a designated gateway that relays at the
    cost of extra hops.  With none of these the boundary is opaque.
    """
    sa = get_superagent(st, target_sa) if isinstance(target_sa, str) else target_sa
    gateway = st.gateways.get(sa.id)
    via_gateway = False
    if directory is None:
        if is_transparent(st, sa.id):
            directory = build_directory(st, sa.id)
        elif gateway is not None:
            directory = build_directory(st, sa.id)
            via_gateway = True
        else:
            raise OpacityError(
                f"{sa.id!r} is opaque: no directory published and no gateway designated"
            )
    want_sign = "-" if promise.body.sign == "+" else "+"
    reached = directory.agents_for(promise.body.type_tag, sign=want_sign)
    if not reached:
        reached = directory.agents_for(promise.body.type_tag)
    reached &= sa.interior
    hops: dict[str, int] = {}
    if via_gateway:
        neighbors = adjacency_neighbors(st)
        to_gateway = _bfs_hops(neighbors, promise.promiser)
        if gateway not in to_gateway:
            raise NoChannelError(
                f"gateway {gateway!r} is unreachable from {promise.promiser!r}"
            )
        from_gateway = _bfs_hops(neighbors, gateway)
        for aid in reached:
            if aid in from_gateway:
                hops[aid] = to_gateway[gateway] + from_gateway[aid]
    else:
        # sight through the boundary grants a direct (virtual) adjacency
        hops = {aid: 1 for aid in reached}
    accepted = _acceptors(st, promise, sa, reached)
    mode = "gateway" if via_gateway else "direct"
    return DeliveryOutcome(mode, reached, accepted, hops)


def is_transparent(st: SemanticSpacetime, sa_id: str) -> bool:
    """A super-agent is transparent once it promises its directory outward."""
    for p in st.promises:
        if (
            p.promiser == sa_id
            and p.body.sign == "+"
            and p.body.type_tag == DIRECTORY_TYPE
        ):
            return True
    return False


def make_transparent(st: SemanticSpacetime, sa: Union[str, SuperAgent]) -> SemanticSpacetime:
    """Publish the coarse-graining directory to wildcard scope (idempotent)."""
    sa_id = sa if isinstance(sa, str) else sa.id
    if sa_id not in st.superagents:
        raise UnknownAgentError(f"{sa_id!r} is not a declared super-agent")
    body = Body("+", DIRECTORY_TYPE, {sa_id: 1})
    return st.promise(sa_id, frozenset((WILDCARD,)), body)


def effective_scope(st: SemanticSpacetime, promise: Promise) -> frozenset[str]:
    """Scope of a promise, seen through any transparent super-agent promisee.

    An opaque boundary stands for itself; a published directory widens the
    scope with the sub-agents it lists.
    """
    scope = set(st.resolve_scope(promise))
    for target in promise.promisees:
        if target == WILDCARD or target not in st.superagents:
            continue
        if is_transparent(st, target):
            directory = build_directory(st, target)
            listed = set()
            for entries in directory.entries.values():
                for p in entries:
                    listed.add(p.promiser)
                    listed |= set(p.promisees) - {WILDCARD}
            scope |= listed & st.superagents[target]
    return frozenset(scope)
