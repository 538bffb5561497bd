"""Valence arithmetic for finite-slot promises.

Offered slots come from + promises, consumed slots from - use-promises.
Utilization is kept as an exact rational so reports never need a tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .core import Promise, SemanticSpacetime
from .errors import TypeMismatchError


@dataclass(frozen=True)
class ValenceReport:
    """Net valence bookkeeping for one promise type over an agent set."""

    type_tag: str
    offered: Optional[int]   # None when some offer is unbounded
    consumed: int

    @property
    def net(self) -> Optional[int]:
        if self.offered is None:
            return None
        return self.offered - self.consumed

    @property
    def utilization(self) -> Optional[Fraction]:
        """Consumed over offered; undefined (None) when nothing is offered."""
        if self.offered is None or self.offered == 0:
            return None
        return Fraction(self.consumed, self.offered)

    @property
    def queue_length(self) -> int:
        """Oversubscription forces a queue of length |net| when net < 0."""
        net = self.net
        if net is None or net >= 0:
            return 0
        return -net

    def csv_row(self) -> str:
        util = self.utilization
        num = "" if util is None else str(util.numerator)
        den = "" if util is None else str(util.denominator)
        offered = "inf" if self.offered is None else str(self.offered)
        net = "inf" if self.net is None else str(self.net)
        return ",".join(
            [self.type_tag, offered, str(self.consumed), net, num, den, str(self.queue_length)]
        )


def valence(st: SemanticSpacetime, type_tag: str, agent_set=None) -> ValenceReport:
    """Sum + and - slot counts of one type over the promises of an agent set.

    An unknown type yields the empty report (offered=consumed=0); that is a
    legitimate answer, not an error.
    """
    if agent_set is None:
        agents = frozenset(st.agents)
    else:
        agents = frozenset((agent_set,)) if isinstance(agent_set, str) else frozenset(agent_set)
    offered: Optional[int] = 0
    consumed = 0
    for p in st.promises:
        if p.body.type_tag != type_tag or p.promiser not in agents:
            continue
        slots = p.body.slot_count()
        if p.body.sign == "+":
            if slots is None:
                offered = None
            elif offered is not None:
                offered += slots
        else:
            consumed += slots
    return ValenceReport(type_tag, offered, consumed)


def is_overcommitted(p: Promise, st: Optional[SemanticSpacetime] = None) -> bool:
    """True iff a bounded offer promises more promisees than it has slots.

    Unbounded offers can never over-commit.  A wildcard promisee list needs
    the snapshot to materialize before it can be counted.
    """
    if p.body.valency is None:
        return False
    promisees = st.resolve_promisees(p) if st is not None else p.promisees
    if "*" in promisees:
        raise ValueError("wildcard promisees need a spacetime to be counted against")
    return len(promisees) > p.body.valency


def is_saturated(offer: Promise, uses: Iterable[Promise]) -> bool:
    """True iff accepted slots m have reached the offered valency n (m >= n)."""
    uses = tuple(uses)
    for u in uses:
        if u.body.sign != "-":
            raise TypeMismatchError(f"saturation expects use-promises, got {u.body.sign}")
        if u.body.type_tag != offer.body.type_tag:
            raise TypeMismatchError(
                f"use-promise type {u.body.type_tag!r} does not match offer {offer.body.type_tag!r}"
            )
        if offer.promiser not in u.promisees:
            raise TypeMismatchError(
                f"use-promise by {u.promiser} is not directed at {offer.promiser}"
            )
    if offer.body.valency is None:
        return False
    consumed = sum(u.body.slot_count() for u in uses)
    return consumed >= offer.body.valency
