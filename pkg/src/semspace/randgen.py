"""Seeded random spacetimes and partitions for property scenarios.

The generator draws everything from one ``random.Random`` so runs are
reproducible; the base seed comes from SEMSPACE_SEED when unset.
"""

from __future__ import annotations

import os
import random
from typing import Optional

from .core import Body, SemanticSpacetime, any_promise_neighbors
from .scaling import define_scale

DEFAULT_SEED = 2015


def base_seed() -> int:
    return int(os.environ.get("SEMSPACE_SEED", DEFAULT_SEED))


def random_spacetime(
    rng: random.Random, max_agents: int = 64, max_types: int = 4
) -> SemanticSpacetime:
    """A random promise graph: N <= max_agents agents, <= max_types body types."""
    n = rng.randint(4, max_agents)
    st = SemanticSpacetime()
    ids = [f"A{i:02d}" for i in range(n)]
    for aid in ids:
        st = st.with_agent(aid)
    n_types = rng.randint(1, max_types)
    types = [f"b{t}" for t in range(1, n_types + 1)]
    n_promises = rng.randint(max(2, n // 2), 2 * n)
    for _ in range(n_promises):
        promiser = rng.choice(ids)
        tag = rng.choice(types)
        sign = rng.choice("++-")
        symbols = {}
        for _k in range(rng.randint(1, 3)):
            symbols[f"{tag}s{rng.randint(0, 4)}"] = rng.randint(1, 2)
        valency = rng.randint(1, 8) if rng.random() < 0.4 else None
        if sign == "-" and valency is None:
            valency = 1
        condition = Body("+", "c0") if rng.random() < 0.1 else None
        body = Body(sign, tag, symbols, valency=valency, condition=condition)
        if rng.random() < 0.05:
            promisees = frozenset(("*",))
        else:
            k = rng.randint(1, 2)
            choices = [a for a in ids if a != promiser]
            promisees = frozenset(rng.sample(choices, min(k, len(choices))))
        scope = frozenset()
        if rng.random() < 0.2:
            scope = frozenset((rng.choice(ids),)) - {promiser}
        try:
            st = st.promise(promiser, promisees, body, scope)
        except Exception:
            continue
    return st


def random_partition(
    rng: random.Random, st: SemanticSpacetime, scale_name: str = "random"
) -> tuple[SemanticSpacetime, tuple[str, ...]]:
    """Grow random connected groups and register them as a scale.

    Groups grow by attaching an adjacent unclaimed agent, so every member is
    adjacent to at least one other member by construction (the subspace
    condition).  Agents left over stay implicit singletons.
    """
    neighbors = any_promise_neighbors(st)
    unclaimed = set(st.agents)
    groups: dict[str, set[str]] = {}
    index = 0
    order = sorted(unclaimed)
    rng.shuffle(order)
    for seed in order:
        if seed not in unclaimed:
            continue
        want = rng.randint(2, 6)
        group = {seed}
        while len(group) < want:
            frontier = sorted(
                {nb for m in group for nb in neighbors.get(m, ()) if nb in unclaimed} - group
            )
            if not frontier:
                break
            group.add(rng.choice(frontier))
        if len(group) >= 2:
            name = f"G{index}"
            index += 1
            groups[name] = group
            unclaimed -= group
        else:
            unclaimed.discard(seed)
    if groups:
        st = define_scale(st, scale_name, groups)
    else:
        st = define_scale(st, scale_name, {})
    return st, tuple(sorted(groups))


def seeded_rng(offset: int = 0, seed: Optional[int] = None) -> random.Random:
    return random.Random((base_seed() if seed is None else seed) + offset)
