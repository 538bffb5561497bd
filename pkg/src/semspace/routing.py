"""Addressing and message-forwarding structures.

Three cost tiers of addressing are modelled: a flat semantic directory
(every agent keeps a table of everyone else), a hierarchical tree of
prefix-routing agents, and a metric Cartesian lattice where forwarding is a
purely local comparison.  A Clos fabric composes tiered dual-homed
tenancies with bottom-up address advertisement.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence, Union

from .core import Body, Promise, SemanticSpacetime, adjacency_neighbors
from .errors import NoRouteError, SizeLimitError, UnknownAgentError

DEFAULT_LATTICE_BOUND = 4096

DISPATCH_TYPE = "dispatch"
MESSAGE_TYPE = "message"
GUARD_CONDITION = "addressed-to-me"
UP_TYPE = "route_up"
DOWN_TYPE = "route_down"
ADVERT_TYPE = "advert"


@dataclass(frozen=True)
class SemanticAddress:
    """A pure name: no ordering, locatable only through a directory."""

    name: str


@dataclass(frozen=True)
class MetricAddress:
    """An integer tuple whose ordering makes forwarding a local decision."""

    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))

    def l1_distance(self, other: "MetricAddress") -> int:
        return sum(abs(a - b) for a, b in zip(self.coords, other.coords))


@dataclass(frozen=True)
class ForwardingTable:
    """Destination patterns mapped to next hops, plus at most one default."""

    owner: str
    entries: tuple[tuple[str, str], ...]
    default_route: Optional[str] = None

    def __post_init__(self):
        patterns = [pat for pat, _ in self.entries]
        if len(set(patterns)) != len(patterns):
            dup = sorted({p for p in patterns if patterns.count(p) > 1})
            raise ValueError(f"duplicate pattern(s) {dup} in {self.owner}'s table")

    def size(self) -> int:
        return len(self.entries)


def _guard_body() -> Body:
    return Body("-", MESSAGE_TYPE, valency=1, condition=Body("+", GUARD_CONDITION))


# -- flat scheme ---------------------------------------------------------------


@dataclass(frozen=True)
class FlatSpace:
    """Every agent keeps one next-hop entry for every other named agent."""

    agents: tuple[str, ...]
    tables: tuple[ForwardingTable, ...]
    kind: str = field(default="flat", init=False)

    @property
    def name(self) -> str:
        return "flat"


def build_flat(st: SemanticSpacetime, agents: Optional[Sequence[str]] = None) -> FlatSpace:
    ids = tuple(sorted(agents)) if agents is not None else st.agent_ids()
    tables = tuple(
        ForwardingTable(aid, tuple((other, other) for other in ids if other != aid))
        for aid in ids
    )
    return FlatSpace(ids, tables)


# -- hierarchical tree -----------------------------------------------------------


@dataclass(frozen=True)
class TreeSpace:
    """Rooted prefix-routing tree; leaves carry unique path-derived addresses."""

    name: str
    branching: int
    depth: int
    root: str
    parent: Mapping[str, str]
    children: Mapping[str, tuple[str, ...]]
    leaves: tuple[str, ...]
    tables: tuple[ForwardingTable, ...]
    kind: str = field(default="tree", init=False)

    def nodes(self) -> tuple[str, ...]:
        return tuple(sorted([self.root, *self.parent.keys()]))


def build_tree(
    st: SemanticSpacetime, branching: int, depth: int, name: str = "tree"
) -> tuple[SemanticSpacetime, TreeSpace]:
    """Grow a dispatch tree: every edge is one forwarding binding.

    Each parent promises to dispatch messages down to each child, and each
    child guards with a use-promise conditional on the address being its
    own, so no message can land at the wrong leaf.
    """
    if branching < 2 or depth < 1:
        raise ValueError("a tree needs branching >= 2 and depth >= 1")
    root = name
    parent: dict[str, str] = {}
    children: dict[str, tuple[str, ...]] = {}
    frontier = [root]
    st = st.with_agent(root)
    for _level in range(depth):
        next_frontier = []
        for node in frontier:
            kids = tuple(f"{node}/{i}" for i in range(branching))
            children[node] = kids
            for kid in kids:
                st = st.with_agent(kid)
                parent[kid] = node
                next_frontier.append(kid)
        frontier = next_frontier
    leaves = tuple(sorted(frontier))
    promises = []
    for node, kids in children.items():
        for kid in kids:
            promises.append(
                Promise(node, frozenset((kid,)),
                        Body("+", DISPATCH_TYPE, agent_refs=(kid,)))
            )
            promises.append(Promise(kid, frozenset((node,)), _guard_body()))
    st = st.with_promises(promises)
    # Routing tables live on the internal nodes: one prefix entry per child
    # subtree plus a default up-route (none at the root).  Leaves hold only
    # their acceptance guard.
    tables = []
    for node in sorted(children):
        entries = tuple((kid, kid) for kid in children[node])
        tables.append(ForwardingTable(node, entries, default_route=parent.get(node)))
    tree = TreeSpace(name, branching, depth, root, parent, children, leaves, tuple(tables))
    structures = dict(st.structures)
    structures[name] = tree
    return replace(st, structures=structures), tree


def _tree_route(tree: TreeSpace, source: str, dest: str) -> tuple[str, ...]:
    if source == dest:
        return ()
    known = set(tree.parent) | {tree.root}
    for node in (source, dest):
        if node not in known:
            raise UnknownAgentError(f"{node!r} is not part of tree {tree.name!r}")
    path = []
    current = source
    # climb until the destination is in this node's subtree (prefix match)
    while not (dest == current or dest.startswith(current + "/")):
        current = tree.parent.get(current)
        if current is None:
            raise NoRouteError(source, dest)
        path.append(current)
    while current != dest:
        nxt = next(
            (kid for kid in tree.children.get(current, ())
             if dest == kid or dest.startswith(kid + "/")),
            None,
        )
        if nxt is None:
            raise NoRouteError(current, dest)
        path.append(nxt)
        current = nxt
    return tuple(path)


# -- metric lattice ---------------------------------------------------------------


@dataclass(frozen=True)
class LatticeSpace:
    """Cartesian tuple-addressed agents with per-axis forwarding promises."""

    name: str
    dims: tuple[int, ...]
    occupied: frozenset[tuple[int, ...]]
    unidirectional: bool
    kind: str = field(default="lattice", init=False)

    def agent_id(self, coords: Sequence[int]) -> str:
        return f"{self.name}(" + ",".join(str(c) for c in coords) + ")"

    def coords_of(self, agent_id: str) -> tuple[int, ...]:
        inner = agent_id[len(self.name) + 1:-1]
        return tuple(int(c) for c in inner.split(","))

    def tables(self) -> tuple[ForwardingTable, ...]:
        out = []
        for coords in sorted(self.occupied):
            entries = []
            for axis in range(len(self.dims)):
                for step, tag in ((1, "+"), (-1, "-")):
                    if self.unidirectional and step < 0:
                        continue
                    neighbor = list(coords)
                    neighbor[axis] += step
                    neighbor = tuple(neighbor)
                    if neighbor in self.occupied:
                        entries.append((f"axis{axis}{tag}", self.agent_id(neighbor)))
            out.append(ForwardingTable(self.agent_id(coords), tuple(entries)))
        return tuple(out)


def _all_coords(dims: Sequence[int]):
    coords = [()]
    for extent in dims:
        coords = [c + (i,) for c in coords for i in range(extent)]
    return coords


def build_lattice(
    st: SemanticSpacetime,
    dims: Sequence[int],
    name: str = "lattice",
    occupied: Optional[Sequence[Sequence[int]]] = None,
    unidirectional: bool = False,
    bound: int = DEFAULT_LATTICE_BOUND,
) -> tuple[SemanticSpacetime, LatticeSpace]:
    """Lay agents on a Cartesian lattice with local forwarding promises.

    The forward (+) promises form the semi-lattice; the mirror-image reverse
    promises complete it unless the space is built unidirectional.  Sparse
    occupancy is allowed: unoccupied tuples are simply not agents.
    """
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise ValueError("every lattice extent must be >= 1")
    total = 1
    for d in dims:
        total *= d
    if total > bound:
        raise SizeLimitError(f"lattice of {total} agents exceeds the bound {bound}")
    if occupied is None:
        cells = frozenset(_all_coords(dims))
    else:
        cells = frozenset(tuple(int(c) for c in coord) for coord in occupied)
        for coord in cells:
            if len(coord) != len(dims) or any(
                c < 0 or c >= d for c, d in zip(coord, dims)
            ):
                raise ValueError(f"occupied point {coord} falls outside dims {dims}")
    space = LatticeSpace(name, dims, cells, unidirectional)
    for coords in sorted(cells):
        st = st.with_agent(space.agent_id(coords))
    promises = []
    for coords in sorted(cells):
        here = space.agent_id(coords)
        for axis in range(len(dims)):
            ahead = list(coords)
            ahead[axis] += 1
            ahead = tuple(ahead)
            if ahead not in cells:
                continue
            there = space.agent_id(ahead)
            promises.append(
                Promise(here, frozenset((there,)),
                        Body("+", DISPATCH_TYPE, agent_refs=(there,)))
            )
            promises.append(Promise(there, frozenset((here,)), _guard_body()))
            if not unidirectional:
                promises.append(
                    Promise(there, frozenset((here,)),
                            Body("+", DISPATCH_TYPE, agent_refs=(here,)))
                )
                promises.append(Promise(here, frozenset((there,)), _guard_body()))
    st = st.with_promises(promises)
    structures = dict(st.structures)
    structures[name] = space
    return replace(st, structures=structures), space


def _lattice_step(space: LatticeSpace, here: tuple[int, ...], dest: tuple[int, ...]):
    """Pick the next L1-decreasing move.

    Rule: raise the lowest axis that must increase, otherwise lower the
    highest axis that must decrease.  The rule is its own mirror image, so a
    route read backwards is the route of the swapped endpoints.
    """
    moves = []
    for axis in range(len(space.dims)):
        if dest[axis] > here[axis]:
            moves.append((0, axis, 1))
        elif dest[axis] < here[axis]:
            moves.append((1, -axis, -1))
    for _priority, signed_axis, step in sorted(moves):
        axis = abs(signed_axis)
        if step < 0 and space.unidirectional:
            continue
        candidate = list(here)
        candidate[axis] += step
        candidate = tuple(candidate)
        if candidate in space.occupied:
            return candidate
    return None


def _lattice_route(space: LatticeSpace, source: str, dest: str) -> tuple[str, ...]:
    src = space.coords_of(source)
    dst = space.coords_of(dest)
    for coords, label in ((src, source), (dst, dest)):
        if coords not in space.occupied:
            raise UnknownAgentError(f"{label!r} is not an occupied lattice point")
    if src == dst:
        return ()
    path = []
    here = src
    while here != dst:
        nxt = _lattice_step(space, here, dst)
        if nxt is None:
            raise NoRouteError(space.agent_id(here), dest)
        path.append(space.agent_id(nxt))
        here = nxt
    return tuple(path)


# -- Clos fabric --------------------------------------------------------------------


@dataclass(frozen=True)
class ClosFabric:
    """Tiered dual-homed fabric: every non-top agent is a tenant of two hosts."""

    name: str
    tiers: tuple[tuple[str, ...], ...]   # tiers[0] = leaves, tiers[-1] = top
    down_valency: int
    parents: Mapping[str, tuple[str, ...]]
    children: Mapping[str, tuple[str, ...]]
    up_edges: tuple[tuple[str, str], ...]
    kind: str = field(default="clos", init=False)

    @property
    def leaves(self) -> tuple[str, ...]:
        return self.tiers[0]

    def coverage(self, removed=frozenset()) -> dict[str, frozenset[str]]:
        """Advertised down-reachability, propagated bottom-up to fixed point."""
        removed = frozenset(removed)
        cover: dict[str, set[str]] = {leaf: {leaf} for leaf in self.leaves}
        for tier in self.tiers[1:]:
            for node in tier:
                reach: set[str] = set()
                for kid in self.children.get(node, ()):
                    if (kid, node) in removed:
                        continue
                    reach |= cover.get(kid, set())
                cover[node] = reach
        return {aid: frozenset(r) for aid, r in cover.items()}


def build_clos(
    st: SemanticSpacetime, tiers: int, down_valency: int, name: str = "clos"
) -> tuple[SemanticSpacetime, ClosFabric]:
    """Weave the tessellating dual-homed tenancy pattern of a Clos fabric.

    Every non-top agent takes exactly two upward tenancies (redundant
    hosts); every non-leaf agent hosts at most ``down_valency`` tenants
    below.  Each child advertises the addresses it can reach downward to
    both of its hosts, which is what makes up/down routing decidable.
    """
    if tiers < 2 or down_valency < 2:
        raise ValueError("a Clos fabric needs tiers >= 2 and down valency >= 2")
    pods_per_tier = [0] * (tiers + 1)
    pods_per_tier[tiers] = 1
    for level in range(tiers - 1, 1, -1):
        pods_per_tier[level] = pods_per_tier[level + 1] * max(1, down_valency // 2)
    n_leaves = pods_per_tier[2] * down_valency if tiers >= 2 else down_valency

    tier_ids: list[tuple[str, ...]] = []
    leaf_ids = tuple(f"{name}:t1n{i}" for i in range(n_leaves))
    tier_ids.append(leaf_ids)
    for level in range(2, tiers + 1):
        count = 2 * pods_per_tier[level]
        tier_ids.append(tuple(f"{name}:t{level}n{i}" for i in range(count)))

    for tier in tier_ids:
        for aid in tier:
            st = st.with_agent(aid)

    parents: dict[str, tuple[str, ...]] = {}
    children: dict[str, list[str]] = {}
    for level in range(1, tiers):
        lower = tier_ids[level - 1]
        upper = tier_ids[level]
        per_pod = down_valency if level == 1 else 2 * max(1, down_valency // 2)
        for i, child in enumerate(lower):
            pod = i // per_pod
            pair = (upper[2 * pod], upper[2 * pod + 1])
            parents[child] = pair
            for parent in pair:
                children.setdefault(parent, []).append(child)

    up_edges = []
    promises = []
    for child, pair in sorted(parents.items()):
        for parent in pair:
            up_edges.append((child, parent))
            up_body = Body("+", UP_TYPE, {parent: 1}, valency=2,
                           condition=Body("-", DOWN_TYPE))
            down_body = Body("+", DOWN_TYPE, {child: 1}, valency=down_valency,
                             condition=Body("-", UP_TYPE))
            promises.append(Promise(child, frozenset((parent,)), up_body))
            promises.append(Promise(parent, frozenset((child,)), down_body))
            promises.append(Promise(child, frozenset((parent,)),
                                    Body("-", DOWN_TYPE, valency=1)))
            promises.append(Promise(parent, frozenset((child,)),
                                    Body("-", UP_TYPE, valency=1)))

    fabric = ClosFabric(
        name,
        tuple(tier_ids),
        down_valency,
        parents,
        {aid: tuple(kids) for aid, kids in children.items()},
        tuple(sorted(up_edges)),
    )
    cover = fabric.coverage()
    for child, pair in sorted(parents.items()):
        advert = Body("+", ADVERT_TYPE, {leaf: 1 for leaf in sorted(cover[child])})
        promises.append(Promise(child, frozenset(pair), advert))
    st = st.with_promises(promises)
    structures = dict(st.structures)
    structures[name] = fabric
    return replace(st, structures=structures), fabric


def clos_route(
    fabric: ClosFabric,
    src_leaf: str,
    dst_leaf: str,
    tiebreak: str = "lowest-id",
    removed=frozenset(),
) -> tuple[str, ...]:
    """Climb until an agent advertises the destination below it, then descend.

    Among equal-cost uplinks the lowest agent id wins by default, keeping
    routes deterministic; the "hash" tiebreak spreads flows per (src, dst)
    pair, still deterministically across runs.  ``removed`` withdraws upward
    bindings (and the advertisements that travelled over them) to simulate
    link failures.
    """
    if tiebreak == "lowest-id":
        def pick(candidates):
            return sorted(candidates)[0]
    elif tiebreak == "hash":
        import hashlib

        def pick(candidates):
            def key(cand):
                digest = hashlib.sha256(
                    f"{src_leaf}|{dst_leaf}|{cand}".encode()
                ).hexdigest()
                return (digest, cand)
            return min(candidates, key=key)
    else:
        raise ValueError(f"unknown tiebreak {tiebreak!r}")
    for leaf in (src_leaf, dst_leaf):
        if leaf not in fabric.leaves:
            raise UnknownAgentError(f"{leaf!r} is not a leaf of fabric {fabric.name!r}")
    if src_leaf == dst_leaf:
        return ()
    removed = frozenset(removed)
    cover = fabric.coverage(removed)
    path = []
    current = src_leaf
    while dst_leaf not in cover[current]:
        live = [p for p in fabric.parents.get(current, ())
                if (current, p) not in removed]
        if not live:
            raise NoRouteError(current, dst_leaf)
        covering = [p for p in live if dst_leaf in cover[p]]
        current = pick(covering) if covering else pick(live)
        path.append(current)
    while current != dst_leaf:
        kids = [
            kid for kid in fabric.children.get(current, ())
            if (kid, current) not in removed and dst_leaf in cover[kid]
        ]
        if not kids:
            raise NoRouteError(current, dst_leaf)
        current = pick(kids)
        path.append(current)
    return tuple(path)


# -- scheme lookup, routing and cost reports ---------------------------------------------


def _find_structure(st: SemanticSpacetime, scheme: str):
    if scheme in st.structures:
        return st.structures[scheme]
    kind_aliases = {
        "flat": "flat", "flat-directory": "flat",
        "hierarchical": "tree", "tree": "tree",
        "lattice": "lattice", "clos": "clos",
    }
    kind = kind_aliases.get(scheme)
    if kind == "flat":
        return build_flat(st)
    if kind is None:
        raise UnknownAgentError(f"no structure or scheme named {scheme!r}")
    matches = [s for s in st.structures.values() if getattr(s, "kind", None) == kind]
    if len(matches) != 1:
        raise UnknownAgentError(
            f"scheme {scheme!r} matches {len(matches)} structures; name one explicitly"
        )
    return matches[0]


def route(
    st: SemanticSpacetime,
    source: str,
    dest: Union[str, SemanticAddress, MetricAddress],
    scheme: str,
) -> tuple[str, ...]:
    """Hop sequence from source to destination under the named scheme.

    Lattice routing strictly decreases L1 distance each hop; tree routing
    prefix-matches up and down; flat routing is one directory lookup
    followed by the substrate path.
    """
    space = _find_structure(st, scheme)
    if isinstance(dest, MetricAddress):
        if not isinstance(space, LatticeSpace):
            raise UnknownAgentError("metric addresses route only on lattices")
        dest = space.agent_id(dest.coords)
    elif isinstance(dest, SemanticAddress):
        dest = dest.name
    if isinstance(space, LatticeSpace):
        return _lattice_route(space, source, dest)
    if isinstance(space, TreeSpace):
        return _tree_route(space, source, dest)
    if isinstance(space, ClosFabric):
        return clos_route(space, source, dest)
    if isinstance(space, FlatSpace):
        if dest not in space.agents:
            raise NoRouteError(source, dest)
        if source == dest:
            return ()
        neighbors = adjacency_neighbors(st)
        if any(neighbors.values()):
            hops = {source: ()}
            queue = deque([source])
            while queue:
                cur = queue.popleft()
                if cur == dest:
                    return hops[cur]
                for nxt in sorted(neighbors.get(cur, ())):
                    if nxt not in hops:
                        hops[nxt] = hops[cur] + (nxt,)
                        queue.append(nxt)
            raise NoRouteError(source, dest)
        return (dest,)
    raise UnknownAgentError(f"cannot route over structure kind {type(space).__name__}")


@dataclass(frozen=True)
class TableCostReport:
    """Exact forwarding-table accounting for one scheme."""

    scheme: str
    n: int                # addressable endpoints
    total_entries: int
    max_per_agent: int

    def csv_row(self) -> str:
        return ",".join([self.scheme, str(self.n), str(self.total_entries),
                         str(self.max_per_agent)])


def table_cost(st: SemanticSpacetime, scheme: str) -> TableCostReport:
    """Count forwarding entries exactly; N is the addressable endpoint count."""
    space = _find_structure(st, scheme)
    if isinstance(space, FlatSpace):
        tables = space.tables
        n = len(space.agents)
    elif isinstance(space, TreeSpace):
        tables = space.tables
        n = len(space.leaves)
    elif isinstance(space, LatticeSpace):
        tables = space.tables()
        n = len(space.occupied)
    elif isinstance(space, ClosFabric):
        cover = space.coverage()
        tables = []
        for tier in space.tiers:
            for aid in tier:
                entries = tuple((leaf, leaf) for leaf in sorted(cover[aid] - {aid}))
                tables.append(ForwardingTable(aid, entries))
        tables = tuple(tables)
        n = len(space.leaves)
    else:
        raise UnknownAgentError(f"no table accounting for {type(space).__name__}")
    sizes = [t.size() + (1 if t.default_route else 0) for t in tables]
    label = getattr(space, "kind", scheme)
    return TableCostReport(label, n, sum(sizes), max(sizes, default=0))
