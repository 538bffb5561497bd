"""Deterministic DOT export.

Emission is fully sorted, so the same spacetime always serializes to the
same bytes; Clos fabrics add one rank-same block per tier.
"""

from __future__ import annotations

from .core import SemanticSpacetime
from .routing import ClosFabric


def _quote(text: str) -> str:
    return '"' + text.replace('"', '\\"') + '"'


def spacetime_to_dot(st: SemanticSpacetime, graph_name: str = "semspace") -> str:
    lines = [f"digraph {graph_name} {{", "  node [shape=ellipse];"]
    wildcard_used = any("*" in p.promisees for p in st.promises)
    for aid in st.agent_ids():
        label = st.agents[aid].name
        if label != aid:
            lines.append(f"  {_quote(aid)} [label={_quote(label)}];")
        else:
            lines.append(f"  {_quote(aid)};")
    if wildcard_used:
        lines.append('  "*" [shape=point];')
    edges = []
    for p in st.promises:
        for target in sorted(p.promisees):
            edges.append(
                f"  {_quote(p.promiser)} -> {_quote(target)} "
                f"[label={_quote(p.body.render())}];"
            )
    lines.extend(sorted(edges))
    for name in sorted(st.structures):
        space = st.structures[name]
        if isinstance(space, ClosFabric):
            for tier in space.tiers:
                members = "; ".join(_quote(aid) for aid in sorted(tier))
                lines.append(f"  {{ rank=same; {members}; }}")
    lines.append("}")
    return "\n".join(lines) + "\n"
