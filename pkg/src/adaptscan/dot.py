"""Graphviz DOT output with stable node and edge order."""

from __future__ import annotations

from typing import Mapping

from .graphs import CausalOrderingGraph, MarkovOrderingGraph


def _q(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def oriented_to_dot(graph: Mapping[str, tuple[str, ...]], name: str = "oriented") -> str:
    lines = [f"digraph {_q(name)} {{"]
    for node in graph:
        shape = "box" if node[:1] in ("f", "g") else "ellipse"
        lines.append(f"  {_q(node)} [shape={shape}];")
    for a, succ in graph.items():
        for b in succ:
            lines.append(f"  {_q(a)} -> {_q(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def cog_to_dot(cog: CausalOrderingGraph, name: str = "causal_ordering") -> str:
    """Clusters become ``subgraph cluster_<i>`` boxes; an edge into a cluster
    points at its first member with ``lhead`` set to the box."""
    lines = [f"digraph {_q(name)} {{", "  compound=true;"]
    for i, c in enumerate(cog.clusters):
        if c.kind != "endogenous":
            lines.append(f"  {_q(c.variables[0])} [shape=plaintext, kind={c.kind}];")
            continue
        lines.append(f"  subgraph cluster_{i} {{")
        for v in c.variables:
            lines.append(f"    {_q(v)} [shape=ellipse];")
        for f in c.equations:
            lines.append(f"    {_q(f)} [shape=box];")
        lines.append("  }")
    for s, j in cog.edges:
        head = cog.clusters[j].members[0]
        lines.append(f"  {_q(s)} -> {_q(head)} [lhead=cluster_{j}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def mog_to_dot(mog: MarkovOrderingGraph, name: str = "markov_ordering") -> str:
    lines = [f"digraph {_q(name)} {{"]
    for v in mog.vertices:
        kind = mog.kinds.get(v, "variable")
        shape = "ellipse" if kind == "variable" else "plaintext"
        lines.append(f"  {_q(v)} [shape={shape}];")
    for a, b in mog.edges:
        lines.append(f"  {_q(a)} -> {_q(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
