"""Reachability in causal ordering graphs and d-separation in Markov
ordering graphs."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .errors import GraphError, NonDisjointSets, UnknownVertex
from .graphs import CausalOrderingGraph, MarkovOrderingGraph


def cluster_descendants(cog: CausalOrderingGraph, source) -> set[str]:
    """Variable vertices reachable from ``source`` in the cluster graph.

    ``source`` is a vertex name or a cluster index.  Everything in the
    source's own cluster counts as reachable.
    """
    if isinstance(source, int):
        if not 0 <= source < len(cog.clusters):
            raise UnknownVertex(str(source))
        start = source
    else:
        start = cog.cluster_of(source)
    seen = {start}
    stack = [start]
    while stack:
        i = stack.pop()
        for j in cog.cluster_successors(i):
            if j not in seen:
                seen.add(j)
                stack.append(j)
    out = set()
    for i in seen:
        c = cog.clusters[i]
        if c.kind == "endogenous":
            out.update(c.variables)
    return out


@dataclass(frozen=True)
class SeparationQuery:
    A: frozenset
    B: frozenset
    Z: frozenset = frozenset()

    @classmethod
    def of(cls, a: Iterable[str], b: Iterable[str], z: Iterable[str] = ()):
        return cls(frozenset(a), frozenset(b), frozenset(z))


def _validate(mog: MarkovOrderingGraph, q: SeparationQuery):
    if not q.A or not q.B:
        raise GraphError("A and B must be nonempty")
    known = set(mog.vertices)
    for x in q.A | q.B | q.Z:
        if x not in known:
            raise UnknownVertex(x)
    if q.A & q.B or q.A & q.Z or q.B & q.Z:
        raise NonDisjointSets("A, B and Z must be pairwise disjoint")


def d_separated(mog: MarkovOrderingGraph, q: SeparationQuery) -> bool:
    """Decide A _|_ B | Z via the moral graph of the ancestral set."""
    _validate(mog, q)
    keep = mog.ancestors_of(q.A | q.B | q.Z)
    adj: dict[str, set[str]] = {v: set() for v in keep}
    for v in keep:
        parents = [p for p in mog.parents(v) if p in keep]
        for p in parents:
            adj[v].add(p)
            adj[p].add(v)
        for p1, p2 in combinations(parents, 2):
            adj[p1].add(p2)
            adj[p2].add(p1)
    blocked = q.Z
    seen = set(q.A)
    stack = list(q.A)
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y in blocked or y in seen:
                continue
            if y in q.B:
                return False
            seen.add(y)
            stack.append(y)
    return True


def dsep(mog: MarkovOrderingGraph, a, b, z: Iterable[str] = ()) -> bool:
    """Shorthand for single vertices or iterables."""
    a = {a} if isinstance(a, str) else set(a)
    b = {b} if isinstance(b, str) else set(b)
    return d_separated(mog, SeparationQuery.of(a, b, z))


def implied_independences(
    mog: MarkovOrderingGraph, vars: Sequence[str], max_cond: int = 1
) -> list[tuple[str, str, tuple[str, ...], bool]]:
    """Label every pair of ``vars`` with every conditioning subset of the
    remaining ``vars`` up to size ``max_cond``.

    Pairs follow the order of ``vars``; conditioning sets are listed by size
    and then in ``vars`` order.
    """
    vars = list(vars)
    if max_cond > max(len(vars) - 2, 0):
        raise ValueError(f"max_cond={max_cond} exceeds |vars| - 2 = {len(vars) - 2}")
    out = []
    for size in range(max_cond + 1):
        for i, j in combinations(vars, 2):
            rest = [v for v in vars if v not in (i, j)]
            for z in combinations(rest, size):
                out.append((i, j, z, dsep(mog, i, j, z)))
    return out
