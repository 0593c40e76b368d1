"""Causal ordering: bipartite systems, perfect matchings, SCC clustering and
Markov ordering graphs.

All iteration follows declaration order so every result is deterministic.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import (
    DegenerateEquation,
    GraphError,
    InvalidMatching,
    NoPerfectMatching,
    SizeMismatch,
    TooLarge,
    UnknownVertex,
)
from .model import EquationSystem, var_vertex

MAX_ENUMERATION = 12


# -- bipartite systems -------------------------------------------------------


@dataclass(frozen=True)
class BipartiteSystem:
    """Undirected bipartite graph between variable and equation vertices.

    ``attachments`` maps each exogenous or input symbol to the equations it
    appears in; ``inputs`` says which of those symbols are input signals.
    ``natural`` maps equation vertices to variable vertices under the
    natural labelling (only for equations derived from dynamics).
    """

    var_vertices: tuple[str, ...]
    eq_vertices: tuple[str, ...]
    edges: frozenset  # of (v, f)
    attachments: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    inputs: tuple[str, ...] = ()
    natural: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        vs, fs = set(self.var_vertices), set(self.eq_vertices)
        if len(vs) != len(self.var_vertices) or len(fs) != len(self.eq_vertices):
            raise GraphError("duplicate vertex names")
        if vs & fs:
            raise GraphError(f"vertices on both sides: {sorted(vs & fs)}")
        for v, f in self.edges:
            if v not in vs or f not in fs:
                raise GraphError(f"edge ({v}, {f}) is not between a variable and an equation")
        for f in self.eq_vertices:
            if not any(e[1] == f for e in self.edges):
                raise DegenerateEquation(f)
        for name, eqs in self.attachments.items():
            for f in eqs:
                if f not in fs:
                    raise UnknownVertex(f)
        # adjacency in declaration order, cached (frozen dataclass)
        eq_adj = {f: tuple(v for v in self.var_vertices if (v, f) in self.edges) for f in self.eq_vertices}
        var_adj = {v: tuple(f for f in self.eq_vertices if (v, f) in self.edges) for v in self.var_vertices}
        object.__setattr__(self, "_eq_adj", eq_adj)
        object.__setattr__(self, "_var_adj", var_adj)

    def vars_of(self, f: str) -> tuple[str, ...]:
        return self._eq_adj[f]

    def eqs_of(self, v: str) -> tuple[str, ...]:
        return self._var_adj[v]

    @property
    def exogenous(self) -> tuple[str, ...]:
        return tuple(n for n in self.attachments if n not in self.inputs)


def bipartite(system: EquationSystem) -> BipartiteSystem:
    """Build the bipartite graph of an equation system.

    Variable vertices are named ``v...`` (see :func:`var_vertex`), equation
    vertices keep their labels, exogenous and input symbols keep their names.
    """
    m = system.model
    vv = tuple(var_vertex(x) for x in m.variables)
    edges = set()
    for label, _ in system.equations:
        for x in system.incidence[label]:
            edges.add((var_vertex(x), label))
    natural = {label: var_vertex(x) for label, x in system.natural.items()}
    return BipartiteSystem(
        var_vertices=vv,
        eq_vertices=system.labels(),
        edges=frozenset(edges),
        attachments=system.attachments(),
        inputs=m.inputs,
        natural=natural,
    )


def from_edges(var_vertices: Sequence[str], eq_vertices: Sequence[str], edges: Iterable, **kw) -> BipartiteSystem:
    return BipartiteSystem(tuple(var_vertices), tuple(eq_vertices), frozenset(map(tuple, edges)), **kw)


# -- matchings ---------------------------------------------------------------


@dataclass(frozen=True)
class Matching:
    """Set of (variable, equation) pairs, stored in equation order."""

    pairs: tuple[tuple[str, str], ...]

    def var_of(self, f: str) -> str:
        for v, g in self.pairs:
            if g == f:
                return v
        raise KeyError(f)

    def eq_of(self, v: str) -> str:
        for w, f in self.pairs:
            if w == v:
                return f
        raise KeyError(v)

    def as_dict(self) -> dict[str, str]:
        """equation -> variable"""
        return {f: v for v, f in self.pairs}

    def __len__(self):
        return len(self.pairs)


def _hopcroft_karp(b: BipartiteSystem, fixed: Mapping[str, str] | None = None):
    """Maximum matching with equations on the left.

    ``fixed`` (equation -> variable) pairs are kept and their vertices are
    removed from the search.  Returns dict equation -> variable.
    """
    fixed = dict(fixed or {})
    used_vars = set(fixed.values())
    left = [f for f in b.eq_vertices if f not in fixed]
    adj = {f: [v for v in b.vars_of(f) if v not in used_vars] for f in left}
    match_f: dict[str, str | None] = {f: None for f in left}
    match_v: dict[str, str | None] = {v: None for v in b.var_vertices if v not in used_vars}
    inf = float("inf")

    while True:
        # BFS layering from free equations
        dist = {}
        q = deque()
        for f in left:
            if match_f[f] is None:
                dist[f] = 0
                q.append(f)
        found = False
        while q:
            f = q.popleft()
            for v in adj[f]:
                g = match_v[v]
                if g is None:
                    found = True
                elif g not in dist:
                    dist[g] = dist[f] + 1
                    q.append(g)
        if not found:
            break

        def dfs(f):
            for v in adj[f]:
                g = match_v[v]
                if g is None or (dist.get(g, inf) == dist[f] + 1 and dfs(g)):
                    match_f[f] = v
                    match_v[v] = f
                    return True
            dist[f] = inf
            return False

        for f in left:
            if match_f[f] is None:
                dfs(f)

    out = dict(fixed)
    out.update({f: v for f, v in match_f.items() if v is not None})
    return out


def maximum_matching(b: BipartiteSystem, fixed: Mapping[str, str] | None = None) -> Matching:
    m = _hopcroft_karp(b, fixed)
    return Matching(tuple((m[f], f) for f in b.eq_vertices if f in m))


def _hall_witness(b: BipartiteSystem, m: dict[str, str]):
    """Hall violator for a maximum matching ``m`` (equation -> variable)."""
    var_to_eq = {v: f for f, v in m.items()}
    free_eqs = [f for f in b.eq_vertices if f not in m]
    if free_eqs:
        # equations reachable by alternating paths from free equations
        seen_f = set(free_eqs)
        seen_v = set()
        q = deque(free_eqs)
        while q:
            f = q.popleft()
            for v in b.vars_of(f):
                if v not in seen_v:
                    seen_v.add(v)
                    g = var_to_eq.get(v)
                    if g is not None and g not in seen_f:
                        seen_f.add(g)
                        q.append(g)
        witness = [f for f in b.eq_vertices if f in seen_f]
        nbrs = [v for v in b.var_vertices if v in seen_v]
        return witness, "equations", nbrs
    free_vars = [v for v in b.var_vertices if v not in var_to_eq]
    seen_v = set(free_vars)
    seen_f = set()
    q = deque(free_vars)
    while q:
        v = q.popleft()
        for f in b.eqs_of(v):
            if f not in seen_f:
                seen_f.add(f)
                w = m.get(f)
                if w is not None and w not in seen_v:
                    seen_v.add(w)
                    q.append(w)
    witness = [v for v in b.var_vertices if v in seen_v]
    nbrs = [f for f in b.eq_vertices if f in seen_f]
    return witness, "variables", nbrs


def perfect_matching(b: BipartiteSystem) -> Matching:
    """A perfect matching found by Hopcroft-Karp.

    Raises SizeMismatch when |V| != |F| and NoPerfectMatching otherwise;
    both carry a Hall-violator witness.
    """
    m = _hopcroft_karp(b)
    n_v, n_f = len(b.var_vertices), len(b.eq_vertices)
    if n_v == n_f and len(m) == n_f:
        return Matching(tuple((m[f], f) for f in b.eq_vertices))
    witness, side, nbrs = _hall_witness(b, m)
    if n_v != n_f:
        raise SizeMismatch(n_v, n_f, len(m), witness, side, nbrs)
    raise NoPerfectMatching(len(m), witness, side, nbrs)


def enumerate_perfect_matchings(b: BipartiteSystem, limit: int | None = None) -> list[Matching]:
    """All perfect matchings (at most ``limit``), in lexicographic order."""
    n = len(b.var_vertices)
    if n > MAX_ENUMERATION:
        raise TooLarge(f"{n} variables; enumeration is limited to {MAX_ENUMERATION}")
    if n != len(b.eq_vertices):
        return []
    out: list[Matching] = []
    eqs = b.eq_vertices
    chosen: list[str] = []
    used: set[str] = set()

    def rec(i):
        if limit is not None and len(out) >= limit:
            return
        if i == len(eqs):
            out.append(Matching(tuple(zip(chosen, eqs))))
            return
        for v in b.vars_of(eqs[i]):
            if v not in used:
                used.add(v)
                chosen.append(v)
                rec(i + 1)
                chosen.pop()
                used.discard(v)

    rec(0)
    return out


def _check_matching(b: BipartiteSystem, m: Matching):
    fs = [f for _, f in m.pairs]
    vs = [v for v, _ in m.pairs]
    if sorted(fs) != sorted(b.eq_vertices) or sorted(vs) != sorted(b.var_vertices):
        raise InvalidMatching("matching does not cover every vertex exactly once")
    for p in m.pairs:
        if p not in b.edges:
            raise InvalidMatching(f"({p[0]}, {p[1]}) is not an edge")


# -- orientation and SCCs ----------------------------------------------------


def orient(b: BipartiteSystem, m: Matching) -> dict[str, tuple[str, ...]]:
    """Directed graph: matched edges f -> v, all other edges v -> f.

    Returned as an adjacency map over every variable and equation vertex.
    """
    _check_matching(b, m)
    matched = set(m.pairs)
    adj: dict[str, list[str]] = {x: [] for x in b.var_vertices + b.eq_vertices}
    for v in b.var_vertices:
        for f in b.eqs_of(v):
            if (v, f) in matched:
                adj[f].append(v)
            else:
                adj[v].append(f)
    return {x: tuple(ys) for x, ys in adj.items()}


def sccs(graph: Mapping[str, Iterable[str]]) -> list[list[str]]:
    """Strongly connected components (Tarjan, iterative).

    Components come out in reverse topological order of discovery; nodes
    are visited in the mapping's order and successors in listed order.
    """
    succ = {u: list(vs) for u, vs in graph.items()}
    for vs in list(succ.values()):
        for v in vs:
            succ.setdefault(v, [])
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    out: list[list[str]] = []
    counter = 0
    for root in succ:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            u, i = work.pop()
            if i == 0:
                index[u] = low[u] = counter
                counter += 1
                stack.append(u)
                on_stack.add(u)
            recurse = False
            nbrs = succ[u]
            while i < len(nbrs):
                w = nbrs[i]
                i += 1
                if w not in index:
                    work.append((u, i))
                    work.append((w, 0))
                    recurse = True
                    break
                if w in on_stack:
                    low[u] = min(low[u], index[w])
            if recurse:
                continue
            if low[u] == index[u]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == u:
                        break
                out.append(comp)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[u])
    return out


# -- causal ordering graph ---------------------------------------------------


@dataclass(frozen=True)
class Cluster:
    variables: tuple[str, ...]
    equations: tuple[str, ...]
    kind: str = "endogenous"  # "endogenous", "exogenous" or "input"

    @property
    def members(self) -> tuple[str, ...]:
        return self.variables + self.equations

    def __str__(self):
        return "{" + ", ".join(self.members) + "}"


@dataclass(frozen=True)
class CausalOrderingGraph:
    """Directed cluster graph.

    ``edges`` are (source vertex, target cluster index) pairs.  Exogenous and
    input symbols are singleton clusters (their symbol is stored in
    ``variables`` of the singleton, kind says which).
    """

    clusters: tuple[Cluster, ...]
    edges: tuple[tuple[str, int], ...]
    var_vertices: tuple[str, ...]
    eq_vertices: tuple[str, ...]
    natural: Mapping[str, str] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_cl", {x: i for i, c in enumerate(self.clusters) for x in c.members})

    def cluster_of(self, vertex: str) -> int:
        try:
            return self._cl[vertex]
        except KeyError:
            raise UnknownVertex(vertex) from None

    def has_vertex(self, vertex: str) -> bool:
        return vertex in self._cl

    @property
    def inputs(self) -> tuple[str, ...]:
        return tuple(c.variables[0] for c in self.clusters if c.kind == "input")

    @property
    def exogenous(self) -> tuple[str, ...]:
        return tuple(c.variables[0] for c in self.clusters if c.kind == "exogenous")

    def cluster_successors(self, i: int) -> list[int]:
        members = set(self.clusters[i].members)
        return sorted({j for s, j in self.edges if s in members})

    def endogenous_clusters(self) -> list[Cluster]:
        return [c for c in self.clusters if c.kind == "endogenous"]

    def partition(self) -> set[frozenset]:
        """Clusters as a set of frozensets (handy for comparisons)."""
        return {frozenset(c.members) for c in self.clusters}

    def edge_set(self) -> set[tuple[str, frozenset]]:
        return {(s, frozenset(self.clusters[j].members)) for s, j in self.edges}


def _topological(n: int, succ: Mapping[int, Iterable[int]], key) -> list[int]:
    indeg = [0] * n
    for i in range(n):
        for j in succ.get(i, ()):
            indeg[j] += 1
    ready = sorted((key(i), i) for i in range(n) if indeg[i] == 0)
    out = []
    heapq.heapify(ready)
    while ready:
        _, i = heapq.heappop(ready)
        out.append(i)
        for j in succ.get(i, ()):
            indeg[j] -= 1
            if indeg[j] == 0:
                heapq.heappush(ready, (key(j), j))
    if len(out) != n:
        raise GraphError("cluster graph has a cycle")
    return out


def causal_ordering(b: BipartiteSystem, matching: Matching | None = None) -> CausalOrderingGraph:
    """Run the causal ordering algorithm on ``b``.

    The output does not depend on which perfect matching is used; clusters
    are listed in a canonical topological order (ties broken by the lowest
    declaration index of their members, exogenous and input roots first).
    """
    m = matching if matching is not None else perfect_matching(b)
    graph = orient(b, m)
    comps = sccs(graph)
    # merge each SCC with the SCCs of its matched partners: S u M(S)
    parent = list(range(len(comps)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    comp_of = {x: i for i, c in enumerate(comps) for x in c}
    for v, f in m.pairs:
        a, c = find(comp_of[v]), find(comp_of[f])
        if a != c:
            parent[a] = c
    groups: dict[int, set[str]] = {}
    for x, i in comp_of.items():
        groups.setdefault(find(i), set()).add(x)

    order = {x: i for i, x in enumerate(b.var_vertices + b.eq_vertices)}
    endo = [
        Cluster(
            tuple(v for v in b.var_vertices if v in g),
            tuple(f for f in b.eq_vertices if f in g),
        )
        for g in groups.values()
    ]
    roots = [Cluster((n,), (), "input" if n in b.inputs else "exogenous") for n in b.attachments]
    root_order = {n: i for i, n in enumerate(b.attachments)}

    raw = roots + endo
    cl = {x: i for i, c in enumerate(raw) for x in c.members}
    edges = set()
    for v in b.var_vertices:
        for f in b.eqs_of(v):
            if cl[v] != cl[f]:
                edges.add((v, cl[f]))
    for n, fs in b.attachments.items():
        for f in fs:
            edges.add((n, cl[f]))

    succ: dict[int, set[int]] = {}
    for s, j in edges:
        succ.setdefault(cl[s], set()).add(j)

    def key(i):
        c = raw[i]
        if c.kind != "endogenous":
            return (0, root_order[c.variables[0]])
        return (1, min(order[x] for x in c.members))

    topo = _topological(len(raw), succ, key)
    new_index = {old: new for new, old in enumerate(topo)}
    clusters = tuple(raw[i] for i in topo)
    new_edges = sorted(((s, new_index[j]) for s, j in edges), key=lambda e: (new_index[cl[e[0]]], e[1], _vkey(e[0], order, root_order)))
    return CausalOrderingGraph(clusters, tuple(new_edges), b.var_vertices, b.eq_vertices, dict(b.natural))


def _vkey(x, order, root_order):
    if x in order:
        return (1, order[x])
    return (0, root_order[x])


# -- Markov ordering graph ---------------------------------------------------


@dataclass(frozen=True)
class MarkovOrderingGraph:
    """DAG over variable vertices plus exogenous and input roots."""

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    kinds: Mapping[str, str] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        par = {v: [] for v in self.vertices}
        ch = {v: [] for v in self.vertices}
        for a, c in self.edges:
            par[c].append(a)
            ch[a].append(c)
        object.__setattr__(self, "_par", {k: tuple(v) for k, v in par.items()})
        object.__setattr__(self, "_ch", {k: tuple(v) for k, v in ch.items()})

    def _check(self, v):
        if v not in self._par:
            raise UnknownVertex(v)

    def parents(self, v: str) -> tuple[str, ...]:
        self._check(v)
        return self._par[v]

    def children(self, v: str) -> tuple[str, ...]:
        self._check(v)
        return self._ch[v]

    def _reach(self, start, nbrs) -> set[str]:
        seen = set()
        stack = list(start)
        while stack:
            x = stack.pop()
            for y in nbrs[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    def descendants(self, v: str, include_self: bool = True) -> set[str]:
        self._check(v)
        out = self._reach([v], self._ch)
        if include_self:
            out.add(v)
        return out

    def ancestors_of(self, vs: Iterable[str], include_self: bool = True) -> set[str]:
        vs = list(vs)
        for v in vs:
            self._check(v)
        out = self._reach(vs, self._par)
        if include_self:
            out.update(vs)
        return out

    def is_acyclic(self) -> bool:
        try:
            n = len(self.vertices)
            idx = {v: i for i, v in enumerate(self.vertices)}
            succ = {idx[v]: [idx[c] for c in self._ch[v]] for v in self.vertices}
            _topological(n, succ, lambda i: i)
            return True
        except GraphError:
            return False


def markov_ordering(cog: CausalOrderingGraph) -> MarkovOrderingGraph:
    """Edge v -> w whenever v points at the cluster containing variable w."""
    kinds = {v: "variable" for v in cog.var_vertices}
    roots = [c for c in cog.clusters if c.kind != "endogenous"]
    for c in roots:
        kinds[c.variables[0]] = c.kind
    vertices = cog.var_vertices + tuple(c.variables[0] for c in roots)
    idx = {v: i for i, v in enumerate(vertices)}
    edges = set()
    for s, j in cog.edges:
        target = cog.clusters[j]
        if target.kind != "endogenous":
            continue
        for w in target.variables:
            edges.add((s, w))
    ordered = tuple(sorted(edges, key=lambda e: (idx[e[0]], idx[e[1]])))
    return MarkovOrderingGraph(vertices, ordered, kinds)
