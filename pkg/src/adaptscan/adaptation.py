"""Graphical identification of perfect adaptation and of soft-intervention
effects."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    NoNaturalCounterpart,
    NoNaturalExtension,
    NoPerfectMatching,
    NotApplicable,
    UnknownEquation,
    UnknownInput,
)
from .graphs import (
    BipartiteSystem,
    CausalOrderingGraph,
    Matching,
    MarkovOrderingGraph,
    bipartite,
    causal_ordering,
    markov_ordering,
    perfect_matching,
    _hopcroft_karp,
)
from .model import ModelSpec, dynamic_system, equilibrium_system
from .separation import cluster_descendants


@dataclass(frozen=True)
class AdaptationReport:
    input: str
    transient_reachable: frozenset
    equilibrium_reachable: frozenset
    adapting: frozenset
    natural_matching_ok: bool
    variables: tuple[str, ...] = ()
    # the transient claim needs the input to actually move each reachable
    # variable; reachability only shows that it can
    assumes_faithful_response: bool = True

    def rows(self) -> list[tuple[str, bool, bool, bool]]:
        return [
            (v, v in self.transient_reachable, v in self.equilibrium_reachable, v in self.adapting)
            for v in self.variables
        ]


@dataclass(frozen=True)
class DetectionVerdict:
    target_equation: str
    target_variable: str
    condition1: bool
    condition2: bool
    witnesses: tuple[str, ...] = ()

    @property
    def conclusion(self) -> str:
        return "adaptation_detected" if (self.condition1 or self.condition2) else "inconclusive"


def natural_matching(b: BipartiteSystem) -> Matching:
    """Perfect matching that contains every natural (v_i, g_i) pair."""
    fixed = {f: v for f, v in b.natural.items() if f in b.eq_vertices}
    for f, v in fixed.items():
        if (v, f) not in b.edges:
            raise NoNaturalExtension(f"natural pair ({v}, {f}) is not an edge")
    m = _hopcroft_karp(b, fixed)
    if len(b.var_vertices) != len(b.eq_vertices) or len(m) != len(b.eq_vertices):
        rest_v = [v for v in b.var_vertices if v not in fixed.values()]
        rest_f = [f for f in b.eq_vertices if f not in fixed]
        raise NoNaturalExtension(
            f"static part cannot be matched: {len(rest_v)} variable(s) {rest_v}, "
            f"{len(rest_f)} equation(s) {rest_f}, matched {len(m) - len(fixed)}"
        )
    return Matching(tuple((m[f], f) for f in b.eq_vertices))


def input_reachability(cog: CausalOrderingGraph, input: str) -> set[str]:
    if input not in cog.inputs:
        raise UnknownInput(input)
    return cluster_descendants(cog, input)


def soft_intervention_effects(cog: CausalOrderingGraph, eq: str) -> set[str]:
    """Variables whose equilibrium a soft intervention on ``eq`` may change."""
    if eq not in cog.eq_vertices:
        raise UnknownEquation(eq)
    return cluster_descendants(cog, eq)


def dynamic_cog(m: ModelSpec) -> CausalOrderingGraph:
    if not m.dynamics:
        raise NotApplicable(f"model {m.name!r} has no dynamic equations")
    b = bipartite(dynamic_system(m))
    return causal_ordering(b, natural_matching(b))


def equilibrium_cog(m: ModelSpec) -> CausalOrderingGraph:
    b = bipartite(equilibrium_system(m))
    return causal_ordering(b, perfect_matching(b))


def adapting_variables(m: ModelSpec, input: str) -> AdaptationReport:
    """Variables reachable from ``input`` in the dynamic graph but not in the
    equilibrium graph."""
    if input not in m.inputs:
        raise UnknownInput(input)
    dyn = dynamic_cog(m)
    try:
        eq = equilibrium_cog(m)
    except NoPerfectMatching as e:
        raise NotApplicable(f"equilibrium equations of {m.name!r} are not perfectly matchable: {e}") from e
    transient = input_reachability(dyn, input)
    equilibrium = input_reachability(eq, input)
    return AdaptationReport(
        input=input,
        transient_reachable=frozenset(transient),
        equilibrium_reachable=frozenset(equilibrium),
        adapting=frozenset(transient - equilibrium),
        natural_matching_ok=True,
        variables=dyn.var_vertices,
    )


def detect_adaptation_graphside(
    cog: CausalOrderingGraph, mog: MarkovOrderingGraph, target: str
) -> DetectionVerdict:
    """Check whether a soft intervention on ``target`` would reveal perfect
    adaptation of its naturally labelled variable."""
    if target not in cog.eq_vertices:
        raise UnknownEquation(target)
    v = cog.natural.get(target)
    if v is None:
        raise NoNaturalCounterpart(target)
    effects = soft_intervention_effects(cog, target)
    cond1 = v not in effects
    desc = mog.descendants(v)
    witnesses = tuple(w for w in cog.var_vertices if w in effects and w not in desc)
    return DetectionVerdict(target, v, cond1, bool(witnesses), witnesses)


def cogs_and_mog(m: ModelSpec) -> tuple[CausalOrderingGraph, MarkovOrderingGraph]:
    eq = equilibrium_cog(m)
    return eq, markov_ordering(eq)
