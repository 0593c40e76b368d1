"""Causal ordering analysis of dynamical systems and detection of perfect
adaptation from graphs, simulations and data."""

from .adaptation import (
    AdaptationReport,
    DetectionVerdict,
    adapting_variables,
    detect_adaptation_graphside,
    input_reachability,
    natural_matching,
    soft_intervention_effects,
)
from .graphs import (
    BipartiteSystem,
    CausalOrderingGraph,
    MarkovOrderingGraph,
    Matching,
    bipartite,
    causal_ordering,
    markov_ordering,
    perfect_matching,
)
from .model import ModelSpec, dynamic_system, equilibrium_system, load_model, parse_model

__version__ = "0.1.0"
