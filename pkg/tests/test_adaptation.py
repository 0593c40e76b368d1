import pytest

from adaptscan import (
    adapting_variables,
    bipartite,
    dynamic_system,
    equilibrium_system,
    input_reachability,
    load_model,
    markov_ordering,
    natural_matching,
    perfect_matching,
    soft_intervention_effects,
)
from adaptscan.adaptation import cogs_and_mog, detect_adaptation_graphside, dynamic_cog, equilibrium_cog
from adaptscan.errors import (
    NoNaturalCounterpart,
    NoNaturalExtension,
    NotApplicable,
    UnknownEquation,
    UnknownInput,
)
from adaptscan.graphs import from_edges


def test_bathtub_natural_matching():
    b = bipartite(dynamic_system(load_model("bathtub")))
    assert set(natural_matching(b).pairs) == {("v_D", "g_D"), ("v_P", "g_P"), ("v_O", "g_O"), ("v_I", "f_I")}


def test_static_model_natural_matching_is_perfect_matching():
    b = bipartite(equilibrium_system(load_model("example1")))
    assert natural_matching(b) == perfect_matching(b)


def test_enzyme_dynamic_matching_is_natural():
    b = bipartite(dynamic_system(load_model("enzyme")))
    assert set(natural_matching(b).pairs) == {("v_S", "g_S"), ("v_C", "g_C"), ("v_E", "g_E"), ("v_P", "g_P")}


def test_natural_extension_failure():
    b = from_edges(["v_a", "v_b"], ["g_a", "f_1"], [("v_a", "g_a"), ("v_a", "f_1")], natural={"g_a": "v_a"})
    with pytest.raises(NoNaturalExtension):
        natural_matching(b)


def test_bathtub_input_reachability():
    m = load_model("bathtub")
    assert input_reachability(equilibrium_cog(m), "I_K") == {"v_P", "v_D"}
    assert input_reachability(dynamic_cog(m), "I_K") == {"v_D", "v_P", "v_O"}
    with pytest.raises(UnknownInput):
        input_reachability(equilibrium_cog(m), "U_1")


@pytest.mark.parametrize(
    "name, inp, expected",
    [
        ("bathtub", "I_K", {"v_O"}),
        ("viral", "I_sigma", {"v_I"}),
        ("protein", "I", {"v_s", "v_r", "v_m"}),
        ("nfbn", "I", {"v_C"}),
        ("ifflp", "I", set()),
    ],
)
def test_adapting_sets(name, inp, expected):
    assert set(adapting_variables(load_model(name), inp).adapting) == expected


def test_ifflp_equilibrium_reach():
    rep = adapting_variables(load_model("ifflp"), "I")
    assert rep.equilibrium_reachable == {"v_A", "v_B", "v_C"}


def test_report_rows():
    rep = adapting_variables(load_model("bathtub"), "I_K")
    assert rep.rows() == [
        ("v_I", False, False, False),
        ("v_D", True, True, False),
        ("v_P", True, True, False),
        ("v_O", True, False, True),
    ]


def test_not_applicable():
    with pytest.raises(NotApplicable):
        adapting_variables(load_model("enzyme"), "k_1")
    with pytest.raises(NotApplicable):
        adapting_variables(load_model("ifflp_rewritten"), "I")
    with pytest.raises(UnknownInput):
        adapting_variables(load_model("bathtub"), "I")


def test_soft_intervention_effects():
    assert soft_intervention_effects(equilibrium_cog(load_model("bathtub")), "f_O") == {"v_P", "v_D"}
    assert "v_I" in soft_intervention_effects(equilibrium_cog(load_model("viral")), "f_E")
    assert soft_intervention_effects(equilibrium_cog(load_model("example1")), "f1") == {"v1", "v2"}
    with pytest.raises(UnknownEquation):
        soft_intervention_effects(equilibrium_cog(load_model("bathtub")), "f_Q")


def verdict(name, eq):
    cog, mog = cogs_and_mog(load_model(name))
    return detect_adaptation_graphside(cog, mog, eq)


def test_bathtub_detection():
    v = verdict("bathtub", "f_O")
    assert v.condition1
    assert v.conclusion == "adaptation_detected"


def test_viral_detection():
    v = verdict("viral", "f_E")
    assert not v.condition1
    assert v.condition2
    assert "v_I" in v.witnesses


def test_protein_detection():
    v = verdict("protein", "f_e")
    assert v.condition2
    assert set(v.witnesses) == {"v_s", "v_r", "v_m"}


def test_detection_inconclusive():
    # f_A moves v_A itself and only its descendant v_B
    v = verdict("nfbn", "f_A")
    assert not v.condition1 and not v.condition2
    assert v.conclusion == "inconclusive"


def test_detection_needs_natural_counterpart():
    with pytest.raises(NoNaturalCounterpart):
        verdict("bathtub", "f_I")
    with pytest.raises(UnknownEquation):
        verdict("bathtub", "g_O")


def test_matched_elsewhere_counts_as_condition1():
    # f_s is solved for v_e, so intervening on it leaves v_s alone
    assert verdict("protein", "f_s").condition1


def test_detection_target_variable():
    cog = equilibrium_cog(load_model("nfbn"))
    v = detect_adaptation_graphside(cog, markov_ordering(cog), "f_C")
    assert v.target_variable == "v_C"
