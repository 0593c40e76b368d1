import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from adaptscan import load_model
from adaptscan.adaptation import cogs_and_mog
from adaptscan.dynsim import Dataset, sample_equilibria
from adaptscan.errors import ColumnMismatch, ConstantInput, LengthMismatch, SingularConditioning, TooFewSamples
from adaptscan.indep import (
    ci_test,
    detect_adaptation_from_data,
    independence_table,
    lcd,
    partial_rank_corr,
    rank_sum,
    resolve_column,
    spearman,
)
from adaptscan.model import constant, uniform

from conftest import table_dataset


def test_spearman_examples():
    rho, p = spearman([1, 2, 3, 4, 5], [5, 4, 3, 2, 1])
    assert rho == pytest.approx(-1.0)
    assert p < 1e-12
    assert spearman([1, 2, 3, 4, 5], [2, 1, 4, 3, 5])[0] == pytest.approx(stats.spearmanr([1, 2, 3, 4, 5], [2, 1, 4, 3, 5])[0])
    assert spearman([1, 2, 3, 4, 5], [2, 1, 4, 3, 5])[0] == pytest.approx(0.8)
    x = np.linspace(0, 1, 30)
    rho, p = spearman(x, np.exp(x))
    assert rho == pytest.approx(1.0) and p < 1e-12


def test_spearman_p_value_matches_scipy():
    rng = np.random.default_rng(0)
    x = rng.normal(size=40)
    y = 0.3 * x + rng.normal(size=40)
    ref = stats.spearmanr(x, y)
    rho, p = spearman(x, y)
    assert rho == pytest.approx(ref.statistic, abs=1e-12)
    assert p == pytest.approx(ref.pvalue, rel=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-10_000, 10_000), min_size=8, max_size=40, unique=True), st.integers(0, 2**32 - 1))
def test_monotone_invariance(xs, seed):
    x = np.array(xs) / 10.0
    y = x + np.random.default_rng(seed).normal(scale=np.ptp(x), size=len(x))
    if np.ptp(y) == 0:
        return
    base = spearman(x, y)[0]
    assert spearman(np.arctan(x / 100.0), y)[0] == pytest.approx(base, abs=1e-12)
    assert spearman(x, np.exp(-y / np.ptp(y)))[0] == pytest.approx(-base, abs=1e-12)


def _residual_oracle(x, y, Z):
    rx, ry = stats.rankdata(x), stats.rankdata(y)
    D = np.column_stack([np.ones(len(x))] + [stats.rankdata(z) for z in Z])
    ex = rx - D @ np.linalg.lstsq(D, rx, rcond=None)[0]
    ey = ry - D @ np.linalg.lstsq(D, ry, rcond=None)[0]
    return float(np.corrcoef(ex, ey)[0, 1])


def test_partial_matches_residual_oracle():
    rng = np.random.default_rng(1)
    for k in range(4):
        z = rng.normal(size=(k, 120))
        x = z.sum(axis=0) + rng.normal(size=120)
        y = x + z[:1].sum(axis=0) + rng.normal(size=120)
        rho, _ = partial_rank_corr(x, y, list(z))
        assert rho == pytest.approx(_residual_oracle(x, y, list(z)), abs=1e-10)


def test_common_cause_is_screened_off():
    rng = np.random.default_rng(2)
    z = rng.normal(scale=3.0, size=500)
    x = z + rng.normal(size=500)
    y = z + rng.normal(size=500)
    assert spearman(x, y)[1] < 1e-6
    rho, p = partial_rank_corr(x, y, [z])
    assert abs(rho) < 0.1 and p > 0.01


def test_empty_conditioning_is_spearman():
    rng = np.random.default_rng(3)
    x, y = rng.normal(size=(2, 50))
    assert partial_rank_corr(x, y, []) == spearman(x, y)


def test_errors():
    with pytest.raises(LengthMismatch):
        spearman([1, 2, 3, 4], [1, 2, 3])
    with pytest.raises(TooFewSamples):
        spearman([1, 2, 3], [3, 2, 1])
    with pytest.raises(ConstantInput):
        spearman([1, 1, 1, 1, 1], [1, 2, 3, 4, 5])
    x = np.arange(10.0)
    with pytest.raises(SingularConditioning):
        partial_rank_corr(x, np.sin(x), [x])


def test_ci_test_and_columns():
    ds = Dataset({"a": np.arange(10.0), "b": np.arange(10.0) ** 2}, seed=0)
    r = ci_test(ds, "a", "b")
    assert r.rho == pytest.approx(1.0) and not r.independent
    with pytest.raises(ColumnMismatch):
        ci_test(ds, "a", "c")
    with pytest.raises(ValueError):
        ci_test(ds, "a", "b", alpha=1.5)
    assert resolve_column(Dataset({"X_e": np.zeros(3)}, seed=0), "v_e") == "X_e"


def test_table_order():
    rng = np.random.default_rng(4)
    ds = Dataset({k: rng.normal(size=30) for k in "abc"}, seed=0)
    rows = independence_table(ds, ["a", "b", "c"], max_cond=1)
    assert [(r.i, r.j, r.Z) for r in rows] == [
        ("a", "b", ()), ("a", "c", ()), ("b", "c", ()),
        ("a", "b", ("c",)), ("a", "c", ("b",)), ("b", "c", ("a",)),
    ]


@pytest.mark.slow
def test_protein_table_rows():
    ds = table_dataset(0)
    assert ci_test(ds, "I", "X_r").independent
    assert ci_test(ds, "X_e", "X_m", ["X_r"]).independent
    assert not ci_test(ds, "X_r", "X_m").independent


def test_lcd_chain():
    rng = np.random.default_rng(5)
    c = rng.normal(size=1000)
    x = c + rng.normal(size=1000)
    y = x + rng.normal(size=1000)
    triples = {t.as_tuple() for t in lcd(Dataset({"C": c, "x": x, "y": y}, seed=5), "C", ["x", "y"])}
    assert ("C", "x", "y") in triples
    assert ("C", "y", "x") not in triples


def test_lcd_independent_context():
    rng = np.random.default_rng(6)
    c, x = rng.normal(size=(2, 300))
    assert lcd(Dataset({"C": c, "x": x, "y": x.copy()}, seed=6), "C", ["y", "x"]) == []


def test_lcd_candidate_order_is_irrelevant():
    rng = np.random.default_rng(7)
    c = rng.normal(size=400)
    x = c + rng.normal(size=400)
    y = x + rng.normal(size=400)
    ds = Dataset({"C": c, "x": x, "y": y}, seed=7)
    assert [t.as_tuple() for t in lcd(ds, "C", ["y", "x"])] == [t.as_tuple() for t in lcd(ds, "C", ["x", "y"])]


def test_rank_sum():
    rng = np.random.default_rng(8)
    a = rng.normal(size=100)
    assert rank_sum(a, a + 1.0)[1] < 1e-6
    assert rank_sum(a, a)[1] == pytest.approx(1.0)
    with pytest.raises(TooFewSamples):
        rank_sum([1.0], [2.0, 3.0])


def test_bathtub_data_side_condition1():
    m = load_model("bathtub")
    _, mog = cogs_and_mog(m)
    base = sample_equilibria(m, 200, seed=10)
    shifted = sample_equilibria(m, 200, seed=11, overrides={"U_5": uniform(0.6, 0.7)})
    v = detect_adaptation_from_data(base, shifted, "v_O", mog)
    assert v.condition1
    assert v.target_equation == "f_O"
    assert v.conclusion == "adaptation_detected"


@pytest.mark.slow
def test_protein_data_side_condition2():
    m = load_model("protein")
    _, mog = cogs_and_mog(m)
    base = sample_equilibria(m, 150, seed=12, overrides={"k_me": constant(1.1)})
    shifted = sample_equilibria(m, 150, seed=13, overrides={"k_me": constant(1.0)})
    v = detect_adaptation_from_data(base, shifted, "v_e", mog)
    assert v.condition2
    assert set(v.witnesses) == {"v_s", "v_r", "v_m"}


def test_null_intervention_is_inconclusive():
    m = load_model("bathtub")
    _, mog = cogs_and_mog(m)
    base = sample_equilibria(m, 100, seed=14)
    v = detect_adaptation_from_data(base, base, "v_O", mog)
    assert not v.condition1 and not v.condition2
    assert v.conclusion == "inconclusive"


def test_column_sets_must_match():
    m = load_model("bathtub")
    _, mog = cogs_and_mog(m)
    a = Dataset({"X_O": np.arange(5.0)}, seed=0)
    b = Dataset({"X_P": np.arange(5.0)}, seed=0)
    with pytest.raises(ColumnMismatch):
        detect_adaptation_from_data(a, b, "v_O", mog)
