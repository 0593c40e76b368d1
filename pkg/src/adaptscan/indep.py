"""Rank-based conditional independence tests, LCD, and data-side detection
of perfect adaptation from a soft-intervention experiment."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from .adaptation import DetectionVerdict
from .dynsim import Dataset
from .errors import (
    ColumnMismatch,
    ConstantInput,
    LengthMismatch,
    SingularConditioning,
    StatsError,
    TooFewSamples,
)
from .graphs import MarkovOrderingGraph
from .model import var_vertex

SINGULAR_EPS = 1e-12


@dataclass(frozen=True)
class CITestResult:
    i: str
    j: str
    Z: tuple[str, ...]
    rho: float
    p: float
    alpha: float

    @property
    def independent(self) -> bool:
        return self.p > self.alpha


@dataclass(frozen=True)
class LcdTriple:
    context: str
    x: str
    y: str
    c_x: CITestResult
    x_y: CITestResult
    c_y_given_x: CITestResult

    def as_tuple(self) -> tuple[str, str, str]:
        return (self.context, self.x, self.y)


def _check(cols: Sequence[np.ndarray], n_cond: int = 0):
    n = len(cols[0])
    for c in cols[1:]:
        if len(c) != n:
            raise LengthMismatch(f"lengths {[len(c) for c in cols]}")
    if n < n_cond + 4:
        raise TooFewSamples(f"n={n} but at least {n_cond + 4} samples are needed")
    for c in cols:
        if np.ptp(c) == 0:
            raise ConstantInput("a column is constant")


def _t_pvalue(rho: float, n: int, k: int) -> float:
    dof = n - 2 - k
    if abs(rho) >= 1.0:
        return 0.0
    t = rho * math.sqrt(dof / (1.0 - rho * rho))
    return float(min(1.0, 2.0 * stats.t.sf(abs(t), dof)))


def _rank_corr_matrix(cols: Sequence[np.ndarray]) -> np.ndarray:
    ranks = np.vstack([stats.rankdata(c) for c in cols])
    return np.corrcoef(ranks)


def _partial(r: np.ndarray, i: int, j: int, z: tuple[int, ...]) -> float:
    """Partial correlation by the recursive formula, peeling off the last
    conditioning index."""
    if not z:
        return float(r[i, j])
    *rest, k = z
    rest = tuple(rest)
    rij = _partial(r, i, j, rest)
    rik = _partial(r, i, k, rest)
    rjk = _partial(r, j, k, rest)
    den = (1.0 - rik * rik) * (1.0 - rjk * rjk)
    if den < SINGULAR_EPS:
        raise SingularConditioning("conditioning variable is (nearly) collinear with a tested variable")
    return float(np.clip((rij - rik * rjk) / math.sqrt(den), -1.0, 1.0))


def spearman(x, y) -> tuple[float, float]:
    """Spearman rank correlation with a Student-t p-value (two-sided)."""
    return partial_rank_corr(x, y, [])


def partial_rank_corr(x, y, Z: Sequence = ()) -> tuple[float, float]:
    cols = [np.asarray(x, dtype=float), np.asarray(y, dtype=float)] + [np.asarray(z, dtype=float) for z in Z]
    _check(cols, len(Z))
    r = _rank_corr_matrix(cols)
    rho = _partial(r, 0, 1, tuple(range(2, len(cols))))
    return rho, _t_pvalue(rho, len(cols[0]), len(Z))


def ci_test(ds: Dataset, i: str, j: str, Z: Iterable[str] = (), alpha: float = 0.01) -> CITestResult:
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    Z = tuple(Z)
    for c in (i, j, *Z):
        if c not in ds.columns:
            raise ColumnMismatch(f"no column {c!r}")
    rho, p = partial_rank_corr(ds[i], ds[j], [ds[z] for z in Z])
    return CITestResult(i, j, Z, rho, p, alpha)


def independence_table(
    ds: Dataset, columns: Sequence[str], max_cond: int = 1, alpha: float = 0.01
) -> list[CITestResult]:
    """Every pair of ``columns`` against every conditioning set of the
    remaining columns up to ``max_cond``, smallest sets first."""
    out = []
    for size in range(max_cond + 1):
        for i, j in combinations(columns, 2):
            rest = [c for c in columns if c not in (i, j)]
            for z in combinations(rest, size):
                out.append(ci_test(ds, i, j, z, alpha))
    return out


def lcd(ds: Dataset, context: str, candidates: Sequence[str], alpha: float = 0.01) -> list[LcdTriple]:
    """LCD triples (context, x, y) with context dependent on x, x dependent
    on y and context independent of y given x.

    The caller vouches that ``context`` is not caused by any candidate.
    Output follows the dataset's column order, whatever order the
    candidates come in.
    """
    order = {c: k for k, c in enumerate(ds.names)}
    cands = sorted((c for c in set(candidates) if c != context), key=lambda c: order.get(c, len(order)))
    out = []
    marginal: dict[str, CITestResult | Exception] = {}
    for x in cands:
        try:
            marginal[x] = ci_test(ds, context, x, (), alpha)
        except StatsError as e:
            marginal[x] = e
    for x in cands:
        cx = marginal[x]
        if isinstance(cx, Exception):
            warnings.warn(f"lcd: skipping {x}: {cx}", stacklevel=2)
            continue
        if cx.independent:
            continue
        for y in cands:
            if y == x:
                continue
            try:
                xy = ci_test(ds, x, y, (), alpha)
                if xy.independent:
                    continue
                cy = ci_test(ds, context, y, (x,), alpha)
            except StatsError as e:
                warnings.warn(f"lcd: skipping ({x}, {y}): {e}", stacklevel=2)
                continue
            if cy.independent:
                out.append(LcdTriple(context, x, y, cx, xy, cy))
    return out


# -- data-side detection -------------------------------------------------------


def resolve_column(ds: Dataset, name: str) -> str:
    """Column for a variable given either by column name or vertex name."""
    if name in ds.columns:
        return name
    for c in ds.names:
        if var_vertex(c) == name:
            return c
    raise ColumnMismatch(f"no column for {name!r}")


@dataclass(frozen=True)
class ShiftTest:
    column: str
    statistic: float
    p: float


def rank_sum(a, b) -> tuple[float, float]:
    """Wilcoxon rank-sum test, normal approximation, two-sided."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) < 2 or len(b) < 2:
        raise TooFewSamples("rank-sum test needs at least two samples per group")
    res = stats.ranksums(a, b)
    return float(res.statistic), float(res.pvalue)


def detect_adaptation_from_data(
    baseline: Dataset,
    intervened: Dataset,
    target_var: str,
    mog: MarkovOrderingGraph,
    alpha: float = 0.01,
) -> DetectionVerdict:
    """Compare equilibrium data before and after a soft intervention on the
    equation of ``target_var``.

    Condition 1 holds when ``target_var`` shows no shift at level ``alpha``
    while some other variable does (otherwise there is no evidence that the
    intervention acted at all); condition 2 when some variable that is not
    a descendant of ``target_var`` in ``mog`` does shift.
    """
    if set(baseline.names) != set(intervened.names):
        raise ColumnMismatch(
            f"column sets differ: {sorted(set(baseline.names) ^ set(intervened.names))}"
        )
    target_col = resolve_column(baseline, target_var)
    v = var_vertex(target_col) if target_var in baseline.columns else target_var
    shifts = {}
    for c in baseline.names:
        shifts[c] = rank_sum(baseline[c], intervened[c])[1] <= alpha
    variables = [c for c in baseline.names if mog.kinds.get(var_vertex(c)) == "variable"]
    cond1 = not shifts[target_col] and any(shifts[c] for c in variables if c != target_col)
    desc = mog.descendants(v)
    witnesses = []
    for w in mog.vertices:
        if mog.kinds.get(w, "variable") != "variable" or w in desc:
            continue
        try:
            col = resolve_column(baseline, w)
        except ColumnMismatch:
            continue
        if shifts[col]:
            witnesses.append(w)
    label = "f" + v[1:]
    return DetectionVerdict(label, v, cond1, bool(witnesses), tuple(witnesses))
