"""Fixed-step RK4 simulation, equilibrium search, step and soft-intervention
experiments, and seeded equilibrium sampling.

Static equations are solved for their algebraic variable at every
right-hand-side evaluation, in causal order.  Everything is written so the
same compiled functions run on floats (single trajectories) and on numpy
arrays (one column per sample).
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    InconsistentStatics,
    NoConvergence,
    NonFiniteState,
    UnknownParameter,
)
from .expr import BinOp, Expr, Neg, Sym, symbols, to_python
from .graphs import bipartite, causal_ordering
from .model import Distribution, ModelSpec, dynamic_system, equilibrium_system, var_vertex

SUSTAIN_STEPS = 100


class SaturationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-3
    t_max: float = 1e4
    eq_tol: float = 1e-9
    integrator: str = "rk4"
    max_records: int = 10001  # trace points kept by integrate()

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.eq_tol > 0:
            raise ValueError("eq_tol must be positive")
        if not self.t_max > 0:
            raise ValueError("t_max must be positive")
        if self.integrator != "rk4":
            raise ValueError(f"unsupported integrator {self.integrator!r}")


# -- traces and datasets -----------------------------------------------------


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass
class Trace:
    variables: tuple[str, ...]
    inputs: tuple[str, ...]
    times: np.ndarray
    states: np.ndarray  # (len(times), len(variables))
    input_values: np.ndarray  # (len(times), len(inputs))

    def column(self, name: str) -> np.ndarray:
        if name in self.variables:
            return self.states[:, self.variables.index(name)]
        return self.input_values[:, self.inputs.index(name)]

    def final(self) -> dict[str, float]:
        return {v: float(self.states[-1, i]) for i, v in enumerate(self.variables)}

    def to_csv(self, path_or_file) -> None:
        header = ["t", *self.variables, *self.inputs]
        rows = np.column_stack([self.times, self.states, self.input_values])
        _write_rows(path_or_file, header, rows)


@dataclass
class Dataset:
    columns: dict[str, np.ndarray]
    seed: int | None = None

    def __post_init__(self):
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise ValueError(f"columns have different lengths: {sorted(lengths)}")
        self.columns = {k: np.asarray(v, dtype=float) for k, v in self.columns.items()}

    @property
    def n(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.columns)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def to_csv(self, path_or_file) -> None:
        header = list(self.columns)
        rows = np.column_stack([self.columns[k] for k in header]) if header else np.empty((0, 0))
        comment = f"# seed={self.seed}" if self.seed is not None else None
        _write_rows(path_or_file, header, rows, comment)

    @classmethod
    def from_csv(cls, path_or_file) -> "Dataset":
        if hasattr(path_or_file, "read"):
            lines = path_or_file.read().splitlines()
        else:
            with open(path_or_file, newline="") as fh:
                lines = fh.read().splitlines()
        seed = None
        body = []
        for line in lines:
            if line.startswith("#"):
                if line.startswith("# seed="):
                    seed = int(line.split("=", 1)[1])
                continue
            if line.strip():
                body.append(line)
        reader = csv.reader(body)
        header = next(reader)
        data = [[float(x) for x in row] for row in reader]
        arr = np.array(data, dtype=float).reshape(len(data), len(header))
        return cls({h: arr[:, i] for i, h in enumerate(header)}, seed)


def _write_rows(path_or_file, header, rows, comment=None):
    def emit(fh):
        if comment:
            fh.write(comment + "\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")

    if hasattr(path_or_file, "write"):
        emit(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            emit(fh)


# -- compilation -------------------------------------------------------------


def _affine_in(e: Expr, x: str) -> bool:
    if x not in symbols(e):
        return True
    if isinstance(e, Sym):
        return True
    if isinstance(e, Neg):
        return _affine_in(e.operand, x)
    if isinstance(e, BinOp):
        if e.op in "+-":
            return _affine_in(e.left, x) and _affine_in(e.right, x)
        if e.op == "*":
            lx, rx = x in symbols(e.left), x in symbols(e.right)
            if lx and rx:
                return False
            return _affine_in(e.left if lx else e.right, x)
        if e.op == "/":
            return x not in symbols(e.right) and _affine_in(e.left, x)
    return False


def _newton_lines(var: str, e: Expr, index: Mapping[str, str], indent: str) -> list[str]:
    """Inline Newton iteration for ``e(var) = 0`` with a
    numerical derivative.  Leaves nan in the result if it fails."""
    f_z = to_python(e, dict(index, **{var: "_z"}))
    f_zh = to_python(e, dict(index, **{var: "(_z + _h)"}))
    loc = _local(var)
    return [
        f"{indent}_z = 1.0",
        f"{indent}{loc} = np.nan",
        f"{indent}for _it in range(200):",
        f"{indent}    _h = 1e-7 * abs(_z) + 1e-12",
        f"{indent}    _fz = {f_z}",
        f"{indent}    if _fz == 0.0:",
        f"{indent}        {loc} = _z",
        f"{indent}        break",
        f"{indent}    _d = ({f_zh}) - _fz",
        f"{indent}    if _d == 0.0:",
        f"{indent}        if abs(_fz) < 1e-9:",
        f"{indent}            {loc} = _z",
        f"{indent}        break",
        f"{indent}    _s = _fz / _d * _h",
        f"{indent}    _z = _z - _s",
        f"{indent}    if abs(_s) <= 1e-13 * (abs(_z) + 1.0):",
        f"{indent}        {loc} = _z",
        f"{indent}        break",
    ]


class CompiledModel:
    """Right-hand side of a model with its statics folded in.

    ``rhs(x, p, out)`` writes the derivatives of the dynamic variables for
    state ``x`` and parameter vector ``p`` (ordered as ``params``) into
    ``out``; ``alg(x, p, out)`` writes the algebraic variables.  Both are
    numba-compiled when numba is available.
    """

    def __init__(self, m: ModelSpec):
        self.model = m
        self.dyn_vars = m.dynamic_vars
        self.alg_vars = m.algebraic_vars
        self.params = m.parameters
        self._static_order = self._order_statics()
        self.source = self._codegen()
        ns = {"np": np}
        exec(compile(self.source, f"<{m.name} compiled>", "exec"), ns)
        self.rhs = _jit(ns["_rhs"])
        self.alg = _jit(ns["_alg"])

    def _order_statics(self) -> list[tuple[str, str, Expr]]:
        m = self.model
        if not m.statics:
            return []
        if not m.dynamics:
            # purely static model: solve in equilibrium causal order
            b = bipartite(equilibrium_system(m))
        else:
            b = bipartite(dynamic_system(m))
        try:
            cog = causal_ordering(b)
        except Exception as e:
            raise InconsistentStatics(f"statics of {m.name!r} cannot be ordered: {e}") from e
        by_label = dict(m.statics)
        names = {var_vertex(x): x for x in m.variables}
        out = []
        for c in cog.endogenous_clusters():
            statics = [f for f in c.equations if f in by_label]
            if not statics:
                continue
            if len(c.equations) != 1 or len(c.variables) != 1:
                raise InconsistentStatics(
                    f"cluster {c} couples several equations; statics must be solvable one at a time"
                )
            out.append((names[c.variables[0]], statics[0], by_label[statics[0]]))
        return out

    def _codegen(self) -> str:
        m = self.model
        index = {v: f"x[{i}]" for i, v in enumerate(self.dyn_vars)}
        index.update({n: f"p[{i}]" for i, n in enumerate(self.params)})
        body = []
        for var, _, e in self._static_order:
            if _affine_in(e, var):
                body.append(f"    _f0 = {to_python(e, dict(index, **{var: '0.0'}))}")
                body.append(f"    _f1 = {to_python(e, dict(index, **{var: '1.0'}))}")
                body.append(f"    {_local(var)} = -_f0 / (_f1 - _f0)")
            else:
                body.extend(_newton_lines(var, e, index, "    "))
            index[var] = _local(var)
        rhs = ["def _rhs(x, p, out):", *body]
        rhs += [f"    out[{i}] = {to_python(h, index)}" for i, (_, h) in enumerate(m.dynamics)]
        rhs.append("    return 0")
        alg = ["def _alg(x, p, out):", *body]
        alg += [f"    out[{i}] = {index[v]}" for i, v in enumerate(self.alg_vars)]
        alg.append("    return 0")
        return "\n".join(rhs) + "\n\n\n" + "\n".join(alg) + "\n"

    def pvec(self, bindings: Mapping[str, float]) -> np.ndarray:
        return np.array([bindings[n] for n in self.params], dtype=float)

    def derivative(self, x, p) -> np.ndarray:
        out = np.empty(len(self.dyn_vars))
        self.rhs(np.asarray(x, dtype=float), p, out)
        return out

    def full_state(self, x, p) -> dict[str, float]:
        alg = np.empty(len(self.alg_vars))
        self.alg(np.asarray(x, dtype=float), p, alg)
        vals = dict(zip(self.dyn_vars, map(float, x)))
        vals.update(zip(self.alg_vars, map(float, alg)))
        return {v: vals[v] for v in self.model.variables}


def _local(var: str) -> str:
    return "_a_" + var


_COMPILED: dict[int, CompiledModel] = {}


def compile_model(m: ModelSpec) -> CompiledModel:
    key = id(m)
    c = _COMPILED.get(key)
    if c is None or c.model is not m:
        c = CompiledModel(m)
        _COMPILED[key] = c
    return c


# -- bindings ----------------------------------------------------------------


def default_bindings(m: ModelSpec) -> dict[str, float]:
    """Nominal values for every input, exogenous symbol and constant."""
    return _resolve(m, None)


def _resolve(m: ModelSpec, bindings: Mapping[str, float] | None) -> dict:
    b = m.nominal_bindings()
    for k, v in (bindings or {}).items():
        if k not in m.parameters:
            raise UnknownParameter(k)
        b[k] = v
    for n in m.parameters:
        if n not in b:
            raise UnknownParameter(n)  # input without a default value
    return b


def default_x0(m: ModelSpec) -> dict[str, float]:
    init = dict(m.initial)
    return {v: init.get(v, 0.5) for v in m.dynamic_vars}


def _x0_vector(m: ModelSpec, x0) -> np.ndarray:
    base = default_x0(m)
    if x0 is not None:
        for k, v in dict(x0).items():
            if k not in base:
                raise UnknownParameter(k)
            base[k] = v
    return np.array([base[v] for v in m.dynamic_vars], dtype=float)


# -- integration kernels -----------------------------------------------------
#
# Plain Python, compiled with numba when it is installed.  Status codes:
# 1 converged, 0 horizon reached, -1 non-finite state.


def _rk4(rhs, x, p, h, k1, k2, k3, k4, tmp):
    n = x.shape[0]
    for i in range(n):
        tmp[i] = x[i] + 0.5 * h * k1[i]
    rhs(tmp, p, k2)
    for i in range(n):
        tmp[i] = x[i] + 0.5 * h * k2[i]
    rhs(tmp, p, k3)
    for i in range(n):
        tmp[i] = x[i] + h * k3[i]
    rhs(tmp, p, k4)
    for i in range(n):
        x[i] = x[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])


def _equilibrate(rhs, x, p, h, n_steps, tol, sustain, ref, peak, track):
    n = x.shape[0]
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    tmp = np.empty(n)
    streak = 0
    res = np.inf
    for step in range(n_steps + 1):
        rhs(x, p, k1)
        res = 0.0
        for i in range(n):
            a = abs(k1[i])
            if not a <= res:
                res = a
        if res != res or res == np.inf:
            return step, -1, res
        if res < tol:
            streak += 1
            if streak >= sustain:
                return step, 1, res
        else:
            streak = 0
        if step == n_steps:
            break
        _rk4(rhs, x, p, h, k1, k2, k3, k4, tmp)
        if track:
            for i in range(n):
                d = abs(x[i] - ref[i])
                if d > peak[i]:
                    peak[i] = d
    return n_steps, 0, res


def _equilibrate_many(rhs, x0, P, h, n_steps, tol, sustain, out_x, status, steps, resid):
    n = x0.shape[0]
    dummy = np.zeros(n)
    for s in range(P.shape[0]):
        x = x0.copy()
        st, code, r = _equilibrate(rhs, x, P[s], h, n_steps, tol, sustain, dummy, dummy, False)
        out_x[s, :] = x
        status[s] = code
        steps[s] = st
        resid[s] = r
    return 0


def _run(rhs, x, p, h, s_a, s_b, stride, rec, rec_step, count):
    n = x.shape[0]
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    tmp = np.empty(n)
    for s in range(s_a, s_b):
        if s % stride == 0:
            rec[count, :] = x
            rec_step[count] = s
            count += 1
        rhs(x, p, k1)
        _rk4(rhs, x, p, h, k1, k2, k3, k4, tmp)
        for i in range(n):
            if not abs(x[i]) < np.inf:
                return -(s + 2)
    return count


try:  # pragma: no cover - exercised implicitly
    import numba

    def _jit(f):
        # numpy error model: division by zero gives inf/nan, as in numpy
        return numba.njit(error_model="numpy")(f)

    _rk4 = _jit(_rk4)
    _equilibrate = _jit(_equilibrate)
    _equilibrate_many = _jit(_equilibrate_many)
    _run = _jit(_run)
except ImportError:  # pragma: no cover

    def _jit(f):
        return f


def _n_steps(cfg: SimConfig) -> int:
    return int(round(cfg.t_max / cfg.dt))


def _equilibrate_one(cm: CompiledModel, x: np.ndarray, p: np.ndarray, cfg: SimConfig, ref=None):
    """Integrate ``x`` in place to equilibrium.  Returns (time, peak)."""
    n = len(x)
    peak = np.zeros(n)
    track = ref is not None
    ref = np.asarray(ref, dtype=float) if track else np.zeros(n)
    if n == 0:
        return 0.0, peak
    step, code, res = _equilibrate(
        cm.rhs, x, p, cfg.dt, _n_steps(cfg), cfg.eq_tol, SUSTAIN_STEPS, ref, peak, track
    )
    t = step * cfg.dt
    if code == -1:
        raise NonFiniteState(t)
    if code == 0:
        raise NoConvergence(t, float(res))
    return t, peak


# -- saturation guard ----------------------------------------------------------


def check_saturations(m: ModelSpec, state: Mapping[str, float], bindings: Mapping[str, float], factor=10.0):
    """Warn when a saturation assumption ``lhs >> rhs`` holds by less than
    ``factor``.  Returns the list of violated guards as strings."""
    from .expr import to_source

    env = dict(bindings)
    env.update(state)
    bad = []
    for lhs, rhs in m.saturations:
        a = np.asarray(_vector_eval(lhs, env))
        b = np.asarray(_vector_eval(rhs, env))
        if np.any(a < factor * b):
            bad.append(f"{to_source(lhs)} >> {to_source(rhs)}")
    if bad:
        warnings.warn(
            f"{m.name}: saturation assumption weak ({'; '.join(bad)})", SaturationWarning, stacklevel=3
        )
    return bad


def _vector_eval(e: Expr, env: Mapping):
    """Evaluate ``e`` on floats or numpy arrays."""
    src = to_python(e, {n: f"env[{n!r}]" for n in symbols(e)})
    return eval(src, {"__builtins__": {}}, {"env": env})


# -- public operations ---------------------------------------------------------


def _parse_schedule(m: ModelSpec, schedule) -> list[tuple[float, dict]]:
    if schedule is None:
        return []
    if callable(schedule):
        raise TypeError("input schedules are lists of (t_start, {name: value})")
    out = sorted(((float(t), dict(v)) for t, v in schedule), key=lambda e: e[0])
    for _, vals in out:
        for k in vals:
            if k not in m.parameters:
                raise UnknownParameter(k)
    return out


def integrate(
    m: ModelSpec,
    bindings: Mapping[str, float] | None = None,
    x0: Mapping[str, float] | None = None,
    schedule: Sequence[tuple[float, Mapping[str, float]]] | None = None,
    cfg: SimConfig = SimConfig(),
) -> Trace:
    """Fixed-step RK4 over [0, t_max].

    ``schedule`` lists (t_start, {name: value}) changes of inputs or other
    parameters; values are piecewise constant and switch at the first step
    whose start time is at or after ``t_start``.  At most
    ``cfg.max_records`` evenly strided points are kept, always including
    both ends.
    """
    cm = compile_model(m)
    b = _resolve(m, bindings)
    x = _x0_vector(m, x0)
    events = _parse_schedule(m, schedule)
    h = cfg.dt
    n_steps = _n_steps(cfg)
    stride = max(1, -(-n_steps // max(cfg.max_records - 1, 1)))
    cap = n_steps // stride + 2
    rec = np.empty((cap, len(x)))
    rec_step = np.empty(cap, dtype=np.int64)
    count = 0
    seg_inputs = []  # (first record index, input values) per segment
    switch_steps = [min(n_steps, max(0, int(math.ceil(t / h - 1e-9)))) for t, _ in events]
    bounds = [0, *switch_steps, n_steps]
    for k in range(len(bounds) - 1):
        if k > 0:
            b.update(events[k - 1][1])
        s_a, s_b = bounds[k], bounds[k + 1]
        seg_inputs.append((count, [b[i] for i in m.inputs]))
        if s_b <= s_a or len(x) == 0:
            continue
        count = _run(cm.rhs, x, cm.pvec(b), h, s_a, s_b, stride, rec, rec_step, count)
        if count < 0:
            raise NonFiniteState((-count - 1) * h)
    if count == 0 or rec_step[count - 1] != n_steps:
        rec[count, :] = x
        rec_step[count] = n_steps
        count += 1
    seg_inputs.append((count, None))
    ins = np.empty((count, len(m.inputs)))
    for (start, vals), (stop, _) in zip(seg_inputs, seg_inputs[1:]):
        if stop > start:
            ins[start:stop] = vals
    # the final record belongs to the last segment
    ins[count - 1] = [b[i] for i in m.inputs]
    states = np.empty((count, len(m.variables)))
    seg_b = _resolve(m, bindings)
    ev = 0
    for r in range(count):
        while ev < len(events) and switch_steps[ev] <= rec_step[r]:
            seg_b.update(events[ev][1])
            ev += 1
        full = cm.full_state(rec[r], cm.pvec(seg_b))
        states[r] = [full[v] for v in m.variables]
    times = np.round(rec_step[:count] * h, 12)
    return Trace(m.variables, m.inputs, times, states, ins)


@dataclass
class _Found:
    state: dict
    t: float
    peak: np.ndarray
    x: np.ndarray
    bindings: dict


def find_equilibrium(
    m: ModelSpec,
    bindings: Mapping[str, float] | None = None,
    x0: Mapping[str, float] | None = None,
    cfg: SimConfig = SimConfig(),
    check_saturation: bool = True,
) -> dict[str, float]:
    """Integrate until the derivative norm stays below ``eq_tol`` for 100
    consecutive steps and return the state over all variables."""
    return _find(m, bindings, _x0_vector(m, x0), cfg, check_saturation).state


def _find(m, bindings, x, cfg, check_saturation=True, ref=None) -> _Found:
    cm = compile_model(m)
    b = _resolve(m, bindings)
    p = cm.pvec(b)
    x = np.array(x, dtype=float)
    t, peak = _equilibrate_one(cm, x, p, cfg, ref)
    _residual_guard(m, cm, x, p, b, cfg, t)
    state = cm.full_state(x, p)
    if any(not math.isfinite(v) for v in state.values()):
        raise InconsistentStatics(f"{m.name}: a static equation could not be solved")
    if check_saturation:
        check_saturations(m, state, b)
    return _Found(state, t, peak, x, b)


def _residual_guard(m, cm, x, p, b, cfg, t):
    if len(x):
        res = float(np.max(np.abs(cm.derivative(x, p))))
        if not res <= 100 * cfg.eq_tol:
            raise NoConvergence(t, res)
    if m.constraints:
        env = dict(b)
        env.update(cm.full_state(x, p))
        for label, e in m.constraints:
            r = abs(float(_vector_eval(e, env)))
            if r > 1e-6:
                warnings.warn(f"{m.name}: constraint {label} violated by {r:.3g} at equilibrium", stacklevel=4)


@dataclass(frozen=True)
class ResponseReport:
    variable: str
    pre: float
    post: float
    transient_peak_deviation: float
    final_deviation: float

    @property
    def change(self) -> float:
        return self.post - self.pre


def _switch_experiment(m, bindings, name, pre_value, post_value, cfg, x0):
    base = dict(bindings or {})
    base[name] = pre_value
    first = _find(m, base, _x0_vector(m, x0), cfg)
    after = dict(base)
    after[name] = post_value
    cm = compile_model(m)
    pre = first.state
    ref = np.array([pre[v] for v in cm.dyn_vars])
    second = _find(m, after, first.x, cfg, ref=ref)
    post = second.state
    peaks = dict(zip(cm.dyn_vars, map(float, second.peak)))
    out = {}
    for v in m.variables:
        final = abs(post[v] - pre[v])
        # algebraic variables jump straight to their new value
        peak = max(peaks.get(v, 0.0), final)
        out[v] = ResponseReport(v, pre[v], post[v], peak, final)
    return out


def step_response(
    m: ModelSpec,
    bindings: Mapping[str, float] | None,
    input: str,
    pre_value: float,
    post_value: float,
    cfg: SimConfig = SimConfig(),
    x0: Mapping[str, float] | None = None,
) -> dict[str, ResponseReport]:
    """Equilibrate at ``pre_value``, switch the input and equilibrate again.

    Deviations are measured against the pre-switch equilibrium.
    """
    if input not in m.inputs:
        raise UnknownParameter(input)
    return _switch_experiment(m, bindings, input, pre_value, post_value, cfg, x0)


def soft_intervention_experiment(
    m: ModelSpec,
    bindings: Mapping[str, float] | None,
    param: str,
    pre_value: float,
    post_value: float,
    cfg: SimConfig = SimConfig(),
    x0: Mapping[str, float] | None = None,
) -> dict[str, ResponseReport]:
    """Same protocol as :func:`step_response` for a constant or exogenous
    parameter."""
    if param not in m.parameters or param in m.inputs:
        raise UnknownParameter(param)
    return _switch_experiment(m, bindings, param, pre_value, post_value, cfg, x0)


def step_trace(
    m: ModelSpec,
    bindings: Mapping[str, float] | None,
    name: str,
    pre_value: float,
    post_value: float,
    t_switch: float,
    cfg: SimConfig = SimConfig(),
    x0: Mapping[str, float] | None = None,
) -> Trace:
    """Trace that starts at the ``pre_value`` equilibrium and switches
    ``name`` to ``post_value`` at ``t_switch``."""
    base = dict(bindings or {})
    base[name] = pre_value
    # the trace horizon is usually short; equilibrate with the full one
    settle = replace(cfg, t_max=max(cfg.t_max, SimConfig.t_max))
    eq = _find(m, base, _x0_vector(m, x0), settle)
    start = dict(zip(m.dynamic_vars, map(float, eq.x)))
    return integrate(m, base, start, [(t_switch, {name: post_value})], cfg)


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Independent PCG64 stream for sample ``index`` of a run seeded with
    ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def draw_parameters(
    m: ModelSpec, n: int, seed: int, overrides: Mapping[str, Distribution] | None = None
) -> dict[str, np.ndarray]:
    """Per-sample draws of every exogenous symbol (declaration order) and
    then every override (in the given order)."""
    overrides = dict(overrides or {})
    for k in overrides:
        if k not in m.parameters:
            raise UnknownParameter(k)
    specs = [(k, d) for k, d in m.exogenous if k not in overrides] + list(overrides.items())
    out = {k: np.empty(n) for k, _ in specs}
    for i in range(n):
        rng = sample_rng(seed, i)
        for k, d in specs:
            out[k][i] = d.sample(rng)
    return out


def sample_equilibria(
    m: ModelSpec,
    n: int,
    seed: int,
    cfg: SimConfig = SimConfig(),
    overrides: Mapping[str, Distribution] | None = None,
    bindings: Mapping[str, float] | None = None,
    x0: Mapping[str, float] | None = None,
) -> Dataset:
    """Equilibria for ``n`` independent draws of the exogenous symbols.

    Columns: every endogenous variable, then every drawn symbol.  Samples
    that fail to converge are reported together in one NoConvergence.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    cm = compile_model(m)
    draws = draw_parameters(m, n, seed, overrides)
    b = _resolve(m, bindings)
    P = np.empty((n, len(cm.params)))
    for j, name in enumerate(cm.params):
        P[:, j] = draws[name] if name in draws else b[name]
    x0v = _x0_vector(m, x0)
    k = len(x0v)
    X = np.empty((n, k))
    if k:
        status = np.zeros(n, dtype=np.int64)
        steps = np.zeros(n, dtype=np.int64)
        resid = np.zeros(n)
        _equilibrate_many(cm.rhs, x0v, P, cfg.dt, _n_steps(cfg), cfg.eq_tol, SUSTAIN_STEPS, X, status, steps, resid)
        failed = np.flatnonzero(status != 1)
        if len(failed):
            raise NoConvergence(cfg.t_max, float(np.nanmax(resid[failed])), failed=failed.tolist())
    cols = {v: np.empty(n) for v in m.variables}
    for i in range(n):
        state = cm.full_state(X[i], P[i])
        for v in m.variables:
            cols[v][i] = state[v]
    if m.saturations:
        env = dict(b)
        env.update(draws)
        check_saturations(m, {**env, **cols}, env)
    cols.update(draws)
    return Dataset(cols, seed)
