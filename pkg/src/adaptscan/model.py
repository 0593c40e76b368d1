"""Model DSL: parsing, printing and derivation of equation systems.

A model file (``.com``) is line oriented; ``#`` starts a comment::

    model bathtub
    input I_K = 1.2
    exog U_I ~ constant(5.0)
    exog F_s ~ uniform(0.9, 1.1)
    const g = 1.0
    var X_I X_D X_P X_O
    static f_I: X_I - U_I = 0
    dyn X_D: U_1*(X_I - X_O)
    eq X_B: X_C*k_CB - F_B*k_FBB = 0          # equilibrium override
    eq X_E as f_CE: X_C + X_E - (C_0 + E_0) = 0
    constraint f_CE: X_C + X_E - (C_0 + E_0) = 0   # equilibrium-only equation
    init X_S = 1.0
    saturation 1 - X_B >> K_CB

Vertex names follow the variable name: ``X<suffix>`` becomes variable vertex
``v<suffix>`` with dynamic equation ``g<suffix>`` and equilibrium equation
``f<suffix>``; any other name ``n`` becomes ``v_n``, ``g_n`` and ``f_n``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import (
    DSLSyntaxError,
    DuplicateName,
    ModelError,
    OverrideWithoutDynamics,
    UnknownSymbol,
)
from .expr import Expr, parse_expr, symbols, to_source

MODEL_DIR = Path(__file__).parent / "models"


@dataclass(frozen=True)
class Distribution:
    kind: str  # "constant" or "uniform"
    params: tuple

    @property
    def nominal(self) -> float:
        """Value used for single deterministic runs (midpoint for uniform)."""
        if self.kind == "constant":
            return self.params[0]
        lo, hi = self.params
        return round(0.5 * (lo + hi), 12)  # keep 1.2 as 1.2, not 1.2000000000000002

    def sample(self, rng: np.random.Generator, size=None):
        if self.kind == "constant":
            if size is None:
                return self.params[0]
            return np.full(size, self.params[0])
        lo, hi = self.params
        return rng.uniform(lo, hi, size)

    def __str__(self):
        return f"{self.kind}({', '.join(_fmt(p) for p in self.params)})"


def constant(c: float) -> Distribution:
    return Distribution("constant", (float(c),))


def uniform(lo: float, hi: float) -> Distribution:
    if not lo < hi:
        raise ValueError(f"uniform({lo}, {hi}) needs lo < hi")
    return Distribution("uniform", (float(lo), float(hi)))


_DIST = re.compile(r"^\s*(constant|uniform)\s*\(([^)]*)\)\s*$")


def parse_distribution(text: str) -> Distribution:
    m = _DIST.match(text)
    if not m:
        raise ValueError(f"bad distribution {text!r}; use constant(c) or uniform(lo, hi)")
    args = [float(a) for a in m.group(2).split(",")]
    if m.group(1) == "constant" and len(args) == 1:
        return constant(*args)
    if m.group(1) == "uniform" and len(args) == 2:
        return uniform(*args)
    raise ValueError(f"wrong number of arguments in {text!r}")


@dataclass(frozen=True)
class Override:
    var: str
    label: str
    expr: Expr


@dataclass(frozen=True)
class ModelSpec:
    name: str
    variables: tuple[str, ...]
    inputs: tuple[str, ...] = ()
    exogenous: tuple[tuple[str, Distribution], ...] = ()
    constants: tuple[tuple[str, float], ...] = ()
    dynamics: tuple[tuple[str, Expr], ...] = ()
    statics: tuple[tuple[str, Expr], ...] = ()
    equilibrium_overrides: tuple[Override, ...] = ()
    constraints: tuple[tuple[str, Expr], ...] = ()
    initial: tuple[tuple[str, float], ...] = ()
    input_values: tuple[tuple[str, float], ...] = ()
    saturations: tuple[tuple[Expr, Expr], ...] = ()

    @property
    def dynamic_vars(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.dynamics)

    @property
    def algebraic_vars(self) -> tuple[str, ...]:
        dyn = set(self.dynamic_vars)
        return tuple(v for v in self.variables if v not in dyn)

    @property
    def parameters(self) -> tuple[str, ...]:
        """Every non-variable symbol: inputs, exogenous, constants."""
        return self.inputs + tuple(n for n, _ in self.exogenous) + tuple(n for n, _ in self.constants)

    def nominal_bindings(self) -> dict[str, float]:
        """Input defaults, exogenous nominal values and constants."""
        b = dict(self.input_values)
        b.update({n: d.nominal for n, d in self.exogenous})
        b.update(dict(self.constants))
        return b

    def kind_of(self, name: str) -> str:
        if name in self.variables:
            return "variable"
        if name in self.inputs:
            return "input"
        if any(n == name for n, _ in self.exogenous):
            return "exogenous"
        if any(n == name for n, _ in self.constants):
            return "constant"
        raise UnknownSymbol(name)


def _suffix(var: str) -> str:
    return var[1:] if var.startswith("X") and len(var) > 1 else "_" + var


def var_vertex(var: str) -> str:
    return "v" + _suffix(var)


def dyn_label(var: str) -> str:
    return "g" + _suffix(var)


def eq_label(var: str) -> str:
    return "f" + _suffix(var)


# -- parsing -----------------------------------------------------------------

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_LABEL_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_']*$")
_NUMBER = re.compile(r"^[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?$")


def _fmt(x: float) -> str:
    return repr(float(x))


def _number(text: str, line: int, col: int) -> float:
    text = text.strip()
    if not _NUMBER.match(text):
        raise DSLSyntaxError(line, col, "number", text)
    return float(text)


def _names(text: str, line: int, col: int) -> list[str]:
    out = [t for t in re.split(r"[\s,]+", text.strip()) if t]
    if not out:
        raise DSLSyntaxError(line, col, "one or more names", "")
    for t in out:
        if not re.match(r"^[A-Za-z_][A-Za-z0-9_]*$", t):
            raise DSLSyntaxError(line, col + text.find(t) + 1, "identifier", t)
    return out


def _split_eq_zero(body: str, line: int, col: int):
    """Split ``<expr> = 0`` and return (expr text, column offset)."""
    idx = body.rfind("=")
    if idx < 0:
        raise DSLSyntaxError(line, col + len(body) + 1, "'= 0'", "end of line")
    rhs = body[idx + 1:].strip()
    if rhs not in ("0", "0.0"):
        raise DSLSyntaxError(line, col + idx + 2, "0 on the right-hand side", rhs)
    return body[:idx], col


_HEAD = re.compile(r"^\s*(\w+)\s*")


def parse_model(text: str) -> ModelSpec:
    """Parse DSL source into a validated :class:`ModelSpec`."""
    name = None
    variables: list[str] = []
    inputs: list[str] = []
    exogenous: list[tuple[str, Distribution]] = []
    constants: list[tuple[str, float]] = []
    dynamics: list[tuple[str, Expr]] = []
    statics: list[tuple[str, Expr]] = []
    overrides: list[Override] = []
    constraints: list[tuple[str, Expr]] = []
    initial: list[tuple[str, float]] = []
    input_values: list[tuple[str, float]] = []
    saturations: list[tuple[Expr, Expr]] = []

    declared: dict[str, int] = {}  # symbol -> line
    labels: dict[str, int] = {}
    uses: list[tuple[Expr, int]] = []
    var_refs: list[tuple[str, int, str]] = []  # (name, line, context)

    def declare(n, line, table=declared):
        if n in declared or n in labels:
            raise DuplicateName(n, line)
        table[n] = line

    for lineno, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].rstrip()
        if not content.strip():
            continue
        m = _HEAD.match(content)
        if m is None:
            col = len(content) - len(content.lstrip()) + 1
            raise DSLSyntaxError(lineno, col, "section keyword", content.strip()[:1])
        keyword = m.group(1)
        rest = content[m.end():]
        col = m.end()
        if keyword == "model":
            if name is not None:
                raise DSLSyntaxError(lineno, 1, "a single 'model' line", keyword)
            parts = rest.split()
            if len(parts) != 1 or not _NAME_RE.match(parts[0]):
                raise DSLSyntaxError(lineno, col + 1, "model name", rest)
            name = parts[0]
        elif keyword == "input" and "=" in rest:
            n, value = rest.split("=", 1)
            n = n.strip()
            if not _NAME_RE.match(n):
                raise DSLSyntaxError(lineno, col + 1, "identifier", n)
            v = _number(value, lineno, col + rest.find("=") + 2)
            declare(n, lineno)
            inputs.append(n)
            input_values.append((n, v))
        elif keyword in ("input", "var"):
            for n in _names(rest, lineno, col):
                declare(n, lineno)
                (inputs if keyword == "input" else variables).append(n)
        elif keyword == "exog":
            if "~" not in rest:
                raise DSLSyntaxError(lineno, col + len(rest) + 1, "'~ distribution'", "end of line")
            n, dist = rest.split("~", 1)
            n = n.strip()
            if not _NAME_RE.match(n):
                raise DSLSyntaxError(lineno, col + 1, "identifier", n)
            try:
                d = parse_distribution(dist)
            except ValueError:
                raise DSLSyntaxError(lineno, col + rest.find("~") + 2,
                                     "constant(c) or uniform(lo, hi)", dist.strip()) from None
            declare(n, lineno)
            exogenous.append((n, d))
        elif keyword in ("const", "init"):
            if "=" not in rest:
                raise DSLSyntaxError(lineno, col + len(rest) + 1, "'= value'", "end of line")
            n, value = rest.split("=", 1)
            n = n.strip()
            if not _NAME_RE.match(n):
                raise DSLSyntaxError(lineno, col + 1, "identifier", n)
            v = _number(value, lineno, col + rest.find("=") + 2)
            if keyword == "const":
                declare(n, lineno)
                constants.append((n, v))
            else:
                var_refs.append((n, lineno, "init"))
                initial.append((n, v))
        elif keyword in ("static", "dyn", "eq", "constraint"):
            if ":" not in rest:
                raise DSLSyntaxError(lineno, col + len(rest) + 1, "':'", "end of line")
            head, body = rest.split(":", 1)
            body_col = col + len(head) + 1
            head_parts = head.split()
            if keyword == "eq" and len(head_parts) == 3 and head_parts[1] == "as":
                target, label = head_parts[0], head_parts[2]
            elif len(head_parts) == 1:
                target, label = head_parts[0], None
            else:
                raise DSLSyntaxError(lineno, col + 1, "label or variable name", head.strip())
            target_re = _LABEL_RE if keyword in ("static", "constraint") else _NAME_RE
            if not target_re.match(target) or (label and not _LABEL_RE.match(label)):
                raise DSLSyntaxError(lineno, col + 1, "identifier", head.strip())
            if keyword == "dyn":
                e = parse_expr(body, lineno, body_col)
            else:
                expr_text, _ = _split_eq_zero(body, lineno, body_col)
                e = parse_expr(expr_text, lineno, body_col)
            uses.append((e, lineno))
            if keyword == "static":
                declare(target, lineno, labels)
                statics.append((target, e))
            elif keyword == "constraint":
                declare(target, lineno, labels)
                constraints.append((target, e))
            elif keyword == "dyn":
                var_refs.append((target, lineno, "dyn"))
                if any(v == target for v, _ in dynamics):
                    raise DuplicateName(target, lineno)
                declare(dyn_label(target), lineno, labels)
                dynamics.append((target, e))
            else:
                var_refs.append((target, lineno, "eq"))
                if any(o.var == target for o in overrides):
                    raise DuplicateName(target, lineno)
                label = label or eq_label(target)
                declare(label, lineno, labels)
                overrides.append(Override(target, label, e))
        elif keyword == "saturation":
            if ">>" not in rest:
                raise DSLSyntaxError(lineno, col + len(rest) + 1, "'>>'", "end of line")
            lhs, rhs = rest.split(">>", 1)
            el = parse_expr(lhs, lineno, col)
            er = parse_expr(rhs, lineno, col + len(lhs) + 2)
            uses.append((el, lineno))
            uses.append((er, lineno))
            saturations.append((el, er))
        else:
            raise DSLSyntaxError(lineno, 1, "section keyword", keyword)

    if name is None:
        raise DSLSyntaxError(1, 1, "'model <name>' line", "")

    for e, lineno in uses:
        for s in symbols(e):
            if s not in declared:
                raise UnknownSymbol(s, lineno)
    var_set = set(variables)
    dyn_set = {v for v, _ in dynamics}
    for n, lineno, ctx in var_refs:
        if n not in var_set:
            raise UnknownSymbol(n, lineno)
        if ctx == "eq" and n not in dyn_set:
            raise OverrideWithoutDynamics(n, lineno)
        if ctx == "init" and n not in dyn_set:
            raise ModelError(f"line {lineno}: init for {n!r}, which has no dyn entry")
    # equation labels must not collide with derived equilibrium labels
    for v in dyn_set:
        if not any(o.var == v for o in overrides) and eq_label(v) in labels:
            raise DuplicateName(eq_label(v))

    return ModelSpec(
        name=name,
        variables=tuple(variables),
        inputs=tuple(inputs),
        exogenous=tuple(exogenous),
        constants=tuple(constants),
        dynamics=tuple(dynamics),
        statics=tuple(statics),
        equilibrium_overrides=tuple(overrides),
        constraints=tuple(constraints),
        initial=tuple(initial),
        input_values=tuple(input_values),
        saturations=tuple(saturations),
    )


def load_model(path) -> ModelSpec:
    """Load a model from a file path or a bundled corpus name (``bathtub``)."""
    p = Path(path)
    if not p.exists():
        candidate = MODEL_DIR / (p.stem + ".com")
        if not candidate.exists():
            raise FileNotFoundError(f"no model file {str(path)!r} and no bundled model {p.stem!r}")
        p = candidate
    return parse_model(p.read_text(encoding="utf-8"))


def corpus_names() -> list[str]:
    return sorted(p.stem for p in MODEL_DIR.glob("*.com"))


def format_model(m: ModelSpec) -> str:
    """Render a ModelSpec back to DSL text."""
    lines = [f"model {m.name}"]
    defaults = dict(m.input_values)
    bare = [n for n in m.inputs if n not in defaults]
    if bare:
        lines.append("input " + " ".join(bare))
    for n, v in m.input_values:
        lines.append(f"input {n} = {_fmt(v)}")
    for n, d in m.exogenous:
        lines.append(f"exog {n} ~ {d}")
    for n, v in m.constants:
        lines.append(f"const {n} = {_fmt(v)}")
    if m.variables:
        lines.append("var " + " ".join(m.variables))
    for label, e in m.statics:
        lines.append(f"static {label}: {to_source(e)} = 0")
    for v, e in m.dynamics:
        lines.append(f"dyn {v}: {to_source(e)}")
    for o in m.equilibrium_overrides:
        head = o.var if o.label == eq_label(o.var) else f"{o.var} as {o.label}"
        lines.append(f"eq {head}: {to_source(o.expr)} = 0")
    for label, e in m.constraints:
        lines.append(f"constraint {label}: {to_source(e)} = 0")
    for v, x in m.initial:
        lines.append(f"init {v} = {_fmt(x)}")
    for lhs, rhs in m.saturations:
        lines.append(f"saturation {to_source(lhs)} >> {to_source(rhs)}")
    return "\n".join(lines) + "\n"


# -- equation systems --------------------------------------------------------


@dataclass(frozen=True)
class EquationSystem:
    """Equations of one kind with their endogenous-variable incidence.

    ``natural`` maps the labels of equations derived from a ``dyn`` entry to
    that entry's variable (the natural labelling).
    """

    kind: str  # "dynamic" or "equilibrium"
    model: ModelSpec
    equations: tuple[tuple[str, Expr], ...]
    incidence: Mapping[str, tuple[str, ...]]
    natural: Mapping[str, str] = field(default_factory=dict)

    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.equations)

    def attachments(self) -> dict[str, tuple[str, ...]]:
        """Exogenous and input symbols -> labels of equations they occur in."""
        params = self.model.inputs + tuple(n for n, _ in self.model.exogenous)
        out = {}
        for p in params:
            out[p] = tuple(label for label, e in self.equations if p in symbols(e))
        return out


def _incident(m: ModelSpec, e: Expr, extra=()) -> tuple[str, ...]:
    present = set(symbols(e)) | set(extra)
    return tuple(v for v in m.variables if v in present)


def dynamic_system(m: ModelSpec) -> EquationSystem:
    eqs = list(m.statics)
    inc = {label: _incident(m, e) for label, e in m.statics}
    natural = {}
    for v, h in m.dynamics:
        label = dyn_label(v)
        eqs.append((label, h))
        inc[label] = _incident(m, h, extra=(v,))
        natural[label] = v
    return EquationSystem("dynamic", m, tuple(eqs), inc, natural)


def equilibrium_system(m: ModelSpec) -> EquationSystem:
    eqs = list(m.statics)
    overrides = {o.var: o for o in m.equilibrium_overrides}
    natural = {}
    for v, h in m.dynamics:
        if v in overrides:
            label, e = overrides[v].label, overrides[v].expr
        else:
            label, e = eq_label(v), h
        eqs.append((label, e))
        natural[label] = v
    eqs.extend(m.constraints)
    inc = {label: _incident(m, e) for label, e in eqs}
    return EquationSystem("equilibrium", m, tuple(eqs), inc, natural)
