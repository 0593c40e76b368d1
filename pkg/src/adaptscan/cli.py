"""Command-line interface: ``adaptscan <command> MODEL [options]``.

Exit codes: 0 success, 1 usage error, 2 model or graph error, 3 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import io
import sys
import warnings
from typing import Sequence

from . import adaptation, dot, dynsim, indep, separation
from .errors import AdaptscanError, NonFiniteState, NoConvergence, NotApplicable
from .graphs import bipartite, causal_ordering, markov_ordering, perfect_matching
from .model import (
    ModelSpec,
    dynamic_system,
    equilibrium_system,
    load_model,
    parse_distribution,
    var_vertex,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _names(values: Sequence[str] | None) -> list[str]:
    out = []
    for v in values or []:
        out.extend(x for x in v.replace(",", " ").split() if x)
    return out


def _assignments(values: Sequence[str] | None) -> dict[str, float]:
    out = {}
    for item in values or []:
        if "=" not in item:
            raise UsageError(f"expected NAME=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        try:
            out[k.strip()] = float(v)
        except ValueError:
            raise UsageError(f"not a number in {item!r}") from None
    return out


def _cfg(args) -> dynsim.SimConfig:
    try:
        return dynsim.SimConfig(dt=args.dt, t_max=args.t_max, eq_tol=args.tol)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _cog(m: ModelSpec, mode: str):
    if mode == "dynamic":
        return adaptation.dynamic_cog(m)
    b = bipartite(equilibrium_system(m))
    return causal_ordering(b, perfect_matching(b))


def _vertex(m: ModelSpec, name: str) -> str:
    return var_vertex(name) if name in m.variables else name


def _yes(b: bool) -> str:
    return "yes" if b else "no"


def _fmt(x: float) -> str:
    return format(float(x), ".6g")


# -- commands ------------------------------------------------------------------


def cmd_order(args, out):
    m = load_model(args.model)
    cog = _cog(m, args.mode)
    if args.format == "csv":
        out.write("source,target_cluster\n")
        for s, j in cog.edges:
            out.write(f"{s},\"{cog.clusters[j]}\"\n")
    else:
        out.write(dot.cog_to_dot(cog, f"{m.name}_{args.mode}"))


def cmd_markov(args, out):
    m = load_model(args.model)
    mog = markov_ordering(_cog(m, args.mode))
    if args.format == "csv":
        out.write("source,target\n")
        for a, b in mog.edges:
            out.write(f"{a},{b}\n")
    else:
        out.write(dot.mog_to_dot(mog, f"{m.name}_{args.mode}"))


def cmd_dsep(args, out):
    m = load_model(args.model)
    mog = markov_ordering(_cog(m, args.mode))
    a = [_vertex(m, x) for x in _names(args.a)]
    b = [_vertex(m, x) for x in _names(args.b)]
    z = [_vertex(m, x) for x in _names(args.given)]
    if not a or not b:
        raise UsageError("--a and --b are required")
    out.write(("separated" if separation.dsep(mog, a, b, z) else "connected") + "\n")


def cmd_indep_table(args, out):
    m = load_model(args.model)
    mog = markov_ordering(_cog(m, args.mode))
    cols = _names(args.vars) or list(m.inputs) + list(m.variables)
    verts = [_vertex(m, c) for c in cols]
    back = dict(zip(verts, cols))
    rows = separation.implied_independences(mog, verts, args.max_cond)
    ds = dynsim.Dataset.from_csv(args.data) if args.data else None
    header = "i,j,given,dsep"
    if ds is not None:
        header += ",rho,p,independent,agrees"
    out.write(header + "\n")
    for i, j, z, sep in rows:
        line = f"{back[i]},{back[j]},{' '.join(back[x] for x in z)},{_yes(sep)}"
        if ds is not None:
            r = indep.ci_test(
                ds,
                indep.resolve_column(ds, back[i]),
                indep.resolve_column(ds, back[j]),
                [indep.resolve_column(ds, back[x]) for x in z],
                args.alpha,
            )
            line += f",{_fmt(r.rho)},{_fmt(r.p)},{_yes(r.independent)},{_yes(r.independent == sep)}"
        out.write(line + "\n")


def cmd_adapt(args, out):
    m = load_model(args.model)
    inputs = _names(args.input) or list(m.inputs)
    if not inputs:
        raise UsageError(f"model {m.name!r} declares no input")
    out.write("input,variable,transient,equilibrium,adapting\n")
    for inp in inputs:
        r = adaptation.adapting_variables(m, inp)
        names = {var_vertex(x): x for x in m.variables}
        for v, tr, eq, ad in r.rows():
            out.write(f"{inp},{names[v]},{_yes(tr)},{_yes(eq)},{_yes(ad)}\n")


def cmd_simulate(args, out):
    m = load_model(args.model)
    schedule = None
    if args.param is not None:
        if args.post is None or args.at is None:
            raise UsageError("--param needs --post and --at")
        schedule = [(args.at, {args.param: args.post})]
    sets = _assignments(args.set)
    if args.param is not None and args.pre is not None:
        sets[args.param] = args.pre
    trace = dynsim.integrate(m, sets, None, schedule, _cfg(args))
    trace.to_csv(out)


def _report(reports, out):
    out.write("variable,pre,post,transient_peak_deviation,final_deviation\n")
    for v, r in reports.items():
        out.write(f"{v},{_fmt(r.pre)},{_fmt(r.post)},{_fmt(r.transient_peak_deviation)},{_fmt(r.final_deviation)}\n")


def cmd_step(args, out):
    m = load_model(args.model)
    inp = args.input[0] if args.input else (m.inputs[0] if m.inputs else None)
    if inp is None or args.post is None:
        raise UsageError("step needs --input and --post")
    pre = args.pre if args.pre is not None else m.nominal_bindings().get(inp)
    if pre is None:
        raise UsageError("--pre is required for an input without a default")
    _report(dynsim.step_response(m, _assignments(args.set), inp, pre, args.post, _cfg(args)), out)


def cmd_intervene(args, out):
    m = load_model(args.model)
    if args.param is None or args.post is None:
        raise UsageError("intervene needs --param and --post")
    pre = args.pre if args.pre is not None else m.nominal_bindings().get(args.param)
    _report(dynsim.soft_intervention_experiment(m, _assignments(args.set), args.param, pre, args.post, _cfg(args)), out)


def cmd_sample(args, out):
    m = load_model(args.model)
    dists = {}
    for item in args.dist or []:
        if "=" not in item:
            raise UsageError(f"expected NAME=DISTRIBUTION, got {item!r}")
        k, v = item.split("=", 1)
        dists[k.strip()] = parse_distribution(v.strip())
    ds = dynsim.sample_equilibria(m, args.n, args.seed, _cfg(args), dists, _assignments(args.set))
    ds.to_csv(out)


def cmd_lcd(args, out):
    ds = dynsim.Dataset.from_csv(args.data)
    if not args.context:
        raise UsageError("--context is required")
    cands = _names(args.candidates) or [c for c in ds.names if c != args.context]
    triples = indep.lcd(ds, args.context, cands, args.alpha)
    out.write("context,x,y,p_context_x,p_x_y,p_context_y_given_x\n")
    for t in triples:
        out.write(f"{t.context},{t.x},{t.y},{_fmt(t.c_x.p)},{_fmt(t.x_y.p)},{_fmt(t.c_y_given_x.p)}\n")


def cmd_detect(args, out):
    m = load_model(args.model)
    if not args.target:
        raise UsageError("--target is required")
    cog = _cog(m, "equilibrium")
    mog = markov_ordering(cog)
    if args.baseline or args.intervened:
        if not (args.baseline and args.intervened):
            raise UsageError("--baseline and --intervened go together")
        base = dynsim.Dataset.from_csv(args.baseline)
        post = dynsim.Dataset.from_csv(args.intervened)
        target = cog.natural.get(args.target, _vertex(m, args.target))
        v = indep.detect_adaptation_from_data(base, post, target, mog, args.alpha)
    else:
        v = adaptation.detect_adaptation_graphside(cog, mog, args.target)
    out.write(f"target_equation,{v.target_equation}\n")
    out.write(f"target_variable,{v.target_variable}\n")
    out.write(f"condition1,{_yes(v.condition1)}\n")
    out.write(f"condition2,{_yes(v.condition2)}\n")
    out.write(f"witnesses,{' '.join(v.witnesses)}\n")
    out.write(f"conclusion,{v.conclusion}\n")


COMMANDS = {
    "order": cmd_order,
    "markov": cmd_markov,
    "dsep": cmd_dsep,
    "indep-table": cmd_indep_table,
    "adapt": cmd_adapt,
    "simulate": cmd_simulate,
    "step": cmd_step,
    "intervene": cmd_intervene,
    "sample": cmd_sample,
    "lcd": cmd_lcd,
    "detect": cmd_detect,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="adaptscan", description="Causal ordering and perfect adaptation analysis.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def common(sp, model=True):
        if model:
            sp.add_argument("model", help="model file or bundled model name")
        sp.add_argument("--out", help="write output here instead of stdout")
        return sp

    def sim_flags(sp):
        sp.add_argument("--dt", type=float, default=dynsim.SimConfig.dt)
        sp.add_argument("--t-max", type=float, default=dynsim.SimConfig.t_max)
        sp.add_argument("--tol", type=float, default=dynsim.SimConfig.eq_tol)
        sp.add_argument("--set", action="append", metavar="NAME=VALUE", help="override a parameter")

    for name in ("order", "markov"):
        sp = common(sub.add_parser(name))
        sp.add_argument("--mode", choices=("dynamic", "equilibrium"), default="equilibrium")
        sp.add_argument("--format", choices=("dot", "csv"), default="dot")

    sp = common(sub.add_parser("dsep"))
    sp.add_argument("--mode", choices=("dynamic", "equilibrium"), default="equilibrium")
    sp.add_argument("--a", action="append")
    sp.add_argument("--b", action="append")
    sp.add_argument("--given", action="append")

    sp = common(sub.add_parser("indep-table"))
    sp.add_argument("--mode", choices=("dynamic", "equilibrium"), default="equilibrium")
    sp.add_argument("--vars", action="append")
    sp.add_argument("--max-cond", type=int, default=1)
    sp.add_argument("--data", help="CSV dataset to test the implied independences on")
    sp.add_argument("--alpha", type=float, default=0.01)
    sp.add_argument("--format", choices=("csv",), default="csv")

    sp = common(sub.add_parser("adapt"))
    sp.add_argument("--input", action="append")

    sp = common(sub.add_parser("simulate"))
    sim_flags(sp)
    sp.add_argument("--param")
    sp.add_argument("--pre", type=float)
    sp.add_argument("--post", type=float)
    sp.add_argument("--at", type=float, help="switch time for --param")
    sp.add_argument("--format", choices=("csv",), default="csv")

    sp = common(sub.add_parser("step"))
    sim_flags(sp)
    sp.add_argument("--input", action="append")
    sp.add_argument("--pre", type=float)
    sp.add_argument("--post", type=float)

    sp = common(sub.add_parser("intervene"))
    sim_flags(sp)
    sp.add_argument("--param")
    sp.add_argument("--pre", type=float)
    sp.add_argument("--post", type=float)

    sp = common(sub.add_parser("sample"))
    sim_flags(sp)
    sp.add_argument("--n", type=int, default=500)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--dist", action="append", metavar="NAME=DIST", help="e.g. k_me=uniform(0.98, 1.1)")
    sp.add_argument("--format", choices=("csv",), default="csv")

    sp = common(sub.add_parser("lcd"), model=False)
    sp.add_argument("data", help="CSV dataset")
    sp.add_argument("--context", required=False)
    sp.add_argument("--candidates", action="append")
    sp.add_argument("--alpha", type=float, default=0.01)

    sp = common(sub.add_parser("detect"))
    sp.add_argument("--target", help="intervened equation, e.g. f_e")
    sp.add_argument("--baseline")
    sp.add_argument("--intervened")
    sp.add_argument("--alpha", type=float, default=0.01)
    return p


def _source(args) -> str:
    return getattr(args, "model", None) or getattr(args, "data", None) or "adaptscan"


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        stderr.write(f"adaptscan: error: {e}\n")
        return 1
    except SystemExit as e:  # --help
        return int(e.code or 0)
    buf = io.StringIO()
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = lambda msg, cat, *a, **k: stderr.write(f"adaptscan: warning: {msg}\n")
            COMMANDS[args.command](args, buf)
    except UsageError as e:
        stderr.write(f"adaptscan: error: {e}\n")
        return 1
    except (NoConvergence, NonFiniteState) as e:
        stderr.write(f"adaptscan: {_source(args)}: {type(e).__name__}: {e}\n")
        return 3
    except (AdaptscanError, FileNotFoundError) as e:
        stderr.write(f"adaptscan: {_source(args)}: {type(e).__name__}: {e}\n")
        return 2
    text = buf.getvalue()
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return 0


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
