"""Expression trees for model equations.

Grammar (usual precedence, ``^`` binds tightest and is right-associative)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | NAME | NAME '(' expr (',' expr)* ')' | '(' expr ')'

The only function is ``pow(x, y)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Union

from .errors import DSLSyntaxError, NonFiniteResult, UnboundSymbol

FUNCTIONS = {"pow": 2}


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Sym:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


Expr = Union[Num, Sym, Neg, BinOp, Call]


def walk(e: Expr) -> Iterator[Expr]:
    yield e
    if isinstance(e, Neg):
        yield from walk(e.operand)
    elif isinstance(e, BinOp):
        yield from walk(e.left)
        yield from walk(e.right)
    elif isinstance(e, Call):
        for a in e.args:
            yield from walk(a)


def symbols(e: Expr) -> list[str]:
    """Distinct symbol names in left-to-right order of first occurrence."""
    seen: dict[str, None] = {}
    for node in walk(e):
        if isinstance(node, Sym):
            seen.setdefault(node.name, None)
    return list(seen)


# -- tokenizer / parser -----------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>\*\*|[-+*/^(),]))"
)


def _tokenize(text: str, line: int, col0: int):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            stripped = len(text[pos:]) - len(text[pos:].lstrip())
            raise DSLSyntaxError(line, col0 + pos + stripped + 1, "expression token", text[pos + stripped])
        kind = m.lastgroup
        value = m.group(kind)
        if value == "**":
            value = "^"
        tokens.append((kind, value, col0 + m.start(kind) + 1))
        pos = m.end()
    tokens.append(("end", "", col0 + len(text) + 1))
    return tokens


class _ExprParser:
    def __init__(self, text: str, line: int, col0: int):
        self.tokens = _tokenize(text, line, col0)
        self.i = 0
        self.line = line

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value, what=None):
        kind, v, col = self.take()
        if v != value:
            raise DSLSyntaxError(self.line, col, what or repr(value), v or "end of line")

    def parse(self) -> Expr:
        e = self.expr()
        kind, v, col = self.peek()
        if kind != "end":
            raise DSLSyntaxError(self.line, col, "operator or end of expression", v)
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            e = BinOp(op, e, self.term())
        return e

    def term(self):
        e = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            e = BinOp(op, e, self.unary())
        return e

    def unary(self):
        if self.peek()[1] == "-" and self.peek()[0] == "op":
            self.take()
            return Neg(self.unary())
        if self.peek()[1] == "+" and self.peek()[0] == "op":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, v, col = self.take()
        if kind == "num":
            return Num(float(v))
        if kind == "name":
            if self.peek()[1] == "(":
                if v not in FUNCTIONS:
                    raise DSLSyntaxError(self.line, col, "known function (pow)", v)
                self.take()
                args = [self.expr()]
                while self.peek()[1] == ",":
                    self.take()
                    args.append(self.expr())
                self.expect(")", "')'")
                if len(args) != FUNCTIONS[v]:
                    raise DSLSyntaxError(self.line, col, f"{FUNCTIONS[v]} arguments to {v}", str(len(args)))
                return Call(v, tuple(args))
            return Sym(v)
        if v == "(":
            e = self.expr()
            self.expect(")", "')'")
            return e
        raise DSLSyntaxError(self.line, col, "number, name or '('", v or "end of line")


def parse_expr(text: str, line: int = 1, col0: int = 0) -> Expr:
    """Parse an expression; ``line``/``col0`` position errors inside a file."""
    return _ExprParser(text, line, col0).parse()


# -- printing ----------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return _PREC["neg"]
    if isinstance(e, Num) and e.value < 0:
        return _PREC["neg"]
    return _PREC["atom"]


def _fmt_num(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def to_source(e: Expr) -> str:
    """Render ``e`` so that ``parse_expr(to_source(e)) == e``."""
    if isinstance(e, Num):
        return _fmt_num(e.value)
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({', '.join(to_source(a) for a in e.args)})"
    if isinstance(e, Neg):
        inner = to_source(e.operand)
        # '-' followed by ^ binds as -(a^b), anything looser needs parens
        if _prec(e.operand) < _PREC["neg"]:
            inner = f"({inner})"
        return f"-{inner}"
    p = _PREC[e.op]
    left = to_source(e.left)
    right = to_source(e.right)
    if e.op == "^":
        if _prec(e.left) <= p:
            left = f"({left})"
        if _prec(e.right) < _PREC["neg"]:
            right = f"({right})"
        return f"{left}^{right}"
    if _prec(e.left) < p:
        left = f"({left})"
    if _prec(e.right) <= p:
        right = f"({right})"
    return f"{left} {e.op} {right}"


# -- evaluation --------------------------------------------------------------


def _pow(x: float, y: float) -> float:
    try:
        return math.pow(x, y)
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        raise NonFiniteResult(f"pow({x!r}, {y!r}) is not finite") from exc


def _eval(e: Expr, b: Mapping[str, float]) -> float:
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Sym):
        try:
            return float(b[e.name])
        except KeyError:
            raise UnboundSymbol(e.name) from None
    if isinstance(e, Neg):
        return -_eval(e.operand, b)
    if isinstance(e, Call):
        return _pow(_eval(e.args[0], b), _eval(e.args[1], b))
    x = _eval(e.left, b)
    y = _eval(e.right, b)
    if e.op == "+":
        return x + y
    if e.op == "-":
        return x - y
    if e.op == "*":
        return x * y
    if e.op == "/":
        if y == 0:
            raise NonFiniteResult(f"division by zero ({x!r}/0)")
        return x / y
    return _pow(x, y)


def eval_expr(e: Expr, bindings: Mapping[str, float]) -> float:
    """Evaluate ``e`` in double precision.

    Raises UnboundSymbol for a free symbol and NonFiniteResult for division
    by zero, invalid powers or overflow.
    """
    value = _eval(e, bindings)
    if not math.isfinite(value):
        raise NonFiniteResult(f"expression evaluated to {value!r}")
    return value


def to_python(e: Expr, index: Mapping[str, str]) -> str:
    """Python source for ``e`` with symbols replaced by ``index[name]``.

    The result works on floats and on numpy arrays alike.
    """
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Sym):
        return index[e.name]
    if isinstance(e, Neg):
        return f"(-{to_python(e.operand, index)})"
    if isinstance(e, Call):
        a, b = (to_python(x, index) for x in e.args)
        return f"({a} ** {b})"
    op = "**" if e.op == "^" else e.op
    return f"({to_python(e.left, index)} {op} {to_python(e.right, index)})"
