"""Expression language for metric components and 1-forms.

Grammar (whitespace is insignificant)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary)?          # right-associative: x^2^3 = x^(2^3)
    atom    := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'
    NUMBER  := digits ['.' digits] [('e'|'E') ['+'|'-'] digits]  |  '.' digits ...
    IDENT   := [A-Za-z_][A-Za-z0-9_]*

Function names are the elementary set ``sin cos tan exp log sqrt sinh cosh
tanh``. There is no implicit multiplication: ``2x`` is a syntax error.

Expressions evaluate either over :class:`~curvlab.jets.Jet3` values
(:func:`eval_jet`) or over plain floats / numpy arrays (:func:`eval_float`).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from .errors import InputError, ParseError, SingularEvaluationError
from .jets import Jet3, jet_seed

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh", "tanh")
# exponents with larger magnitude fall back to the real-power rule
_MAX_REPEATED_POWER = 64


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Sym:
    name: str


@dataclass(frozen=True)
class Neg:
    child: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Sym, Neg, BinOp, Call]


# -- tokenizer -------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos), text)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def _byte_offset(text, pos):
    return len(text[:pos].encode("utf-8"))


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, expected, tok=None):
        tok = tok or self.peek()
        where = "end of input" if tok[0] == "end" else repr(tok[1])
        raise ParseError(f"{message}, found {where}", _byte_offset(self.text, tok[2]), self.text, expected)

    def expect_op(self, value):
        tok = self.peek()
        if tok[0] != "op" or tok[1] != value:
            self.error("syntax error", repr(value))
        return self.advance()

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            if tok[0] in ("num", "ident") or tok[1] == "(":
                self.error("implicit multiplication is not allowed", "an operator")
            self.error("unexpected token", "an operator or end of input")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.advance()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.advance()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        tok = self.peek()
        kind, value, _ = tok
        if kind == "num":
            self.advance()
            return Num(float(value))
        if kind == "ident":
            self.advance()
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] == "(":
                if value not in FUNCTIONS:
                    raise ParseError(f"unknown function {value!r}", _byte_offset(self.text, tok[2]),
                                     self.text, "one of " + ", ".join(FUNCTIONS))
                self.advance()
                if self.peek()[0] == "op" and self.peek()[1] == ")":
                    self.error("empty call argument", "an expression")
                arg = self.expr()
                self.expect_op(")")
                return Call(value, arg)
            return Sym(value)
        if kind == "op" and value == "(":
            self.advance()
            node = self.expr()
            if self.peek()[0] == "end":
                self.error("unbalanced parenthesis", "')'")
            self.expect_op(")")
            return node
        if kind == "end":
            self.error("unexpected end of input", "a number, name or '('")
        self.error("syntax error", "a number, name or '('")


def parse(text: str) -> Expr:
    """Parse ``text`` into an immutable expression tree."""
    if not isinstance(text, str) or not text.strip():
        raise InputError("expression text must be a non-empty string")
    return _Parser(text).parse()


# -- printing --------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _prec(node):
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _PREC["neg"]
    return 5


def to_text(node: Expr) -> str:
    """Canonical text that parses back to an identical tree."""
    if isinstance(node, Num):
        text = repr(float(node.value))
        return f"({text})" if text.startswith("-") else text
    if isinstance(node, Sym):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    if isinstance(node, Neg):
        inner = to_text(node.child)
        # the operand of unary minus binds at 'unary' level: only '^' chains are safe bare
        return "-" + (inner if _prec(node.child) >= _PREC["neg"] else f"({inner})")
    p = _PREC[node.op]
    left, right = to_text(node.left), to_text(node.right)
    if node.op == "^":
        if _prec(node.left) <= p:
            left = f"({left})"
        if _prec(node.right) < _PREC["neg"]:
            right = f"({right})"
    else:
        if _prec(node.left) < p:
            left = f"({left})"
        if _prec(node.right) <= p:
            right = f"({right})"
    return f"{left}{node.op}{right}"


def symbols(node: Expr) -> frozenset:
    """All symbol names referenced by ``node``."""
    if isinstance(node, Sym):
        return frozenset([node.name])
    if isinstance(node, Num):
        return frozenset()
    if isinstance(node, (Neg, Call)):
        return symbols(node.child if isinstance(node, Neg) else node.arg)
    return symbols(node.left) | symbols(node.right)


# -- evaluation ------------------------------------------------------------


@dataclass(frozen=True)
class EvalEnv:
    """Bindings for evaluation: seeded coordinate jets and constant parameters."""

    coordinates: Mapping[str, Jet3]
    parameters: Mapping[str, float]

    def __post_init__(self):
        clash = set(self.coordinates) & set(self.parameters)
        if clash:
            raise InputError(f"names used both as coordinate and parameter: {sorted(clash)}")

    @classmethod
    def at_point(cls, coord_names, point, order, parameters=None):
        point = np.asarray(point, dtype=float)
        if point.shape != (len(coord_names),):
            raise InputError(f"point has {point.size} entries, chart has {len(coord_names)} coordinates")
        coords = {name: jet_seed(point, i, order) for i, name in enumerate(coord_names)}
        return cls(coords, dict(parameters or {}))

    @property
    def dim(self):
        return next(iter(self.coordinates.values())).dim

    @property
    def order(self):
        return next(iter(self.coordinates.values())).order


def _constant_exponent(node, env_coords):
    return not (symbols(node) & set(env_coords))


def eval_jet(node: Expr, env: EvalEnv) -> Jet3:
    """Evaluate ``node`` to a jet at the point encoded by ``env``."""
    try:
        return _eval_jet(node, env)
    except SingularEvaluationError as exc:
        raise SingularEvaluationError(f"{exc} in expression '{to_text(node)}'", exc.function) from exc


def _eval_jet(node, env):
    dim, order = env.dim, env.order
    if isinstance(node, Num):
        return Jet3.constant(node.value, dim, order)
    if isinstance(node, Sym):
        if node.name in env.coordinates:
            return env.coordinates[node.name]
        if node.name in env.parameters:
            return Jet3.constant(env.parameters[node.name], dim, order)
        raise InputError(f"unbound symbol {node.name!r}")
    if isinstance(node, Neg):
        return -_eval_jet(node.child, env)
    if isinstance(node, Call):
        return getattr(_eval_jet(node.arg, env), node.func)()
    left = _eval_jet(node.left, env)
    if node.op == "^":
        if _constant_exponent(node.right, env.coordinates):
            k = _eval_jet(node.right, env).value
            if float(k).is_integer() and abs(k) <= _MAX_REPEATED_POWER:
                return left.ipow(int(k))
            return left.rpow(k)
        right = _eval_jet(node.right, env)
        return (right * left.log()).exp()
    right = _eval_jet(node.right, env)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    return left / right


_FLOAT_FUNCS = {
    "sin": np.sin, "cos": np.cos, "tan": np.tan, "exp": np.exp, "log": np.log, "sqrt": np.sqrt,
    "sinh": np.sinh, "cosh": np.cosh, "tanh": np.tanh,
}


def eval_float(node: Expr, coordinates: Mapping[str, object], parameters: Mapping[str, float] | None = None):
    """Evaluate on plain numbers; coordinate values may be broadcastable arrays.

    Follows the same rules as :func:`eval_jet`, so the result equals the
    order-0 slot of the jet evaluation.
    """
    parameters = parameters or {}
    clash = set(coordinates) & set(parameters)
    if clash:
        raise InputError(f"names used both as coordinate and parameter: {sorted(clash)}")
    return _eval_float(node, coordinates, parameters)


def _eval_float(node, coords, params):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Sym):
        if node.name in coords:
            return np.asarray(coords[node.name], dtype=float)
        if node.name in params:
            return float(params[node.name])
        raise InputError(f"unbound symbol {node.name!r}")
    if isinstance(node, Neg):
        return -_eval_float(node.child, coords, params)
    if isinstance(node, Call):
        x = np.asarray(_eval_float(node.arg, coords, params), dtype=float)
        if node.func in ("log", "sqrt") and np.any(x <= 0):
            raise SingularEvaluationError(f"{node.func} evaluated outside its domain", node.func)
        return _FLOAT_FUNCS[node.func](x)
    left = np.asarray(_eval_float(node.left, coords, params), dtype=float)
    if node.op == "^":
        if _constant_exponent(node.right, coords):
            k = float(_eval_float(node.right, coords, params))
            if k.is_integer() and abs(k) <= _MAX_REPEATED_POWER:
                return _int_power(left, int(k))
            if np.any(left <= 0):
                raise SingularEvaluationError("pow evaluated outside its domain", "pow")
            return left**k
        right = np.asarray(_eval_float(node.right, coords, params), dtype=float)
        if np.any(left <= 0):
            raise SingularEvaluationError("log evaluated outside its domain", "log")
        return np.exp(right * np.log(left))
    right = np.asarray(_eval_float(node.right, coords, params), dtype=float)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if np.any(right == 0):
        raise SingularEvaluationError("division by zero", "div")
    return left / right


def _int_power(x, k):
    """Repeated multiplication, in the same order as :meth:`Jet3.ipow`."""
    if k < 0:
        return 1.0 / _int_power(x, -k)
    result = np.ones_like(x)
    base = x
    while k:
        if k & 1:
            result = result * base
        k >>= 1
        if k:
            base = base * base
    return result
