"""Scalar formula parser/evaluator for problem data files.

Formulas such as ``(1/4 + pi^2)*exp(-t/2)*sin(pi*x)`` are parsed into an
immutable tree with a small Pratt parser and evaluated either on floats or
elementwise on numpy arrays.

Grammar, loosest to tightest binding::

    sum     := product (('+' | '-') product)*
    product := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary)?          # right associative
    atom    := number | name | name '(' args ')' | '(' sum ')'

so ``-2^2 == -4`` and ``2^3^2 == 512``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from .errors import (
    ArityError,
    EvaluationDomainError,
    ExpressionSyntaxError,
    UnknownFunctionError,
    UnknownIdentifierError,
)

CONSTANTS = {"pi": math.pi, "e": math.e}

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "sinh": np.sinh,
    "cosh": np.cosh,
}
FUNCTION_ARITY = {name: 1 for name in FUNCTIONS}

# binding powers
_BP_SUM = 10
_BP_PRODUCT = 20
_BP_UNARY = 30
_BP_POWER = 40


# --- tree -------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


Node = Union[Num, Const, Var, Neg, BinOp, Call]


@dataclass(frozen=True)
class Expression:
    """A parsed formula.

    ``variables`` is the set of names the formula was allowed to reference;
    the tree only ever mentions a subset of them.
    """

    root: Node
    variables: frozenset
    source: str = ""

    def __call__(self, **bindings):
        return evaluate(self, bindings)

    def __str__(self):
        return to_source(self)

    def free_variables(self) -> frozenset:
        return frozenset(_walk_vars(self.root))


def _walk_vars(node):
    if isinstance(node, Var):
        yield node.name
    elif isinstance(node, Neg):
        yield from _walk_vars(node.operand)
    elif isinstance(node, BinOp):
        yield from _walk_vars(node.left)
        yield from _walk_vars(node.right)
    elif isinstance(node, Call):
        for arg in node.args:
            yield from _walk_vars(arg)


# --- lexer ------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # number | name | op | end
    text: str
    offset: int  # byte offset into the UTF-8 source


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(source):
        match = _TOKEN_RE.match(source, pos)
        if match is None:
            raise ExpressionSyntaxError(
                f"unexpected character {source[pos]!r}", _byte_offset(source, pos), source
            )
        kind = match.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, match.group(), _byte_offset(source, pos)))
        pos = match.end()
    tokens.append(_Token("end", "", _byte_offset(source, len(source))))
    return tokens


def _byte_offset(source, index):
    return len(source[:index].encode("utf-8"))


# --- parser -----------------------------------------------------------------

_INFIX_BP = {"+": _BP_SUM, "-": _BP_SUM, "*": _BP_PRODUCT, "/": _BP_PRODUCT, "^": _BP_POWER}


class _Parser:
    def __init__(self, source, allowed):
        self.source = source
        self.allowed = allowed
        self.tokens = _tokenize(source)
        self.pos = 0

    @property
    def token(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text):
        tok = self.token
        if tok.text != text or tok.kind != "op":
            raise self.error(f"expected {text!r}", tok)
        return self.advance()

    def error(self, message, tok):
        if tok.kind == "end":
            message = f"{message}, found end of input"
        else:
            message = f"{message}, found {tok.text!r}"
        return ExpressionSyntaxError(message, tok.offset, self.source)

    def parse(self):
        if self.token.kind == "end":
            raise self.error("empty expression", self.token)
        node = self.expression(0)
        if self.token.kind != "end":
            raise self.error("unexpected token", self.token)
        return node

    def expression(self, rbp):
        left = self.nud(self.advance())
        while True:
            tok = self.token
            lbp = _INFIX_BP.get(tok.text, 0) if tok.kind == "op" else 0
            if lbp <= rbp:
                return left
            self.advance()
            if tok.text == "^":
                # right associative; exponent may carry its own unary minus
                right = self.expression(_BP_UNARY - 1)
            else:
                right = self.expression(lbp)
            left = BinOp(tok.text, left, right)

    def nud(self, tok):
        if tok.kind == "number":
            return Num(float(tok.text))
        if tok.kind == "name":
            return self.name(tok)
        if tok.kind == "op" and tok.text == "-":
            return Neg(self.expression(_BP_UNARY))
        if tok.kind == "op" and tok.text == "(":
            inner = self.expression(0)
            self.expect(")")
            return inner
        raise self.error("expected operand", tok)

    def name(self, tok):
        name = tok.text
        is_call = self.token.kind == "op" and self.token.text == "("
        if is_call:
            if name not in FUNCTIONS:
                raise UnknownFunctionError(name, tok.offset)
            self.advance()
            args = []
            if not (self.token.kind == "op" and self.token.text == ")"):
                args.append(self.expression(0))
                while self.token.kind == "op" and self.token.text == ",":
                    self.advance()
                    args.append(self.expression(0))
            self.expect(")")
            if len(args) != FUNCTION_ARITY[name]:
                raise ArityError(name, FUNCTION_ARITY[name], len(args), tok.offset)
            return Call(name, tuple(args))
        if name in CONSTANTS:
            return Const(name)
        if name in self.allowed:
            return Var(name)
        if name in FUNCTIONS:
            raise ExpressionSyntaxError(
                f"function {name!r} used without argument list", tok.offset, self.source
            )
        raise UnknownIdentifierError(name, tok.offset)


def parse(source: str, allowed_vars=("x", "t")) -> Expression:
    """Parse ``source`` into an :class:`Expression`.

    Raises ``ExpressionSyntaxError`` (with a byte ``offset``),
    ``UnknownIdentifierError``, ``UnknownFunctionError`` or ``ArityError``.
    """
    allowed = frozenset(allowed_vars)
    clash = allowed & (set(CONSTANTS) | set(FUNCTIONS))
    if clash:
        raise ValueError(f"variable names shadow builtins: {sorted(clash)}")
    root = _Parser(source, allowed).parse()
    return Expression(root, allowed, source)


# --- evaluation -------------------------------------------------------------


def _check(value, what):
    if not np.all(np.isfinite(value)):
        raise EvaluationDomainError(f"non-finite result in {what}")
    return value


def _eval(node, env):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Const):
        return CONSTANTS[node.name]
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Neg):
        return -_eval(node.operand, env)
    if isinstance(node, BinOp):
        left = _eval(node.left, env)
        right = _eval(node.right, env)
        with np.errstate(all="ignore"):
            if node.op == "+":
                out = np.add(left, right)
            elif node.op == "-":
                out = np.subtract(left, right)
            elif node.op == "*":
                out = np.multiply(left, right)
            elif node.op == "/":
                if np.any(np.asarray(right) == 0.0):
                    raise EvaluationDomainError("division by zero")
                out = np.divide(left, right)
            else:
                out = np.power(left, right)
        return _check(out, f"'{node.op}'")
    if isinstance(node, Call):
        arg = _eval(node.args[0], env)
        with np.errstate(all="ignore"):
            out = FUNCTIONS[node.func](arg)
        return _check(out, f"{node.func}()")
    raise TypeError(f"unknown node {node!r}")


def evaluate(expr: Expression, bindings: Mapping[str, object]):
    """Evaluate ``expr`` with variables taken from ``bindings``.

    Bindings may be floats or numpy arrays (evaluated elementwise with
    broadcasting). Scalar inputs give a Python float. Any non-finite
    intermediate raises :class:`EvaluationDomainError`.
    """
    env = {}
    missing = expr.free_variables() - set(bindings)
    if missing:
        raise KeyError(f"variable(s) not bound: {sorted(missing)}")
    # unused declared variables still fix the output shape
    for name in expr.variables & set(bindings):
        value = bindings[name]
        if isinstance(value, (list, tuple)):
            value = np.asarray(value, dtype=float)
        _check(value, f"binding {name!r}")
        env[name] = value
    scalar = all(np.ndim(v) == 0 for v in env.values())
    out = _check(_eval(expr.root, env), "expression")
    if scalar:
        return float(out)
    shape = np.broadcast_shapes(*(np.shape(v) for v in env.values()))
    return np.broadcast_to(np.asarray(out, dtype=float), shape).copy()


# --- printing ---------------------------------------------------------------


def to_source(expr) -> str:
    """Fully parenthesized source text that re-parses to an equal tree."""
    node = expr.root if isinstance(expr, Expression) else expr
    return _print(node)


def _print(node):
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, (Const, Var)):
        return node.name
    if isinstance(node, Neg):
        return f"(-{_print(node.operand)})"
    if isinstance(node, BinOp):
        return f"({_print(node.left)} {node.op} {_print(node.right)})"
    if isinstance(node, Call):
        return f"{node.func}({', '.join(_print(a) for a in node.args)})"
    raise TypeError(f"unknown node {node!r}")
