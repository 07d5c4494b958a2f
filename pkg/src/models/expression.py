"""Arithmetic expressions in one variable ``x``.

Grammar (binding power in brackets)::

    expr    := term (("+" | "-") term)*          [10]
    term    := factor (("*" | "/") factor)*      [20]
    factor  := "-" factor | power                [30, prefix]
    power   := atom ("^" factor)?                [40, right associative]
    atom    := number | "x" | name "(" args ")" | "(" expr ")"

Functions: sqrt, exp, log, min, max, abs. ``**`` is accepted as an alias of
``^``. Evaluation is vectorised over numpy arrays; invalid operations produce
NaN/inf instead of raising, and callers decide what a non-finite value means.
"""

from __future__ import annotations

import re
from typing import Callable, NamedTuple

import numpy as np

from src.errors import SpecSyntaxError

FUNCTIONS: dict[str, tuple[int, Callable[..., np.ndarray]]] = {
    "sqrt": (1, np.sqrt),
    "exp": (1, np.exp),
    "log": (1, np.log),
    "abs": (1, np.abs),
    "min": (2, np.minimum),
    "max": (2, np.maximum),
}

_TOKEN_RE = re.compile(
    r"""
    (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
    |(?P<name>[A-Za-z_][A-Za-z_0-9]*)
    |(?P<op>\*\*|[-+*/^(),])
    |(?P<ws>\s+)
    """,
    re.VERBOSE,
)


class Token(NamedTuple):
    type: str
    value: str
    where: tuple[int, int]


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(source):
        match = _TOKEN_RE.match(source, pos)
        if match is None:
            raise SpecSyntaxError(source, f"unexpected character {source[pos]!r}", (pos, pos + 1))
        kind = match.lastgroup
        if kind != "ws":
            value = match.group()
            tokens.append(Token(kind, "^" if value == "**" else value, match.span()))
        pos = match.end()
    tokens.append(Token("end", "", (len(source), len(source))))
    return tokens


# ---------------------------------------------------------------------------
# Syntax tree
# ---------------------------------------------------------------------------


class Node:
    def evaluate(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def to_text(self) -> str:
        raise NotImplementedError


class Number(Node):
    def __init__(self, value: float) -> None:
        self.value = value

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return np.full_like(x, self.value, dtype=float)

    def to_text(self) -> str:
        return repr(float(self.value))


class Variable(Node):
    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float)

    def to_text(self) -> str:
        return "x"


class Negate(Node):
    def __init__(self, operand: Node) -> None:
        self.operand = operand

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return -self.operand.evaluate(x)

    def to_text(self) -> str:
        return f"(-{self.operand.to_text()})"


_BINARY: dict[str, Callable[[np.ndarray, np.ndarray], np.ndarray]] = {
    "+": np.add,
    "-": np.subtract,
    "*": np.multiply,
    "/": np.divide,
    "^": np.power,
}


class BinaryOp(Node):
    def __init__(self, op: str, left: Node, right: Node) -> None:
        self.op = op
        self.left = left
        self.right = right

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return _BINARY[self.op](self.left.evaluate(x), self.right.evaluate(x))

    def to_text(self) -> str:
        return f"({self.left.to_text()} {self.op} {self.right.to_text()})"


class Call(Node):
    def __init__(self, name: str, args: list[Node]) -> None:
        self.name = name
        self.args = args

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        _, fn = FUNCTIONS[self.name]
        return fn(*(arg.evaluate(x) for arg in self.args))

    def to_text(self) -> str:
        return f"{self.name}({', '.join(arg.to_text() for arg in self.args)})"


# ---------------------------------------------------------------------------
# Pratt parser
# ---------------------------------------------------------------------------

_INFIX_BP: dict[str, tuple[int, int]] = {
    # op: (left binding power, right binding power)
    "+": (10, 11),
    "-": (10, 11),
    "*": (20, 21),
    "/": (20, 21),
    "^": (40, 30),
}
_PREFIX_BP = 30


class Parser:
    def __init__(self, source: str) -> None:
        self.source = source
        self.tokens = tokenize(source)
        self.index = 0

    @property
    def token(self) -> Token:
        return self.tokens[self.index]

    def advance(self, expected: str | None = None) -> Token:
        tok = self.token
        if expected is not None and tok.value != expected:
            found = tok.value or "end of input"
            raise SpecSyntaxError(self.source, f"expected {expected!r}, found {found!r}", tok.where)
        self.index += 1
        return tok

    def parse(self) -> Node:
        node = self.expression(0)
        if self.token.type != "end":
            raise SpecSyntaxError(self.source, f"unexpected {self.token.value!r}", self.token.where)
        return node

    def expression(self, rbp: int) -> Node:
        left = self.nud(self.advance())
        while self.token.type == "op" and self.token.value in _INFIX_BP:
            lbp, next_rbp = _INFIX_BP[self.token.value]
            if lbp <= rbp:
                break
            op = self.advance().value
            left = BinaryOp(op, left, self.expression(next_rbp))
        return left

    def nud(self, tok: Token) -> Node:
        if tok.type == "num":
            return Number(float(tok.value))
        if tok.type == "name":
            if tok.value == "x":
                return Variable()
            if tok.value in FUNCTIONS:
                return self.call(tok)
            raise SpecSyntaxError(self.source, f"unknown name {tok.value!r}", tok.where)
        if tok.value == "-":
            return Negate(self.expression(_PREFIX_BP))
        if tok.value == "+":
            return self.expression(_PREFIX_BP)
        if tok.value == "(":
            inner = self.expression(0)
            self.advance(")")
            return inner
        found = tok.value or "end of input"
        raise SpecSyntaxError(self.source, f"unexpected {found!r}", tok.where)

    def call(self, name_tok: Token) -> Node:
        arity, _ = FUNCTIONS[name_tok.value]
        self.advance("(")
        args: list[Node] = []
        if self.token.value != ")":
            args.append(self.expression(0))
            while self.token.value == ",":
                self.advance(",")
                args.append(self.expression(0))
        close = self.advance(")")
        if len(args) != arity:
            raise SpecSyntaxError(
                self.source,
                f"{name_tok.value}() takes {arity} argument(s), got {len(args)}",
                (name_tok.where[0], close.where[1]),
            )
        return Call(name_tok.value, args)


def parse_expression(source: str) -> Node:
    """Parse ``source`` into a syntax tree or raise a position-annotated error."""
    if not source.strip():
        raise SpecSyntaxError(source, "empty expression", (0, len(source)))
    return Parser(source).parse()


def match_power_law(node: Node) -> tuple[float, float] | None:
    """Return ``(alpha, p)`` if ``node`` is structurally ``alpha * x^p``.

    Recognises products, quotients and numeric powers of ``x``, ``sqrt`` and
    positive constants. Returns None for anything else, including alpha <= 0.
    """
    match = _power_law(node)
    if match is None or not np.isfinite(match[0]) or match[0] <= 0:
        return None
    return match


def _power_law(node: Node) -> tuple[float, float] | None:
    if isinstance(node, Variable):
        return 1.0, 1.0
    if isinstance(node, Number):
        return node.value, 0.0
    if isinstance(node, Call) and node.name == "sqrt":
        inner = _power_law(node.args[0])
        if inner is None or inner[0] <= 0:
            return None
        return float(np.sqrt(inner[0])), inner[1] / 2.0
    if isinstance(node, BinaryOp):
        if node.op == "^":
            base = _power_law(node.left)
            if base is None or not isinstance(node.right, Number) or base[0] <= 0:
                return None
            k = node.right.value
            return base[0] ** k, base[1] * k
        if node.op in ("*", "/"):
            left, right = _power_law(node.left), _power_law(node.right)
            if left is None or right is None:
                return None
            if node.op == "*":
                return left[0] * right[0], left[1] + right[1]
            if right[0] == 0:
                return None
            return left[0] / right[0], left[1] - right[1]
    return None
