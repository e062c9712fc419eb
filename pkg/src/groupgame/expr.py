"""Arithmetic expressions for user-defined absolute payoffs.

Grammar (EBNF)::

    expr    = term , { ("+" | "-") , term } ;
    term    = unary , { ("*" | "/") , unary } ;
    unary   = "-" , unary | power ;
    power   = atom , [ "^" , unary ] ;
    atom    = number | identifier | "(" , expr , ")" ;
    number  = digits , [ "." , [ digits ] ] , [ exponent ]
            | "." , digits , [ exponent ] ;
    exponent = ("e" | "E") , [ "+" | "-" ] , digits ;

``^`` binds tighter than unary minus (``-2^2 == -4``) and is right
associative; the other binary operators associate to the left. Identifiers
are the group-1 strategies ``x1 .. xm``, the group-2 strategies ``y1 .. yn``
and named parameters supplied at parse time.

Evaluation works on floats and on numpy arrays alike.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Mapping, Sequence, Union

import numpy as np

from groupgame.game_model import GroupSpec, StrategyProfile


class ExprError(ValueError):
    pass


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownVariableError(ExprError):
    pass


class EvaluationError(ArithmeticError):
    def __init__(self, message: str, subexpression: "Node"):
        super().__init__(f"{message} in {to_source(subexpression)!r}")
        self.subexpression = subexpression


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    group: int  # 1 -> x, 2 -> y
    index: int  # 1-based, as written

    @property
    def name(self) -> str:
        return f"{'x' if self.group == 1 else 'y'}{self.index}"


@dataclass(frozen=True)
class Param:
    name: str
    value: float


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


Node = Union[Num, Var, Param, Neg, BinOp]


@dataclass(frozen=True)
class Expr:
    root: Node
    groups: GroupSpec

    def __str__(self) -> str:
        return to_source(self.root)

    def __call__(self, g1: Sequence[Any], g2: Sequence[Any]) -> Any:
        return _eval(self.root, g1, g2)


_TOKEN = re.compile(
    r"""(?P<ws>\s+)
      | (?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
      | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
      | (?P<op>[-+*/^()])""",
    re.VERBOSE,
)
_VAR = re.compile(r"([xy])(\d+)$")


class _Parser:
    def __init__(self, source: str, groups: GroupSpec, params: Mapping[str, float]):
        self.source = source
        self.groups = groups
        self.params = params
        self.tokens = self._tokenize(source)
        self.pos = 0

    def _offset(self, char_index: int) -> int:
        return len(self.source[:char_index].encode("utf-8"))

    def _tokenize(self, source: str):
        tokens = []
        i = 0
        while i < len(source):
            m = _TOKEN.match(source, i)
            if m is None:
                raise ExprSyntaxError(f"unexpected character {source[i]!r}", self._offset(i))
            kind = m.lastgroup
            if kind != "ws":
                tokens.append((kind, m.group(), i))
            i = m.end()
        tokens.append(("end", "", len(source)))
        return tokens

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, tok, what: str):
        found = "end of input" if tok[0] == "end" else repr(tok[1])
        raise ExprSyntaxError(f"expected {what}, found {found}", self._offset(tok[2]))

    def parse(self) -> Node:
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            self.fail(tok, "operator or end of input")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        tok = self.take()
        kind, text, _ = tok
        if kind == "num":
            return Num(float(text))
        if kind == "ident":
            return self.identifier(text)
        if kind == "op" and text == "(":
            node = self.expr()
            close = self.take()
            if close[1] != ")":
                self.fail(close, "')'")
            return node
        self.fail(tok, "number, identifier or '('")

    def identifier(self, name: str) -> Node:
        m = _VAR.match(name)
        if m:
            group = 1 if m.group(1) == "x" else 2
            index = int(m.group(2))
            size = self.groups.m if group == 1 else self.groups.n
            if not 1 <= index <= size:
                raise UnknownVariableError(
                    f"unknown variable {name!r}: index out of range 1..{size}"
                )
            return Var(group, index)
        if name in self.params:
            return Param(name, float(self.params[name]))
        raise UnknownVariableError(f"unknown identifier {name!r}")


def parse(source: str, groups: GroupSpec = GroupSpec(), params: Mapping[str, float] | None = None) -> Expr:
    """Parse ``source`` into an expression over the strategies of ``groups``.

    Raises:
        ExprSyntaxError: malformed input; ``offset`` is a UTF-8 byte offset.
        UnknownVariableError: unknown identifier or variable index out of range.
    """
    return Expr(_Parser(source, groups, params or {}).parse(), groups)


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_NEG_PREC = 3
_ATOM_PREC = 5


def _prec(node: Node) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _NEG_PREC
    return _ATOM_PREC


def to_source(node: Node) -> str:
    """Print with the fewest parentheses that re-parse to the same tree."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Param):
        return node.name
    if isinstance(node, Neg):
        inner = to_source(node.operand)
        if _prec(node.operand) < _NEG_PREC:
            inner = f"({inner})"
        return f"-{inner}"
    left, right = to_source(node.left), to_source(node.right)
    if node.op == "^":
        if _prec(node.left) < _ATOM_PREC:
            left = f"({left})"
        if _prec(node.right) < _NEG_PREC:
            right = f"({right})"
        return f"{left}^{right}"
    p = _PREC[node.op]
    if _prec(node.left) < p:
        left = f"({left})"
    if _prec(node.right) <= p:
        right = f"({right})"
    return f"{left} {node.op} {right}"


def _is_zero(value: Any) -> bool:
    if isinstance(value, np.ndarray):
        return bool(np.any(value == 0))
    return value == 0


def _power(node: BinOp, base: Any, exponent: Any) -> Any:
    if isinstance(base, np.ndarray) or isinstance(exponent, np.ndarray):
        with np.errstate(all="ignore"):
            out = np.power(np.asarray(base, dtype=float), exponent)
        if np.any(np.isnan(out)) or np.any(np.isinf(out)):
            raise EvaluationError("power has no finite real value", node)
        return out
    try:
        out = base ** exponent
    except ZeroDivisionError:
        raise EvaluationError("zero raised to a negative power", node) from None
    except OverflowError:
        raise EvaluationError("power overflows", node) from None
    if isinstance(out, complex):
        raise EvaluationError("power has no real value", node)
    return out


def _eval(node: Node, g1: Sequence[Any], g2: Sequence[Any]) -> Any:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return g1[node.index - 1] if node.group == 1 else g2[node.index - 1]
    if isinstance(node, Param):
        return node.value
    if isinstance(node, Neg):
        return -_eval(node.operand, g1, g2)
    left = _eval(node.left, g1, g2)
    right = _eval(node.right, g1, g2)
    op = node.op
    if op == "+":
        return left + right
    if op == "-":
        return left - right
    if op == "*":
        return left * right
    if op == "/":
        if _is_zero(right):
            raise EvaluationError("division by zero", node)
        return left / right
    return _power(node, left, right)


def evaluate(e: Expr, profile: StrategyProfile) -> float:
    """Evaluate ``e`` at a strategy profile of matching shape."""
    if len(profile.g1) != e.groups.m or len(profile.g2) != e.groups.n:
        raise ExprError(
            f"profile shape ({len(profile.g1)}, {len(profile.g2)}) does not match "
            f"({e.groups.m}, {e.groups.n})"
        )
    return float(_eval(e.root, profile.g1, profile.g2))
