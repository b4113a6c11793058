"""Expression trees for single-unknown arithmetic equations.

Equations are strictly binary trees over ``+ - * / ^`` with three leaf kinds:
numbers (surface string plus exact value), named constants (``pi``), and
variables. Every value in this module is an exact ``fractions.Fraction``;
no float enters the parse/evaluate/serialize path.

The number grammar is shared with the text side: integers, decimals,
percentages (``50%`` is one half), and bracketed fractions ``((a)/(b))``.
A bracketed fraction is a single number token, not a division node, so that
it aligns one-to-one with the identical token in problem text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Optional, Union

from .errors import (
    DivisionByZero,
    EquationSyntaxError,
    MultipleUnknowns,
    NonIntegerExponent,
    UnboundVariable,
)

# The school convention for circle problems: pi is computed as exactly 3.14.
PI_VALUE = Fraction(314, 100)
CONSTANT_NAMES = {"pi": PI_VALUE, "PI": PI_VALUE, "π": PI_VALUE}

_OPS = "+-*/^"
_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 3}


@dataclass(frozen=True)
class Num:
    """Number leaf. ``surface`` is the written form, ``value`` the exact rational."""

    surface: str
    value: Fraction


@dataclass(frozen=True)
class Const:
    """Named constant leaf (``pi``); evaluates to a fixed rational."""

    name: str
    value: Fraction


@dataclass(frozen=True)
class Var:
    """Variable leaf (the unknown, or a symbolic slot such as ``temp0``)."""

    name: str


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


Expr = Union[Num, Const, Var, BinOp]
Path = tuple[str, ...]  # 'L'/'R' steps from the root


@dataclass(frozen=True)
class Equation:
    """``unknown = rhs``; the rhs never contains the unknown itself."""

    unknown: str
    rhs: Expr


# ---------------------------------------------------------------------------
# Number grammar (shared by the equation tokenizer and the text scanner)

_BRACKET_FRACTION_RE = re.compile(
    r"\(\(\s*(\d+(?:\.\d+)?)\s*\)\s*/\s*\(\s*(\d+(?:\.\d+)?)\s*\)\)"
)
_PLAIN_NUMBER_RE = re.compile(r"(\d+(?:\.\d+)?)(%?)")

# Alternation order matters: the longest form must win at each position.
NUMBER_TOKEN_RE = re.compile(
    r"\(\(\s*\d+(?:\.\d+)?\s*\)\s*/\s*\(\s*\d+(?:\.\d+)?\s*\)\)|\d+(?:\.\d+)?%?"
)


def parse_number(surface: str) -> Fraction:
    """Exact value of one number token (int, decimal, percent, ((a)/(b)))."""
    m = _BRACKET_FRACTION_RE.fullmatch(surface.strip())
    if m:
        den = Fraction(m.group(2))
        if den == 0:
            raise EquationSyntaxError(f"zero denominator in {surface!r}")
        return Fraction(m.group(1)) / den
    m = _PLAIN_NUMBER_RE.fullmatch(surface.strip())
    if m:
        value = Fraction(m.group(1))
        return value / 100 if m.group(2) else value
    raise EquationSyntaxError(f"not a number token: {surface!r}")


def canonical_number_surface(surface: str) -> str:
    """Whitespace-free rendering of a number token."""
    return "".join(surface.split())


def format_rational(value: Fraction) -> str:
    """Render a rational in the number grammar.

    Integers print bare, terminating decimals print with up to six places,
    anything else falls back to the bracketed fraction form.
    """
    if value < 0:
        return "-" + format_rational(-value)
    if value.denominator == 1:
        return str(value.numerator)
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    places = max(twos, fives)
    if den == 1 and places <= 6:
        scaled = value.numerator * 10**places // value.denominator
        digits = str(scaled).rjust(places + 1, "0")
        return f"{digits[:-places]}.{digits[-places:]}"
    return f"(({value.numerator})/({value.denominator}))"


def number_leaf(value: Fraction) -> Expr:
    """Leaf (or minus-wrapped leaf) for an exact value, surface included."""
    if value < 0:
        return BinOp("-", Num("0", Fraction(0)), Num(format_rational(-value), -value))
    return Num(format_rational(value), value)


# ---------------------------------------------------------------------------
# Tokenizer / parser

_NAME_RE = re.compile(r"[A-Za-z_π][A-Za-z_0-9']*")


def _tokenize(text: str) -> list[tuple[str, object]]:
    tokens: list[tuple[str, object]] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "(":
            m = _BRACKET_FRACTION_RE.match(text, i)
            if m:
                surface = canonical_number_surface(m.group(0))
                tokens.append(("num", (surface, parse_number(surface))))
                i = m.end()
                continue
            tokens.append(("(", "("))
            i += 1
            continue
        if ch == ")":
            tokens.append((")", ")"))
            i += 1
            continue
        if ch in "×·":
            tokens.append(("op", "*"))
            i += 1
            continue
        if ch == "÷":
            tokens.append(("op", "/"))
            i += 1
            continue
        if ch in "−–":
            tokens.append(("op", "-"))
            i += 1
            continue
        if ch in _OPS:
            tokens.append(("op", ch))
            i += 1
            continue
        if ch.isdigit():
            m = _PLAIN_NUMBER_RE.match(text, i)
            assert m is not None
            surface = m.group(0)
            tokens.append(("num", (surface, parse_number(surface))))
            i = m.end()
            continue
        m = _NAME_RE.match(text, i)
        if m:
            tokens.append(("name", m.group(0)))
            i = m.end()
            continue
        raise EquationSyntaxError(f"unexpected character {ch!r} at position {i}")
    return tokens


class _Parser:
    """Recursive descent over the token list.

    Grammar (standard precedence, ``^`` right-associative, the rest
    left-associative)::

        expr    := term (('+' | '-') term)*
        term    := power (('*' | '/') power)*
        power   := unary ('^' power)?
        unary   := '-' unary | atom
        atom    := NUMBER | NAME | '(' expr ')'
    """

    def __init__(self, tokens: list[tuple[str, object]]):
        self.tokens = tokens
        self.pos = 0

    def _peek(self) -> Optional[tuple[str, object]]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _next(self) -> tuple[str, object]:
        tok = self._peek()
        if tok is None:
            raise EquationSyntaxError("unexpected end of equation")
        self.pos += 1
        return tok

    def parse(self) -> Expr:
        expr = self._expr()
        if self._peek() is not None:
            raise EquationSyntaxError(f"trailing tokens at position {self.pos}")
        return expr

    def _expr(self) -> Expr:
        node = self._term()
        while True:
            tok = self._peek()
            if tok and tok[0] == "op" and tok[1] in "+-":
                self._next()
                node = BinOp(str(tok[1]), node, self._term())
            else:
                return node

    def _term(self) -> Expr:
        node = self._power()
        while True:
            tok = self._peek()
            if tok and tok[0] == "op" and tok[1] in "*/":
                self._next()
                node = BinOp(str(tok[1]), node, self._power())
            else:
                return node

    def _power(self) -> Expr:
        base = self._unary()
        tok = self._peek()
        if tok and tok[0] == "op" and tok[1] == "^":
            self._next()
            return BinOp("^", base, self._power())
        return base

    def _unary(self) -> Expr:
        tok = self._peek()
        if tok and tok[0] == "op" and tok[1] == "-":
            self._next()
            return BinOp("-", Num("0", Fraction(0)), self._unary())
        return self._atom()

    def _atom(self) -> Expr:
        kind, payload = self._next()
        if kind == "num":
            surface, value = payload  # type: ignore[misc]
            return Num(canonical_number_surface(str(surface)), value)
        if kind == "name":
            name = str(payload)
            if name in CONSTANT_NAMES:
                return Const("pi", CONSTANT_NAMES[name])
            return Var(name)
        if kind == "(":
            inner = self._expr()
            closing = self._peek()
            if closing is None or closing[0] != ")":
                raise EquationSyntaxError("unbalanced parentheses")
            self._next()
            return inner
        raise EquationSyntaxError(f"unexpected token {payload!r}")


def parse_expr(text: str) -> Expr:
    """Parse a bare expression (no '=')."""
    return _Parser(_tokenize(text)).parse()


def parse_equation(text: str) -> Equation:
    """Parse ``unknown = expr``.

    The left side must be a single identifier; the unknown must not reappear
    on the right. Other identifiers on the right parse as symbolic leaves.
    """
    if "=" not in text:
        raise EquationSyntaxError("missing '='")
    lhs_text, _, rhs_text = text.partition("=")
    if "=" in rhs_text:
        raise EquationSyntaxError("more than one '='")
    lhs_tokens = _tokenize(lhs_text)
    names = [t for t in lhs_tokens if t[0] == "name"]
    if len(names) > 1:
        raise MultipleUnknowns(f"left side has {len(names)} unknowns")
    if len(lhs_tokens) != 1 or not names:
        raise EquationSyntaxError("left side must be a single unknown")
    unknown = str(names[0][1])
    rhs = _Parser(_tokenize(rhs_text)).parse()
    if unknown in variable_names(rhs):
        raise MultipleUnknowns(f"unknown {unknown!r} appears on the right side")
    return Equation(unknown, rhs)


# ---------------------------------------------------------------------------
# Tree utilities

def walk(expr: Expr) -> Iterator[Expr]:
    yield expr
    if isinstance(expr, BinOp):
        yield from walk(expr.left)
        yield from walk(expr.right)


def node_count(expr: Expr) -> int:
    return sum(1 for _ in walk(expr))


def variable_names(expr: Expr) -> set[str]:
    return {node.name for node in walk(expr) if isinstance(node, Var)}


def operator_set(expr: Expr) -> set[str]:
    return {node.op for node in walk(expr) if isinstance(node, BinOp)}


def iter_number_leaves(expr: Expr, _path: Path = ()) -> Iterator[tuple[Path, Num]]:
    """Number leaves in left-to-right order, each with its root path."""
    if isinstance(expr, Num):
        yield _path, expr
    elif isinstance(expr, BinOp):
        yield from iter_number_leaves(expr.left, _path + ("L",))
        yield from iter_number_leaves(expr.right, _path + ("R",))


def iter_constant_leaves(expr: Expr, _path: Path = ()) -> Iterator[tuple[Path, Const]]:
    if isinstance(expr, Const):
        yield _path, expr
    elif isinstance(expr, BinOp):
        yield from iter_constant_leaves(expr.left, _path + ("L",))
        yield from iter_constant_leaves(expr.right, _path + ("R",))


def leaf_at(expr: Expr, path: Path) -> Expr:
    node = expr
    for step in path:
        if not isinstance(node, BinOp):
            raise KeyError(f"path {path} runs past a leaf")
        node = node.left if step == "L" else node.right
    return node


def replace_at(expr: Expr, path: Path, replacement: Expr) -> Expr:
    if not path:
        return replacement
    if not isinstance(expr, BinOp):
        raise KeyError(f"path {path} runs past a leaf")
    if path[0] == "L":
        return BinOp(expr.op, replace_at(expr.left, path[1:], replacement), expr.right)
    return BinOp(expr.op, expr.left, replace_at(expr.right, path[1:], replacement))


def power_paths(expr: Expr) -> set[Path]:
    """Paths of all number/constant leaves lying inside any ``^`` subtree."""
    found: set[Path] = set()

    def visit(node: Expr, path: Path, under_power: bool) -> None:
        if isinstance(node, BinOp):
            inside = under_power or node.op == "^"
            visit(node.left, path + ("L",), inside)
            visit(node.right, path + ("R",), inside)
        elif under_power:
            found.add(path)

    visit(expr, (), False)
    return found


# ---------------------------------------------------------------------------
# Evaluation

def evaluate(expr: Expr, bindings: Optional[Mapping[str, Fraction]] = None) -> Fraction:
    """Exact rational evaluation.

    Raises UnboundVariable for free variables, DivisionByZero on zero
    denominators, NonIntegerExponent when a ``^`` exponent is not integral.
    """
    if isinstance(expr, Num):
        return expr.value
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        if bindings is not None and expr.name in bindings:
            return Fraction(bindings[expr.name])
        raise UnboundVariable(expr.name)
    left = evaluate(expr.left, bindings)
    right = evaluate(expr.right, bindings)
    if expr.op == "+":
        return left + right
    if expr.op == "-":
        return left - right
    if expr.op == "*":
        return left * right
    if expr.op == "/":
        if right == 0:
            raise DivisionByZero(serialize(expr))
        return left / right
    if expr.op == "^":
        if right.denominator != 1:
            raise NonIntegerExponent(str(right))
        exponent = right.numerator
        if left == 0 and exponent < 0:
            raise DivisionByZero(serialize(expr))
        return left**exponent
    raise EquationSyntaxError(f"unknown operator {expr.op!r}")


def evaluate_equation(eq: Equation, bindings: Optional[Mapping[str, Fraction]] = None) -> Fraction:
    return evaluate(eq.rhs, bindings)


# ---------------------------------------------------------------------------
# Serialization

def _is_negation(node: Expr) -> bool:
    return (
        isinstance(node, BinOp)
        and node.op == "-"
        and isinstance(node.left, Num)
        and node.left.surface == "0"
    )


def _needs_parens(child: Expr, parent_op: str, side: str, paren_products: bool) -> bool:
    if not isinstance(child, BinOp):
        return False
    child_prec = _PRECEDENCE[child.op]
    parent_prec = _PRECEDENCE[parent_op]
    if child_prec < parent_prec:
        return True
    if child_prec > parent_prec:
        # Products inside a sum carry explicit parens in the canonical form.
        return paren_products and child.op == "*" and parent_op in "+-"
    if parent_op == "^":
        return side == "L"  # right-associative
    return side == "R"  # left-associative


def serialize(expr: Expr, paren_products: bool = True) -> str:
    """Canonical infix form: no whitespace, minimal parens, ``parse`` inverse.

    With ``paren_products`` (the default) a ``*`` node directly inside a sum
    is parenthesized even though precedence would not require it.
    """
    if isinstance(expr, Num):
        return expr.surface
    if isinstance(expr, Const):
        return expr.name
    if isinstance(expr, Var):
        return expr.name
    if _is_negation(expr):
        inner = serialize(expr.right, paren_products)
        if isinstance(expr.right, BinOp):
            inner = f"({inner})"
        return "-" + inner
    left = serialize(expr.left, paren_products)
    if _needs_parens(expr.left, expr.op, "L", paren_products):
        left = f"({left})"
    right = serialize(expr.right, paren_products)
    if _needs_parens(expr.right, expr.op, "R", paren_products):
        right = f"({right})"
    return f"{left}{expr.op}{right}"


def serialize_equation(eq: Equation, paren_products: bool = True) -> str:
    return f"{eq.unknown}={serialize(eq.rhs, paren_products)}"
