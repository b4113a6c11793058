"""Algebraic inversion: swap a known number with the unknown and re-solve.

Given a solved equation ``x = rhs``, a target number leaf inside ``rhs`` and
the equation's answer, the inverted equation expresses that target in terms
of the answer and the remaining numbers. The target leaf is replaced by a
fresh variable, the answer becomes the left-hand tree, and the loop peels
one operator per step, folding the number-only child into the left tree:

    f = n + v  =>  v = f - n        f = v + n  =>  v = f - n
    f = n - v  =>  v = n - f        f = v - n  =>  v = f + n
    f = n * v  =>  v = f / n        f = v * n  =>  v = f / n
    f = n / v  =>  v = n / f        f = v / n  =>  v = f * n

Each step strictly shrinks the variable-bearing side, so the loop terminates
in at most depth(rhs) iterations. The emitted operators are drawn from the
same set; ``^`` is never produced (such targets are filtered upstream).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import BothSidesVariable, DivisionByZero, NoVariable, PowerEncountered
from .expr import (
    BinOp,
    Equation,
    Expr,
    Num,
    Path,
    Var,
    evaluate,
    leaf_at,
    number_leaf,
    replace_at,
    serialize,
    variable_names,
)

_FRESH_NAME = "x'"


@dataclass(frozen=True)
class ReversionStep:
    """One rule application: the peeled operator and which side held the unknown."""

    op: str
    var_side: str  # 'L' or 'R'


def find_var(node: BinOp) -> tuple[Expr, Expr, str]:
    """Split a binary node into (number subtree, variable subtree, variable side)."""
    left_has = bool(variable_names(node.left))
    right_has = bool(variable_names(node.right))
    if left_has and right_has:
        raise BothSidesVariable(serialize(node))
    if not left_has and not right_has:
        raise NoVariable(serialize(node))
    if left_has:
        return node.right, node.left, "L"
    return node.left, node.right, "R"


def _fold(left: Expr, op: str, side: str, num_subtree: Expr) -> Expr:
    """New left tree after peeling ``op`` with the variable on ``side``."""
    if op == "+":
        return BinOp("-", left, num_subtree)
    if op == "-":
        if side == "R":  # f = n - v  =>  v = n - f
            return BinOp("-", num_subtree, left)
        return BinOp("+", left, num_subtree)  # f = v - n  =>  v = f + n
    if op == "*":
        return BinOp("/", left, num_subtree)
    if op == "/":
        if side == "R":  # f = n / v  =>  v = n / f
            return BinOp("/", num_subtree, left)
        return BinOp("*", left, num_subtree)  # f = v / n  =>  v = f * n
    raise PowerEncountered(op)


def _check_divisor(node: Expr, context: Expr) -> None:
    value = evaluate(node)
    if value == 0:
        raise DivisionByZero(serialize(context))


def invert_with_trace(
    eq: Equation, target: Path, answer: Optional[Fraction] = None
) -> tuple[Equation, list[ReversionStep]]:
    """Invert ``eq`` around the number leaf at ``target``.

    ``answer`` defaults to the evaluated right-hand side. The result keeps
    the original unknown name; its rhs value equals the target leaf's value.
    Raises DivisionByZero when a fold would divide by zero.
    """
    leaf = leaf_at(eq.rhs, target)
    if not isinstance(leaf, Num):
        raise NoVariable(f"target at {target} is not a number leaf")
    if answer is None:
        answer = evaluate(eq.rhs)
    left: Expr = number_leaf(answer)
    right = replace_at(eq.rhs, target, Var(_FRESH_NAME))
    steps: list[ReversionStep] = []
    while not isinstance(right, Var):
        if not isinstance(right, BinOp):
            raise NoVariable(serialize(right))
        if right.op == "^":
            raise PowerEncountered(serialize(right))
        num_subtree, var_subtree, side = find_var(right)
        if right.op == "*" and side in ("L", "R"):
            _check_divisor(num_subtree, right)  # v = f / n needs n != 0
        elif right.op == "/" and side == "R":
            _check_divisor(left, right)  # v = n / f needs f != 0
        steps.append(ReversionStep(right.op, side))
        left = _fold(left, right.op, side, num_subtree)
        right = var_subtree
    return Equation(eq.unknown, left), steps


def invert(eq: Equation, target: Path, answer: Optional[Fraction] = None) -> Equation:
    inverted, _ = invert_with_trace(eq, target, answer)
    return inverted
