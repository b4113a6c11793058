"""Equation templates: number leaves replaced by text-order slots.

Each number leaf whose value appears among the text's significant mentions
becomes ``temp<i>``, where ``i`` is the index of the first mention carrying
that value, counting over all mentions in text order. Constants stay as
themselves. A number leaf with no mention of its value cannot be templatized.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import UnalignedNumber
from .expr import BinOp, Const, Equation, Expr, Num, Var, serialize_equation


@dataclass(frozen=True)
class TemplateEquation:
    unknown: str
    rhs: Expr
    slot_values: Mapping[str, Fraction]  # slot name -> value it stands for

    @property
    def text(self) -> str:
        return serialize_equation(Equation(self.unknown, self.rhs))


def slot_map(mention_values: Sequence[Fraction]) -> dict[Fraction, str]:
    """Value -> slot name, first mention of each value claiming its index."""
    slots: dict[Fraction, str] = {}
    for index, value in enumerate(mention_values):
        if value not in slots:
            slots[value] = f"temp{index}"
    return slots


def templatize(equation: Equation, mention_values: Sequence[Fraction]) -> TemplateEquation:
    slots = slot_map(mention_values)

    def convert(node: Expr) -> Expr:
        if isinstance(node, Num):
            slot = slots.get(node.value)
            if slot is None:
                raise UnalignedNumber(node.surface)
            return Var(slot)
        if isinstance(node, (Const, Var)):
            return node
        if isinstance(node, BinOp):
            return BinOp(node.op, convert(node.left), convert(node.right))
        raise TypeError(f"unexpected node {node!r}")

    rhs = convert(equation.rhs)
    values = {name: value for value, name in slots.items()}
    return TemplateEquation(equation.unknown, rhs, values)
