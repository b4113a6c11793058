"""Random-equation generator and a self-checking inversion oracle.

The oracle builds arithmetic equations, inverts every eligible number leaf,
and checks each result independently: the inverted equation must evaluate
to the reversed leaf's value, survive a serialize/parse round trip, and
keep that value through normalization. Leaves a real pipeline would reject
(duplicated values, leaves under a power) are skipped, not failed.
"""

from __future__ import annotations

import random
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import DivisionByZero, MwpError
from .expr import (
    BinOp,
    Equation,
    Expr,
    Num,
    Var,
    evaluate,
    format_rational,
    iter_number_leaves,
    parse_equation,
    power_paths,
    serialize_equation,
    variable_names,
)
from .invert import invert_with_trace
from .normalize import normalize

DEFAULT_LEAF_VALUES: tuple[Fraction, ...] = tuple(
    [Fraction(n) for n in range(0, 13)]
    + [Fraction(1, 2), Fraction(1, 3), Fraction(3, 4), Fraction(2, 5), Fraction(7, 10)]
)


class ExprGenerator:
    """Random strictly-binary arithmetic expressions with exact values.

    Right operands of ``/`` are regenerated until they are not the constant
    zero, so every generated expression evaluates. With ``var_names`` set,
    leaves may be variables instead of numbers (variable divisors are then
    allowed; callers screen bindings themselves).
    """

    def __init__(
        self,
        seed: int = 0,
        max_depth: int = 6,
        ops: str = "+-*/",
        leaf_values: Sequence[Fraction] = DEFAULT_LEAF_VALUES,
        p_leaf: float = 0.4,
        var_names: Sequence[str] = (),
        p_var: float = 0.3,
    ) -> None:
        self.rng = random.Random(seed)
        self.max_depth = max_depth
        self.ops = ops
        self.leaf_values = list(leaf_values)
        self.p_leaf = p_leaf
        self.var_names = list(var_names)
        self.p_var = p_var

    def _leaf(self) -> Expr:
        if self.var_names and self.rng.random() < self.p_var:
            return Var(self.rng.choice(self.var_names))
        value = self.rng.choice(self.leaf_values)
        return Num(format_rational(value), value)

    def _nonzero(self, node: Expr, depth: int) -> Expr:
        for _ in range(8):
            if variable_names(node):
                return node
            try:
                if evaluate(node) != 0:
                    return node
            except DivisionByZero:
                pass
            node = self._expr(depth)
        return Num("1", Fraction(1))

    def _expr(self, depth: int) -> Expr:
        if depth >= self.max_depth or (depth > 0 and self.rng.random() < self.p_leaf):
            return self._leaf()
        op = self.rng.choice(self.ops)
        left = self._expr(depth + 1)
        right = self._expr(depth + 1)
        if op == "/":
            right = self._nonzero(right, depth + 1)
        return BinOp(op, left, right)

    def expression(self) -> Expr:
        return self._expr(0)

    def equation(self, unknown: str = "x") -> Equation:
        return Equation(unknown, self.expression())

    def bindings(self, names: Sequence[str]) -> dict[str, Fraction]:
        pool = [v for v in self.leaf_values if v != 0]
        return {name: self.rng.choice(pool) for name in names}


@dataclass
class OracleReport:
    trials: int
    leaves_tested: int
    branch_counts: Counter
    skipped: Counter
    failures: list[str] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "leaves_tested": self.leaves_tested,
            "branch_counts": dict(sorted(self.branch_counts.items())),
            "skipped": dict(sorted(self.skipped.items())),
            "failures": list(self.failures),
            "elapsed": round(self.elapsed, 3),
            "ok": self.ok,
        }

    def summary(self) -> str:
        branches = ", ".join(f"{k}={v}" for k, v in sorted(self.branch_counts.items()))
        lines = [
            f"equations: {self.trials}",
            f"leaves inverted: {self.leaves_tested}",
            f"branches: {branches}",
            f"skipped: {dict(sorted(self.skipped.items()))}",
            f"failures: {len(self.failures)}",
            f"elapsed: {self.elapsed:.2f}s",
        ]
        lines.extend(f"  {f}" for f in self.failures[:10])
        return "\n".join(lines)


def run_invert_oracle(
    trials: int = 10_000,
    seed: int = 0,
    max_depth: int = 6,
    ops: str = "+-*/",
    max_failures: int = 20,
    generator: Optional[ExprGenerator] = None,
) -> OracleReport:
    """Invert every eligible leaf of ``trials`` random equations and check."""
    gen = generator or ExprGenerator(seed=seed, max_depth=max_depth, ops=ops)
    report = OracleReport(0, 0, Counter(), Counter())
    start = time.perf_counter()
    for _ in range(trials):
        eq = gen.equation()
        report.trials += 1
        leaves = list(iter_number_leaves(eq.rhs))
        value_counts = Counter(leaf.value for _, leaf in leaves)
        powered = power_paths(eq.rhs)
        try:
            answer = evaluate(eq.rhs)
        except MwpError:
            report.skipped["unevaluable"] += 1
            continue
        for path, leaf in leaves:
            if value_counts[leaf.value] > 1:
                report.skipped["duplicate_value"] += 1
                continue
            if path in powered:
                report.skipped["power"] += 1
                continue
            try:
                inverted, steps = invert_with_trace(eq, path, answer)
            except DivisionByZero:
                report.skipped["division_by_zero"] += 1
                continue
            report.leaves_tested += 1
            for step in steps:
                report.branch_counts[f"{step.op}:{step.var_side}"] += 1
            _check_one(eq, path, leaf, inverted, report, max_failures)
        if len(report.failures) >= max_failures:
            break
    report.elapsed = time.perf_counter() - start
    return report


def _check_one(
    eq: Equation,
    path: tuple,
    leaf: Num,
    inverted: Equation,
    report: OracleReport,
    max_failures: int,
) -> None:
    def fail(message: str) -> None:
        if len(report.failures) < max_failures:
            report.failures.append(
                f"{serialize_equation(eq)} leaf {leaf.surface} at {path}: {message}"
            )

    try:
        value = evaluate(inverted.rhs)
    except MwpError as exc:
        fail(f"inverted form does not evaluate ({exc})")
        return
    if value != leaf.value:
        fail(f"inverted value {format_rational(value)} != {leaf.surface}")
        return
    text = serialize_equation(inverted)
    try:
        reparsed = parse_equation(text)
    except MwpError as exc:
        fail(f"serialized form {text!r} does not parse ({exc})")
        return
    if reparsed != inverted:
        fail(f"serialize/parse round trip changed {text!r}")
        return
    try:
        normalized = normalize(inverted)
    except MwpError as exc:
        fail(f"normalization raised {exc}")
        return
    try:
        norm_value = evaluate(normalized.rhs)
    except MwpError as exc:
        fail(f"normalized form does not evaluate ({exc})")
        return
    if norm_value != leaf.value:
        fail(
            f"normalization changed value to {format_rational(norm_value)} "
            f"({serialize_equation(normalized)})"
        )
