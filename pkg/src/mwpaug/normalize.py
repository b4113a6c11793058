"""Equation normalization: bounded simplification, reordering, negative removal.

Three value-preserving passes over flattened sum/product views of the tree:

* ``simplify``: drop ``+0``/``*1`` style identities, cancel structurally
  identical ``t-t`` / ``t/t`` pairs, annihilate products with a zero factor.
  Nothing else: numeric subtrees such as ``32+34`` are never folded, so a
  dataset equation keeps its written shape.
* ``reorder``: within a sum, terms sort by (first text occurrence of the
  number, structural key), positives permuting among positive slots and
  negatives among negative slots so no sign ever moves. Within a product,
  factor order is kept verbatim as soon as any factor carries an occurrence
  index (dataset order wins); purely symbolic products sort structurally.
  Division factors never move.
* ``remove_leading_negatives``: inside every sum, recursively, a leading
  negative term is repaired by moving the first positive term to the front,
  keeping the result expressible as a binary tree without unary minus.

``normalize`` runs simplify and reorder to a fixpoint and then removes
leading negatives; it is idempotent and never grows the tree.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Optional

from .errors import DivisionByZero
from .expr import (
    BinOp,
    Const,
    Equation,
    Expr,
    Num,
    Var,
    evaluate,
    serialize,
    variable_names,
)

_INF = float("inf")

OccurrenceIndex = Mapping[Fraction, int]


def _is_zero_leaf(node: Expr) -> bool:
    return isinstance(node, (Num, Const)) and node.value == 0


def _is_one_leaf(node: Expr) -> bool:
    return isinstance(node, (Num, Const)) and node.value == 1


def _zero() -> Num:
    return Num("0", Fraction(0))


def _one() -> Num:
    return Num("1", Fraction(1))


def _is_negation(node: Expr) -> bool:
    return (
        isinstance(node, BinOp)
        and node.op == "-"
        and isinstance(node.left, Num)
        and node.left.value == 0
    )


def struct_key(node: Expr):
    """Total order on trees: numbers < constants < variables < compounds."""
    if isinstance(node, Num):
        return (0, (node.value.numerator, node.value.denominator))
    if isinstance(node, Const):
        return (1, node.name)
    if isinstance(node, Var):
        return (2, node.name)
    return (3, node.op, struct_key(node.left), struct_key(node.right))


def _sum_terms(node: Expr) -> list[tuple[int, Expr]]:
    """Flatten a +/- subtree into signed terms; the ``0 - x`` head is a sign."""
    out: list[tuple[int, Expr]] = []

    def visit(n: Expr, sign: int) -> None:
        if isinstance(n, BinOp) and n.op in "+-":
            if _is_negation(n):
                visit(n.right, -sign)
            else:
                visit(n.left, sign)
                visit(n.right, sign if n.op == "+" else -sign)
        else:
            out.append((sign, n))

    visit(node, 1)
    return out


def _product_factors(node: Expr) -> list[tuple[int, Expr]]:
    """Flatten a */÷ subtree into signed factors (+1 multiply, -1 divide)."""
    out: list[tuple[int, Expr]] = []

    def visit(n: Expr, sign: int) -> None:
        if isinstance(n, BinOp) and n.op in "*/":
            visit(n.left, sign)
            visit(n.right, sign if n.op == "*" else -sign)
        else:
            out.append((sign, n))

    visit(node, 1)
    return out


def _expand_sum(terms: list[tuple[int, Expr]]) -> Expr:
    if not terms:
        return _zero()
    sign, head = terms[0]
    node = head if sign > 0 else BinOp("-", _zero(), head)
    for sign, term in terms[1:]:
        node = BinOp("+" if sign > 0 else "-", node, term)
    return node


def _expand_product(factors: list[tuple[int, Expr]]) -> Expr:
    if not factors:
        return _one()
    if factors[0][0] > 0:
        node = factors[0][1]
        rest = factors[1:]
    else:  # a bare ÷ head reads as 1/x
        node = _one()
        rest = factors
    for sign, factor in rest:
        node = BinOp("*" if sign > 0 else "/", node, factor)
    return node


# ---------------------------------------------------------------------------
# simplify

def _cancel_pairs(items: list[tuple[int, Expr]], check_nonzero: bool) -> list[tuple[int, Expr]]:
    keys = [struct_key(t) for _, t in items]
    removed = [False] * len(items)
    for i in range(len(items)):
        if removed[i]:
            continue
        for j in range(i + 1, len(items)):
            if removed[j] or items[i][0] == items[j][0] or keys[i] != keys[j]:
                continue
            term = items[i][1]
            if check_nonzero and not variable_names(term):
                if evaluate(term) == 0:
                    raise DivisionByZero(serialize(term))
            removed[i] = removed[j] = True
            break
    return [item for item, gone in zip(items, removed) if not gone]


def _unchanged(kept: list[tuple[int, Expr]], raw: list[tuple[int, Expr]]) -> bool:
    return len(kept) == len(raw) and all(
        k[1] is r[1] for k, r in zip(kept, raw)
    )


def _simplify_once(node: Expr) -> Expr:
    """One bottom-up pass; returns ``node`` itself when no rule fired."""
    if not isinstance(node, BinOp):
        return node
    if node.op == "^":
        left = _simplify_once(node.left)
        right = _simplify_once(node.right)
        if left is node.left and right is node.right:
            return node
        return BinOp("^", left, right)
    if node.op in "+-":
        raw = _sum_terms(node)
        terms = [(s, _simplify_once(t)) for s, t in raw]
        terms = [(s, t) for s, t in terms if not _is_zero_leaf(t)]
        terms = _cancel_pairs(terms, check_nonzero=False)
        if not terms:
            return _zero()
        if _unchanged(terms, raw):
            return node
        return _expand_sum(terms)
    raw = _product_factors(node)
    factors = [(s, _simplify_once(f)) for s, f in raw]
    for sign, factor in factors:
        if sign < 0 and _is_zero_leaf(factor):
            raise DivisionByZero(serialize(node))
    factors = [(s, f) for s, f in factors if not _is_one_leaf(f)]
    factors = _cancel_pairs(factors, check_nonzero=True)
    if any(sign > 0 and _is_zero_leaf(f) for sign, f in factors):
        for sign, factor in factors:
            if sign < 0 and not variable_names(factor) and evaluate(factor) == 0:
                raise DivisionByZero(serialize(node))
        return _zero()
    if not factors:
        return _one()
    if _unchanged(factors, raw):
        return node
    return _expand_product(factors)


def simplify(node: Expr) -> Expr:
    """Apply the bounded rule set to a fixpoint. Never grows the tree."""
    while True:
        new = _simplify_once(node)
        if new is node or new == node:
            return new
        node = new


# ---------------------------------------------------------------------------
# reorder

def _min_occurrence(node: Expr, occurrence: OccurrenceIndex) -> float:
    if not occurrence:
        return _INF
    best = _INF
    stack = [node]
    while stack:
        n = stack.pop()
        if isinstance(n, Num):
            rank = occurrence.get(n.value)
            if rank is not None and rank < best:
                best = rank
        elif isinstance(n, BinOp):
            stack.append(n.left)
            stack.append(n.right)
    return best


def _sort_slots(items: list[tuple[int, Expr]], sign: int, keys: list) -> list[tuple[int, Expr]]:
    """Sort the terms occupying ``sign`` slots by key, slots staying put."""
    positions = [i for i, (s, _) in enumerate(items) if s == sign]
    ordered = sorted(
        (items[i][1] for i in positions),
        key=lambda t: keys[id(t)],
    )
    out = list(items)
    for pos, term in zip(positions, ordered):
        out[pos] = (sign, term)
    return out


def reorder(node: Expr, occurrence: Optional[OccurrenceIndex] = None) -> Expr:
    """Occurrence-then-structural ordering; value-preserving by construction."""
    occ = occurrence or {}

    def visit(n: Expr) -> Expr:
        if not isinstance(n, BinOp):
            return n
        if n.op == "^":
            return BinOp("^", visit(n.left), visit(n.right))
        if n.op in "+-":
            terms = [(s, visit(t)) for s, t in _sum_terms(n)]
            keys = {id(t): (_min_occurrence(t, occ), struct_key(t)) for _, t in terms}
            terms = _sort_slots(terms, 1, keys)
            terms = _sort_slots(terms, -1, keys)
            return _expand_sum(terms)
        factors = [(s, visit(f)) for s, f in _product_factors(n)]
        anchored = any(_min_occurrence(f, occ) != _INF for _, f in factors)
        if not anchored:
            keys = {id(f): struct_key(f) for _, f in factors}
            factors = _sort_slots(factors, 1, keys)
        return _expand_product(factors)

    return visit(node)


# ---------------------------------------------------------------------------
# remove_leading_negatives

def remove_leading_negatives(node: Expr) -> Expr:
    """Move the first positive term of a negative-led sum to the front.

    Applied recursively, brackets included. A sum with no positive term is
    left alone (it has no legal repair in this form).
    """
    if not isinstance(node, BinOp):
        return node
    if node.op == "^":
        return BinOp("^", remove_leading_negatives(node.left), remove_leading_negatives(node.right))
    if node.op in "*/":
        factors = [(s, remove_leading_negatives(f)) for s, f in _product_factors(node)]
        return _expand_product(factors)
    terms = [(s, remove_leading_negatives(t)) for s, t in _sum_terms(node)]
    if terms and terms[0][0] < 0:
        for i, (sign, _) in enumerate(terms):
            if sign > 0:
                terms.insert(0, terms.pop(i))
                break
    return _expand_sum(terms)


# ---------------------------------------------------------------------------
# normalize

_MAX_PASSES = 50


def normalize_expr(node: Expr, occurrence: Optional[OccurrenceIndex] = None) -> Expr:
    for _ in range(_MAX_PASSES):
        new = reorder(simplify(node), occurrence)
        if new == node:
            break
        node = new
    else:  # pragma: no cover - the passes converge in practice
        raise RuntimeError("normalization did not converge")
    return remove_leading_negatives(node)


def normalize(eq: Equation, occurrence: Optional[OccurrenceIndex] = None) -> Equation:
    """Simplify, reorder, and repair leading negatives. Idempotent."""
    return Equation(eq.unknown, normalize_expr(eq.rhs, occurrence))
