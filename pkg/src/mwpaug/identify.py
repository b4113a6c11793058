"""Number mention scanning, the pure-arithmetic filter, and target filtering.

A mention is one number token in the problem text. Mentions align to
equation number leaves by exact value, one-to-one. A mention survives as a
reversal target only when its value is unique in the text, unique in the
equation, outside any power subtree, and not a known constant; every
rejection carries exactly one reason code, applied in a fixed order.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .expr import (
    Equation,
    NUMBER_TOKEN_RE,
    PI_VALUE,
    Path,
    iter_constant_leaves,
    iter_number_leaves,
    parse_number,
    power_paths,
)

INSIGNIFICANT = "INSIGNIFICANT"
R1_TEXT_DUP = "R1_TEXT_DUP"
R2_EQ_DUP = "R2_EQ_DUP"
R3_POWER = "R3_POWER"
R4_CONSTANT = "R4_CONSTANT"
UNALIGNED = "UNALIGNED"

REASON_CODES = (R1_TEXT_DUP, R2_EQ_DUP, R3_POWER, R4_CONSTANT, UNALIGNED, INSIGNIFICANT)

ACCEPTED = "accepted"
REJECTED = "rejected"

DEFAULT_CONSTANT_SURFACES = ("pi", "1")

# Words stripped (with numbers and operator glyphs) before the residue test.
EN_CALC_WORDS = (
    "please", "calculate", "compute", "evaluate", "solve", "simplify",
    "find", "what", "is", "the", "value", "of", "result", "answer", "equals",
)
ZH_CALC_WORDS = (
    "怎样简便就怎样算", "用简便方法计算", "直接写出得数", "递等式计算",
    "脱式计算", "简便运算", "解方程", "计算", "得数", "等于", "多少",
    "求", "是", "的", "和", "与", "差", "积", "商", "题",
)

_OPERATOR_CHARS = set("+-*/^()=×÷·−–%")


@dataclass(frozen=True)
class NumberMention:
    """One number token in problem text, with its exact value and location."""

    mention_id: int
    start: int
    end: int
    surface: str
    value: Fraction
    sentence_index: int


@dataclass(frozen=True)
class Candidate:
    """A mention, an equation leaf, or an aligned pair, with a filter verdict."""

    mention: Optional[NumberMention]
    leaf_path: Optional[Path]
    status: str
    reason: Optional[str] = None


def constant_value_set(surfaces: Iterable[str] = DEFAULT_CONSTANT_SURFACES) -> frozenset[Fraction]:
    values = set()
    for surface in surfaces:
        if surface.lower() in ("pi", "π"):
            values.add(PI_VALUE)
        else:
            values.add(parse_number(surface))
    return frozenset(values)


def find_number_mentions(text: str, language: str) -> list[NumberMention]:
    """All number tokens in text order, tagged with their discourse unit."""
    from .transform import segment_discourse, unit_index_at

    units = segment_discourse(text, language)
    mentions = []
    for i, match in enumerate(NUMBER_TOKEN_RE.finditer(text)):
        surface = match.group(0)
        mentions.append(
            NumberMention(
                mention_id=i,
                start=match.start(),
                end=match.end(),
                surface=surface,
                value=parse_number(surface),
                sentence_index=unit_index_at(units, match.start()),
            )
        )
    return mentions


def is_pure_arithmetic(
    text: str,
    language: str,
    keywords: Optional[Sequence[str]] = None,
    k: int = 4,
) -> bool:
    """True when the text is a bare calculation prompt rather than a story.

    Numbers, operator glyphs, whitespace, and a configurable keyword list are
    stripped; fewer than ``k`` content characters remaining means there is no
    narrative to transform.
    """
    if keywords is None:
        keywords = ZH_CALC_WORDS if language == "zh" else EN_CALC_WORDS
    residue = NUMBER_TOKEN_RE.sub("", text)
    residue = "".join(ch for ch in residue if ch not in _OPERATOR_CHARS and not ch.isspace())
    lowered = residue.lower()
    for word in sorted(keywords, key=len, reverse=True):
        lowered = lowered.replace(word.lower(), "")
    return len(lowered) < k


def align_and_filter(
    mentions: Sequence[NumberMention],
    equation: Equation,
    constant_values: frozenset[Fraction] = constant_value_set(),
) -> list[Candidate]:
    """Pair text mentions with equation leaves and apply the filter rules.

    Rules fire in order: INSIGNIFICANT (value absent from the equation),
    R1 (value duplicated in the text), R2 (value duplicated in the equation),
    R3 (leaf inside a power subtree), R4 (constant leaf). Equation leaves
    with no mention appear as mention-less candidates (R3/R4/UNALIGNED) so
    the record's full accounting is visible to the stats layer.
    """
    rhs = equation.rhs
    leaves = list(iter_number_leaves(rhs))
    const_leaves = list(iter_constant_leaves(rhs))
    powered = power_paths(rhs)

    leaf_counts: Counter[Fraction] = Counter(leaf.value for _, leaf in leaves)
    leaf_by_value: dict[Fraction, Path] = {}
    for path, leaf in leaves:
        leaf_by_value.setdefault(leaf.value, path)

    significant = [m for m in mentions if m.value in leaf_counts]
    text_counts: Counter[Fraction] = Counter(m.value for m in significant)

    out: list[Candidate] = []
    for mention in mentions:
        if mention.value not in leaf_counts:
            out.append(Candidate(mention, None, REJECTED, INSIGNIFICANT))
            continue
        path = leaf_by_value[mention.value] if leaf_counts[mention.value] == 1 else None
        if text_counts[mention.value] > 1:
            out.append(Candidate(mention, path, REJECTED, R1_TEXT_DUP))
        elif leaf_counts[mention.value] > 1:
            out.append(Candidate(mention, None, REJECTED, R2_EQ_DUP))
        elif path in powered:
            out.append(Candidate(mention, path, REJECTED, R3_POWER))
        else:
            out.append(Candidate(mention, path, ACCEPTED))

    mentioned_values = {m.value for m in significant}
    for path, leaf in leaves:
        if leaf.value in mentioned_values:
            continue
        if path in powered:
            out.append(Candidate(None, path, REJECTED, R3_POWER))
        elif leaf.value in constant_values:
            out.append(Candidate(None, path, REJECTED, R4_CONSTANT))
        else:
            out.append(Candidate(None, path, REJECTED, UNALIGNED))
    for path, _ in const_leaves:
        if path in powered:
            out.append(Candidate(None, path, REJECTED, R3_POWER))
        else:
            out.append(Candidate(None, path, REJECTED, R4_CONSTANT))
    return out


def accepted_candidates(candidates: Iterable[Candidate]) -> list[Candidate]:
    return [c for c in candidates if c.status == ACCEPTED]
