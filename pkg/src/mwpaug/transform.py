"""Discourse segmentation and question/declarative rewriting.

A problem text splits into discourse units on language-specific punctuation,
terminators retained, so the original text is the exact concatenation of
``unit.text + unit.terminator``. The question unit is the last unit matching
an interrogative pronoun pattern; some patterns only count in the final unit
(the ``last_unit_only`` flag).

The reversal rewrite drops the question unit Q and the declarative unit D
holding the target number, appends D' (Q with the pronoun replaced by the
answer) and Q' (D with the target replaced by a pronoun) at the end, and
keeps every other unit verbatim. Chinese rewrites are span substitutions;
English rewrites go through a small, documented template list and reject
anything they cannot rewrite faithfully.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional, Sequence

from .errors import NoQuestionFound, UnsupportedQuestionShape

if TYPE_CHECKING:  # runtime import would be circular
    from .identify import NumberMention

_ZH_TERMINATORS = set("，。？！；,?!")
_EN_TERMINATORS = set(".?!,")
_QUESTION_TERMINATORS = set("？?")


@dataclass(frozen=True)
class DiscourseUnit:
    index: int
    text: str
    terminator: str
    start: int  # offset of ``text`` in the original string
    is_question: bool


@dataclass(frozen=True)
class PronounEntry:
    pattern: str
    last_unit_only: bool
    template: str  # replacement when the pronoun gives way to the answer


@dataclass(frozen=True)
class PronounTable:
    language: str
    entries: tuple[PronounEntry, ...]


@dataclass(frozen=True)
class PronounMatch:
    unit_index: int
    entry: PronounEntry
    start: int  # unit-relative span of the matched pronoun
    end: int


DEFAULT_ZH_TABLE = PronounTable(
    "zh",
    (
        PronounEntry("多少", False, "{answer}"),
        PronounEntry("几分之几", False, "{answer}"),
        PronounEntry("几", False, "{answer}"),
        PronounEntry("=", True, "={answer}"),
        PronounEntry("求", False, "{answer}"),
        PronounEntry("((())/(()))", False, "{answer}"),
        PronounEntry("多", True, "{answer}"),
    ),
)

DEFAULT_EN_TABLE = PronounTable(
    "en",
    tuple(
        PronounEntry(p, False, "{answer}")
        for p in (
            "how many", "how much", "how far", "how tall", "how long",
            "how fast", "how old", "how big", "what fraction", "what",
        )
    ),
)

DEFAULT_TABLES = {"zh": DEFAULT_ZH_TABLE, "en": DEFAULT_EN_TABLE}


def default_table(language: str) -> PronounTable:
    return DEFAULT_TABLES["zh" if language == "zh" else "en"]


def load_pronoun_tables(path: str) -> dict[str, PronounTable]:
    """Read ``language<TAB>pattern<TAB>flag[<TAB>template]`` rows.

    ``flag`` is ``last`` or ``-``; missing template means plain substitution.
    Languages absent from the file keep their built-in table.
    """
    rows: dict[str, list[PronounEntry]] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) < 3:
                raise ValueError(f"{path}:{line_no}: expected at least 3 tab-separated fields")
            language, pattern, flag = parts[0].strip(), parts[1], parts[2].strip()
            template = parts[3] if len(parts) > 3 else "{answer}"
            rows.setdefault(language, []).append(
                PronounEntry(pattern, flag == "last", template)
            )
    tables = dict(DEFAULT_TABLES)
    for language, entries in rows.items():
        tables[language] = PronounTable(language, tuple(entries))
    return tables


# ---------------------------------------------------------------------------
# Segmentation

def segment_discourse(text: str, language: str) -> list[DiscourseUnit]:
    """Split on terminator punctuation, losslessly.

    Concatenating ``unit.text + unit.terminator`` over all units reproduces
    the input exactly. An English period between two digits is part of a
    decimal number, not a terminator.
    """
    terminators = _ZH_TERMINATORS if language == "zh" else _EN_TERMINATORS
    units: list[DiscourseUnit] = []
    chunk_start = 0
    i = 0
    while i < len(text):
        ch = text[i]
        if ch in terminators:
            if (
                ch == "."
                and 0 < i < len(text) - 1
                and text[i - 1].isdigit()
                and text[i + 1].isdigit()
            ):
                i += 1
                continue
            units.append(
                DiscourseUnit(
                    index=len(units),
                    text=text[chunk_start:i],
                    terminator=ch,
                    start=chunk_start,
                    is_question=ch in _QUESTION_TERMINATORS,
                )
            )
            chunk_start = i + 1
        i += 1
    if chunk_start < len(text):
        units.append(
            DiscourseUnit(
                index=len(units),
                text=text[chunk_start:],
                terminator="",
                start=chunk_start,
                is_question=False,
            )
        )
    return units


def join_units(units: Sequence[DiscourseUnit]) -> str:
    return "".join(u.text + u.terminator for u in units)


def unit_index_at(units: Sequence[DiscourseUnit], offset: int) -> int:
    for unit in units:
        if offset < unit.start + len(unit.text) + len(unit.terminator):
            return unit.index
    return units[-1].index if units else 0


# ---------------------------------------------------------------------------
# Pronoun matching

def _en_pattern_re(pattern: str) -> re.Pattern[str]:
    return re.compile(r"\b" + re.escape(pattern).replace(r"\ ", r"\s+") + r"\b", re.IGNORECASE)


def match_pronoun(unit_text: str, is_last: bool, table: PronounTable) -> Optional[tuple[PronounEntry, int, int]]:
    """Rightmost occurrence of the longest applicable pattern, if any."""
    for entry in sorted(table.entries, key=lambda e: len(e.pattern), reverse=True):
        if entry.last_unit_only and not is_last:
            continue
        if table.language == "zh":
            pos = unit_text.rfind(entry.pattern)
            if pos >= 0:
                return entry, pos, pos + len(entry.pattern)
        else:
            matches = list(_en_pattern_re(entry.pattern).finditer(unit_text))
            if matches:
                m = matches[-1]
                return entry, m.start(), m.end()
    return None


def locate_question(units: Sequence[DiscourseUnit], table: PronounTable) -> PronounMatch:
    """The last unit bearing an interrogative pronoun, flags respected."""
    last_index = len(units) - 1
    for unit in reversed(units):
        hit = match_pronoun(unit.text, unit.index == last_index, table)
        if hit is not None:
            entry, start, end = hit
            return PronounMatch(unit.index, entry, start, end)
    raise NoQuestionFound(join_units(units)[:60])


def question_bearing_units(units: Sequence[DiscourseUnit], table: PronounTable) -> list[int]:
    last_index = len(units) - 1
    return [
        unit.index
        for unit in units
        if match_pronoun(unit.text, unit.index == last_index, table) is not None
    ]


# ---------------------------------------------------------------------------
# English rewrite templates

_AUX_WORDS = (
    "would", "will", "can", "could", "should", "shall", "must", "may",
    "might", "do", "does", "did", "is", "are", "was", "were", "has",
    "have", "had",
)
_AUX_RE = "|".join(_AUX_WORDS)
_WH_RE = "how (?:many|much|far|tall|long|fast|old|big)|what fraction"

_EN_THERE_RE = re.compile(
    rf"^how (?:many|much)\s+(?P<np>.+?)\s+(?P<be>is|are|was|were)\s+there\b\s*(?P<rest>.*)$",
    re.IGNORECASE,
)
_EN_HAVE_RE = re.compile(
    rf"^how (?:many|much)\s+(?P<np>.+?)\s+(?P<aux>do|does|did)\s+(?P<subj>.+?)\s+have\b\s*(?P<rest>.*)$",
    re.IGNORECASE,
)
_EN_WHAT_BE_RE = re.compile(
    r"^what(?:\s+fraction)?\s+(?P<be>is|are|was|were)\s+(?P<x>.+)$",
    re.IGNORECASE,
)
_EN_AUX_RE = re.compile(
    rf"^(?:{_WH_RE})(?:\s+(?P<np>.*?))?\s+(?P<aux>{_AUX_RE})\s+(?P<sv>.+)$",
    re.IGNORECASE,
)

_HAVE_FORMS = {"do": "have", "does": "has", "did": "had"}

_DETERMINERS = {
    "the", "a", "an", "this", "that", "these", "those", "his", "her",
    "their", "its", "my", "our", "your",
}


def _tidy(sentence: str) -> str:
    sentence = " ".join(sentence.split())
    return sentence[:1].upper() + sentence[1:] if sentence else sentence


def _en_question_to_declarative(question: str, answer: str) -> str:
    """Finite rewrite list; raises UnsupportedQuestionShape otherwise."""
    q = question.strip()
    m = _EN_THERE_RE.match(q)
    if m:
        rest = m.group("rest").strip()
        return _tidy(f"there {m.group('be').lower()} {answer} {m.group('np')} {rest}")
    m = _EN_HAVE_RE.match(q)
    if m:
        rest = m.group("rest").strip()
        have = _HAVE_FORMS[m.group("aux").lower()]
        return _tidy(f"{m.group('subj')} {have} {answer} {m.group('np')} {rest}")
    m = _EN_WHAT_BE_RE.match(q)
    if m:
        return _tidy(f"{m.group('x')} {m.group('be').lower()} {answer}")
    m = _EN_AUX_RE.match(q)
    if m:
        np = (m.group("np") or "").strip()
        aux = m.group("aux").lower()
        words = m.group("sv").split()
        if len(words) == 1:
            return _tidy(f"{words[0]} {aux} {answer} {np}")
        subject = " ".join(words[:-1])
        verb = words[-1]
        return _tidy(f"{answer} {np} {subject} {aux} {verb}")
    raise UnsupportedQuestionShape(question.strip()[:60])


_EN_COPULA_RE = re.compile(
    r"^(?P<subj>.+?)\s+(?P<be>is|are|was|were)\s+(?P<pred>.+)$", re.IGNORECASE
)
_EN_LEADING_CONJ_RE = re.compile(r"^(?:and|but|so|then)\s+", re.IGNORECASE)
_EN_NEXT_WORD_RE = re.compile(r"\s*([A-Za-z][A-Za-z/%'-]*)")
_NOT_COUNT_WORDS = {
    "of", "to", "than", "from", "at", "in", "on", "by", "with", "and",
    "or", "is", "are", "was", "were", "do", "does", "did", "more", "less",
}


def _decapitalize(phrase: str) -> str:
    first = phrase.split(" ", 1)[0]
    if first.lower() in _DETERMINERS:
        return phrase[:1].lower() + phrase[1:]
    return phrase


def _en_count_pronoun(following_text: str) -> str:
    m = _EN_NEXT_WORD_RE.match(following_text)
    if m and m.group(1).lower() not in _NOT_COUNT_WORDS:
        return "how many"
    return "how much"


def _en_declarative_to_question(
    declarative: str, span: tuple[int, int], other_spans: Sequence[tuple[int, int]]
) -> tuple[str, str]:
    """Copula fronting when safe, in-place pronoun substitution otherwise."""
    lead = _EN_LEADING_CONJ_RE.match(declarative)
    if lead:  # a spliced-out unit may arrive still wearing its conjunction
        offset = lead.end()
        declarative = declarative[offset:]
        span = (span[0] - offset, span[1] - offset)
        other_spans = [(s - offset, e - offset) for s, e in other_spans]
    start, end = span
    m = _EN_COPULA_RE.match(declarative)
    if m:
        pred_start = m.start("pred")
        target_inside = pred_start <= start and end <= m.end("pred")
        others_inside = any(pred_start <= s < m.end("pred") for s, _ in other_spans)
        if target_inside and not others_inside:
            subject = _decapitalize(m.group("subj").strip())
            return f"What {m.group('be').lower()} {subject}", "what"
    pronoun = _en_count_pronoun(declarative[end:])
    return declarative[:start] + pronoun + declarative[end:], pronoun


# ---------------------------------------------------------------------------
# Unit rewrites

def question_to_declarative(
    unit_text: str,
    match_start: int,
    match_end: int,
    entry: PronounEntry,
    answer_surface: str,
    language: str,
) -> str:
    """Q -> D': the interrogative gives way to the answer. No terminator."""
    if language == "zh":
        replacement = entry.template.format(answer=answer_surface)
        return unit_text[:match_start] + replacement + unit_text[match_end:]
    return _en_question_to_declarative(unit_text, answer_surface)


def declarative_to_question(
    unit_text: str,
    span: tuple[int, int],
    language: str,
    other_spans: Sequence[tuple[int, int]] = (),
) -> tuple[str, str]:
    """D -> Q': the target number gives way to a pronoun. No terminator."""
    if language == "zh":
        start, end = span
        return unit_text[:start] + "多少" + unit_text[end:], "多少"
    return _en_declarative_to_question(unit_text, span, other_spans)


@dataclass(frozen=True)
class TransformResult:
    text: str
    pronoun_pattern: str  # the pattern that located the question
    question_pronoun: str  # the pronoun standing where the target was
    combined: bool


def transform_problem(
    text: str,
    language: str,
    mention: "NumberMention",
    answer_surface: str,
    table: Optional[PronounTable] = None,
    mentions: Optional[Sequence["NumberMention"]] = None,
) -> TransformResult:
    """Rewrite the problem to ask for ``mention``, stating the old answer.

    Unit order: every unit other than D and Q stays in place, then D', then
    Q' at the end. When D and Q are the same unit both rewrites apply to it
    and a single combined question is appended.
    """
    from .identify import find_number_mentions

    if table is None:
        table = default_table(language)
    units = segment_discourse(text, language)
    q_match = locate_question(units, table)
    d_index = unit_index_at(units, mention.start)
    d_unit = units[d_index]
    rel_span = (mention.start - d_unit.start, mention.end - d_unit.start)

    if mentions is None:
        mentions = find_number_mentions(text, language)
    other_spans = [
        (m.start - d_unit.start, m.end - d_unit.start)
        for m in mentions
        if m.mention_id != mention.mention_id
        and unit_index_at(units, m.start) == d_index
    ]

    decl_term = "。" if language == "zh" else "."
    quest_term = "？" if language == "zh" else "?"
    sep = "" if language == "zh" else " "

    if d_index == q_match.unit_index:
        # Combined branch: one unit plays both roles; rewrite right-to-left
        # so the earlier span stays valid.
        unit_text = d_unit.text
        answer_repl = q_match.entry.template.format(answer=answer_surface)
        pronoun = "多少" if language == "zh" else _en_count_pronoun(unit_text[rel_span[1]:])
        edits = sorted(
            [
                (q_match.start, q_match.end, answer_repl),
                (rel_span[0], rel_span[1], pronoun),
            ],
            reverse=True,
        )
        for start, end, replacement in edits:
            unit_text = unit_text[:start] + replacement + unit_text[end:]
        kept = [u for u in units if u.index != d_index]
        parts = [u.text + u.terminator for u in kept]
        lead = sep if parts else ""
        parts.append(lead + _sentence_case(unit_text.strip(), language) + quest_term)
        return _finish(parts, language, q_match.entry.pattern, pronoun, True)

    q_unit = units[q_match.unit_index]
    declarative = question_to_declarative(
        q_unit.text.strip() if language != "zh" else q_unit.text,
        *_stripped_span(q_unit.text, q_match.start, q_match.end, language),
        q_match.entry,
        answer_surface,
        language,
    )
    d_text = d_unit.text
    strip_offset = 0
    if language != "zh":
        strip_offset = len(d_text) - len(d_text.lstrip())
        d_text = d_text.strip()
    question, pronoun = declarative_to_question(
        d_text,
        (rel_span[0] - strip_offset, rel_span[1] - strip_offset),
        language,
        [(s - strip_offset, e - strip_offset) for s, e in other_spans],
    )

    kept = [u for u in units if u.index not in (d_index, q_match.unit_index)]
    parts = [u.text + u.terminator for u in kept]
    parts.append((sep if parts else "") + declarative.strip() + decl_term)
    parts.append(sep + _sentence_case(question.strip(), language) + quest_term)
    return _finish(parts, language, q_match.entry.pattern, pronoun, False)


def _sentence_case(text: str, language: str) -> str:
    if language != "zh" and text and text[0].islower():
        return text[0].upper() + text[1:]
    return text


def _stripped_span(text: str, start: int, end: int, language: str) -> tuple[int, int]:
    if language == "zh":
        return start, end
    offset = len(text) - len(text.lstrip())
    return start - offset, end - offset


def _finish(
    parts: list[str], language: str, pattern: str, pronoun: str, combined: bool
) -> TransformResult:
    text = "".join(parts).strip()
    if language != "zh" and text and text[0].islower():
        text = text[0].upper() + text[1:]
    return TransformResult(text, pattern, pronoun, combined)
