"""End-to-end augmentation: load records, rewrite, invert, verify, emit.

A record enters quarantine when its equation does not parse, does not
evaluate, or does not reproduce the stated answer exactly; quarantined
records take no further part. Each surviving record contributes one
augmentation attempt per accepted candidate number, and every emitted
record has passed the full verification gate.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .errors import (
    BothSidesVariable,
    DivisionByZero,
    MwpError,
    NonIntegerExponent,
    NoQuestionFound,
    NoVariable,
    PowerEncountered,
    UnboundVariable,
    UnsupportedQuestionShape,
)
from .expr import (
    Equation,
    evaluate,
    format_rational,
    operator_set,
    parse_equation,
    parse_number,
    serialize_equation,
)
from .identify import (
    ACCEPTED,
    DEFAULT_CONSTANT_SURFACES,
    NumberMention,
    align_and_filter,
    constant_value_set,
    find_number_mentions,
    is_pure_arithmetic,
)
from .invert import invert_with_trace
from .normalize import normalize
from .template import templatize
from .transform import (
    PronounTable,
    default_table,
    question_bearing_units,
    segment_discourse,
    transform_problem,
)

ARITHMETIC_OPS = frozenset("+-*/")

_ID_KEYS = ("id", "problem_id", "iIndex", "index")
_TEXT_KEYS = ("segmented_text", "original_text", "text", "sQuestion")
_EQ_KEYS = ("equation", "lEquations")
_ANS_KEYS = ("ans", "answer", "lSolutions")


def detect_language(text: str) -> str:
    for ch in text:
        code = ord(ch)
        if 0x3400 <= code <= 0x9FFF or ch in "，。？！；：、":
            return "zh"
    return "en"


@dataclass(frozen=True)
class MwpRecord:
    id: str
    text: str
    language: str
    equation_text: str
    answer_surface: str
    answer_value: Fraction
    equation: Equation


@dataclass
class AugmentOptions:
    language: Optional[str] = None  # None: per-record detection
    constant_surfaces: Sequence[str] = DEFAULT_CONSTANT_SURFACES
    calc_keywords: Optional[Sequence[str]] = None
    pure_arithmetic_threshold: int = 4
    pronoun_tables: Optional[Mapping[str, PronounTable]] = None
    ratio: Optional[Fraction] = None  # None: keep everything
    max_per_problem: Optional[int] = None  # None: unlimited
    seed: int = 0
    exclude_parent_ids: frozenset[str] = frozenset()

    def table_for(self, language: str) -> PronounTable:
        if self.pronoun_tables and language in self.pronoun_tables:
            return self.pronoun_tables[language]
        return default_table(language)


@dataclass(frozen=True)
class AugmentedRecord:
    id: str
    parent_id: str
    language: str
    text: str
    equation_text: str
    answer_surface: str
    answer_value: Fraction
    target_span: tuple[int, int]  # span of the reversed number in the parent text
    provenance: Mapping[str, object]

    def to_json(self) -> dict:
        # Same field names as the input datasets, so augmented files can be
        # fed straight back through read_records / load_record.
        return {
            "id": self.id,
            "parent_id": self.parent_id,
            "language": self.language,
            "original_text": self.text,
            "equation": self.equation_text,
            "ans": self.answer_surface,
            "target_span": list(self.target_span),
            "provenance": dict(self.provenance),
        }


# ---------------------------------------------------------------------------
# Loading

def _first_key(raw: Mapping, keys: Sequence[str]):
    for key in keys:
        if key in raw and raw[key] is not None:
            return raw[key]
    return None


def _as_text(value) -> str:
    if isinstance(value, list):
        if not value:
            raise ValueError("empty list field")
        value = value[0]
    if isinstance(value, float) and value.is_integer():
        value = int(value)
    return str(value)


def parse_answer(surface: str) -> Fraction:
    try:
        return parse_number(surface)
    except ValueError:
        pass
    try:
        return Fraction(surface)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"unparseable answer {surface!r}") from exc


def load_record(raw: Mapping, language: Optional[str] = None) -> MwpRecord:
    """Build a validated record or raise (ValueError / MwpError) for quarantine."""
    record_id = _first_key(raw, _ID_KEYS)
    text = _first_key(raw, _TEXT_KEYS)
    equation_text = _first_key(raw, _EQ_KEYS)
    answer = _first_key(raw, _ANS_KEYS)
    if text is None or equation_text is None or answer is None:
        raise ValueError("record needs text, equation and answer fields")
    text = _as_text(text)
    equation_text = _as_text(equation_text)
    answer_surface = _as_text(answer)
    if language is None:
        language = detect_language(text)
    equation = parse_equation(equation_text)
    answer_value = parse_answer(answer_surface)
    computed = evaluate(equation.rhs)
    if computed != answer_value:
        raise ValueError(
            f"answer mismatch: stated {answer_surface}, equation gives {format_rational(computed)}"
        )
    return MwpRecord(
        id=str(record_id) if record_id is not None else "",
        text=text,
        language=language,
        equation_text=equation_text,
        answer_surface=answer_surface,
        answer_value=answer_value,
        equation=equation,
    )


def read_records(path: str) -> list[dict]:
    """Accept a JSON array, JSON lines, or concatenated JSON objects."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.strip()
    if not stripped:
        return []
    try:
        data = json.loads(stripped)
    except json.JSONDecodeError:
        pass
    else:
        if isinstance(data, list):
            return data
        return [data]
    decoder = json.JSONDecoder()
    records: list[dict] = []
    index = 0
    while index < len(stripped):
        while index < len(stripped) and stripped[index].isspace():
            index += 1
        if index >= len(stripped):
            break
        obj, index = decoder.raw_decode(stripped, index)
        records.append(obj)
    return records


def write_jsonl(records: Iterable[Mapping], path: str) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False))
            fh.write("\n")
            count += 1
    return count


# ---------------------------------------------------------------------------
# Verification

def occurrence_index_for(text: str, language: str) -> dict[Fraction, int]:
    """Value -> rank of its first mention, counting distinct values in text order."""
    ranks: dict[Fraction, int] = {}
    for mention in find_number_mentions(text, language):
        if mention.value not in ranks:
            ranks[mention.value] = len(ranks)
    return ranks


def verify_augmented(
    parent: MwpRecord,
    target: NumberMention,
    new_text: str,
    new_equation: Equation,
    table: PronounTable,
) -> Optional[str]:
    """Return a failure reason, or None when the record is sound.

    Checks: exact value, a single final question unit, the old answer
    stated in the text, number-mention conservation, arithmetic operators
    only.
    """
    try:
        value = evaluate(new_equation.rhs)
    except MwpError as exc:
        return f"equation does not evaluate: {exc}"
    if value != target.value:
        return "equation value differs from the reversed number"

    if not operator_set(new_equation.rhs) <= ARITHMETIC_OPS:
        return "non-arithmetic operator in equation"

    units = segment_discourse(new_text, parent.language)
    bearing = question_bearing_units(units, table)
    if len(bearing) != 1 or bearing[0] != len(units) - 1:
        return "question is not the unique final unit"

    answer_surface = format_rational(parent.answer_value)
    if answer_surface not in new_text:
        return "old answer missing from the text"

    old_values = Counter(m.value for m in find_number_mentions(parent.text, parent.language))
    new_values = Counter(m.value for m in find_number_mentions(new_text, parent.language))
    expected = old_values.copy()
    expected[target.value] -= 1
    expected[parent.answer_value] += 1
    expected = +expected
    if new_values != expected:
        return "number mentions not conserved"
    return None


# ---------------------------------------------------------------------------
# Per-record augmentation

_INVERSION_ERRORS = (
    DivisionByZero,
    PowerEncountered,
    NoVariable,
    BothSidesVariable,
    NonIntegerExponent,
    UnboundVariable,
)


@dataclass
class RecordOutcome:
    record_id: str
    filtered: bool = False
    no_question: bool = False
    significant_mentions: int = 0
    accepted: int = 0
    rejection_reasons: Counter = field(default_factory=Counter)
    transform_failures: int = 0
    inversion_failures: int = 0
    verification_failures: int = 0
    capped: int = 0
    augmented: list[AugmentedRecord] = field(default_factory=list)


def augment_record(record: MwpRecord, options: Optional[AugmentOptions] = None) -> RecordOutcome:
    if options is None:
        options = AugmentOptions()
    outcome = RecordOutcome(record.id)
    table = options.table_for(record.language)
    constants = constant_value_set(options.constant_surfaces)

    mentions = find_number_mentions(record.text, record.language)
    candidates = align_and_filter(mentions, record.equation, constants)
    mention_side = [c for c in candidates if c.mention is not None]
    outcome.significant_mentions = sum(
        1 for c in mention_side if c.reason != "INSIGNIFICANT"
    )
    for candidate in candidates:
        if candidate.reason:
            outcome.rejection_reasons[candidate.reason] += 1

    if is_pure_arithmetic(
        record.text,
        record.language,
        options.calc_keywords,
        options.pure_arithmetic_threshold,
    ):
        outcome.filtered = True
        return outcome

    units = segment_discourse(record.text, record.language)
    if not question_bearing_units(units, table):
        outcome.no_question = True
        return outcome

    accepted = [c for c in candidates if c.status == ACCEPTED]
    outcome.accepted = len(accepted)
    answer_surface = format_rational(record.answer_value)

    cap = options.max_per_problem
    for candidate in accepted:
        if cap is not None and len(outcome.augmented) >= cap:
            outcome.capped += 1
            continue
        mention = candidate.mention
        assert mention is not None and candidate.leaf_path is not None
        try:
            transformed = transform_problem(
                record.text,
                record.language,
                mention,
                answer_surface,
                table,
                mentions,
            )
        except (NoQuestionFound, UnsupportedQuestionShape):
            outcome.transform_failures += 1
            continue
        try:
            inverted, steps = invert_with_trace(
                record.equation, candidate.leaf_path, record.answer_value
            )
        except _INVERSION_ERRORS:
            outcome.inversion_failures += 1
            continue
        occurrence = occurrence_index_for(transformed.text, record.language)
        try:
            normalized = normalize(inverted, occurrence)
        except DivisionByZero:
            outcome.inversion_failures += 1
            continue
        failure = verify_augmented(record, mention, transformed.text, normalized, table)
        if failure is not None:
            outcome.verification_failures += 1
            continue
        outcome.augmented.append(
            AugmentedRecord(
                id=f"{record.id}#{mention.mention_id}",
                parent_id=record.id,
                language=record.language,
                text=transformed.text,
                equation_text=serialize_equation(normalized),
                answer_surface=format_rational(mention.value),
                answer_value=mention.value,
                target_span=(mention.start, mention.end),
                provenance={
                    "target_surface": mention.surface,
                    "old_answer": answer_surface,
                    "steps": [f"{s.op}:{s.var_side}" for s in steps],
                    "question_pronoun": transformed.pronoun_pattern,
                    "combined_unit": transformed.combined,
                },
            )
        )
    return outcome


# ---------------------------------------------------------------------------
# Dataset driver

@dataclass
class AugmentResult:
    records: list[AugmentedRecord]
    stats: dict
    quarantined: list[tuple[str, str]]  # (record id or index, reason)


def augment_dataset(raws: Sequence[Mapping], options: Optional[AugmentOptions] = None) -> AugmentResult:
    if options is None:
        options = AugmentOptions()

    records: list[MwpRecord] = []
    quarantined: list[tuple[str, str]] = []
    excluded = 0
    for position, raw in enumerate(raws):
        label = str(_first_key(raw, _ID_KEYS) or f"@{position}")
        try:
            record = load_record(raw, options.language)
        except (MwpError, ValueError, TypeError) as exc:
            quarantined.append((label, str(exc)))
            continue
        if record.id in options.exclude_parent_ids:
            excluded += 1
            continue
        records.append(record)

    counters: Counter = Counter()
    emitted: list[AugmentedRecord] = []
    templates: set[str] = set()
    for record in records:
        outcome = augment_record(record, options)
        counters["original_numbers"] += outcome.significant_mentions
        if outcome.filtered:
            counters["filtered_problems"] += 1
            continue
        if outcome.no_question:
            counters["no_question"] += 1
            continue
        counters["candidate_numbers"] += outcome.significant_mentions
        counters["accepted_numbers"] += outcome.accepted
        counters["transform_failures"] += outcome.transform_failures
        counters["inversion_failures"] += outcome.inversion_failures
        counters["verification_failures"] += outcome.verification_failures
        counters["per_problem_capped"] += outcome.capped
        for reason, count in outcome.rejection_reasons.items():
            counters[f"rejected:{reason}"] += count
        emitted.extend(outcome.augmented)
        templates.add(_template_text(record))

    deduped: list[AugmentedRecord] = []
    seen: set[tuple[str, str]] = set()
    for record in emitted:
        key = (record.text, record.equation_text)
        if key in seen:
            counters["dedup_removed"] += 1
            continue
        seen.add(key)
        deduped.append(record)

    sampled = deduped
    if options.ratio is not None:
        limit = int(options.ratio * len(records))
        if len(deduped) > limit:
            order = list(range(len(deduped)))
            random.Random(options.seed).shuffle(order)
            keep = sorted(order[:limit])
            sampled = [deduped[i] for i in keep]
            counters["sampled_out"] = len(deduped) - limit

    stats = {
        "original_problems": len(records),
        "filtered_problems": counters["filtered_problems"],
        "original_numbers": counters["original_numbers"],
        "candidate_numbers": counters["candidate_numbers"],
        "irreversible_numbers": counters["candidate_numbers"] - counters["accepted_numbers"],
        "augmented_problems": len(sampled),
        "quarantined": len(quarantined),
        "excluded_parents": excluded,
        "no_question": counters["no_question"],
        "transform_failures": counters["transform_failures"],
        "inversion_failures": counters["inversion_failures"],
        "verification_failures": counters["verification_failures"],
        "per_problem_capped": counters["per_problem_capped"],
        "dedup_removed": counters["dedup_removed"],
        "sampled_out": counters["sampled_out"],
        "distinct_templates": len(templates),
        "rejections": {
            key.split(":", 1)[1]: count
            for key, count in sorted(counters.items())
            if key.startswith("rejected:")
        },
    }
    return AugmentResult(sampled, stats, quarantined)


def _template_text(record: MwpRecord) -> str:
    mentions = find_number_mentions(record.text, record.language)
    values = [m.value for m in mentions]
    try:
        return templatize(record.equation, values).text
    except MwpError:
        return record.equation_text


def shuffle_mix(
    originals: Sequence[Mapping], augmented: Sequence[Mapping], seed: int = 0
) -> list[Mapping]:
    """Deterministically interleave original and augmented records."""
    combined = list(originals) + list(augmented)
    random.Random(seed).shuffle(combined)
    return combined
