"""Reverse-operation augmentation for math word problems.

Turn a solved problem into new ones: pick a number the equation uses, ask
for it instead, state the old answer in the text, and invert the equation
so the picked number becomes the unknown. Everything is exact rational
arithmetic, and every emitted record is re-verified end to end.
"""

from .errors import (
    BothSidesVariable,
    DivisionByZero,
    EquationSyntaxError,
    MultipleUnknowns,
    MwpError,
    NonIntegerExponent,
    NoQuestionFound,
    NoVariable,
    PowerEncountered,
    UnalignedNumber,
    UnboundVariable,
    UnsupportedDeclarativeShape,
    UnsupportedQuestionShape,
)
from .expr import (
    BinOp,
    Const,
    Equation,
    Expr,
    Num,
    Var,
    evaluate,
    evaluate_equation,
    format_rational,
    parse_equation,
    parse_expr,
    parse_number,
    serialize,
    serialize_equation,
)
from .identify import (
    Candidate,
    NumberMention,
    accepted_candidates,
    align_and_filter,
    constant_value_set,
    find_number_mentions,
    is_pure_arithmetic,
)
from .invert import ReversionStep, invert, invert_with_trace
from .normalize import normalize, normalize_expr, remove_leading_negatives, reorder, simplify
from .pipeline import (
    AugmentedRecord,
    AugmentOptions,
    AugmentResult,
    MwpRecord,
    augment_dataset,
    augment_record,
    detect_language,
    load_record,
    occurrence_index_for,
    read_records,
    shuffle_mix,
    verify_augmented,
    write_jsonl,
)
from .template import TemplateEquation, templatize
from .testkit import ExprGenerator, OracleReport, run_invert_oracle
from .transform import (
    DiscourseUnit,
    PronounEntry,
    PronounTable,
    TransformResult,
    declarative_to_question,
    default_table,
    load_pronoun_tables,
    locate_question,
    question_to_declarative,
    segment_discourse,
    transform_problem,
)

__version__ = "0.1.0"

__all__ = [
    "AugmentOptions",
    "AugmentResult",
    "AugmentedRecord",
    "BinOp",
    "BothSidesVariable",
    "Candidate",
    "Const",
    "DiscourseUnit",
    "DivisionByZero",
    "Equation",
    "EquationSyntaxError",
    "Expr",
    "ExprGenerator",
    "MultipleUnknowns",
    "MwpError",
    "MwpRecord",
    "NonIntegerExponent",
    "NoQuestionFound",
    "NoVariable",
    "Num",
    "NumberMention",
    "OracleReport",
    "PowerEncountered",
    "PronounEntry",
    "PronounTable",
    "ReversionStep",
    "TemplateEquation",
    "TransformResult",
    "UnalignedNumber",
    "UnboundVariable",
    "UnsupportedDeclarativeShape",
    "UnsupportedQuestionShape",
    "Var",
    "accepted_candidates",
    "align_and_filter",
    "augment_dataset",
    "augment_record",
    "constant_value_set",
    "declarative_to_question",
    "default_table",
    "detect_language",
    "evaluate",
    "evaluate_equation",
    "find_number_mentions",
    "format_rational",
    "invert",
    "invert_with_trace",
    "is_pure_arithmetic",
    "load_pronoun_tables",
    "load_record",
    "locate_question",
    "normalize",
    "normalize_expr",
    "occurrence_index_for",
    "parse_equation",
    "parse_expr",
    "parse_number",
    "question_to_declarative",
    "read_records",
    "remove_leading_negatives",
    "reorder",
    "run_invert_oracle",
    "segment_discourse",
    "serialize",
    "serialize_equation",
    "shuffle_mix",
    "simplify",
    "templatize",
    "transform_problem",
    "verify_augmented",
    "write_jsonl",
]
