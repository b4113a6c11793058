"""Command-line interface.

Subcommands:
  augment    rewrite a dataset into reversed problems (jsonl out)
  invert     reverse one equation around a chosen number
  normalize  canonicalize one equation
  verify     re-check an augmented file against its source records
  stats      run identification and report counts (table / JSON / figure)
  oracle     self-check inversion on random equations
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .errors import MwpError
from .expr import (
    evaluate,
    format_rational,
    iter_number_leaves,
    parse_equation,
    parse_number,
    serialize_equation,
)
from .identify import DEFAULT_CONSTANT_SURFACES, find_number_mentions
from .invert import invert_with_trace
from .normalize import normalize
from .pipeline import (
    AugmentOptions,
    augment_dataset,
    detect_language,
    load_record,
    occurrence_index_for,
    read_records,
    shuffle_mix,
    verify_augmented,
    write_jsonl,
)
from .report import render_stats_figure, render_stats_table, stats_to_json
from .testkit import run_invert_oracle
from .transform import load_pronoun_tables


def _ratio(value: str):
    if value == "all":
        return None
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(
            f"{value!r} is not a ratio (number, fraction, or 'all')"
        )


def _per_problem_cap(value: str):
    if value == "unlimited":
        return None
    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"{value!r} is not a cap (integer or 'unlimited')"
        )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mwpaug",
        description="Reverse-operation augmentation for math word problems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    languages = ("zh", "en", "auto")

    aug = sub.add_parser("augment", help="augment a dataset file")
    aug.add_argument("--input", required=True, help="JSON / JSON-lines dataset")
    aug.add_argument("--output", required=True, help="augmented records (jsonl)")
    aug.add_argument("--ratio", type=_ratio, default=None,
                     help="cap augmented count at ratio * original count; "
                          "'all' keeps everything (default)")
    aug.add_argument("--max-per-problem", type=_per_problem_cap, default=None,
                     help="augmented records per source problem; "
                          "'unlimited' (default) keeps everything")
    aug.add_argument("--seed", type=int, default=0)
    aug.add_argument("--language", choices=languages, default="auto",
                     help="fix the language instead of detecting per record")
    aug.add_argument("--constants", default=",".join(DEFAULT_CONSTANT_SURFACES),
                     help="comma-separated constant surfaces (default: %(default)s)")
    aug.add_argument("--pronoun-table", default=None,
                     help="tab-separated pronoun table overriding the built-ins")
    aug.add_argument("--exclude", default=None,
                     help="dataset file whose record ids must not be augmented")
    aug.add_argument("--mix", default=None,
                     help="also write originals+augmented, shuffled, to this path")
    aug.add_argument("--quarantine", default=None,
                     help="write quarantined (id, reason) rows to this path")
    aug.add_argument("--stats", default=None,
                     help="write the run statistics as JSON to this path")
    aug.add_argument("--report", action="store_true",
                     help="write <output>.stats.json and <output>.stats.png")

    inv = sub.add_parser("invert", help="reverse one equation around a number")
    inv.add_argument("equation")
    inv.add_argument("--target", required=True, help="value of the number to reverse")
    inv.add_argument("--answer", default=None, help="stated answer (default: evaluate)")
    inv.add_argument("--text", default=None,
                     help="problem text; orders the result and rejects text duplicates")
    inv.add_argument("--json", action="store_true", dest="as_json")

    norm = sub.add_parser("normalize", help="canonicalize one equation")
    norm.add_argument("equation")
    norm.add_argument("--text", default=None, help="problem text providing number order")
    norm.add_argument("--json", action="store_true", dest="as_json")

    ver = sub.add_parser("verify", help="re-check an augmented file")
    ver.add_argument("--pairs", default=None,
                     help="file of {original, augmented} row pairs")
    ver.add_argument("--augmented", default=None, help="jsonl from the augment command")
    ver.add_argument("--originals", default=None, help="the source dataset")
    ver.add_argument("--language", choices=languages, default="auto")
    ver.add_argument("--json", action="store_true", dest="as_json",
                     help="print a JSON summary instead of per-record lines")

    sta = sub.add_parser("stats", help="identification and augmentation counts")
    sta.add_argument("--input", required=True)
    sta.add_argument("--language", choices=languages, default="auto")
    sta.add_argument("--constants", default=",".join(DEFAULT_CONSTANT_SURFACES))
    sta.add_argument("--pronoun-table", default=None)
    sta.add_argument("--json", default=None, help="write full stats JSON here")
    sta.add_argument("--figure", default=None, help="write a PNG bar chart here")

    orc = sub.add_parser("oracle", help="self-check inversion on random equations")
    orc.add_argument("--trials", type=int, default=10_000)
    orc.add_argument("--seed", type=int, default=0)
    orc.add_argument("--max-depth", type=int, default=6)
    orc.add_argument("--json", action="store_true", dest="as_json",
                     help="print the report as JSON")
    orc.add_argument("--report", default=None,
                     help="also write the report as JSON to this path")

    return parser


def _language(args: argparse.Namespace) -> Optional[str]:
    language = getattr(args, "language", None)
    return None if language in (None, "auto") else language


def _options_from(args: argparse.Namespace) -> AugmentOptions:
    tables = None
    if getattr(args, "pronoun_table", None):
        tables = load_pronoun_tables(args.pronoun_table)
    exclude: frozenset[str] = frozenset()
    if getattr(args, "exclude", None):
        exclude = frozenset(
            str(r.get(k))
            for r in read_records(args.exclude)
            for k in ("id", "problem_id", "iIndex", "index")
            if isinstance(r, dict) and r.get(k) is not None
        )
    return AugmentOptions(
        language=_language(args),
        constant_surfaces=tuple(
            s.strip() for s in getattr(args, "constants", "").split(",") if s.strip()
        ) or DEFAULT_CONSTANT_SURFACES,
        pronoun_tables=tables,
        ratio=getattr(args, "ratio", None),
        max_per_problem=getattr(args, "max_per_problem", None),
        seed=getattr(args, "seed", 0),
        exclude_parent_ids=exclude,
    )


def _cmd_augment(args: argparse.Namespace) -> int:
    raws = read_records(args.input)
    options = _options_from(args)
    result = augment_dataset(raws, options)
    write_jsonl((r.to_json() for r in result.records), args.output)
    if args.mix:
        mixed = shuffle_mix(raws, [r.to_json() for r in result.records], options.seed)
        write_jsonl(mixed, args.mix)
    if args.quarantine:
        write_jsonl(
            ({"id": rid, "reason": reason} for rid, reason in result.quarantined),
            args.quarantine,
        )
    if args.stats:
        with open(args.stats, "w", encoding="utf-8") as fh:
            fh.write(stats_to_json(result.stats))
            fh.write("\n")
    if args.report:
        stem, _ = os.path.splitext(args.output)
        with open(stem + ".stats.json", "w", encoding="utf-8") as fh:
            fh.write(stats_to_json(result.stats))
            fh.write("\n")
        render_stats_figure(result.stats, stem + ".stats.png")
    print(render_stats_table(result.stats))
    print(f"\nwrote {len(result.records)} augmented records to {args.output}")
    return 0


def _target_path(equation, target_value, text: Optional[str], language: Optional[str]):
    leaves = [
        (path, leaf)
        for path, leaf in iter_number_leaves(equation.rhs)
        if leaf.value == target_value
    ]
    if not leaves:
        raise MwpError(f"no number leaf with value {format_rational(target_value)}")
    if len(leaves) > 1:
        raise MwpError(
            f"R2_EQ_DUP: value {format_rational(target_value)} appears "
            f"{len(leaves)} times in the equation; reversal is ambiguous"
        )
    if text is not None:
        lang = language or detect_language(text)
        same = [m for m in find_number_mentions(text, lang) if m.value == target_value]
        if len(same) > 1:
            raise MwpError(
                f"R1_TEXT_DUP: value {format_rational(target_value)} appears "
                f"{len(same)} times in the text; reversal is ambiguous"
            )
    return leaves[0][0]


def _cmd_invert(args: argparse.Namespace) -> int:
    equation = parse_equation(args.equation)
    target_value = parse_number(args.target)
    answer = parse_number(args.answer) if args.answer is not None else None
    path = _target_path(equation, target_value, args.text, None)
    inverted, steps = invert_with_trace(equation, path, answer)
    occurrence = None
    if args.text is not None:
        lang = detect_language(args.text)
        occurrence = dict(occurrence_index_for(args.text, lang))
        stated = answer if answer is not None else evaluate(equation.rhs)
        occurrence.setdefault(stated, len(occurrence))
    normalized = normalize(inverted, occurrence)
    text = serialize_equation(normalized)
    if args.as_json:
        print(json.dumps({
            "equation": text,
            "value": format_rational(evaluate(normalized.rhs)),
            "steps": [f"{s.op}:{s.var_side}" for s in steps],
        }, ensure_ascii=False))
    else:
        print(text)
    return 0


def _cmd_normalize(args: argparse.Namespace) -> int:
    equation = parse_equation(args.equation)
    occurrence = None
    if args.text is not None:
        occurrence = occurrence_index_for(args.text, detect_language(args.text))
    normalized = normalize(equation, occurrence)
    text = serialize_equation(normalized)
    if args.as_json:
        print(json.dumps(
            {"equation": text, "value": format_rational(evaluate(normalized.rhs))},
            ensure_ascii=False,
        ))
    else:
        print(text)
    return 0


def _row_text(row) -> str:
    for key in ("original_text", "text", "segmented_text", "sQuestion"):
        if row.get(key) is not None:
            return str(row[key])
    return ""


def _verify_pairs(args: argparse.Namespace):
    """Yield (augmented row, parent record or None) from either input shape."""
    language = _language(args)
    if args.pairs:
        for pair in read_records(args.pairs):
            row = pair.get("augmented") if isinstance(pair, dict) else None
            original = pair.get("original") if isinstance(pair, dict) else None
            if not isinstance(row, dict) or not isinstance(original, dict):
                yield pair if isinstance(pair, dict) else {}, None
                continue
            try:
                parent = load_record(original, language)
            except (MwpError, ValueError, TypeError):
                parent = None
            yield row, parent
        return
    parents = {}
    for raw in read_records(args.originals):
        try:
            record = load_record(raw, language)
        except (MwpError, ValueError, TypeError):
            continue
        parents[record.id] = record
    for row in read_records(args.augmented):
        yield row, parents.get(str(row.get("parent_id")))


def _cmd_verify(args: argparse.Namespace) -> int:
    if not args.pairs and not (args.augmented and args.originals):
        raise MwpError("verify needs --pairs, or both --augmented and --originals")
    options = AugmentOptions(language=_language(args))
    checked = failures = 0
    failed_rows = []

    def failed(row, reason: str) -> None:
        nonlocal failures
        failures += 1
        failed_rows.append({"id": row.get("id"), "reason": reason})
        if not args.as_json:
            print(f"{row.get('id')}: {reason}")

    for row, parent in _verify_pairs(args):
        checked += 1
        if parent is None:
            failed(row, f"parent {row.get('parent_id')} not found")
            continue
        span = row.get("target_span") or (0, 0)
        target = None
        for mention in find_number_mentions(parent.text, parent.language):
            if (mention.start, mention.end) == tuple(span):
                target = mention
                break
        if target is None:
            failed(row, f"target span {span} has no mention in the parent")
            continue
        try:
            equation = parse_equation(str(row.get("equation")))
        except MwpError as exc:
            failed(row, f"equation does not parse ({exc})")
            continue
        reason = verify_augmented(
            parent, target, _row_text(row), equation,
            options.table_for(parent.language),
        )
        if reason is not None:
            failed(row, reason)
    if args.as_json:
        print(json.dumps(
            {"checked": checked, "ok": checked - failures, "failed": failures,
             "failures": failed_rows},
            ensure_ascii=False,
        ))
    else:
        print(f"checked {checked} records: {checked - failures} ok, {failures} failed")
    return 1 if failures else 0


def _cmd_stats(args: argparse.Namespace) -> int:
    raws = read_records(args.input)
    options = _options_from(args)
    result = augment_dataset(raws, options)
    print(render_stats_table(result.stats))
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(stats_to_json(result.stats))
            fh.write("\n")
    if args.figure:
        render_stats_figure(result.stats, args.figure)
    return 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    report = run_invert_oracle(
        trials=args.trials, seed=args.seed, max_depth=args.max_depth
    )
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report.to_json(), fh, ensure_ascii=False, indent=2)
            fh.write("\n")
    if args.as_json:
        print(json.dumps(report.to_json(), ensure_ascii=False))
    else:
        print(report.summary())
    return 0 if report.ok else 1


_COMMANDS = {
    "augment": _cmd_augment,
    "invert": _cmd_invert,
    "normalize": _cmd_normalize,
    "verify": _cmd_verify,
    "stats": _cmd_stats,
    "oracle": _cmd_oracle,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (MwpError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
