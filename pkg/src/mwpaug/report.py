"""Dataset statistics rendering: text table, JSON, and a bar-chart figure."""

from __future__ import annotations

import json
from typing import Mapping, Sequence

TABLE_ROWS = (
    ("Original Problems", "original_problems"),
    ("Filtered Problems", "filtered_problems"),
    ("Original Numbers", "original_numbers"),
    ("Candidate Numbers", "candidate_numbers"),
    ("Irreversible Numbers", "irreversible_numbers"),
    ("Augmented Problems", "augmented_problems"),
)

_EXTRA_KEYS = (
    "quarantined",
    "excluded_parents",
    "no_question",
    "transform_failures",
    "inversion_failures",
    "verification_failures",
    "per_problem_capped",
    "dedup_removed",
    "sampled_out",
    "distinct_templates",
)


def stats_rows(stats: Mapping) -> list[tuple[str, int, float]]:
    """(name, count, proportion-of-original-problems) per headline row."""
    base = stats.get("original_problems", 0) or 0
    rows = []
    for name, key in TABLE_ROWS:
        count = int(stats.get(key, 0))
        proportion = count / base if base else 0.0
        rows.append((name, count, proportion))
    return rows


def render_stats_table(stats: Mapping) -> str:
    rows = stats_rows(stats)
    name_width = max(len(name) for name, _, _ in rows)
    count_width = max(len(str(count)) for _, count, _ in rows)
    lines = []
    for name, count, proportion in rows:
        lines.append(f"{name:<{name_width}}  {count:>{count_width}}  {proportion:.2f}")
    extras = [(key, int(stats.get(key, 0))) for key in _EXTRA_KEYS if stats.get(key)]
    if extras:
        lines.append("")
        for key, value in extras:
            lines.append(f"{key.replace('_', ' ')}: {value}")
    rejections = stats.get("rejections") or {}
    if rejections:
        lines.append("")
        for reason in sorted(rejections):
            lines.append(f"rejected {reason}: {rejections[reason]}")
    return "\n".join(lines)


def stats_to_json(stats: Mapping) -> str:
    payload = dict(stats)
    payload["table"] = [
        {"name": name, "count": count, "proportion": round(proportion, 2)}
        for name, count, proportion in stats_rows(stats)
    ]
    return json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True)


def render_stats_figure(stats: Mapping, path: str) -> str:
    """Write a horizontal bar chart of the headline counts to ``path``."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = stats_rows(stats)
    names = [name for name, _, _ in rows]
    counts = [count for _, count, _ in rows]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    positions = range(len(rows))
    ax.barh(positions, counts, color="#4878a8")
    ax.set_yticks(list(positions))
    ax.set_yticklabels(names)
    ax.invert_yaxis()
    ax.set_xlabel("count")
    ax.set_title("Augmentation summary")
    for pos, count in zip(positions, counts):
        ax.text(count, pos, f" {count}", va="center")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
