import json

import pytest

from mwpaug.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_invert_prints_bare_equation(capsys):
    code, out, err = run(
        capsys, "invert", "x=660/(32+34)", "--target", "660", "--answer", "10"
    )
    assert code == 0
    assert out.strip() == "x=10*(32+34)"
    assert err == ""


def test_invert_json_output(capsys):
    code, out, _ = run(
        capsys, "invert", "x=660/(32+34)", "--target", "32", "--answer", "10", "--json"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["equation"] == "x=660/10-34"
    assert payload["value"] == "32"
    assert payload["steps"] == ["/:R", "+:L"]


def test_invert_rejects_ambiguous_target(capsys):
    code, _, err = run(capsys, "invert", "x=2*2", "--target", "2")
    assert code == 1
    assert "ambiguous" in err


def test_invert_rejects_duplicate_in_text(capsys):
    code, _, err = run(
        capsys, "invert", "x=4*2+1", "--target", "2",
        "--text", "A has 4 piles of 2 apples and B has 2 apples. B gave 1. How many?",
    )
    assert code == 1
    assert "ambiguous" in err


def test_invert_unknown_target_value(capsys):
    code, _, err = run(capsys, "invert", "x=2+3", "--target", "9")
    assert code == 1
    assert "no number leaf" in err


def test_normalize_prints_bare_equation(capsys):
    code, out, _ = run(capsys, "normalize", "x=c-a-c+(c*a)+(b/b)")
    assert code == 0
    assert out.strip() == "x=1-a+(a*c)"


def test_normalize_respects_text_order(capsys):
    code, out, _ = run(
        capsys, "normalize", "x=(32+34)*10",
        "--text", "He drove 32 km and 34 km. It took 10 hours.",
    )
    assert code == 0
    assert out.strip() == "x=(32+34)*10"


def test_bad_equation_exits_one(capsys):
    code, _, err = run(capsys, "normalize", "x=1+")
    assert code == 1
    assert err.startswith("error:")


def test_usage_error_exits_two():
    with pytest.raises(SystemExit) as exc:
        main(["invert"])  # missing --target
    assert exc.value.code == 2


def test_augment_writes_jsonl_and_report(tmp_path, capsys, two_cars_record):
    src = tmp_path / "data.json"
    src.write_text(json.dumps([two_cars_record]), encoding="utf-8")
    out = tmp_path / "aug.jsonl"
    code, stdout, _ = run(
        capsys, "augment", "--input", str(src), "--output", str(out), "--report",
    )
    assert code == 0
    assert "Original Problems" in stdout
    assert "Augmented Problems" in stdout
    lines = out.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 3
    rows = [json.loads(line) for line in lines]
    assert {r["equation"] for r in rows} == {
        "x=10*(32+34)", "x=660/10-34", "x=660/10-32",
    }
    stats_json = tmp_path / "aug.stats.json"
    figure = tmp_path / "aug.stats.png"
    assert stats_json.exists()
    assert figure.exists() and figure.stat().st_size > 0
    payload = json.loads(stats_json.read_text(encoding="utf-8"))
    assert payload["augmented_problems"] == 3
    assert {row["name"] for row in payload["table"]} >= {
        "Original Problems", "Filtered Problems", "Original Numbers",
        "Candidate Numbers", "Irreversible Numbers", "Augmented Problems",
    }


def test_augment_mix_and_quarantine_outputs(tmp_path, capsys, two_cars_record):
    src = tmp_path / "data.json"
    bad = {"id": "bad", "text": "t? How many?", "equation": "x=1+", "ans": "1"}
    src.write_text(json.dumps([two_cars_record, bad]), encoding="utf-8")
    out = tmp_path / "aug.jsonl"
    mix = tmp_path / "mix.jsonl"
    quarantine = tmp_path / "bad.jsonl"
    code, _, _ = run(
        capsys, "augment", "--input", str(src), "--output", str(out),
        "--mix", str(mix), "--quarantine", str(quarantine),
    )
    assert code == 0
    assert len(mix.read_text(encoding="utf-8").splitlines()) == 5  # 2 originals + 3
    q = [json.loads(l) for l in quarantine.read_text(encoding="utf-8").splitlines()]
    assert q == [{"id": "bad", "reason": q[0]["reason"]}]


def test_augment_ratio_cap(tmp_path, capsys, two_cars_record):
    src = tmp_path / "data.json"
    src.write_text(json.dumps([two_cars_record]), encoding="utf-8")
    out = tmp_path / "aug.jsonl"
    code, _, _ = run(
        capsys, "augment", "--input", str(src), "--output", str(out),
        "--ratio", "1", "--seed", "4",
    )
    assert code == 0
    assert len(out.read_text(encoding="utf-8").splitlines()) == 1


def test_stats_table_json_figure(tmp_path, capsys, two_cars_record):
    src = tmp_path / "data.json"
    src.write_text(json.dumps([two_cars_record]), encoding="utf-8")
    json_path = tmp_path / "stats.json"
    figure_path = tmp_path / "stats.png"
    code, stdout, _ = run(
        capsys, "stats", "--input", str(src),
        "--json", str(json_path), "--figure", str(figure_path),
    )
    assert code == 0
    for name in ("Original Problems", "Filtered Problems", "Original Numbers",
                 "Candidate Numbers", "Irreversible Numbers", "Augmented Problems"):
        assert name in stdout
    assert json_path.exists()
    assert figure_path.exists() and figure_path.stat().st_size > 0


def test_verify_command_passes_clean_output(tmp_path, capsys, two_cars_record):
    src = tmp_path / "data.json"
    src.write_text(json.dumps([two_cars_record]), encoding="utf-8")
    out = tmp_path / "aug.jsonl"
    run(capsys, "augment", "--input", str(src), "--output", str(out))
    code, stdout, _ = run(
        capsys, "verify", "--augmented", str(out), "--originals", str(src)
    )
    assert code == 0
    assert "3 ok, 0 failed" in stdout


def test_verify_command_flags_tampering(tmp_path, capsys, two_cars_record):
    src = tmp_path / "data.json"
    src.write_text(json.dumps([two_cars_record]), encoding="utf-8")
    out = tmp_path / "aug.jsonl"
    run(capsys, "augment", "--input", str(src), "--output", str(out))
    rows = [json.loads(l) for l in out.read_text(encoding="utf-8").splitlines()]
    rows[0]["equation"] = "x=11*(32+34)"
    out.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")
    code, stdout, _ = run(
        capsys, "verify", "--augmented", str(out), "--originals", str(src)
    )
    assert code == 1
    assert "2 ok, 1 failed" in stdout


def test_oracle_command_small_run(capsys):
    code, stdout, _ = run(capsys, "oracle", "--trials", "30", "--seed", "2")
    assert code == 0
    assert "failures: 0" in stdout


def test_augment_excludes_listed_parents(tmp_path, capsys, two_cars_record):
    src = tmp_path / "data.json"
    src.write_text(json.dumps([two_cars_record]), encoding="utf-8")
    out = tmp_path / "aug.jsonl"
    code, _, _ = run(
        capsys, "augment", "--input", str(src), "--output", str(out),
        "--exclude", str(src),
    )
    assert code == 0
    assert out.read_text(encoding="utf-8") == ""


def test_invert_single_leaf_equation(capsys):
    code, out, _ = run(capsys, "invert", "x=5", "--target", "5", "--answer", "5")
    assert code == 0
    assert out.strip() == "x=5"


def test_invert_ambiguity_errors_carry_rule_codes(capsys):
    code, _, err = run(capsys, "invert", "x=2*2", "--target", "2")
    assert code == 1
    assert "R2_EQ_DUP" in err
    code, _, err = run(
        capsys, "invert", "x=4*2+1", "--target", "2",
        "--text", "A has 4 piles of 2 apples and B has 2 apples. B gave 1. How many?",
    )
    assert code == 1
    assert "R1_TEXT_DUP" in err


def test_augment_ratio_all_keeps_everything(tmp_path, capsys, two_cars_record):
    src = tmp_path / "data.json"
    src.write_text(json.dumps([two_cars_record]), encoding="utf-8")
    out = tmp_path / "aug.jsonl"
    code, _, _ = run(
        capsys, "augment", "--input", str(src), "--output", str(out),
        "--ratio", "all",
    )
    assert code == 0
    assert len(out.read_text(encoding="utf-8").splitlines()) == 3


def test_augment_max_per_problem(tmp_path, capsys, two_cars_record):
    src = tmp_path / "data.json"
    src.write_text(json.dumps([two_cars_record]), encoding="utf-8")
    out = tmp_path / "aug.jsonl"
    code, _, _ = run(
        capsys, "augment", "--input", str(src), "--output", str(out),
        "--max-per-problem", "2",
    )
    assert code == 0
    assert len(out.read_text(encoding="utf-8").splitlines()) == 2
    code, _, _ = run(
        capsys, "augment", "--input", str(src), "--output", str(out),
        "--max-per-problem", "unlimited",
    )
    assert code == 0
    assert len(out.read_text(encoding="utf-8").splitlines()) == 3


def test_augment_stats_path(tmp_path, capsys, two_cars_record):
    src = tmp_path / "data.json"
    src.write_text(json.dumps([two_cars_record]), encoding="utf-8")
    out = tmp_path / "aug.jsonl"
    stats = tmp_path / "run.stats.json"
    code, _, _ = run(
        capsys, "augment", "--input", str(src), "--output", str(out),
        "--stats", str(stats),
    )
    assert code == 0
    payload = json.loads(stats.read_text(encoding="utf-8"))
    assert payload["augmented_problems"] == 3


def test_verify_pairs_file(tmp_path, capsys, two_cars_record):
    src = tmp_path / "data.json"
    src.write_text(json.dumps([two_cars_record]), encoding="utf-8")
    out = tmp_path / "aug.jsonl"
    run(capsys, "augment", "--input", str(src), "--output", str(out))
    rows = [json.loads(l) for l in out.read_text(encoding="utf-8").splitlines()]
    pairs = tmp_path / "pairs.jsonl"
    pairs.write_text(
        "\n".join(
            json.dumps({"original": two_cars_record, "augmented": r}) for r in rows
        ) + "\n",
        encoding="utf-8",
    )
    code, stdout, _ = run(capsys, "verify", "--pairs", str(pairs))
    assert code == 0
    assert "3 ok, 0 failed" in stdout


def test_verify_json_summary(tmp_path, capsys, two_cars_record):
    src = tmp_path / "data.json"
    src.write_text(json.dumps([two_cars_record]), encoding="utf-8")
    out = tmp_path / "aug.jsonl"
    run(capsys, "augment", "--input", str(src), "--output", str(out))
    code, stdout, _ = run(
        capsys, "verify", "--augmented", str(out), "--originals", str(src), "--json"
    )
    assert code == 0
    payload = json.loads(stdout)
    assert payload == {"checked": 3, "ok": 3, "failed": 0, "failures": []}


def test_verify_without_inputs_errors(capsys):
    code, _, err = run(capsys, "verify")
    assert code == 1
    assert "--pairs" in err


def test_oracle_json_and_report_file(tmp_path, capsys):
    report = tmp_path / "oracle.json"
    code, stdout, _ = run(
        capsys, "oracle", "--trials", "20", "--seed", "2",
        "--json", "--report", str(report),
    )
    assert code == 0
    payload = json.loads(stdout)
    assert payload["ok"] is True
    assert payload["failures"] == []
    assert set(payload["branch_counts"]) <= {
        "+:L", "+:R", "-:L", "-:R", "*:L", "*:R", "/:L", "/:R",
    }
    assert json.loads(report.read_text(encoding="utf-8")) == payload
