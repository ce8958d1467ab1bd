"""Command-line behavior: exit codes, artifacts, and flags."""

import json
import os

import pytest

from anacent.cli import main

ART_NAMES = [
    "centering_table.txt",
    "resolution_report.txt",
    "trace.txt",
    "ambiguity_report.txt",
]


def test_resolve_writes_artifacts(fixture_doc_path, tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["resolve", fixture_doc_path, "--out", str(out), "--trace", "full"])
    assert code == 0
    for name in ART_NAMES:
        assert (out / name).is_file()
    stdout = capsys.readouterr().out
    assert "Cb: LPS-105: LPS 105" in stdout
    assert "RETAIN" in stdout


def test_sentence_prefix(fixture_doc_path, tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["resolve", fixture_doc_path, "--out", str(out), "--sentences", "1"])
    assert code == 0
    table = (out / "centering_table.txt").read_text(encoding="utf-8")
    assert table.count("\n") == 1
    assert table.startswith("(1)")


def test_json_artifacts(fixture_doc_path, tmp_path, capsys):
    out = tmp_path / "out"
    code = main(
        ["resolve", fixture_doc_path, "--out", str(out), "--json", "--trace", "full"]
    )
    assert code == 0
    for name in ART_NAMES:
        payload = json.loads((out / name.replace(".txt", ".json")).read_text("utf-8"))
        assert payload["document"] == "lps105"
    trace = json.loads((out / "trace.json").read_text("utf-8"))
    assert trace["events"][0]["step"] == "1"
    table = json.loads((out / "centering_table.json").read_text("utf-8"))
    assert len(table["utterances"]) == 3


def test_trace_off(fixture_doc_path, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["resolve", fixture_doc_path, "--out", str(out), "--trace", "off"]) == 0
    assert (out / "trace.txt").read_text(encoding="utf-8") == ""
    assert "disabled" in (out / "ambiguity_report.txt").read_text(encoding="utf-8")


def test_missing_document_is_load_error(tmp_path, capsys):
    code = main(["resolve", str(tmp_path / "nope.doc"), "--out", str(tmp_path / "o")])
    assert code == 1
    assert "load error" in capsys.readouterr().err


def test_malformed_document_is_load_error(tmp_path, capsys):
    bad = tmp_path / "bad.doc"
    bad.write_text("#sent 1\nonly three\tfields\there\n", encoding="utf-8")
    code = main(["resolve", str(bad), "--out", str(tmp_path / "o")])
    assert code == 1


def test_engine_error_exit_code(fixture_doc_path, tmp_path, capsys):
    code = main(
        ["resolve", fixture_doc_path, "--out", str(tmp_path / "o"), "--max-readings", "2"]
    )
    assert code == 2
    assert "fan-out" in capsys.readouterr().err


def test_kb_override_flags(fixture_doc_path, tmp_path, capsys):
    data_dir = os.path.dirname(fixture_doc_path)
    out = tmp_path / "out"
    code = main(
        [
            "resolve", fixture_doc_path,
            "--taxonomy", os.path.join(data_dir, "taxonomy.tax"),
            "--categories", os.path.join(data_dir, "categories.cat"),
            "--out", str(out),
        ]
    )
    assert code == 0


def test_schedule_seed_keeps_table_stable(fixture_doc_path, tmp_path, capsys):
    tables = set()
    for seed in ("1", "2"):
        out = tmp_path / f"out{seed}"
        assert main(
            ["resolve", fixture_doc_path, "--out", str(out), "--schedule-seed", seed]
        ) == 0
        tables.add((out / "centering_table.txt").read_text(encoding="utf-8"))
    assert len(tables) == 1
