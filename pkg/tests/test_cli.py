from __future__ import annotations

import json
import subprocess
import sys

import pytest

from triadkit.appraisal import functional_from_schema, p, s
from triadkit.cli import main
from triadkit.dsl import load, print_canonical


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_query_matches_restrict(capsys, samples, hr_schema):
    code, out, _ = run(capsys, "eval", "--schema", str(samples / "hr.tdk"),
                       "--query", "F(s={development,support})(p={it_company})")
    assert code == 0
    f = functional_from_schema(hr_schema)
    expected = sorted(f(s("development", "support"))(p("it_company")).extension)
    assert out.splitlines() == expected


def test_eval_statements_from_document(capsys, samples):
    code, out, _ = run(capsys, "eval", "--schema", str(samples / "hr.tdk"))
    assert code == 0
    assert "ivanov" in out and "kozlov" not in out


def test_eval_metric_and_comprehension(capsys, samples):
    code, out, _ = run(capsys, "eval", "--schema", str(samples / "hr.tdk"),
                       "--query", "z(s={development,support})")
    assert code == 0
    assert out.splitlines() == ["(development)\t{z_devel}", "(support)\t{z_support}"]
    code, out, _ = run(capsys, "eval", "--schema", str(samples / "situation.tdk"),
                       "--query", "{ x : Employee | x.position = General_Director }")
    assert (code, out) == (0, "e1\n")


def test_eval_bad_query_is_domain_error(capsys, samples):
    code, _, err = run(capsys, "eval", "--schema", str(samples / "hr.tdk"), "--query", "F(s=")
    assert code == 1
    assert err


def test_verify(capsys, samples, tmp_path):
    code, out, _ = run(capsys, "verify", "--schema", str(samples / "hr.tdk"))
    assert (code, out) == (0, "ok\n")
    broken = tmp_path / "broken.tdk"
    broken.write_text("sort S = {a};\nconcept C { x: S, y: Gone };\n")
    code, out, _ = run(capsys, "verify", "--schema", str(broken))
    assert code == 1
    assert len(out.splitlines()) == 1
    assert "Gone" in out


def test_usage_errors(capsys):
    code, _, err = run(capsys)
    assert code == 2 and "usage" in err
    with pytest.raises(SystemExit) as e:
        main(["eval"])
    assert e.value.code == 2


def test_missing_file_is_domain_error(capsys, tmp_path):
    code, _, err = run(capsys, "verify", "--schema", str(tmp_path / "nope.tdk"))
    assert code == 1 and err


def test_load_prints_canonical(capsys, samples):
    code, out, _ = run(capsys, "load", str(samples / "situation.tdk"))
    assert code == 0
    assert out == print_canonical(load(samples / "situation.tdk"))


def test_json_lines(capsys, samples):
    code, out, _ = run(capsys, "--format", "json-lines", "eval", "--schema",
                       str(samples / "hr.tdk"), "--query", "F(p={recruiting})")
    assert code == 0
    rows = [json.loads(line) for line in out.splitlines()]
    assert rows and all(list(r) == sorted(r) or len(r) == 1 for r in rows)


def test_merge_and_rollback_history(capsys, samples, tmp_path):
    hist = tmp_path / "hist"
    code, out, _ = run(capsys, "merge", "--base", str(samples / "personal_data.tdk"),
                       "--component", str(samples / "vacancies.tdk"), "--history", str(hist))
    assert code == 0
    assert "version\t2" in out
    code, out, _ = run(capsys, "rollback", "--history", str(hist), "--version", "1")
    assert code == 0
    assert (hist / "0003.tdk").read_bytes() == (hist / "0001.tdk").read_bytes()
    assert (hist / "0001.tdk").read_text() == print_canonical(load(samples / "personal_data.tdk"))
    code, _, _ = run(capsys, "rollback", "--history", str(hist), "--version", "42")
    assert code == 1


def test_rejected_merge_leaves_history_untouched(capsys, samples, tmp_path):
    hist = tmp_path / "hist"
    run(capsys, "merge", "--base", str(samples / "personal_data.tdk"),
        "--component", str(samples / "vacancies.tdk"), "--history", str(hist))
    before = {f.name: f.read_bytes() for f in hist.iterdir()}
    clash = tmp_path / "clash.tdk"
    clash.write_text("component Clash requires Person;\ngovern * by personnel_department;\n"
                     "concept Vacancy { title: integer };\n")
    code, out, _ = run(capsys, "merge", "--component", str(clash), "--history", str(hist))
    assert code == 1
    assert "REJECTED" in out
    assert {f.name: f.read_bytes() for f in hist.iterdir()} == before


def test_replay(capsys, samples, tmp_path):
    events = tmp_path / "events.txt"
    events.write_text("# hires\nenroll novikova programming\ndismiss kozlov -\n"
                      "enroll novikova programming\n")
    code, out, err = run(capsys, "replay", "--schema", str(samples / "hr.tdk"),
                         "--events", str(events))
    assert code == 1
    lines = out.splitlines()
    assert lines[:3] == ["2\tenroll novikova programming\tok\tfired=1",
                         "3\tdismiss kozlov -\tok\tfired=1",
                         "4\tenroll novikova programming\tfailed\tIllegalTransition"]
    assert "employee novikova enrolled programming" in lines
    assert "vacancy programming 1" in lines
    assert "events.txt:4" in err


def test_replay_under_a_session(capsys, samples, tmp_path):
    events = tmp_path / "events.txt"
    events.write_text("dismiss kozlov -\n")
    code, out, _ = run(capsys, "replay", "--schema", str(samples / "hr.tdk"),
                       "--events", str(events), "--user", "bob")
    assert code == 1
    assert "AccessDenied" in out


def test_simulate_session(capsys, samples, tmp_path):
    ops = tmp_path / "ops.txt"
    ops.write_text("open bob\nbob read data programming\nbob read data recruiting\n"
                   "bob write metadata\nclose bob\nbob read data programming\nclose bob\n")
    code, out, _ = run(capsys, "simulate-session", "--schema", str(samples / "hr.tdk"),
                       "--ops", str(ops))
    assert code == 1
    results = [line.split("\t")[-1] for line in out.splitlines()]
    assert results == ["opened s1", "allow", "deny(OutOfScope)", "deny(MetadataForbidden)",
                       "closed s1", "deny(SessionClosed)", "error"]


def test_report_and_figures(capsys, samples, tmp_path):
    code, out, err = run(capsys, "report", "--schema", str(samples / "hr.tdk"),
                         "--metrics", "z,r,q", "--step", "s={development,support}",
                         "--step", "p={information_technologies,programming,information_systems}",
                         "--unit", "programming", "--weight", "q=2", "--weight", "r=0",
                         "--figures", str(tmp_path / "fig"))
    assert code == 0
    lines = out.splitlines()
    assert lines[1:4] == ["z\tREFINING\tINERT", "r\tREFINING\tINERT", "q\tREFINING\tREFINING"]
    assert "verdict\ttwo levels sufficient" in lines
    assert lines[-1] == "programming\t2\t21"
    figs = sorted(f.name for f in (tmp_path / "fig").iterdir())
    assert figs == ["generalization.png", "unit_scores.png"]
    for f in (tmp_path / "fig").iterdir():
        assert f.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_output_is_deterministic(samples):
    argv = [sys.executable, "-m", "triadkit", "report", "--schema", str(samples / "hr.tdk")]
    first = subprocess.run(argv, capture_output=True, check=True)
    second = subprocess.run(argv, capture_output=True, check=True)
    assert first.stdout == second.stdout and first.stdout
    usage = subprocess.run([sys.executable, "-m", "triadkit"], capture_output=True)
    assert usage.returncode == 2
