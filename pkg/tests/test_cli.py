import json

import pytest

from catslash.cli import main
from catslash.freyd import sets_upto
from catslash.pipeline import PipelineError, load_goal, report_bytes, run_pipeline

from conftest import load


def run(capsys, *argv):
    code = main(list(map(str, argv)))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_good_files(capsys, fixtures):
    code, out, _ = run(
        capsys, "check", "--theory", fixtures / "demo" / "demo.theory",
        fixtures / "two_arrow.theory", fixtures / "demo" / "tiny.cat",
        fixtures / "demo" / "category_axioms.formula", fixtures / "demo" / "goals" / "00_exists_intro_0.proof",
    )
    assert code == 0
    assert out.count(": ok") == 4


def test_check_double_binder(capsys, fixtures):
    code, out, _ = run(capsys, "check", fixtures / "bad" / "double_binder.formula")
    assert code == 1
    assert "double_binder.formula:2: IllFormedQuantifier" in out


def test_check_missing_row(capsys, fixtures):
    code, out, _ = run(capsys, "check", fixtures / "bad" / "missing_row.cat")
    assert code == 1 and "CategoryLawError" in out


def test_check_unprovable_merge(capsys, fixtures):
    code, out, _ = run(capsys, "check", "--theory", fixtures / "two_arrow.theory", fixtures / "demo" / "merge_a1_a2.model")
    assert code == 1 and "NotProvable" in out


def test_prove(capsys, fixtures):
    code, out, _ = run(capsys, "prove", "--theory", fixtures / "two_arrow.theory", "comp a1 i_One = a1")
    assert code == 0
    assert out.startswith("# conclusion: comp a1 i_One = a1\n")


def test_prove_fails_on_bot(capsys, fixtures):
    code, out, _ = run(capsys, "prove", "--theory", fixtures / "two_arrow.theory", "--depth", "3", "bot")
    assert code == 1 and "no proof found" in out


def test_slash_exit_codes(capsys, fixtures):
    th = fixtures / "two_arrow.theory"
    code, out, _ = run(capsys, "slash", "--theory", th, "exists x : One -> A . x = a2")
    assert code == 0 and json.loads(out)["verdict"] is True
    code, _, _ = run(capsys, "slash", "--theory", th, "a1 = a2")
    assert code == 1


def test_extract(capsys, fixtures, demo):
    code, out, _ = run(capsys, "extract", "--theory", fixtures / "demo" / "demo.theory", fixtures / "demo" / "goals" / "00_exists_intro_0.proof")
    assert code == 0
    assert json.loads(out)["payload"] == "Witness{x -> a1}"


def test_glue(capsys, fixtures):
    code, out, _ = run(capsys, "glue", "--theory", fixtures / "two_arrow.theory")
    assert code == 0
    assert "over A: 7" in out and "over One: 3" in out


def test_negative_budget(capsys, fixtures):
    code, _, err = run(capsys, "glue", "--theory", fixtures / "two_arrow.theory", "--budget", "-1")
    assert code == 2 and "nonnegative" in err


def test_pipeline_deterministic(capsys, tmp_path, fixtures):
    args = ["pipeline", "--theory", fixtures / "demo" / "demo.theory", "--category", fixtures / "demo" / "tiny.cat",
            "--goals", fixtures / "demo" / "goals"]
    assert run(capsys, *args, "--out", tmp_path / "a")[0] == 0
    assert run(capsys, *args, "--out", tmp_path / "b")[0] == 0
    a = (tmp_path / "a" / "report.json").read_bytes()
    assert a == (tmp_path / "b" / "report.json").read_bytes()
    assert (tmp_path / "a" / "report.txt").read_text() == (tmp_path / "b" / "report.txt").read_text()
    doc = json.loads(a)
    assert doc["consistent"] is True
    assert len(doc["goals"]) == 29
    assert all(r["status"] == "ok" for r in doc["goals"])


def test_pipeline_without_goals(demo):
    result = run_pipeline(demo, sets_upto(2), [])
    assert result.report.records == []
    assert result.report.consistent
    assert report_bytes(result) == report_bytes(run_pipeline(demo, sets_upto(2), []))


def test_pipeline_keeps_source_formula(demo, fixtures):
    text = (fixtures / "demo" / "goals" / "01_or_elim_exists_0.proof").read_text()
    result = run_pipeline(demo, sets_upto(2), [load_goal(text, demo.signature)])
    rec = result.report.records[0]
    assert rec["source"] == "exists y : One -> A . y = a1"
    assert rec["payload"].startswith("Witness{y -> ")


def test_inconsistent_theory_aborts_at_certification(capsys, fixtures):
    with pytest.raises(PipelineError) as e:
        run_pipeline(load("two_arrow_inconsistent.theory"), sets_upto(2), [])
    assert e.value.stage == "certification"
    code, _, err = run(capsys, "pipeline", "--theory", fixtures / "two_arrow_inconsistent.theory")
    assert code == 1 and "certification" in err
