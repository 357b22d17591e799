from __future__ import annotations

import json
import shutil
from pathlib import Path

import pytest
from click.testing import CliRunner

from skillscope.checker.model import ENV_ENDPOINT, ENV_KEY, ENV_NAME
from skillscope.cli import cli

from .conftest import FIXTURES, GOLDEN


def run(*args, env=None):
    result = CliRunner().invoke(cli, [str(a) for a in args], env=env, catch_exceptions=False)
    return result


def tree(root: Path) -> dict[str, bytes]:
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def write_manifest(path: Path, urls: list[str]) -> Path:
    path.write_text("".join(json.dumps({"url": u, "source": "s"}) + "\n" for u in urls), encoding="utf-8")
    return path


# -- corpus ---------------------------------------------------------------------------------


def test_corpus_groups(tmp_path):
    manifest = write_manifest(tmp_path / "m.jsonl", [
        "https://github.com/a/r/tree/main/.claude/skills/one",
        "https://github.com/a/r/tree/main/.claude/skills/two/",
        "https://github.com/b/r",
        "https://github.com/c/r/tree/dev/tools/pdf",
    ])
    result = run("corpus", manifest, "--out", tmp_path / "out")
    assert result.exit_code == 0, result.output
    report = json.loads((tmp_path / "out" / "dedup_report.json").read_text())
    assert [g["key"] for g in report["groups"]] == ["a/r@main:.claude/skills", "b/r@HEAD:", "c/r@dev:tools/pdf"]
    assert report["rejects"] == []


def test_corpus_empty_manifest(tmp_path):
    manifest = write_manifest(tmp_path / "m.jsonl", [])
    result = run("corpus", manifest, "--out", tmp_path / "out")
    assert result.exit_code == 0
    assert json.loads((tmp_path / "out" / "dedup_report.json").read_text()) == {"groups": [], "rejects": []}


def test_corpus_bad_url_is_a_reject(tmp_path):
    manifest = write_manifest(tmp_path / "m.jsonl", ["https://github.com/a/r", "not a url"])
    result = run("corpus", manifest, "--out", tmp_path / "out")
    assert result.exit_code == 0
    report = json.loads((tmp_path / "out" / "dedup_report.json").read_text())
    assert len(report["groups"]) == 1 and len(report["rejects"]) == 1


def test_corpus_funnel(tmp_path):
    manifest = write_manifest(tmp_path / "m.jsonl", ["https://github.com/a/r", "https://github.com/b/r"])
    from skillscope.corpus import dedup, load_manifest, target_dirname

    groups = dedup(load_manifest(manifest)).groups
    mat = tmp_path / "mat"
    shutil.copytree(FIXTURES / "motivating_skill", mat / target_dirname(groups[0].key))
    result = run("corpus", manifest, "--out", tmp_path / "out", "--materialized", mat)
    assert result.exit_code == 0
    funnel = json.loads((tmp_path / "out" / "funnel.json").read_text())
    assert (funnel["raw"], funnel["deduplicated"], funnel["programmatic"]) == (2, 2, 1)


def test_corpus_malformed_manifest(tmp_path):
    bad = tmp_path / "m.jsonl"
    bad.write_text("{nope\n")
    assert run("corpus", bad, "--out", tmp_path / "out").exit_code == 2


# -- scan -------------------------------------------------------------------------------------


def test_scan_three_skills(three_skill_root, tmp_path):
    (three_skill_root / "docs").mkdir()
    out = tmp_path / "out"
    result = run("scan", three_skill_root, "--out", out, "--jobs", 2)
    assert result.exit_code == 0, result.output
    assert sorted(p.name for p in (out / "graphs").iterdir()) == [
        "coarser_skill.json", "consistent_skill.json", "motivating_skill.json",
    ]
    assert "motivating_skill: nodes=2 edges=1 skipped=0" in result.output
    summary = json.loads((out / "scan_summary.json").read_text())
    assert [d["directory"] for d in summary["skipped_directories"]] == ["docs"]
    assert (out / "graphs" / "motivating_skill.json").read_text() == (GOLDEN / "motivating_skill.code_graph.json").read_text()


def test_scan_go_skill(tmp_path):
    root = tmp_path / "skills"
    shutil.copytree(FIXTURES / "go_skill", root / "go_skill")
    out = tmp_path / "out"
    result = run("scan", root, "--out", out)
    assert result.exit_code == 0
    assert "go_skill: AllFilesSkipped" in result.output
    assert not (out / "graphs" / "go_skill.json").exists()
    summary = json.loads((out / "scan_summary.json").read_text())
    assert summary["skills"][0]["status"] == "AllFilesSkipped"


def test_scan_single_skill_root(tmp_path):
    result = run("scan", FIXTURES / "golden_skill", "--out", tmp_path / "out")
    assert result.exit_code == 0
    assert (tmp_path / "out" / "graphs" / "golden_skill.json").read_text() == (
        GOLDEN / "golden_skill.code_graph.json"
    ).read_text()


def test_scan_unreadable_root(tmp_path):
    assert run("scan", tmp_path / "missing", "--out", tmp_path / "out").exit_code == 2


def test_bad_rules_file(tmp_path, three_skill_root):
    rules = tmp_path / "rules.json"
    rules.write_text("{}")
    assert run("scan", three_skill_root, "--out", tmp_path / "out", "--rules", rules).exit_code == 2


# -- check ------------------------------------------------------------------------------------


def test_check_summary(three_skill_root, tmp_path):
    out = tmp_path / "out"
    result = run("check", three_skill_root, "--out", out)
    assert result.exit_code == 0, result.output
    assert "summary Inconsistent=1 CoarserDescription=1 Consistent=1 Uncertain=0" in result.output
    counts = json.loads((out / "check_summary.json").read_text())["counts"]
    assert counts == {"Inconsistent": 1, "CoarserDescription": 1, "Consistent": 1, "Uncertain": 0}
    report = json.loads((out / "reports" / "motivating_skill.json").read_text())
    assert report["verdict"] == "Inconsistent" and report["backend"] == "RuleEngine"
    preds = [json.loads(l) for l in (out / "predictions.jsonl").read_text().splitlines()]
    assert {p["skill_id"]: p["verdict"] for p in preds}["coarser_skill"] == "CoarserDescription"


def test_check_fail_flag(three_skill_root, tmp_path):
    assert run("check", three_skill_root, "--out", tmp_path / "o", "--fail-on-inconsistency").exit_code == 3
    shutil.rmtree(three_skill_root / "motivating_skill")
    assert run("check", three_skill_root, "--out", tmp_path / "p", "--fail-on-inconsistency").exit_code == 0


def test_check_model_backend_needs_env(three_skill_root, tmp_path):
    env = {ENV_ENDPOINT: "", ENV_NAME: "", ENV_KEY: ""}
    result = run("check", three_skill_root, "--out", tmp_path / "o", "--backend", "model", env=env)
    assert result.exit_code == 2
    assert ENV_ENDPOINT in result.output


def test_check_go_skill_is_uncertain(tmp_path):
    result = run("check", FIXTURES / "go_skill", "--out", tmp_path / "o")
    assert result.exit_code == 0
    assert "Uncertain=1" in result.output


def test_check_lexicon_override(tmp_path, three_skill_root):
    lex = tmp_path / "lex.json"
    lex.write_text(json.dumps({"labels": {"SA-KEY": [r"\bfixed analysis\b"], "NA-SERVICE": [r"\bworkflow\b"]}}))
    result = run("check", three_skill_root / "motivating_skill", "--out", tmp_path / "o", "--lexicon", lex)
    assert result.exit_code == 0
    assert "Inconsistent=0" in result.output


# -- eval --------------------------------------------------------------------------------------


def test_eval_counts_file(tmp_path):
    counts = tmp_path / "counts.json"
    counts.write_text(json.dumps({"tp": 413, "fp": 74, "fn": 15}))
    result = run("eval", counts, "--out", tmp_path / "o")
    assert result.exit_code == 0
    assert "precision=84.8% recall=96.5% f1=90.3%" in result.output
    doc = json.loads((tmp_path / "o" / "metrics.json").read_text())
    assert doc["percent"] == {"precision": "84.8", "recall": "96.5", "f1": "90.3"}


def _jsonl(path: Path, rows) -> Path:
    path.write_text("".join(json.dumps(r) + "\n" for r in rows))
    return path


def test_eval_perfect_predictions(tmp_path):
    gt = _jsonl(tmp_path / "gt.jsonl", [{"skill_id": "a", "class": "Inconsistent"}, {"skill_id": "b", "class": "Consistent"}])
    pr = _jsonl(tmp_path / "p.jsonl", [{"skill_id": "a", "verdict": "Inconsistent"}, {"skill_id": "b", "verdict": "Consistent"}])
    result = run("eval", pr, gt, "--out", tmp_path / "o")
    assert result.exit_code == 0
    doc = json.loads((tmp_path / "o" / "metrics.json").read_text())
    assert (doc["precision"], doc["recall"], doc["f1"]) == (1.0, 1.0, 1.0)
    assert doc["confusion"] == [[1, 0, 0], [0, 0, 0], [0, 0, 1]]


def test_eval_missing_prediction(tmp_path):
    gt = _jsonl(tmp_path / "gt.jsonl", [{"skill_id": "a", "class": "Inconsistent"}, {"skill_id": "b", "class": "Consistent"}])
    pr = _jsonl(tmp_path / "p.jsonl", [{"skill_id": "a", "verdict": "Inconsistent"}])
    result = run("eval", pr, gt, "--out", tmp_path / "o")
    assert result.exit_code == 2 and "LabelMismatch" in result.output
    assert not (tmp_path / "o" / "metrics.json").exists()


def test_eval_needs_ground_truth_for_predictions(tmp_path):
    pr = _jsonl(tmp_path / "p.jsonl", [{"skill_id": "a", "verdict": "Inconsistent"}])
    assert run("eval", pr, "--out", tmp_path / "o").exit_code == 2


# -- gen-corpus and the full loop ----------------------------------------------------------------


def test_gen_corpus_spec_forms(tmp_path):
    assert run("gen-corpus", "--out", tmp_path / "a", "--spec", "IC1=2,LU3=1").exit_code == 0
    assert len((tmp_path / "a" / "ground_truth.jsonl").read_text().splitlines()) == 3
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"IC1": 2, "LU3": 1}))
    assert run("gen-corpus", "--out", tmp_path / "b", "--spec", spec).exit_code == 0
    assert tree(tmp_path / "a") == tree(tmp_path / "b")
    assert run("gen-corpus", "--out", tmp_path / "c", "--spec", "IC9=1").exit_code == 2
    assert run("gen-corpus", "--out", tmp_path / "c", "--spec", "IC1").exit_code == 2


def test_closed_loop_through_cli(tmp_path):
    corpus, out = tmp_path / "corpus", tmp_path / "out"
    assert run("gen-corpus", "--out", corpus, "--seed", 7).exit_code == 0
    assert run("check", corpus, "--out", out).exit_code == 0
    result = run("eval", out / "predictions.jsonl", corpus / "ground_truth.jsonl", "--out", out)
    assert result.exit_code == 0
    doc = json.loads((out / "metrics.json").read_text())
    assert (doc["precision"], doc["recall"]) == (1.0, 1.0)
    assert doc["confusion"] == [[18, 0, 0], [0, 18, 0], [0, 0, 6]]


@pytest.mark.parametrize("command", ["scan", "check"])
def test_outputs_are_idempotent(command, three_skill_root, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run(command, three_skill_root, "--out", a, "--jobs", 1)
    run(command, three_skill_root, "--out", b, "--jobs", 3)
    run(command, three_skill_root, "--out", a, "--jobs", 2)
    assert tree(a) == tree(b)


def test_version_and_help():
    assert run("--version").output.startswith("skillscope")
    assert "gen-corpus" in run("--help").output
