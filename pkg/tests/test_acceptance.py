"""Acceptance criteria, one test each.

Every test prints a single ``ACCEPTANCE <n> PASS|FAIL`` line with its
runtime, so ``pytest -v tests/test_acceptance.py`` doubles as a report.
"""

from __future__ import annotations

import json
import random
import shutil
import time
from contextlib import contextmanager
from pathlib import Path

import pytest
from click.testing import CliRunner

from skillscope.checker import classify
from skillscope.checker.report import UNCERTAIN, Verdict
from skillscope.cli import cli
from skillscope.evaluation import Metrics, percent
from skillscope.ir import EdgeKind, FileIR, IrEdge, IrNode, NodeKind, analyze_file
from skillscope.pipeline import check_skill
from skillscope.skill import discover_skill
from skillscope.spg import build_skill_spg, discover_edges_bfs, dumps_spg, locate_security_nodes
from skillscope.taxonomy import load_taxonomy

from . import test_checker, test_corpus, test_spg
from .conftest import FIXTURES, GOLDEN
from .test_model import CANNED, StubGateway
from .test_oracle import closure

TAXONOMY = load_taxonomy()


@contextmanager
def criterion(capsys, number: int, title: str, budget: float | None = None):
    start = time.perf_counter()
    status, detail = "PASS", ""
    try:
        yield
        elapsed = time.perf_counter() - start
        if budget is not None and elapsed >= budget:
            status, detail = "FAIL", f" (over the {budget:g}s budget)"
            raise AssertionError(f"criterion {number} took {elapsed:.2f}s, budget {budget:g}s")
    except BaseException as exc:
        status = "FAIL"
        detail = detail or f" ({type(exc).__name__}: {exc})".splitlines()[0]
        raise
    finally:
        elapsed = time.perf_counter() - start
        with capsys.disabled():
            print(f"\nACCEPTANCE {number} {status} {title} [{elapsed:.2f}s]{detail}")


def _skill(name: str):
    return discover_skill(FIXTURES / name, base=FIXTURES)


def test_criterion_1_motivating_example(capsys):
    with criterion(capsys, 1, "motivating example is Inconsistent", budget=1.0):
        skill = _skill("motivating_skill")
        assert "Read target files and run a fixed analysis workflow" in skill.description.text
        code = "".join(f.content for f in skill.files)
        assert "os.getenv('API_KEY')" in code and "requests.post(" in code
        spg = build_skill_spg(skill, TAXONOMY)
        report = classify(spg, skill.description, TAXONOMY)
        assert report.verdict is Verdict.INCONSISTENT
        by_id = {n.id: n for n in spg.nodes}
        assert any(by_id[f.node].category == "SECRET_ACCESS" for f in report.flagged_nodes)
        assert any(f.boundary_kind == "SecretToExternal" for f in report.flagged_flows)


def test_criterion_2_coarser_description(capsys):
    with criterion(capsys, 2, "report writer is CoarserDescription", budget=1.0):
        skill = _skill("coarser_skill")
        assert "read local files and produce a summary report" in skill.description.text
        assert any("output/report.json" in f.content for f in skill.files)
        report = classify(build_skill_spg(skill, TAXONOMY), skill.description, TAXONOMY)
        assert report.verdict is Verdict.COARSER
        assert not report.inconsistency


def _random_ir(rng: random.Random) -> FileIR:
    n = rng.randint(1, 50)
    nodes = tuple(IrNode(i, NodeKind.CALL, i + 1, 1, i + 1, 2, f"f{i}()") for i in range(n))
    kinds = (EdgeKind.AST, EdgeKind.CFG, EdgeKind.DFG)
    edges = tuple(IrEdge(rng.randrange(n), rng.randrange(n), rng.choice(kinds)) for _ in range(rng.randint(0, 3 * n)))
    return FileIR("r.py", "python", nodes, edges)


def _oracle_edges(ir: FileIR, nodes) -> set[tuple[int, int]]:
    reach = closure(len(ir.nodes), [(e.src, e.dst) for e in ir.edges if e.kind is not EdgeKind.AST])
    return {(u.id, v.id) for u in nodes for v in nodes if u.id != v.id and reach[u.ir_node][v.ir_node]}


def test_criterion_3_bfs_matches_oracle(capsys):
    from skillscope.spg import SpgNode

    with criterion(capsys, 3, "BFS edges equal the closure oracle on 1000 random IRs and all fixtures", budget=60.0):
        rng = random.Random(20261016)
        for _ in range(1000):
            ir = _random_ir(rng)
            picks = rng.sample(range(len(ir.nodes)), k=min(len(ir.nodes), rng.randint(0, 10)))
            nodes = [
                SpgNode(i, "r.py", p + 1, 1, "FILE_READ", ("FILE_READ",), None, "f(", f"f{p}()", None, p)
                for i, p in enumerate(picks)
            ]
            got = {(e.src, e.dst) for e in discover_edges_bfs(ir, nodes)}
            assert got == _oracle_edges(ir, nodes)
        checked = 0
        for skill_dir in sorted(p for p in FIXTURES.iterdir() if (p / "SKILL.md").is_file()):
            for f in discover_skill(skill_dir).analyzable_files:
                if f.language.value not in ("python", "javascript", "typescript"):
                    continue
                ir = analyze_file(f)
                nodes = locate_security_nodes(ir, TAXONOMY)
                assert {(e.src, e.dst) for e in discover_edges_bfs(ir, nodes)} == _oracle_edges(ir, nodes)
                checked += 1
        assert checked >= 5


def test_criterion_4_golden_graph(capsys):
    with criterion(capsys, 4, "golden 3-file skill matches its committed graph byte for byte"):
        skill = _skill("golden_skill")
        assert len([f for f in skill.files if f.path.endswith(".py")]) == 3
        text = dumps_spg(build_skill_spg(skill, TAXONOMY))
        assert text == (GOLDEN / "golden_skill.code_graph.json").read_text(encoding="utf-8")
        doc = json.loads(text)
        assert len(doc["nodes"]) == 6
        kinds = {e["kind"] for e in doc["edges"]}
        assert {"CrossCall", "CrossPath"} <= kinds


def test_criterion_5_metric_arithmetic(capsys):
    with criterion(capsys, 5, "metric arithmetic at 0.1% rounding"):
        for counts, expected in (((413, 74, 15), ("84.8", "96.5", "90.3")), ((36, 5, 2), ("87.8", "94.7", "91.1"))):
            m = Metrics(*counts)
            assert tuple(str(percent(x)) for x in (m.precision, m.recall, m.f1)) == expected


def test_criterion_6_synthetic_closed_loop(capsys, tmp_path):
    with criterion(capsys, 6, "seed-7 synthetic corpus scores perfectly", budget=30.0):
        runner = CliRunner()
        corpus, out = tmp_path / "corpus", tmp_path / "out"
        spec = ",".join([f"IC{i}=3" for i in range(1, 7)] + [f"LU{i}=3" for i in range(1, 7)] + ["Consistent=6"])
        assert runner.invoke(cli, ["gen-corpus", "--seed", "7", "--spec", spec, "--out", str(corpus)]).exit_code == 0
        assert len([p for p in corpus.iterdir() if p.is_dir()]) == 42
        assert runner.invoke(cli, ["check", str(corpus), "--out", str(out)]).exit_code == 0
        result = runner.invoke(cli, ["eval", str(out / "predictions.jsonl"), str(corpus / "ground_truth.jsonl"), "--out", str(out)])
        assert result.exit_code == 0
        doc = json.loads((out / "metrics.json").read_text())
        assert doc["precision"] == 1.0 and doc["recall"] == 1.0
        confusion = doc["confusion"]
        assert confusion[0][1] == 0 and confusion[1][0] == 0


def test_criterion_7_invariant_suites(capsys):
    suites = [
        test_corpus.test_normalize_subpath_is_idempotent,
        test_corpus.test_dedup_is_permutation_invariant,
        test_checker.test_more_declared_labels_never_add_findings,
        test_spg.test_serialization_round_trip,
        test_spg.test_build_is_order_independent,
    ]
    with criterion(capsys, 7, "invariant property suites, 500 cases each"):
        for suite in suites:
            assert suite.hypothesis.inner_test is not None
            assert suite._hypothesis_internal_use_settings.max_examples >= 500
            suite()


def test_criterion_8_uncertain_path(capsys):
    with criterion(capsys, 8, "Go-only skill and uncertain model status are Uncertain"):
        _, report = check_skill(_skill("go_skill"), TAXONOMY)
        assert report.verdict is Verdict.UNCERTAIN and report.evidence_validation == UNCERTAIN
        skill = _skill("motivating_skill")
        reply = json.dumps(dict(CANNED, evidence_validation=UNCERTAIN))
        _, report = check_skill(skill, TAXONOMY, gateway=StubGateway(reply))
        assert report.verdict is Verdict.UNCERTAIN and report.evidence_validation == UNCERTAIN
