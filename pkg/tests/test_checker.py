from __future__ import annotations

import itertools
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from skillscope.checker import classify, extract_declared_semantics
from skillscope.checker.engine import boundary_kind, check_flow_c2, check_node_c1
from skillscope.checker.report import UNCERTAIN, NodeFinding, Verdict, uncertain_report
from skillscope.checker.semantics import DeclaredSemantics, load_lexicon, split_sentences
from skillscope.skill import ImplementationFile, Skill, discover_skill, parse_skill_md
from skillscope.spg import INTRA_FLOW, Spg, SpgEdge, SpgNode, build_skill_spg
from skillscope.taxonomy import load_taxonomy

from .conftest import FIXTURES, PROPERTY_CASES
from .test_spg import ALL_FILES, skills

TAXONOMY = load_taxonomy()
ALL_LABELS = sorted({(lab.category, lab.code) for lab in TAXONOMY.labels} | {(c, None) for c in TAXONOMY.category_ids},
                    key=lambda x: (x[0], x[1] or ""))


def node(i, category, operation, hint=None, pattern="x(", file="a.py", line=1):
    return SpgNode(i, file, line, 1, category, (category,), hint, pattern, operation)


def skill_of(description: str, files: dict[str, str]) -> Skill:
    md = f"---\nname: t\ndescription: {description}\n---\n"
    return Skill("t", Path("."), parse_skill_md(md), tuple(ImplementationFile.from_text(p, t) for p, t in files.items()))


def fixture_verdict(name: str) -> Verdict:
    skill = discover_skill(FIXTURES / name, base=FIXTURES)
    return classify(build_skill_spg(skill, TAXONOMY), skill.description, TAXONOMY).verdict


# -- declared semantics -------------------------------------------------------------


def test_motivating_description_declares_reads_only():
    d = extract_declared_semantics("Read target files and run a fixed analysis workflow.", TAXONOMY)
    assert d.declares("FILE_READ")
    assert not d.declares("SECRET_ACCESS")
    assert not d.declares("NETWORK_ACCESS")


def test_report_description_declares_read_and_write():
    d = extract_declared_semantics("read local files and produce a summary report", TAXONOMY)
    assert {"FILE_READ", "FILE_WRITE"} <= d.categories
    assert d.declares_label("FW-OUTPUT")


def test_empty_description_declares_nothing():
    assert extract_declared_semantics("", TAXONOMY) == DeclaredSemantics()


def test_connective_in_one_sentence_declares_flow():
    d = extract_declared_semantics("Executes shell commands on provided input.", TAXONOMY)
    assert ("FILE_READ", "SYSTEM_COMMAND") in d.flows
    d = extract_declared_semantics("Reads the config file. Calls the API.", TAXONOMY)
    assert d.flows == frozenset()


def test_every_label_and_flow_is_in_taxonomy():
    text = "Uses your API key to call the weather service, writes logs and installs packages with pip."
    d = extract_declared_semantics(text, TAXONOMY)
    codes = {lab.code for lab in TAXONOMY.labels}
    assert all(cat in TAXONOMY.category_ids and (code is None or code in codes) for cat, code in d.labels)
    assert all(s in d.categories and t in d.categories for s, t in d.flows)
    assert d.evidence


def test_lexicon_override(tmp_path):
    lex = load_lexicon({"labels": {"SA-KEY": [r"\bmagic beans\b"]}})
    assert extract_declared_semantics("Counts magic beans.", TAXONOMY, lex).declares_label("SA-KEY")
    assert not extract_declared_semantics("Counts magic beans.", TAXONOMY).declares_label("SA-KEY")


def test_split_sentences():
    assert split_sentences("One. Two!\n\n- three\n- four") == ["One.", "Two!", "three", "four"]


# -- C1 -------------------------------------------------------------------------------


def test_secret_node_not_covered_by_file_read():
    declared = extract_declared_semantics("Read target files and run a fixed analysis workflow.", TAXONOMY)
    f = check_node_c1(node(0, "SECRET_ACCESS", "os.getenv('API_KEY')", "SA-KEY", "os.getenv("), declared, taxonomy=TAXONOMY)
    assert not f.covered and f.flagged and f.covering_label is None


def test_output_write_is_covered_but_coarse():
    declared = extract_declared_semantics("read local files and produce a summary report", TAXONOMY)
    n = node(0, "FILE_WRITE", "open('output/report.json', 'w')", "FW-OUTPUT", "open(")
    f = check_node_c1(n, declared, description_text="read local files and produce a summary report", taxonomy=TAXONOMY)
    assert f.covered and not f.flagged
    assert f.granularity == "coarse"


def test_exact_label_is_covered():
    declared = DeclaredSemantics(frozenset({("FILE_WRITE", "FW-OUTPUT")}))
    f = check_node_c1(node(0, "FILE_WRITE", "fh.write(text)", "FW-OUTPUT"), declared, taxonomy=TAXONOMY)
    assert f.covered and f.covering_label == "FW-OUTPUT" and f.granularity == "exact"


def test_credential_target_needs_secret_capability():
    declared = DeclaredSemantics(frozenset({("FILE_READ", "FR-DATA")}))
    f = check_node_c1(node(0, "FILE_READ", "open('~/.aws/credentials')", None, "open("), declared, taxonomy=TAXONOMY)
    assert not f.covered and f.flagged
    more = declared.with_labels({("SECRET_ACCESS", "SA-KEY")})
    assert check_node_c1(node(0, "FILE_READ", "open('~/.aws/credentials')", None, "open("), more, taxonomy=TAXONOMY).covered


def test_supporting_behavior_is_not_flagged():
    f = check_node_c1(node(0, "OBSERVABILITY", "logging.info('x')"), DeclaredSemantics(), taxonomy=TAXONOMY)
    assert not f.covered and not f.flagged and f.granularity == "ancillary"


def test_finding_invariant():
    with pytest.raises(ValueError):
        NodeFinding(0, True, None, "bad")


# -- C2 ---------------------------------------------------------------------------------


def test_secret_to_post_is_flagged():
    declared = extract_declared_semantics("Read target files and run a fixed analysis workflow.", TAXONOMY)
    ends = (node(0, "SECRET_ACCESS", "os.getenv('API_KEY')"), node(1, "NETWORK_ACCESS", "requests.post(u)"))
    f = check_flow_c2(SpgEdge(0, 1, INTRA_FLOW), ends, declared)
    assert f.boundary_kind == "SecretToExternal" and f.crosses_boundary and f.flagged


def test_read_to_write_crosses_nothing():
    ends = (node(0, "FILE_READ", "open(p)"), node(1, "FILE_WRITE", "open(q, 'w')"))
    f = check_flow_c2(SpgEdge(0, 1, INTRA_FLOW), ends, DeclaredSemantics())
    assert not f.crosses_boundary and not f.flagged and f.boundary_kind == "Other"


def test_declared_shell_flow_not_flagged():
    declared = extract_declared_semantics("Executes shell commands on provided input.", TAXONOMY)
    ends = (node(0, "FILE_READ", "sys.argv[1]"), node(1, "SYSTEM_COMMAND", "subprocess.run(cmd, shell=True)"))
    f = check_flow_c2(SpgEdge(0, 1, INTRA_FLOW), ends, declared)
    assert f.boundary_kind == "InputToExec" and f.crosses_boundary and f.declared and not f.flagged


def test_cross_file_evidence_is_marked_weaker():
    ends = (node(0, "FILE_READ", "open(p)"), node(1, "EXTERNAL_API", "client.upload(d)", file="b.py"))
    f = check_flow_c2(SpgEdge(0, 1, "CrossCall"), ends, DeclaredSemantics())
    assert f.flagged and f.evidence == "cross" and "weaker" in f.rationale


@pytest.mark.parametrize(
    "src, dst, kind",
    [
        ("SECRET_ACCESS", "NETWORK_ACCESS", "SecretToExternal"),
        ("SECRET_ACCESS", "EXTERNAL_API", "SecretToExternal"),
        ("FILE_READ", "SYSTEM_COMMAND", "InputToExec"),
        ("FILE_READ", "NETWORK_ACCESS", "LocalToExternal"),
        ("FILE_READ", "EXTERNAL_API", "LocalToExternal"),
        ("FILE_WRITE", "NETWORK_ACCESS", None),
        ("NETWORK_ACCESS", "SECRET_ACCESS", None),
    ],
)
def test_boundary_table(src, dst, kind):
    assert boundary_kind(src, dst) == kind


# -- classify ---------------------------------------------------------------------------------


def test_fixture_verdicts():
    assert fixture_verdict("motivating_skill") is Verdict.INCONSISTENT
    assert fixture_verdict("coarser_skill") is Verdict.COARSER
    assert fixture_verdict("consistent_skill") is Verdict.CONSISTENT


def test_motivating_skill_has_one_finding_per_condition():
    skill = discover_skill(FIXTURES / "motivating_skill", base=FIXTURES)
    report = classify(build_skill_spg(skill, TAXONOMY), skill.description, TAXONOMY)
    assert len(report.flagged_nodes) == 1 and len(report.flagged_flows) == 1
    assert report.flagged_flows[0].boundary_kind == "SecretToExternal"
    assert report.summary.flagged == 2 and report.inconsistency


def test_empty_graph_with_nothing_declared_is_consistent():
    report = classify(Spg("e", file_warnings=(("a.py", ()),)), "", TAXONOMY)
    assert report.verdict is Verdict.CONSISTENT


def test_missing_graph_is_uncertain():
    report = classify(None, "anything", TAXONOMY, skill_id="x")
    assert report.verdict is Verdict.UNCERTAIN and report.evidence_validation == UNCERTAIN


def test_warning_share_threshold():
    bad = "def f(:\n    pass\nimport os\nos.getenv('A')\n"
    good = "import os\nos.getenv('B')\n"
    both_bad = build_skill_spg(skill_of("x", {"a.py": bad, "b.py": bad}), TAXONOMY)
    assert classify(both_bad, "x", TAXONOMY).verdict is Verdict.UNCERTAIN
    half = build_skill_spg(skill_of("x", {"a.py": bad, "b.py": good}), TAXONOMY)
    assert classify(half, "x", TAXONOMY).verdict is not Verdict.UNCERTAIN


def test_precedence_is_exclusive():
    base = uncertain_report("u", "why")
    assert base.verdict is Verdict.UNCERTAIN
    from dataclasses import replace

    for inc, coarse, ev in itertools.product([False, True], [False, True], ["sufficient", UNCERTAIN]):
        r = replace(base, inconsistency=inc, coarser_description=coarse, evidence_validation=ev)
        expected = (
            Verdict.UNCERTAIN if ev == UNCERTAIN
            else Verdict.INCONSISTENT if inc
            else Verdict.COARSER if coarse
            else Verdict.CONSISTENT
        )
        assert r.verdict is expected


# -- properties ---------------------------------------------------------------------------------


labels_strategy = st.lists(st.sampled_from(ALL_LABELS), max_size=8, unique=True)


@PROPERTY_CASES
@given(skills(), labels_strategy, labels_strategy)
def test_more_declared_labels_never_add_findings(files, small, extra):
    spg = build_skill_spg(skill_of("x", files), TAXONOMY)
    low = DeclaredSemantics(frozenset(small))
    high = low.with_labels(extra)
    r_low = classify(spg, "", TAXONOMY, declared=low)
    r_high = classify(spg, "", TAXONOMY, declared=high)
    for a, b in zip(r_low.node_results, r_high.node_results):
        assert not (b.flagged and not a.flagged)
    if r_low.verdict in (Verdict.CONSISTENT, Verdict.COARSER):
        assert r_high.verdict is not Verdict.INCONSISTENT
    assert r_high.summary.flagged <= r_low.summary.flagged


@PROPERTY_CASES
@given(skills(), st.sampled_from([
    "", "Reads files.", "Uploads data to the service API using your API key.",
    "Runs shell commands on provided input and writes a report.", "Logs progress.",
]))
def test_classify_is_deterministic_and_exclusive(files, text):
    spg = build_skill_spg(skill_of(text, files), TAXONOMY)
    a = classify(spg, text, TAXONOMY)
    b = classify(spg, text, TAXONOMY)
    assert a.dumps() == b.dumps()
    assert a.verdict in set(Verdict)
    if a.inconsistency:
        assert a.summary.flagged >= 1
    assert a.summary.flagged == len(a.flagged_nodes) + len(a.flagged_flows)


@PROPERTY_CASES
@given(st.sampled_from(["", "Reads files.", "Does things."]), labels_strategy)
def test_empty_graph_never_inconsistent(text, labels):
    spg = Spg("e", file_warnings=(("a.py", ()),))
    assert classify(spg, text, TAXONOMY).verdict is not Verdict.INCONSISTENT
    assert classify(spg, text, TAXONOMY, declared=DeclaredSemantics(frozenset(labels))).verdict is not Verdict.INCONSISTENT


def test_pool_is_nontrivial():
    spg = build_skill_spg(skill_of("", ALL_FILES), TAXONOMY)
    assert classify(spg, "", TAXONOMY).verdict is Verdict.INCONSISTENT
