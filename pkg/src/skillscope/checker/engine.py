"""Deterministic rule engine for the two consistency conditions.

C1 asks whether each security node is covered by a declared capability.
C2 asks whether each flow edge crosses a security boundary that the
description never mentions.  The engine is monotone in the declared labels:
declaring more can only remove findings, never add them.
"""

from __future__ import annotations

import re
from typing import Sequence

from ..sitelex import lex, string_value
from ..skill import Description
from ..spg import INTRA_FLOW, Spg, SpgEdge, SpgNode
from ..taxonomy import SECRET_NAME, Taxonomy, load_taxonomy
from .report import (
    SUFFICIENT,
    CheckReport,
    FlowFinding,
    NodeFinding,
    Summary,
    uncertain_report,
)
from .semantics import DeclaredSemantics, Lexicon, extract_declared_semantics

SECRET = "SECRET_ACCESS"
FILE_READ = "FILE_READ"
EXTERNAL = frozenset({"NETWORK_ACCESS", "EXTERNAL_API"})
COMMAND = "SYSTEM_COMMAND"
ANCILLARY_CATEGORIES = frozenset({"OBSERVABILITY", "SECURITY_CONTROL", "INFRASTRUCTURE"})
ANCILLARY_LABELS = frozenset({"FW-STRUCTURE"})
CONFIG_LABELS = frozenset({"FR-CONFIG", "FW-CONFIG"})
WARNING_SHARE_LIMIT = 0.5
_MIME_TYPE = re.compile(r"^(?:application|text|image|audio|video|multipart|font|model)/[a-z0-9.+-]+$")


def _family(node: SpgNode) -> str:
    return "python" if node.file.endswith(".py") else "javascript"


def secret_like_target(node: SpgNode) -> bool:
    """True when the operation's arguments name something credential-like."""
    tokens = [t for t in lex(node.operation, _family(node)) if t.kind in ("name", "string")]
    return any(SECRET_NAME.search(t.text) for t in tokens[1:])


def literal_targets(node: SpgNode) -> list[str]:
    """Path- or URL-like string literals spelled out in the operation."""
    out = []
    for tok in lex(node.operation, _family(node)):
        if tok.kind != "string":
            continue
        value = string_value(tok.text).strip()
        if "://" in value or "/" in value or ("." in value and not value.startswith(".") and " " not in value):
            if value and "{}" not in value and "${" not in value and not _MIME_TYPE.match(value):
                out.append(value)
    return out


def is_input_source(node: SpgNode, taxonomy: Taxonomy) -> bool:
    return any(
        r.input_source and r.pattern == node.pattern and r.category == node.category for r in taxonomy.rules
    )


def is_ancillary(node: SpgNode) -> bool:
    return node.category in ANCILLARY_CATEGORIES or node.label_hint in ANCILLARY_LABELS


def _covering_label(node: SpgNode, declared: DeclaredSemantics) -> str | None:
    in_category = sorted(code or cat for cat, code in declared.labels if cat == node.category)
    if not in_category:
        return None
    if node.label_hint in in_category:
        return node.label_hint
    codes = [c for c in in_category if c != node.category]
    return codes[0] if codes else node.category


def check_node_c1(
    node: SpgNode,
    declared: DeclaredSemantics,
    *,
    description_text: str = "",
    taxonomy: Taxonomy | None = None,
    flow_sink: bool = False,
) -> NodeFinding:
    """Judge whether ``node`` is covered by a declared capability.

    Coverage needs the node's category among the declared labels and a
    compatible target: an operation handling a credential-like name is only
    covered by a secret or configuration capability.  ``flow_sink`` marks a
    node whose risk is judged through a boundary-crossing flow it receives.
    """
    taxonomy = taxonomy or load_taxonomy()
    label = _covering_label(node, declared)
    reason = ""
    if label is not None and node.category != SECRET and secret_like_target(node):
        if not (declared.declares(SECRET) or declared.codes & CONFIG_LABELS):
            reason = f"{label} is declared but the operation handles a credential-like value"
            label = None
    covered = label is not None
    where = f"{node.category} operation {node.operation!r}"
    if covered:
        missing = [t for t in literal_targets(node) if t.lower() not in description_text.lower()]
        hint_declared = node.label_hint is None or declared.declares_label(node.label_hint)
        if hint_declared and not missing:
            return NodeFinding(node.id, True, label, f"{where} is declared as {label}", False, "exact")
        detail = f"specific target {missing[0]!r}" if missing else f"finer label {node.label_hint}"
        return NodeFinding(node.id, True, label, f"{where} is within {label} but adds {detail}", False, "coarse")
    reason = reason or f"no declared capability covers {node.category}"
    if is_input_source(node, taxonomy):
        return NodeFinding(node.id, False, None, f"{where} only takes input ({reason})", False, "neutral")
    if is_ancillary(node):
        return NodeFinding(node.id, False, None, f"{where} is supporting behavior ({reason})", False, "ancillary")
    if flow_sink:
        return NodeFinding(node.id, False, None, f"{where} is judged by the flow into it ({reason})", False, "flow")
    return NodeFinding(node.id, False, None, f"{where}: {reason}", True, None)


def boundary_kind(source: str, sink: str) -> str | None:
    """The security boundary a source->sink category pair crosses, if any."""
    if source == SECRET and sink in EXTERNAL:
        return "SecretToExternal"
    if source == FILE_READ and sink == COMMAND:
        return "InputToExec"
    if source == FILE_READ and sink in EXTERNAL:
        return "LocalToExternal"
    return None


def check_flow_c2(
    edge: SpgEdge,
    endpoints: tuple[SpgNode, SpgNode],
    declared: DeclaredSemantics,
    index: int = 0,
) -> FlowFinding:
    """Judge whether ``edge`` carries an undeclared boundary-crossing flow."""
    src, dst = endpoints
    kind = boundary_kind(src.category, dst.category)
    evidence = "intra" if edge.kind == INTRA_FLOW else "cross"
    pair = f"{src.category} -> {dst.category}"
    if kind is None:
        return FlowFinding(index, edge.src, edge.dst, False, False, "Other", f"{pair} stays within one domain", evidence)
    is_declared = (src.category, dst.category) in declared.flows or declared.co_declared(src.category, dst.category)
    strength = "" if evidence == "intra" else f" (cross-file {edge.kind} evidence, weaker than intra-file flow)"
    if is_declared:
        rationale = f"{kind} flow {pair} is declared{strength}"
    else:
        rationale = f"undeclared {kind} flow {src.operation!r} -> {dst.operation!r}{strength}"
    return FlowFinding(index, edge.src, edge.dst, True, is_declared, kind, rationale, evidence)


def _uncertain_cause(spg: Spg) -> str | None:
    files = spg.file_warnings
    if not files:
        return None
    warned = sum(1 for _, warnings in files if warnings)
    if warned / len(files) > WARNING_SHARE_LIMIT:
        return f"{warned} of {len(files)} analyzed files had parse warnings"
    return None


def _cause_summary(nodes: Sequence[SpgNode], node_results, flow_results) -> str:
    by_id = {n.id: n for n in nodes}
    parts = []
    for f in node_results:
        if f.flagged:
            n = by_id[f.node]
            parts.append(f"C1 undeclared {n.category} at {n.file}:{n.line} ({n.operation})")
    for f in flow_results:
        if f.flagged:
            s, t = by_id[f.source], by_id[f.target]
            parts.append(f"C2 undeclared {f.boundary_kind} flow {s.file}:{s.line} -> {t.file}:{t.line}")
    if parts:
        return "; ".join(parts)
    coarse = [f for f in node_results if f.granularity in ("coarse", "ancillary")]
    if coarse:
        return f"no violation; {len(coarse)} node(s) are more specific than the description"
    return "no violation; the description covers every security node"


def classify(
    spg: Spg | None,
    description: Description | str,
    taxonomy: Taxonomy | None = None,
    *,
    lexicon: Lexicon | None = None,
    skill_id: str | None = None,
    declared: DeclaredSemantics | None = None,
) -> CheckReport:
    """Rule-engine report for one skill.

    ``spg`` is None when no file could be analyzed, which yields an
    uncertain report, as does a graph where more than half of the files
    carried parse warnings.
    """
    taxonomy = taxonomy or load_taxonomy()
    skill_id = skill_id if skill_id is not None else (spg.skill_id if spg is not None else "")
    if spg is None:
        return uncertain_report(skill_id, "no implementation file could be analyzed")
    cause = _uncertain_cause(spg)
    if cause is not None:
        return uncertain_report(skill_id, cause)
    if declared is None:
        declared = extract_declared_semantics(description, taxonomy, lexicon)
    text = description.text if isinstance(description, Description) else description
    by_id = {n.id: n for n in spg.nodes}
    flow_results = tuple(
        check_flow_c2(e, (by_id[e.src], by_id[e.dst]), declared, i) for i, e in enumerate(spg.edges)
    )
    sinks = {f.target for f in flow_results if f.crosses_boundary}
    node_results = tuple(
        check_node_c1(n, declared, description_text=text, taxonomy=taxonomy, flow_sink=n.id in sinks)
        for n in spg.nodes
    )
    flagged = sum(f.flagged for f in node_results) + sum(f.flagged for f in flow_results)
    inconsistency = flagged > 0
    coarser = not inconsistency and any(f.granularity in ("coarse", "ancillary") for f in node_results)
    return CheckReport(
        skill_id=skill_id,
        evidence_validation=SUFFICIENT,
        declared=declared,
        node_results=node_results,
        flow_results=flow_results,
        summary=Summary(len(node_results), sum(f.crosses_boundary for f in flow_results), flagged),
        inconsistency=inconsistency,
        coarser_description=coarser,
        cause_summary=_cause_summary(spg.nodes, node_results, flow_results),
    )
