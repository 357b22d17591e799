"""Check reports: per-node and per-flow findings plus the derived verdict."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Any, Mapping

import jsonschema

from ..errors import MalformedModelOutput
from .semantics import DeclaredSemantics

SUFFICIENT = "sufficient"
UNCERTAIN = "graph_extraction_uncertain"
RULE_ENGINE = "RuleEngine"

BOUNDARY_KINDS = ("SecretToExternal", "InputToExec", "LocalToExternal", "Other")


class Verdict(str, enum.Enum):
    INCONSISTENT = "Inconsistent"
    COARSER = "CoarserDescription"
    CONSISTENT = "Consistent"
    UNCERTAIN = "Uncertain"


@dataclass(frozen=True)
class NodeFinding:
    """Coverage of one SPG node by the declared capabilities.

    ``granularity`` says how closely the description matches when the node
    is not flagged: ``exact``, ``coarse`` (covered, but the code is more
    specific than the text), ``ancillary`` (supporting behavior that is
    never a violation on its own), ``neutral`` (plain input intake) or
    ``flow`` (judged through the boundary-crossing flow it feeds).
    """

    node: int
    covered: bool
    covering_label: str | None
    rationale: str
    flagged: bool = False
    granularity: str | None = None

    def __post_init__(self) -> None:
        if self.covered != (self.covering_label is not None):
            raise ValueError("covered must agree with covering_label")

    def to_json(self) -> dict[str, Any]:
        return {
            "node": self.node,
            "covered": self.covered,
            "covering_label": self.covering_label,
            "rationale": self.rationale,
            "flagged": self.flagged,
            "granularity": self.granularity,
        }


@dataclass(frozen=True)
class FlowFinding:
    """Boundary analysis of one SPG edge; ``edge`` indexes the sorted edge list."""

    edge: int
    source: int
    target: int
    crosses_boundary: bool
    declared: bool
    boundary_kind: str
    rationale: str
    evidence: str = "intra"

    @property
    def flagged(self) -> bool:
        return self.crosses_boundary and not self.declared

    def to_json(self) -> dict[str, Any]:
        return {
            "edge": self.edge,
            "source": self.source,
            "target": self.target,
            "crosses_boundary": self.crosses_boundary,
            "declared": self.declared,
            "boundary_kind": self.boundary_kind,
            "rationale": self.rationale,
            "evidence": self.evidence,
            "flagged": self.flagged,
        }


@dataclass(frozen=True)
class Summary:
    relevant_nodes: int
    relevant_flows: int
    flagged: int

    def to_json(self) -> dict[str, int]:
        return {"relevant_nodes": self.relevant_nodes, "relevant_flows": self.relevant_flows, "flagged": self.flagged}


@dataclass(frozen=True)
class CheckReport:
    skill_id: str
    evidence_validation: str
    declared: DeclaredSemantics
    node_results: tuple[NodeFinding, ...]
    flow_results: tuple[FlowFinding, ...]
    summary: Summary
    inconsistency: bool
    coarser_description: bool
    cause_summary: str
    backend: str = RULE_ENGINE

    @property
    def verdict(self) -> Verdict:
        """Uncertain evidence wins, then Inconsistent, then CoarserDescription."""
        if self.evidence_validation == UNCERTAIN:
            return Verdict.UNCERTAIN
        if self.inconsistency:
            return Verdict.INCONSISTENT
        if self.coarser_description:
            return Verdict.COARSER
        return Verdict.CONSISTENT

    @property
    def flagged_nodes(self) -> tuple[NodeFinding, ...]:
        return tuple(f for f in self.node_results if f.flagged)

    @property
    def flagged_flows(self) -> tuple[FlowFinding, ...]:
        return tuple(f for f in self.flow_results if f.flagged)

    def to_json(self) -> dict[str, Any]:
        return {
            "skill_id": self.skill_id,
            "backend": self.backend,
            "verdict": self.verdict.value,
            "evidence_validation": self.evidence_validation,
            "declared_semantics": self.declared.to_json(),
            "node_results": [f.to_json() for f in self.node_results],
            "flow_results": [f.to_json() for f in self.flow_results],
            "summary": self.summary.to_json(),
            "inconsistency": self.inconsistency,
            "coarser_description": self.coarser_description,
            "cause_summary": self.cause_summary,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def uncertain_report(skill_id: str, cause: str, backend: str = RULE_ENGINE) -> CheckReport:
    """A report that makes no claim beyond "the evidence could not be judged"."""
    return CheckReport(
        skill_id=skill_id,
        evidence_validation=UNCERTAIN,
        declared=DeclaredSemantics(),
        node_results=(),
        flow_results=(),
        summary=Summary(0, 0, 0),
        inconsistency=False,
        coarser_description=False,
        cause_summary=cause,
        backend=backend,
    )


# -- model output ---------------------------------------------------------------

_LABEL_ITEM = {
    "type": "object",
    "required": ["category"],
    "properties": {"category": {"type": "string"}, "label": {"type": ["string", "null"]}},
}
MODEL_OUTPUT_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": [
        "evidence_validation",
        "declared_semantics",
        "node_results",
        "flow_results",
        "summary",
        "inconsistency",
        "coarser_description",
        "cause_summary",
    ],
    "properties": {
        "evidence_validation": {"enum": [SUFFICIENT, UNCERTAIN]},
        "declared_semantics": {
            "type": "object",
            "required": ["labels", "flows"],
            "properties": {
                "labels": {"type": "array", "items": _LABEL_ITEM},
                "flows": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["source", "sink"],
                        "properties": {"source": {"type": "string"}, "sink": {"type": "string"}},
                    },
                },
                "evidence": {"type": "object", "additionalProperties": {"type": "string"}},
            },
        },
        "node_results": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["node", "covered", "covering_label", "rationale"],
                "properties": {
                    "node": {"type": "integer"},
                    "covered": {"type": "boolean"},
                    "covering_label": {"type": ["string", "null"]},
                    "rationale": {"type": "string"},
                },
            },
        },
        "flow_results": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["edge", "crosses_boundary", "declared", "boundary_kind", "rationale"],
                "properties": {
                    "edge": {"type": "integer", "minimum": 0},
                    "crosses_boundary": {"type": "boolean"},
                    "declared": {"type": "boolean"},
                    "boundary_kind": {"enum": list(BOUNDARY_KINDS)},
                    "rationale": {"type": "string"},
                },
            },
        },
        "summary": {
            "type": "object",
            "required": ["relevant_nodes", "relevant_flows", "flagged"],
            "properties": {
                "relevant_nodes": {"type": "integer", "minimum": 0},
                "relevant_flows": {"type": "integer", "minimum": 0},
                "flagged": {"type": "integer", "minimum": 0},
            },
        },
        "inconsistency": {"type": "boolean"},
        "coarser_description": {"type": "boolean"},
        "cause_summary": {"type": "string"},
    },
}


def _strip_fences(raw: str) -> str:
    text = raw.strip()
    if text.startswith("```"):
        text = text.split("\n", 1)[1] if "\n" in text else ""
        if text.rstrip().endswith("```"):
            text = text.rstrip()[:-3]
    return text.strip()


def parse_model_output(
    raw: str,
    skill_id: str,
    backend: str,
    edges: tuple[tuple[int, int], ...] = (),
) -> CheckReport:
    """Validate a model's JSON answer and turn it into a :class:`CheckReport`.

    ``edges`` lists (source, target) node ids in sorted edge order so flow
    results can be tied back to graph edges.  Any schema violation raises
    :class:`MalformedModelOutput` carrying the raw text.
    """
    try:
        doc = json.loads(_strip_fences(raw))
    except ValueError as exc:
        raise MalformedModelOutput(f"model output is not JSON: {exc}", raw) from exc
    try:
        jsonschema.validate(doc, MODEL_OUTPUT_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise MalformedModelOutput(f"model output violates the report schema: {exc.message}", raw) from exc
    if doc["inconsistency"] and doc["summary"]["flagged"] < 1 and doc["evidence_validation"] == SUFFICIENT:
        raise MalformedModelOutput("model output claims an inconsistency with no flagged finding", raw)
    nodes = []
    for item in doc["node_results"]:
        label = item["covering_label"]
        covered = bool(item["covered"]) and label is not None
        nodes.append(
            NodeFinding(
                node=item["node"],
                covered=covered,
                covering_label=label if covered else None,
                rationale=item["rationale"],
                flagged=not covered,
            )
        )
    flows = []
    for item in doc["flow_results"]:
        index = item["edge"]
        if edges and index >= len(edges):
            raise MalformedModelOutput(f"flow result references unknown edge {index}", raw)
        src, dst = edges[index] if edges else (-1, -1)
        flows.append(
            FlowFinding(
                edge=index,
                source=src,
                target=dst,
                crosses_boundary=item["crosses_boundary"],
                declared=item["declared"],
                boundary_kind=item["boundary_kind"],
                rationale=item["rationale"],
            )
        )
    summary = doc["summary"]
    return CheckReport(
        skill_id=skill_id,
        evidence_validation=doc["evidence_validation"],
        declared=DeclaredSemantics.from_json(doc["declared_semantics"]),
        node_results=tuple(nodes),
        flow_results=tuple(flows),
        summary=Summary(summary["relevant_nodes"], summary["relevant_flows"], summary["flagged"]),
        inconsistency=doc["inconsistency"],
        coarser_description=doc["coarser_description"],
        cause_summary=doc["cause_summary"],
        backend=backend,
    )
