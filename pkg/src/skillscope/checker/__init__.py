"""Description-implementation consistency checking."""

from __future__ import annotations

from .engine import boundary_kind, check_flow_c2, check_node_c1, classify
from .model import (
    ChatGateway,
    GatewayConfig,
    HttpChatGateway,
    RateLimiter,
    check_with_model,
    check_with_model_safe,
    render_prompt,
)
from .report import (
    RULE_ENGINE,
    SUFFICIENT,
    UNCERTAIN,
    CheckReport,
    FlowFinding,
    NodeFinding,
    Summary,
    Verdict,
    parse_model_output,
    uncertain_report,
)
from .semantics import DeclaredSemantics, Lexicon, extract_declared_semantics, load_lexicon, split_sentences

__all__ = [
    "RULE_ENGINE",
    "SUFFICIENT",
    "UNCERTAIN",
    "ChatGateway",
    "CheckReport",
    "DeclaredSemantics",
    "FlowFinding",
    "GatewayConfig",
    "HttpChatGateway",
    "Lexicon",
    "NodeFinding",
    "RateLimiter",
    "Summary",
    "Verdict",
    "boundary_kind",
    "check_flow_c2",
    "check_node_c1",
    "check_with_model",
    "check_with_model_safe",
    "classify",
    "extract_declared_semantics",
    "load_lexicon",
    "parse_model_output",
    "render_prompt",
    "split_sentences",
    "uncertain_report",
]
