"""Per-file flow intermediate representation.

A :class:`FileIR` holds every statement and interesting expression of one
source file as an :class:`IrNode`, linked by three edge kinds:

``Ast``
    syntactic containment, parent to child;
``Cfg``
    control flow between statement-level nodes;
``Dfg``
    data flow: definitions to uses, sub-expressions to the expression that
    consumes their value, and call arguments into local callees.

Node ids are assigned in source pre-order, so the nodes of a function body
form one contiguous id range starting at the function's own node.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from ..errors import UnknownNode

MAX_VISITED = 100_000
MAX_DEPTH = 10_000


class NodeKind(str, enum.Enum):
    STATEMENT = "Statement"
    CALL = "CallExpr"
    MEMBER = "MemberAccess"
    ASSIGN = "Assign"
    PARAM = "Param"
    LITERAL = "Literal"
    FUNCTION = "FunctionDef"
    OTHER = "Other"


class EdgeKind(str, enum.Enum):
    AST = "Ast"
    CFG = "Cfg"
    DFG = "Dfg"


FLOW_KINDS = frozenset({EdgeKind.CFG, EdgeKind.DFG})


@dataclass(frozen=True)
class IrNode:
    id: int
    kind: NodeKind
    line: int
    col: int
    end_line: int
    end_col: int
    rendering: str
    function: str | None = None
    value: str | None = None  # decoded text of string literals

    @property
    def span(self) -> tuple[int, int, int, int]:
        return (self.line, self.col, self.end_line, self.end_col)


@dataclass(frozen=True, order=True)
class IrEdge:
    src: int
    dst: int
    kind: EdgeKind


@dataclass(frozen=True)
class ImportBinding:
    """``local`` names ``symbol`` of ``module`` (``symbol`` is None for whole-module imports)."""

    local: str
    module: str
    symbol: str | None
    node: int


@dataclass(frozen=True)
class FunctionInfo:
    name: str
    node: int
    first: int
    last: int
    params: tuple[str, ...]
    top_level: bool
    method: bool = False

    def contains(self, node_id: int) -> bool:
        return self.first <= node_id <= self.last


@dataclass(frozen=True)
class FileIR:
    file: str
    language: str
    nodes: tuple[IrNode, ...]
    edges: tuple[IrEdge, ...]
    imports: tuple[ImportBinding, ...] = ()
    call_sites: tuple[tuple[int, str], ...] = ()
    functions: tuple[FunctionInfo, ...] = ()
    receivers: Mapping[int, int] = field(default_factory=dict)
    warnings: tuple[str, ...] = ()
    # exported name -> local name, for modules that rename on export
    exports: Mapping[str, str] = field(default_factory=dict)
    _succ: Mapping[EdgeKind, Mapping[int, tuple[int, ...]]] = field(
        init=False, repr=False, compare=False
    )
    _pred: Mapping[EdgeKind, Mapping[int, tuple[int, ...]]] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        succ: dict[EdgeKind, dict[int, list[int]]] = {k: {} for k in EdgeKind}
        pred: dict[EdgeKind, dict[int, list[int]]] = {k: {} for k in EdgeKind}
        for e in self.edges:
            succ[e.kind].setdefault(e.src, []).append(e.dst)
            pred[e.kind].setdefault(e.dst, []).append(e.src)
        object.__setattr__(self, "_succ", {k: {n: tuple(v) for n, v in m.items()} for k, m in succ.items()})
        object.__setattr__(self, "_pred", {k: {n: tuple(v) for n, v in m.items()} for k, m in pred.items()})

    def node(self, node_id: int) -> IrNode:
        if not 0 <= node_id < len(self.nodes):
            raise UnknownNode(node_id)
        return self.nodes[node_id]

    def successors(self, node_id: int, kinds: Iterable[EdgeKind] = FLOW_KINDS) -> list[int]:
        out: list[int] = []
        for k in kinds:
            out.extend(self._succ[EdgeKind(k)].get(node_id, ()))
        return out

    def predecessors(self, node_id: int, kinds: Iterable[EdgeKind] = FLOW_KINDS) -> list[int]:
        out: list[int] = []
        for k in kinds:
            out.extend(self._pred[EdgeKind(k)].get(node_id, ()))
        return out

    def function_at(self, node_id: int) -> FunctionInfo | None:
        """Innermost function whose body range contains ``node_id``."""
        best = None
        for fn in self.functions:
            if fn.contains(node_id) and (best is None or fn.first > best.first):
                best = fn
        return best


@dataclass
class BfsResult:
    reached: set[int]
    truncated: bool


def _normalize_kinds(kinds: Iterable[EdgeKind | str]) -> tuple[EdgeKind, ...]:
    resolved = tuple(sorted({EdgeKind(k) for k in kinds}, key=lambda k: k.value))
    if EdgeKind.AST in resolved:
        # structural containment never carries flow
        resolved = tuple(k for k in resolved if k is not EdgeKind.AST)
    return resolved


def reach_from(
    ir: FileIR,
    start: int,
    kinds: Iterable[EdgeKind | str] = FLOW_KINDS,
    *,
    max_visited: int = MAX_VISITED,
    max_depth: int = MAX_DEPTH,
) -> BfsResult:
    """Nodes reachable from ``start`` by a path of at least one edge.

    ``start`` itself is included only if it lies on a cycle.  The search
    stops early, with ``truncated`` set, after ``max_visited`` nodes or at
    depth ``max_depth``.
    """
    ir.node(start)
    allowed = _normalize_kinds(kinds)
    reached: set[int] = set()
    frontier = deque((n, 1) for n in ir.successors(start, allowed))
    truncated = False
    while frontier:
        node, depth = frontier.popleft()
        if node in reached:
            continue
        if len(reached) >= max_visited:
            truncated = True
            break
        reached.add(node)
        if depth >= max_depth:
            if ir.successors(node, allowed):
                truncated = True
            continue
        for nxt in ir.successors(node, allowed):
            if nxt not in reached:
                frontier.append((nxt, depth + 1))
    return BfsResult(reached, truncated)


def reachable(
    ir: FileIR,
    src: int,
    dst: int,
    kinds: Iterable[EdgeKind | str] = FLOW_KINDS,
) -> bool:
    """True iff a directed path of one or more allowed edges leads from ``src`` to ``dst``.

    ``Ast`` edges are never traversed, even if requested.
    """
    ir.node(dst)
    return dst in reach_from(ir, src, kinds).reached
