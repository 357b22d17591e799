"""Language-neutral bookkeeping shared by the frontends.

A frontend walks its syntax tree, creating nodes and Cfg edges as it goes
and recording name definitions and uses per lexical scope.  Data-flow edges
between definitions and uses are resolved only at the end, which makes them
flow-insensitive within a scope: every definition of a name reaches every use
that resolves to the same scope.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Union

from ..sitelex import canonical_rendering
from .model import EdgeKind, FileIR, FunctionInfo, ImportBinding, IrEdge, IrNode, NodeKind

# A value source is either a node id or a name still to be resolved.
Source = Union[int, str]


class Scope:
    __slots__ = ("kind", "parent", "defs", "globals", "function")

    def __init__(self, kind: str, parent: "Scope | None", function: str | None = None) -> None:
        self.kind = kind  # module, function, class, comprehension
        self.parent = parent
        self.defs: dict[str, list[int]] = {}
        self.globals: set[str] = set()
        self.function = function

    def module(self) -> "Scope":
        s = self
        while s.parent is not None:
            s = s.parent
        return s


@dataclass
class PendingCall:
    node: int
    scope: Scope
    via_self: bool
    name: str
    positional: list[list[Source]]
    keywords: dict[str, list[Source]]


@dataclass
class _OpenFunction:
    name: str
    node: int
    params: list[str] = field(default_factory=list)
    param_nodes: list[int] = field(default_factory=list)
    top_level: bool = False
    method: bool = False
    returns: list[int] = field(default_factory=list)


class IrBuilder:
    def __init__(self, file: str, language: str) -> None:
        self.file = file
        self.language = language
        self.family = "python" if language == "python" else "javascript"
        self.nodes: list[IrNode] = []
        self.edges: set[tuple[int, int, EdgeKind]] = set()
        self.uses: list[tuple[Scope, str, int]] = []
        self.defs_in_order: list[tuple[Scope, str, int]] = []
        self.pending_calls: list[PendingCall] = []
        self.functions: dict[int, _OpenFunction] = {}
        self.function_ranges: dict[int, int] = {}
        self.aliases: dict[int, list[int]] = {}  # declaring statement -> function nodes
        self.receivers: dict[int, int] = {}
        self.imports: list[ImportBinding] = []
        self.call_sites: list[tuple[int, str]] = []
        self.warnings: list[str] = []
        self.exports: dict[str, str] = {}

    # -- nodes and edges ------------------------------------------------

    def add_node(
        self,
        kind: NodeKind,
        span: tuple[int, int, int, int],
        text: str,
        function: str | None,
        *,
        parent: int | None = None,
        flows_to_parent: bool = False,
        value: str | None = None,
        canonical: bool = True,
    ) -> int:
        node_id = len(self.nodes)
        rendering = canonical_rendering(text, self.family) if canonical else " ".join(text.split())
        self.nodes.append(IrNode(node_id, kind, *span, rendering, function, value))
        if parent is not None:
            self.edges.add((parent, node_id, EdgeKind.AST))
            if flows_to_parent:
                self.edges.add((node_id, parent, EdgeKind.DFG))
        return node_id

    def add_call_site(self, node_id: int, callee_text: str) -> None:
        self.call_sites.append((node_id, canonical_rendering(callee_text, self.family)))

    def cfg(self, src: int, dst: int) -> None:
        if src != dst:
            self.edges.add((src, dst, EdgeKind.CFG))

    def dfg(self, src: int, dst: int) -> None:
        if src != dst:
            self.edges.add((src, dst, EdgeKind.DFG))

    def link(self, preds: Iterable[int], node: int) -> None:
        for p in preds:
            self.cfg(p, node)

    # -- names ----------------------------------------------------------

    def _target_scope(self, scope: Scope, name: str) -> Scope:
        return scope.module() if name in scope.globals else scope

    def define(self, scope: Scope, name: str, node: int) -> None:
        target = self._target_scope(scope, name)
        target.defs.setdefault(name, []).append(node)
        self.defs_in_order.append((target, name, node))

    def use(self, scope: Scope, name: str, node: int) -> None:
        self.uses.append((scope, name, node))

    def resolve(self, scope: Scope, name: str) -> list[int]:
        s: Scope | None = scope
        first = True
        while s is not None:
            if s.kind == "class" and not first:
                s = s.parent
                continue
            if name in s.globals:
                s = s.module()
            if name in s.defs:
                return s.defs[name]
            s = s.parent
            first = False
        return []

    # -- functions ------------------------------------------------------

    def open_function(
        self, name: str, node: int, *, top_level: bool, method: bool = False
    ) -> _OpenFunction:
        fn = _OpenFunction(name, node, top_level=top_level, method=method)
        self.functions[node] = fn
        return fn

    def close_function(self, fn: _OpenFunction) -> None:
        self.function_ranges[fn.node] = len(self.nodes) - 1

    def alias_function(self, declaring_node: int, fn_node: int) -> None:
        self.aliases.setdefault(declaring_node, []).append(fn_node)

    def add_param(self, fn: _OpenFunction, scope: Scope, name: str, node: int) -> None:
        fn.params.append(name)
        fn.param_nodes.append(node)
        self.define(scope, name, node)

    def record_call(self, call: PendingCall) -> None:
        self.pending_calls.append(call)

    def warn(self, message: str) -> None:
        self.warnings.append(message)

    # -- assembly -------------------------------------------------------

    def _sources(self, scope: Scope, sources: list[Source]) -> set[int]:
        out: set[int] = set()
        for src in sources:
            if isinstance(src, int):
                out.add(src)
            else:
                out.update(self.resolve(scope, src))
        return out

    def _callees(self, call: PendingCall) -> list[_OpenFunction]:
        if call.via_self:
            return [fn for fn in self.functions.values() if fn.method and fn.name == call.name]
        found = []
        for def_node in self.resolve(call.scope, call.name):
            if def_node in self.functions and not self.functions[def_node].method:
                found.append(self.functions[def_node])
            for fn_node in self.aliases.get(def_node, ()):
                found.append(self.functions[fn_node])
        return found

    def _bind_calls(self) -> None:
        for call in self.pending_calls:
            for fn in self._callees(call):
                offset = 1 if (call.via_self and self.family == "python" and fn.params) else 0
                params = fn.params[offset:]
                nodes = fn.param_nodes[offset:]
                for index, sources in enumerate(call.positional):
                    if index < len(nodes):
                        for src in self._sources(call.scope, sources):
                            self.dfg(src, nodes[index])
                for name, sources in call.keywords.items():
                    if name in params:
                        target = nodes[params.index(name)]
                        for src in self._sources(call.scope, sources):
                            self.dfg(src, target)
                for ret in fn.returns:
                    self.dfg(ret, call.node)

    def finish(self) -> FileIR:
        for scope, name, node in self.uses:
            for d in self.resolve(scope, name):
                self.dfg(d, node)
        self._bind_calls()
        functions = tuple(
            FunctionInfo(
                fn.name,
                fn.node,
                fn.node,
                self.function_ranges.get(fn.node, fn.node),
                tuple(fn.params),
                fn.top_level,
                fn.method,
            )
            for fn in sorted(self.functions.values(), key=lambda f: f.node)
        )
        edges = tuple(sorted(IrEdge(s, d, k) for s, d, k in self.edges))
        return FileIR(
            file=self.file,
            language=self.language,
            nodes=tuple(self.nodes),
            edges=edges,
            imports=tuple(self.imports),
            call_sites=tuple(sorted(self.call_sites)),
            functions=functions,
            receivers=dict(sorted(self.receivers.items())),
            warnings=tuple(self.warnings),
            exports=dict(sorted(self.exports.items())),
        )
