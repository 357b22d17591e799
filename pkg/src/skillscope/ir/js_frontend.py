"""JavaScript/TypeScript frontend over the hand-written parser.

The walk mirrors the Python frontend: statements get nodes and Cfg edges,
calls, member accesses, string literals and function expressions get
expression nodes, and definitions and uses are collected per function scope
(block scoping is deliberately flattened).  ``require`` calls and ES import
declarations both produce import bindings; ``module.exports`` and ``export``
forms populate the export table.
"""

from __future__ import annotations

import bisect
from typing import Iterable

from .builder import IrBuilder, PendingCall, Scope, Source
from .js_parser import Node, parse
from .model import FileIR, ImportBinding, NodeKind

_FUNCTION_TYPES = frozenset({"FunctionExpression", "ArrowFunctionExpression"})
_TRANSPARENT = frozenset({"EmptyStatement", "TSDeclaration"})


def _require_source(e: Node | None) -> str | None:
    if (
        e is not None
        and e.type == "CallExpression"
        and e.callee.type == "Identifier"
        and e.callee.name == "require"
        and e.arguments
        and e.arguments[0].type == "Literal"
        and e.arguments[0].kind == "string"
    ):
        return e.arguments[0].value
    return None


def _unwrap(e: Node | None) -> Node | None:
    while e is not None and e.type in ("AwaitExpression", "ParenthesizedExpression", "TSAsExpression"):
        e = e.argument if e.type == "AwaitExpression" else e.expression
    return e


def _export_target(e: Node) -> str | None:
    """Exported name for ``exports.x`` / ``module.exports.x``; ``""`` for ``module.exports``."""
    if e.type != "MemberExpression" or e.computed:
        return None
    obj, prop = e.object, e.property.name
    if obj.type == "Identifier" and obj.name == "module" and prop == "exports":
        return ""
    if obj.type == "Identifier" and obj.name == "exports":
        return prop
    if _export_target(obj) == "":
        return prop
    return None


class _Frontend:
    def __init__(self, path: str, text: str, typescript: bool) -> None:
        self.text = text
        self.typescript = typescript
        self.b = IrBuilder(path, "typescript" if typescript else "javascript")
        self.line_starts = [0]
        for i, ch in enumerate(text):
            if ch == "\n":
                self.line_starts.append(i + 1)
        self.loops: list[tuple[int, list[int]]] = []
        self.expr_nodes: dict[int, int] = {}
        self.fn_stack: list = []
        self.error_lines: set[int] = set()
        self.name_hints: dict[int, tuple[str, bool]] = {}

    # -- positions --------------------------------------------------------

    def pos(self, offset: int) -> tuple[int, int]:
        line = bisect.bisect_right(self.line_starts, offset) - 1
        return line + 1, offset - self.line_starts[line] + 1

    def span(self, start: int, end: int) -> tuple[int, int, int, int]:
        return (*self.pos(start), *self.pos(end))

    def header(self, s: Node, body_start: int | None) -> tuple[str, tuple[int, int, int, int]]:
        end = s.end if body_start is None else body_start
        text = self.text[s.start : end].rstrip()
        return text, self.span(s.start, s.start + len(text))

    # -- entry ------------------------------------------------------------

    def run(self) -> FileIR:
        program, errors = parse(self.text, self.typescript)
        module = Scope("module", None)
        self.block(program.body, [], module, None)
        reported = {self.pos(offset)[0] for offset, _ in errors}
        for line in sorted(reported - self.error_lines):
            self.b.warn(f"line {line}: lexical error; token skipped")
        return self.b.finish()

    @property
    def function_name(self) -> str | None:
        return self.fn_stack[-1].name if self.fn_stack else None

    # -- statements -------------------------------------------------------

    def block(self, stmts: Iterable[Node], preds: list[int], scope: Scope, parent: int | None) -> list[int]:
        for stmt in stmts:
            preds = self.statement(stmt, preds, scope, parent)
        return preds

    def _body_start(self, s: Node) -> int | None:
        t = s.type
        if t == "FunctionDeclaration":
            return s.body.start
        if t == "ClassDeclaration":
            brace = self.text.find("{", s.superclass.end if s.superclass is not None else s.start)
            return brace if brace >= 0 else None
        if t == "IfStatement":
            return s.consequent.start if s.consequent is not None else None
        if t in ("ForStatement", "ForOfStatement", "ForInStatement", "WhileStatement", "LabeledStatement"):
            return s.body.start if s.body is not None else None
        if t == "DoWhileStatement":
            return s.body.start if s.body is not None else None
        if t == "TryStatement":
            return s.block.start
        if t == "SwitchStatement":
            return s.cases[0].start if s.cases else None
        return None

    def statement(self, s: Node | None, preds: list[int], scope: Scope, parent: int | None) -> list[int]:
        if s is None or s.type in _TRANSPARENT:
            return preds
        if s.type == "BlockStatement":
            return self.block(s.body, preds, scope, parent)
        if s.type == "ErrorStatement":
            self.error_node(s)
            return preds
        if s.type == "ExportNamedDeclaration" and s.declaration is not None:
            for name in self._declared_names(s.declaration):
                self.b.exports[name] = name
            return self.statement(s.declaration, preds, scope, parent)
        if s.type == "ExportDefaultDeclaration" and s.declaration.type in ("FunctionDeclaration", "ClassDeclaration"):
            if s.declaration.name is None:
                s.declaration.name = "default"
            self.b.exports["default"] = s.declaration.name
            return self.statement(s.declaration, preds, scope, parent)
        if s.type == "VariableDeclaration" or (
            s.type == "ExpressionStatement" and s.expression.type == "AssignmentExpression"
        ):
            kind = NodeKind.ASSIGN
        elif s.type == "FunctionDeclaration":
            kind = NodeKind.FUNCTION
        else:
            kind = NodeKind.STATEMENT
        body_start = self._body_start(s)
        if body_start is not None:
            text, span = self.header(s, body_start)
        else:
            text, span = self.text[s.start : s.end], self.span(s.start, s.end)
        n = self.b.add_node(kind, span, text, self.function_name, parent=parent)
        self.b.link(preds, n)
        handler = getattr(self, f"stmt_{s.type}", None)
        if handler is not None:
            return handler(s, n, scope)
        for child in s.children():
            self.expr(child, n, scope)
        return [n]

    def error_node(self, s: Node) -> None:
        text = self.text[s.start : s.end]
        first = text.split("\n", 1)[0].rstrip()
        line, col = self.pos(s.start)
        self.b.add_node(NodeKind.OTHER, (line, col, line, col + len(first)), first, self.function_name, canonical=False)
        self.error_lines.add(line)
        self.b.warn(f"line {line}: syntax error ({s.message}); line skipped")

    def _declared_names(self, decl: Node) -> list[str]:
        if decl.type in ("FunctionDeclaration", "ClassDeclaration") and decl.name:
            return [decl.name]
        if decl.type == "VariableDeclaration":
            names: list[str] = []
            for d in decl.declarations:
                names.extend(self._pattern_names(d.id))
            return names
        return []

    def _pattern_names(self, p: Node | None) -> list[str]:
        if p is None:
            return []
        if p.type == "Identifier":
            return [p.name]
        if p.type in ("ObjectPattern", "ObjectExpression"):
            return [n for prop in p.properties for n in self._pattern_names(prop.value if prop.type == "Property" else prop)]
        if p.type in ("ArrayPattern", "ArrayExpression"):
            return [n for el in p.elements for n in self._pattern_names(el)]
        if p.type == "AssignmentPattern":
            return self._pattern_names(p.left)
        if p.type in ("RestElement", "SpreadElement"):
            return self._pattern_names(p.argument)
        return []

    def stmt_VariableDeclaration(self, s: Node, n: int, scope: Scope) -> list[int]:
        for d in s.declarations:
            if d.id.type == "Identifier":
                self._hint(d.init, d.id.name, scope.kind == "module")
            if d.init is not None:
                self.expr(d.init, n, scope)
            self.target(d.id, n, scope)
            self._require_bindings(d.id, d.init, n)
            self._alias(d.id, d.init, n)
        return [n]

    def _require_bindings(self, target: Node, init: Node | None, n: int) -> None:
        init = _unwrap(init)
        source = _require_source(init)
        symbol = None
        if source is None and init is not None and init.type == "MemberExpression" and not init.computed:
            source = _require_source(init.object)
            symbol = init.property.name
        if source is None:
            return
        if target.type == "Identifier":
            self.b.imports.append(ImportBinding(target.name, source, symbol, n))
        elif target.type == "ObjectPattern" and symbol is None:
            for prop in target.properties:
                if prop.type != "Property" or prop.computed:
                    continue
                names = self._pattern_names(prop.value)
                if names:
                    self.b.imports.append(ImportBinding(names[0], source, prop.key.name, n))

    def _hint(self, value: Node | None, name: str, top_level: bool) -> None:
        value = _unwrap(value)
        if value is not None and value.type in _FUNCTION_TYPES:
            self.name_hints[id(value)] = (name, top_level)

    def _alias(self, target: Node, value: Node | None, n: int) -> None:
        value = _unwrap(value)
        node = self.expr_nodes.get(id(value)) if value is not None else None
        if node is not None and node in self.b.functions and target.type == "Identifier":
            self.b.alias_function(n, node)

    def stmt_ExpressionStatement(self, s: Node, n: int, scope: Scope) -> list[int]:
        self.expr(s.expression, n, scope)
        return [n]

    def stmt_FunctionDeclaration(self, s: Node, n: int, scope: Scope) -> list[int]:
        self.b.define(scope, s.name or "default", n)
        self.function(s, n, scope, s.name or "default", top_level=scope.kind == "module")
        return [n]

    def function(self, f: Node, n: int, scope: Scope, name: str, *, top_level: bool, method: bool = False) -> None:
        fn = self.b.open_function(name, n, top_level=top_level, method=method)
        inner = Scope("function", scope, name)
        self.fn_stack.append(fn)
        for param in f.params:
            self.param(fn, inner, param, n)
        saved_loops, self.loops = self.loops, []
        if f.type == "ArrowFunctionExpression" and f.expression:
            self.expr(f.body, n, inner)
            fn.returns.append(n)
        else:
            self.block(f.body.body, [], inner, n)
        self.loops = saved_loops
        self.fn_stack.pop()
        self.b.close_function(fn)

    def param(self, fn, scope: Scope, p: Node, parent: int) -> None:
        target = p.left if p.type == "AssignmentPattern" else p
        if p.type == "AssignmentPattern":
            self.expr(p.right, parent, scope.parent or scope)
        if target.type == "RestElement":
            target = target.argument
        node = self.b.add_node(
            NodeKind.PARAM, self.span(target.start, target.end), self.text[target.start : target.end], fn.name, parent=parent
        )
        names = self._pattern_names(target)
        if target.type == "Identifier" and p.type != "RestElement":
            self.b.add_param(fn, scope, target.name, node)
        else:
            fn.params.append(names[0] if names else "")
            fn.param_nodes.append(node)
            for name in names:
                self.b.define(scope, name, node)
            for sub in self._pattern_defaults(target):
                self.expr(sub, node, scope)

    def _pattern_defaults(self, p: Node | None) -> list[Node]:
        if p is None:
            return []
        if p.type == "AssignmentPattern":
            return [p.right] + self._pattern_defaults(p.left)
        if p.type == "ObjectPattern":
            out = []
            for prop in p.properties:
                if prop.type == "Property" and prop.computed:
                    out.append(prop.key)
                out.extend(self._pattern_defaults(prop.value if prop.type == "Property" else prop))
            return out
        if p.type == "ArrayPattern":
            return [d for el in p.elements for d in self._pattern_defaults(el)]
        if p.type == "RestElement":
            return self._pattern_defaults(p.argument)
        return []

    def stmt_ClassDeclaration(self, s: Node, n: int, scope: Scope) -> list[int]:
        if s.superclass is not None:
            self.expr(s.superclass, n, scope)
        if s.name:
            self.b.define(scope, s.name, n)
        inner = Scope("class", scope, self.function_name)
        exits = self.class_members(s, [n], inner, n)
        return exits or [n]

    def class_members(self, cls: Node, preds: list[int] | None, scope: Scope, parent: int) -> list[int]:
        """Walk class members; ``preds`` is None when the class is an expression (no Cfg)."""
        for m in cls.members:
            if m.type == "ErrorStatement":
                self.error_node(m)
                continue
            if m.type == "StaticBlock":
                if preds is not None:
                    preds = self.block(m.body, preds, scope, parent)
                else:
                    self.block(m.body, [], scope, parent)
                continue
            text_end = m.value.body.start if m.type == "MethodDefinition" else m.end
            text = self.text[m.start : text_end].rstrip()
            kind = NodeKind.FUNCTION if m.type == "MethodDefinition" else NodeKind.ASSIGN
            node = self.b.add_node(
                kind, self.span(m.start, m.start + len(text)), text, self.function_name, parent=parent
            )
            if preds is not None:
                self.b.link(preds, node)
                preds = [node]
            if m.key is not None and m.name is None:
                self.expr(m.key, node, scope)
            if m.type == "MethodDefinition":
                self.function(m.value, node, scope, m.name or "<computed>", top_level=False, method=True)
            elif m.value is not None:
                self.expr(m.value, node, scope)
                if m.key is not None and m.key.type == "Identifier":
                    self._alias(m.key, m.value, node)
        return preds or []

    def stmt_ReturnStatement(self, s: Node, n: int, scope: Scope) -> list[int]:
        if s.argument is not None:
            self.expr(s.argument, n, scope)
        if self.fn_stack:
            self.fn_stack[-1].returns.append(n)
        return []

    def stmt_ThrowStatement(self, s: Node, n: int, scope: Scope) -> list[int]:
        self.expr(s.argument, n, scope)
        return []

    def stmt_BreakStatement(self, s: Node, n: int, scope: Scope) -> list[int]:
        if self.loops:
            self.loops[-1][1].append(n)
        return []

    def stmt_ContinueStatement(self, s: Node, n: int, scope: Scope) -> list[int]:
        if self.loops:
            self.b.cfg(n, self.loops[-1][0])
        return []

    def stmt_IfStatement(self, s: Node, n: int, scope: Scope) -> list[int]:
        self.expr(s.test, n, scope)
        body = self.statement(s.consequent, [n], scope, n)
        orelse = self.statement(s.alternate, [n], scope, n) if s.alternate is not None else [n]
        return body + orelse

    def _loop(self, body: Node | None, n: int, scope: Scope) -> list[int]:
        self.loops.append((n, []))
        for e in self.statement(body, [n], scope, n):
            self.b.cfg(e, n)
        _, breaks = self.loops.pop()
        return [n] + breaks

    def stmt_ForStatement(self, s: Node, n: int, scope: Scope) -> list[int]:
        if s.init is not None:
            if s.init.type == "VariableDeclaration":
                self.stmt_VariableDeclaration(s.init, n, scope)
            else:
                self.expr(s.init, n, scope)
        for part in (s.test, s.update):
            if part is not None:
                self.expr(part, n, scope)
        return self._loop(s.body, n, scope)

    def stmt_ForOfStatement(self, s: Node, n: int, scope: Scope) -> list[int]:
        self.expr(s.right, n, scope)
        left = s.left
        if left.type == "VariableDeclaration":
            for d in left.declarations:
                self.target(d.id, n, scope)
        else:
            self.target(left, n, scope)
        return self._loop(s.body, n, scope)

    stmt_ForInStatement = stmt_ForOfStatement

    def stmt_WhileStatement(self, s: Node, n: int, scope: Scope) -> list[int]:
        self.expr(s.test, n, scope)
        return self._loop(s.body, n, scope)

    def stmt_DoWhileStatement(self, s: Node, n: int, scope: Scope) -> list[int]:
        self.expr(s.test, n, scope)
        return self._loop(s.body, n, scope)

    def stmt_LabeledStatement(self, s: Node, n: int, scope: Scope) -> list[int]:
        return self.statement(s.body, [n], scope, n) or [n]

    def stmt_TryStatement(self, s: Node, n: int, scope: Scope) -> list[int]:
        exits = self.block(s.block.body, [n], scope, n)
        h = s.handler
        if h is not None:
            text = self.text[h.start : h.body.start].rstrip()
            node = self.b.add_node(
                NodeKind.STATEMENT, self.span(h.start, h.start + len(text)), text, self.function_name, parent=n
            )
            self.b.cfg(n, node)
            if h.param is not None:
                self.target(h.param, node, scope)
            exits = exits + self.block(h.body.body, [node], scope, node)
        if s.finalizer is not None:
            final = self.block(s.finalizer.body, exits or [n], scope, n)
            return final if exits else []
        return exits

    def stmt_SwitchStatement(self, s: Node, n: int, scope: Scope) -> list[int]:
        self.expr(s.discriminant, n, scope)
        self.loops.append((n, []))
        fallthrough: list[int] = []
        has_default = False
        for case in s.cases:
            if case.test is None:
                has_default = True
            else:
                self.expr(case.test, n, scope)
            fallthrough = self.block(case.consequent, [n] + fallthrough, scope, n)
        _, breaks = self.loops.pop()
        return fallthrough + breaks + ([] if has_default else [n])

    def stmt_ImportDeclaration(self, s: Node, n: int, scope: Scope) -> list[int]:
        for local, imported in s.specifiers:
            self.b.imports.append(ImportBinding(local, s.source, imported, n))
            self.b.define(scope, local, n)
        if not s.specifiers:
            self.b.imports.append(ImportBinding("", s.source, None, n))
        return [n]

    def stmt_ExportNamedDeclaration(self, s: Node, n: int, scope: Scope) -> list[int]:
        for local, exported in s.specifiers:
            if s.source is None:
                self.b.exports[exported] = local
                self.b.use(scope, local, n)
        return [n]

    def stmt_ExportDefaultDeclaration(self, s: Node, n: int, scope: Scope) -> list[int]:
        decl = s.declaration
        if decl.type == "Identifier":
            self.b.exports["default"] = decl.name
        self.expr(decl, n, scope)
        node = self.expr_nodes.get(id(decl))
        if node is not None and node in self.b.functions:
            self.b.functions[node].name = "default"
            self.b.functions[node].top_level = True
            self.b.exports["default"] = "default"
        return [n]

    def stmt_ExportAllDeclaration(self, s: Node, n: int, scope: Scope) -> list[int]:
        return [n]

    # -- targets ----------------------------------------------------------

    def target(self, t: Node | None, n: int, scope: Scope, also_use: bool = False) -> None:
        if t is None:
            return
        if t.type == "Identifier":
            self.b.define(scope, t.name, n)
            if also_use:
                self.b.use(scope, t.name, n)
        elif t.type in ("ObjectPattern", "ObjectExpression"):
            for prop in t.properties:
                if prop.type == "Property":
                    if prop.computed:
                        self.expr(prop.key, n, scope)
                    self.target(prop.value, n, scope, also_use)
                else:
                    self.target(prop, n, scope, also_use)
        elif t.type in ("ArrayPattern", "ArrayExpression"):
            for el in t.elements:
                self.target(el, n, scope, also_use)
        elif t.type == "AssignmentPattern":
            self.expr(t.right, n, scope)
            self.target(t.left, n, scope, also_use)
        elif t.type in ("RestElement", "SpreadElement"):
            self.target(t.argument, n, scope, also_use)
        elif t.type in ("ParenthesizedExpression", "TSAsExpression"):
            self.target(t.expression, n, scope, also_use)
        elif t.type == "MemberExpression":
            base = t
            while base.type == "MemberExpression":
                if base.computed:
                    self.expr(base.property, n, scope)
                base = base.object
            if base.type == "Identifier":
                self.b.define(scope, base.name, n)
                self.b.use(scope, base.name, n)
            else:
                self.expr(base, n, scope)
        else:
            self.expr(t, n, scope)

    # -- expressions ------------------------------------------------------

    def _node(self, e: Node, kind: NodeKind, container: int | None, value: str | None = None) -> int:
        node = self.b.add_node(
            kind,
            self.span(e.start, e.end),
            self.text[e.start : e.end],
            self.function_name,
            parent=container,
            flows_to_parent=container is not None,
            value=value,
        )
        self.expr_nodes[id(e)] = node
        return node

    def expr(self, e: Node | None, container: int, scope: Scope) -> None:
        if e is None:
            return
        t = e.type
        if t in ("CallExpression", "NewExpression"):
            self.call(e, container, scope)
        elif t == "MemberExpression":
            node = self._node(e, NodeKind.MEMBER, container)
            self.chain(e, node, scope)
        elif t == "Identifier":
            self.b.use(scope, e.name, container)
        elif t == "Literal":
            if e.kind == "string":
                self._node(e, NodeKind.LITERAL, container, value=e.value)
        elif t == "TemplateLiteral":
            node = self._node(e, NodeKind.LITERAL, container, value="{}".join(e.quasis))
            for sub in e.expressions:
                self.expr(sub, node, scope)
        elif t in _FUNCTION_TYPES:
            node = self._node(e, NodeKind.FUNCTION, container)
            name, top_level = self.name_hints.get(id(e), (e.name or "<anonymous>", False))
            self.function(e, node, scope, name, top_level=top_level)
        elif t == "ClassExpression":
            if e.superclass is not None:
                self.expr(e.superclass, container, scope)
            self.class_members(e, None, Scope("class", scope, self.function_name), container)
        elif t == "AssignmentExpression":
            if e.operator == "=":
                exported = _export_target(e.left)
                if exported:
                    self._hint(e.right, exported, True)
                elif exported == "":
                    self._hint(e.right, "default", True)
                    right = _unwrap(e.right)
                    if right is not None and right.type == "ObjectExpression":
                        for prop in right.properties:
                            if prop.type == "Property" and not prop.computed and prop.key.type == "Identifier":
                                self._hint(prop.value, prop.key.name, True)
                elif e.left.type == "Identifier":
                    self._hint(e.right, e.left.name, scope.kind == "module")
            self.expr(e.right, container, scope)
            self.target(e.left, container, scope, also_use=e.operator != "=")
            self._assignment_effects(e, container)
        elif t == "UpdateExpression":
            self.target(e.argument, container, scope, also_use=True)
        elif t == "Property":
            if e.computed:
                self.expr(e.key, container, scope)
            self.expr(e.value, container, scope)
        else:
            for child in e.children():
                self.expr(child, container, scope)

    def _assignment_effects(self, e: Node, container: int) -> None:
        if e.operator != "=":
            return
        left, right = e.left, _unwrap(e.right)
        if left.type == "Identifier":
            self._alias(left, e.right, container)
        exported = _export_target(left)
        if exported is None:
            return
        if exported == "":
            if right is not None and right.type == "ObjectExpression":
                for prop in right.properties:
                    if prop.type == "Property" and not prop.computed and prop.key.type == "Identifier":
                        value = prop.value
                        if value.type == "Identifier":
                            self.b.exports[prop.key.name] = value.name
                        else:
                            self._name_exported_function(value, prop.key.name)
            elif right is not None and right.type == "Identifier":
                self.b.exports["default"] = right.name
            elif right is not None:
                self._name_exported_function(right, "default")
        elif right is not None and right.type == "Identifier":
            self.b.exports[exported] = right.name
        elif right is not None:
            self._name_exported_function(right, exported)

    def _name_exported_function(self, value: Node, name: str) -> None:
        node = self.expr_nodes.get(id(value))
        if node is not None and node in self.b.functions:
            fn = self.b.functions[node]
            fn.name = name
            fn.top_level = True
            self.b.exports[name] = name

    def chain(self, e: Node, node: int, scope: Scope) -> None:
        base = e
        while base.type == "MemberExpression":
            if base.computed:
                self.expr(base.property, node, scope)
            base = base.object
        self.expr(base, node, scope)

    def call(self, e: Node, container: int, scope: Scope) -> None:
        node = self._node(e, NodeKind.CALL, container)
        callee = e.callee
        self.b.add_call_site(node, self.text[callee.start : callee.end])
        if callee.type == "MemberExpression":
            receiver = callee.object
            if callee.computed:
                self.expr(callee.property, node, scope)
            if receiver.type == "MemberExpression":
                r = self._node(receiver, NodeKind.MEMBER, node)
                self.b.receivers[r] = node
                self.chain(receiver, r, scope)
            else:
                self.expr(receiver, node, scope)
        else:
            self.expr(callee, node, scope)
        for arg in e.arguments:
            self.expr(arg, node, scope)
        via_this = (
            callee.type == "MemberExpression"
            and not callee.computed
            and callee.object.type == "ThisExpression"
        )
        if callee.type == "Identifier" or via_this:
            name = callee.name if callee.type == "Identifier" else callee.property.name
            positional = [self.sources(a) for a in e.arguments if a.type != "SpreadElement"]
            self.b.record_call(PendingCall(node, scope, via_this, name, positional, {}))

    def sources(self, e: Node) -> list[Source]:
        node = self.expr_nodes.get(id(e))
        if node is not None:
            return [node]
        if e.type == "Identifier":
            return [e.name]
        out: list[Source] = []
        for child in e.children():
            out.extend(self.sources(child))
        return out


def analyze_javascript(path: str, text: str, typescript: bool = False) -> FileIR:
    return _Frontend(path, text, typescript).run()
