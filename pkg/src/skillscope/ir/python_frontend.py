"""Python frontend: builds a :class:`FileIR` from the standard ``ast`` module.

Lines that fail to parse are blanked one at a time until the remainder
parses; each blanked line becomes an ``Other`` node with a warning, so a
single bad line costs exactly that line.
"""

from __future__ import annotations

import ast
from typing import Iterable

from .builder import IrBuilder, PendingCall, Scope, Source
from .model import FileIR, NodeKind

_COMPOUND = (
    ast.If,
    ast.For,
    ast.AsyncFor,
    ast.While,
    ast.With,
    ast.AsyncWith,
    ast.Try,
    ast.FunctionDef,
    ast.AsyncFunctionDef,
    ast.ClassDef,
)
if hasattr(ast, "Match"):
    _COMPOUND = _COMPOUND + (ast.Match,)
if hasattr(ast, "TryStar"):
    _COMPOUND = _COMPOUND + (ast.TryStar,)
_FUNCTIONS = (ast.FunctionDef, ast.AsyncFunctionDef)
_COMPREHENSIONS = (ast.ListComp, ast.SetComp, ast.DictComp, ast.GeneratorExp)


class _Source:
    """Character-accurate source slicing from ``ast`` byte offsets."""

    def __init__(self, text: str) -> None:
        self.text = text
        self.lines = text.splitlines(keepends=True)
        self.starts = [0]
        for line in self.lines:
            self.starts.append(self.starts[-1] + len(line))

    def char_col(self, lineno: int, byte_col: int) -> int:
        if not 1 <= lineno <= len(self.lines):
            return byte_col
        line = self.lines[lineno - 1]
        return len(line.encode("utf-8")[:byte_col].decode("utf-8", errors="replace"))

    def offset(self, lineno: int, byte_col: int) -> int:
        if lineno > len(self.lines):
            return len(self.text)
        return self.starts[lineno - 1] + self.char_col(lineno, byte_col)

    def span(self, node: ast.AST) -> tuple[int, int, int, int]:
        line = node.lineno
        end_line = getattr(node, "end_lineno", None) or line
        col = self.char_col(line, node.col_offset)
        end_col = self.char_col(end_line, getattr(node, "end_col_offset", None) or node.col_offset)
        return (line, col + 1, end_line, end_col + 1)

    def segment(self, node: ast.AST) -> str:
        end_line = getattr(node, "end_lineno", None) or node.lineno
        end_col = getattr(node, "end_col_offset", None) or node.col_offset
        return self.text[self.offset(node.lineno, node.col_offset) : self.offset(end_line, end_col)]

    def header(self, stmt: ast.stmt) -> tuple[str, tuple[int, int, int, int]]:
        """Source of a compound statement up to its first body statement."""
        body = getattr(stmt, "body", None)
        line, col, _, _ = self.span(stmt)
        start = self.offset(stmt.lineno, stmt.col_offset)
        if isinstance(body, list) and body:
            end = self.offset(body[0].lineno, body[0].col_offset)
        else:
            end = self.offset(stmt.end_lineno or stmt.lineno, stmt.end_col_offset or 0)
        text = self.text[start:end].rstrip()
        newlines = text.count("\n")
        end_col = col + len(text) if not newlines else len(text) - text.rfind("\n")
        return text, (line, col, line + newlines, end_col)


def _parse_tolerant(text: str) -> tuple[ast.Module, list[tuple[int, str, str]]]:
    """Parse ``text``, blanking offending lines until it parses."""
    lines = text.splitlines(keepends=True)
    blanked: list[tuple[int, str, str]] = []
    for _ in range(len(lines) + 1):
        source = "".join(lines)
        try:
            return ast.parse(source), blanked
        except SyntaxError as exc:
            lineno = exc.lineno or len(lines)
            lineno = min(max(lineno, 1), len(lines))
            while lineno > 1 and not lines[lineno - 1].strip():
                lineno -= 1
            if not lines or not lines[lineno - 1].strip():
                break
            original = lines[lineno - 1]
            ending = original[len(original.rstrip("\r\n")) :]
            lines[lineno - 1] = ending or "\n"
            blanked.append((lineno, original.rstrip("\r\n"), exc.msg or "invalid syntax"))
        except (ValueError, RecursionError, MemoryError) as exc:
            blanked.append((1, lines[0].rstrip("\r\n") if lines else "", f"unparsable file ({exc})"))
            return ast.Module(body=[], type_ignores=[]), blanked
    return ast.Module(body=[], type_ignores=[]), blanked


class _Frontend:
    def __init__(self, path: str, text: str) -> None:
        self.src = _Source(text)
        self.b = IrBuilder(path, "python")
        self.loops: list[tuple[int, list[int]]] = []
        self.expr_nodes: dict[int, int] = {}
        self.fn_stack: list = []
        self.name_hints: dict[int, tuple[str, bool]] = {}

    # -- entry ------------------------------------------------------------

    def run(self, text: str) -> FileIR:
        tree, blanked = _parse_tolerant(text)
        module = Scope("module", None)
        self.block(tree.body, [], module, None)
        for lineno, line_text, msg in blanked:
            stripped = line_text.strip()
            col = len(line_text) - len(line_text.lstrip()) + 1
            self.b.add_node(
                NodeKind.OTHER, (lineno, col, lineno, col + len(stripped)), stripped, None, canonical=False
            )
            self.b.warn(f"line {lineno}: syntax error ({msg}); line skipped")
        return self.b.finish()

    @property
    def function_name(self) -> str | None:
        return self.fn_stack[-1].name if self.fn_stack else None

    # -- statements -------------------------------------------------------

    def block(self, stmts: Iterable[ast.stmt], preds: list[int], scope: Scope, parent: int | None) -> list[int]:
        for stmt in stmts:
            preds = self.statement(stmt, preds, scope, parent)
        return preds

    def statement(self, s: ast.stmt, preds: list[int], scope: Scope, parent: int | None) -> list[int]:
        if isinstance(s, (ast.Assign, ast.AugAssign, ast.AnnAssign)):
            kind = NodeKind.ASSIGN
        elif isinstance(s, _FUNCTIONS):
            kind = NodeKind.FUNCTION
        else:
            kind = NodeKind.STATEMENT
        if isinstance(s, _COMPOUND):
            text, span = self.src.header(s)
        else:
            text, span = self.src.segment(s), self.src.span(s)
        n = self.b.add_node(kind, span, text, self.function_name, parent=parent)
        self.b.link(preds, n)
        handler = getattr(self, f"stmt_{type(s).__name__}", None)
        if handler is not None:
            return handler(s, n, scope)
        for child in ast.iter_child_nodes(s):
            if isinstance(child, ast.expr):
                self.expr(child, n, scope)
        return [n]

    def stmt_FunctionDef(self, s, n, scope: Scope) -> list[int]:
        for dec in s.decorator_list:
            self.expr(dec, n, scope)
        for default in list(s.args.defaults) + [d for d in s.args.kw_defaults if d is not None]:
            self.expr(default, n, scope)
        self.b.define(scope, s.name, n)
        fn = self.b.open_function(
            s.name, n, top_level=scope.kind == "module", method=scope.kind == "class"
        )
        inner = Scope("function", scope, s.name)
        self.fn_stack.append(fn)
        args = s.args
        for arg in list(getattr(args, "posonlyargs", [])) + list(args.args):
            self._param(fn, inner, arg, n)
        for arg in (args.vararg, *args.kwonlyargs, args.kwarg):
            if arg is not None:
                p = self.b.add_node(NodeKind.PARAM, self.src.span(arg), arg.arg, s.name, parent=n)
                self.b.define(inner, arg.arg, p)
        saved_loops, self.loops = self.loops, []
        self.block(s.body, [], inner, n)
        self.loops = saved_loops
        self.fn_stack.pop()
        self.b.close_function(fn)
        return [n]

    stmt_AsyncFunctionDef = stmt_FunctionDef

    def _param(self, fn, scope: Scope, arg: ast.arg, parent: int) -> None:
        p = self.b.add_node(NodeKind.PARAM, self.src.span(arg), arg.arg, fn.name, parent=parent)
        self.b.add_param(fn, scope, arg.arg, p)

    def stmt_ClassDef(self, s, n, scope: Scope) -> list[int]:
        for expr in list(s.decorator_list) + list(s.bases) + [k.value for k in s.keywords]:
            self.expr(expr, n, scope)
        self.b.define(scope, s.name, n)
        inner = Scope("class", scope, self.function_name)
        exits = self.block(s.body, [n], inner, n)
        return exits or [n]

    def stmt_Return(self, s, n, scope: Scope) -> list[int]:
        if s.value is not None:
            self.expr(s.value, n, scope)
        if self.fn_stack:
            self.fn_stack[-1].returns.append(n)
        return []

    def stmt_Raise(self, s, n, scope: Scope) -> list[int]:
        for child in (s.exc, s.cause):
            if child is not None:
                self.expr(child, n, scope)
        return []

    def stmt_Break(self, s, n, scope: Scope) -> list[int]:
        if self.loops:
            self.loops[-1][1].append(n)
        return []

    def stmt_Continue(self, s, n, scope: Scope) -> list[int]:
        if self.loops:
            self.b.cfg(n, self.loops[-1][0])
        return []

    def stmt_Assign(self, s, n, scope: Scope) -> list[int]:
        if isinstance(s.value, ast.Lambda) and len(s.targets) == 1 and isinstance(s.targets[0], ast.Name):
            self.name_hints[id(s.value)] = (s.targets[0].id, scope.kind == "module")
        self.expr(s.value, n, scope)
        for target in s.targets:
            self.target(target, n, scope)
        self._alias_lambda(s.targets, s.value, n, scope)
        return [n]

    def stmt_AnnAssign(self, s, n, scope: Scope) -> list[int]:
        if s.value is not None:
            self.expr(s.value, n, scope)
            self.target(s.target, n, scope)
        return [n]

    def stmt_AugAssign(self, s, n, scope: Scope) -> list[int]:
        self.expr(s.value, n, scope)
        self.target(s.target, n, scope, also_use=True)
        return [n]

    def stmt_Delete(self, s, n, scope: Scope) -> list[int]:
        for target in s.targets:
            self.expr(target, n, scope)
        return [n]

    def stmt_Global(self, s, n, scope: Scope) -> list[int]:
        scope.globals.update(s.names)
        return [n]

    def stmt_Import(self, s, n, scope: Scope) -> list[int]:
        from .model import ImportBinding

        for alias in s.names:
            local = alias.asname or alias.name.split(".")[0]
            module = alias.name if alias.asname else alias.name
            self.b.imports.append(ImportBinding(local, module, None, n))
            self.b.define(scope, local, n)
        return [n]

    def stmt_ImportFrom(self, s, n, scope: Scope) -> list[int]:
        from .model import ImportBinding

        module = "." * (s.level or 0) + (s.module or "")
        for alias in s.names:
            if alias.name == "*":
                continue
            local = alias.asname or alias.name
            self.b.imports.append(ImportBinding(local, module, alias.name, n))
            self.b.define(scope, local, n)
        return [n]

    def stmt_If(self, s, n, scope: Scope) -> list[int]:
        self.expr(s.test, n, scope)
        body = self.block(s.body, [n], scope, n)
        orelse = self.block(s.orelse, [n], scope, n) if s.orelse else [n]
        return body + orelse

    def _loop(self, s, n, scope: Scope) -> list[int]:
        self.loops.append((n, []))
        body_exits = self.block(s.body, [n], scope, n)
        for e in body_exits:
            self.b.cfg(e, n)
        _, breaks = self.loops.pop()
        exits = self.block(s.orelse, [n], scope, n) if s.orelse else [n]
        return exits + breaks

    def stmt_For(self, s, n, scope: Scope) -> list[int]:
        self.expr(s.iter, n, scope)
        self.target(s.target, n, scope)
        return self._loop(s, n, scope)

    stmt_AsyncFor = stmt_For

    def stmt_While(self, s, n, scope: Scope) -> list[int]:
        self.expr(s.test, n, scope)
        return self._loop(s, n, scope)

    def stmt_With(self, s, n, scope: Scope) -> list[int]:
        for item in s.items:
            self.expr(item.context_expr, n, scope)
            if item.optional_vars is not None:
                self.target(item.optional_vars, n, scope)
        return self.block(s.body, [n], scope, n)

    stmt_AsyncWith = stmt_With

    def stmt_Try(self, s, n, scope: Scope) -> list[int]:
        body_exits = self.block(s.body, [n], scope, n)
        exits = self.block(s.orelse, body_exits, scope, n) if s.orelse else body_exits
        for handler in s.handlers:
            text = self.src.text[self.src.offset(handler.lineno, handler.col_offset) :].split("\n", 1)[0]
            line, col, _, _ = self.src.span(handler)
            h = self.b.add_node(
                NodeKind.STATEMENT, (line, col, line, col + len(text)), text, self.function_name, parent=n
            )
            self.b.cfg(n, h)
            if handler.type is not None:
                self.expr(handler.type, h, scope)
            if handler.name:
                self.b.define(scope, handler.name, h)
            exits = exits + self.block(handler.body, [h], scope, h)
        if s.finalbody:
            final = self.block(s.finalbody, exits or [n], scope, n)
            return final if exits else []
        return exits

    stmt_TryStar = stmt_Try

    def stmt_Match(self, s, n, scope: Scope) -> list[int]:
        self.expr(s.subject, n, scope)
        exits: list[int] = [n]
        for case in s.cases:
            for sub in ast.walk(case.pattern):
                name = getattr(sub, "name", None) or getattr(sub, "rest", None)
                if isinstance(name, str):
                    self.b.define(scope, name, n)
                for child in ast.iter_child_nodes(sub):
                    if isinstance(child, ast.expr):
                        self.expr(child, n, scope)
            if case.guard is not None:
                self.expr(case.guard, n, scope)
            exits = exits + self.block(case.body, [n], scope, n)
        return exits

    # -- targets ----------------------------------------------------------

    def target(self, t: ast.expr, n: int, scope: Scope, also_use: bool = False) -> None:
        if isinstance(t, ast.Name):
            self.b.define(scope, t.id, n)
            if also_use:
                self.b.use(scope, t.id, n)
        elif isinstance(t, (ast.Tuple, ast.List)):
            for elt in t.elts:
                self.target(elt, n, scope, also_use)
        elif isinstance(t, ast.Starred):
            self.target(t.value, n, scope, also_use)
        elif isinstance(t, (ast.Attribute, ast.Subscript)):
            base = t
            while isinstance(base, (ast.Attribute, ast.Subscript)):
                if isinstance(base, ast.Subscript):
                    self.expr(base.slice, n, scope)
                base = base.value
            if isinstance(base, ast.Name):
                self.b.define(scope, base.id, n)
                self.b.use(scope, base.id, n)
            else:
                self.expr(base, n, scope)
        else:
            self.expr(t, n, scope)

    def _alias_lambda(self, targets, value, n: int, scope: Scope) -> None:
        node = self.expr_nodes.get(id(value))
        if node is not None and node in self.b.functions and len(targets) == 1 and isinstance(targets[0], ast.Name):
            self.b.alias_function(n, node)

    # -- expressions ------------------------------------------------------

    def _node(self, e: ast.expr, kind: NodeKind, container: int, value: str | None = None) -> int:
        node = self.b.add_node(
            kind,
            self.src.span(e),
            self.src.segment(e),
            self.function_name,
            parent=container,
            flows_to_parent=True,
            value=value,
        )
        self.expr_nodes[id(e)] = node
        return node

    def expr(self, e: ast.expr, container: int, scope: Scope) -> None:
        if isinstance(e, ast.Call):
            self.call(e, container, scope)
        elif isinstance(e, (ast.Attribute, ast.Subscript)):
            if isinstance(e.ctx, ast.Load):
                node = self._node(e, NodeKind.MEMBER, container)
                self.chain(e, node, scope)
            else:
                self.chain(e, container, scope)
        elif isinstance(e, ast.Name):
            self.b.use(scope, e.id, container)
        elif isinstance(e, ast.Constant):
            if isinstance(e.value, str):
                self._node(e, NodeKind.LITERAL, container, value=e.value)
        elif isinstance(e, ast.JoinedStr):
            pieces = []
            for part in e.values:
                if isinstance(part, ast.Constant) and isinstance(part.value, str):
                    pieces.append(part.value)
                else:
                    pieces.append("{}")
            node = self._node(e, NodeKind.LITERAL, container, value="".join(pieces))
            for part in e.values:
                if isinstance(part, ast.FormattedValue):
                    self.expr(part.value, node, scope)
        elif isinstance(e, ast.Lambda):
            self.lambda_(e, container, scope)
        elif isinstance(e, _COMPREHENSIONS):
            inner = Scope("comprehension", scope, scope.function)
            for gen in e.generators:
                self.expr(gen.iter, container, inner if gen is not e.generators[0] else scope)
                self.target(gen.target, container, inner)
                for cond in gen.ifs:
                    self.expr(cond, container, inner)
            for child in ("elt", "key", "value"):
                sub = getattr(e, child, None)
                if sub is not None:
                    self.expr(sub, container, inner)
        elif isinstance(e, ast.NamedExpr):
            self.expr(e.value, container, scope)
            self.target(e.target, container, scope)
        else:
            for child in ast.iter_child_nodes(e):
                if isinstance(child, ast.expr):
                    self.expr(child, container, scope)
                elif isinstance(child, ast.keyword):
                    self.expr(child.value, container, scope)

    def chain(self, e: ast.expr, node: int, scope: Scope) -> None:
        """Visit the inside of an attribute/subscript chain that ``node`` represents."""
        base = e
        while isinstance(base, (ast.Attribute, ast.Subscript)):
            if isinstance(base, ast.Subscript):
                self.expr(base.slice, node, scope)
            base = base.value
        self.expr(base, node, scope)

    def call(self, e: ast.Call, container: int, scope: Scope) -> None:
        node = self._node(e, NodeKind.CALL, container)
        func = e.func
        self.b.add_call_site(node, self.src.segment(func))
        if isinstance(func, ast.Attribute):
            receiver = func.value
            if isinstance(receiver, (ast.Attribute, ast.Subscript)):
                r = self._node(receiver, NodeKind.MEMBER, node)
                self.b.receivers[r] = node
                self.chain(receiver, r, scope)
            else:
                self.expr(receiver, node, scope)
        else:
            self.expr(func, node, scope)
        for arg in e.args:
            self.expr(arg, node, scope)
        for kw in e.keywords:
            self.expr(kw.value, node, scope)
        via_self = (
            isinstance(func, ast.Attribute)
            and isinstance(func.value, ast.Name)
            and func.value.id in ("self", "cls")
        )
        if isinstance(func, ast.Name) or via_self:
            name = func.id if isinstance(func, ast.Name) else func.attr
            positional = [self.sources(a) for a in e.args if not isinstance(a, ast.Starred)]
            keywords = {kw.arg: self.sources(kw.value) for kw in e.keywords if kw.arg}
            self.b.record_call(PendingCall(node, scope, via_self, name, positional, keywords))

    def sources(self, e: ast.expr) -> list[Source]:
        """Nodes (or names to resolve) whose value an argument expression carries."""
        node = self.expr_nodes.get(id(e))
        if node is not None:
            return [node]
        if isinstance(e, ast.Name):
            return [e.id]
        out: list[Source] = []
        for child in ast.iter_child_nodes(e):
            if isinstance(child, ast.expr):
                out.extend(self.sources(child))
        return out

    def lambda_(self, e: ast.Lambda, container: int, scope: Scope) -> None:
        node = self._node(e, NodeKind.FUNCTION, container)
        name, top_level = self.name_hints.get(id(e), ("<lambda>", False))
        fn = self.b.open_function(name, node, top_level=top_level)
        inner = Scope("function", scope, name)
        for default in list(e.args.defaults) + [d for d in e.args.kw_defaults if d is not None]:
            self.expr(default, node, scope)
        self.fn_stack.append(fn)
        for arg in list(getattr(e.args, "posonlyargs", [])) + list(e.args.args):
            self._param(fn, inner, arg, node)
        self.expr(e.body, node, inner)
        fn.returns.append(node)
        self.fn_stack.pop()
        self.b.close_function(fn)


def analyze_python(path: str, text: str) -> FileIR:
    return _Frontend(path, text).run(text)
