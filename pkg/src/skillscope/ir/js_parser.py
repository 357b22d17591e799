"""Recursive-descent parser for JavaScript, with TypeScript type erasure.

The parser builds a small ESTree-shaped tree of :class:`Node` objects.  In
TypeScript mode every type annotation, type argument list, ``as`` clause,
interface, type alias and ambient declaration is skipped while parsing, which
leaves exactly the JavaScript program the compiler would emit.

Statements that fail to parse are replaced by ``ErrorStatement`` nodes that
cover the skipped source, so one bad line never loses the rest of the file.
JSX is not supported and degrades the same way.
"""

from __future__ import annotations

from typing import Any, Callable, Iterator

from .js_lexer import Token, tokenize


class ParseError(Exception):
    def __init__(self, message: str, token: Token) -> None:
        super().__init__(message)
        self.token = token


class Node:
    """An AST node; children live in ordinary attributes."""

    __slots__ = ("type", "start", "end", "__dict__")

    def __init__(self, type: str, start: int, end: int, **fields: Any) -> None:
        self.type = type
        self.start = start
        self.end = end
        self.__dict__.update(fields)

    def __repr__(self) -> str:
        return f"Node({self.type}, {self.start}:{self.end})"

    def children(self) -> Iterator["Node"]:
        for value in self.__dict__.values():
            if isinstance(value, Node):
                yield value
            elif isinstance(value, list):
                for item in value:
                    if isinstance(item, Node):
                        yield item


_BINARY_PRECEDENCE = {
    "??": 1,
    "||": 2,
    "&&": 3,
    "|": 4,
    "^": 5,
    "&": 6,
    "==": 7,
    "!=": 7,
    "===": 7,
    "!==": 7,
    "<": 8,
    ">": 8,
    "<=": 8,
    ">=": 8,
    "instanceof": 8,
    "in": 8,
    "<<": 9,
    ">>": 9,
    ">>>": 9,
    "+": 10,
    "-": 10,
    "*": 11,
    "/": 11,
    "%": 11,
    "**": 12,
}
_LOGICAL = frozenset({"??", "||", "&&"})
_ASSIGN_OPS = frozenset(
    "= += -= *= /= %= **= <<= >>= >>>= &= |= ^= &&= ||= ??=".split()
)
_UNARY_WORDS = frozenset({"typeof", "void", "delete"})
_CLASS_MODIFIERS = frozenset(
    {"public", "private", "protected", "readonly", "static", "abstract", "override", "declare", "accessor"}
)
_STATEMENT_KEYWORDS = frozenset(
    "var let const function class if for while do return break continue throw try switch import export".split()
)


class Parser:
    def __init__(self, text: str, typescript: bool = False) -> None:
        self.text = text
        self.ts = typescript
        self.tokens, lex_errors = tokenize(text)
        self.pos = 0
        self.errors: list[tuple[int, str]] = list(lex_errors)

    # -- token helpers -------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        i = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[i]

    def at(self, value: str) -> bool:
        t = self.tokens[self.pos]
        return t.value == value and t.kind in ("punct", "name")

    def at_punct(self, value: str) -> bool:
        t = self.tokens[self.pos]
        return t.kind == "punct" and t.value == value

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def eat(self, value: str) -> bool:
        if self.at(value):
            self.advance()
            return True
        return False

    def expect(self, value: str) -> Token:
        if not self.at(value):
            self.fail(f"expected {value!r}")
        return self.advance()

    def fail(self, message: str) -> None:
        t = self.tok
        raise ParseError(f"{message}, found {t.value or t.kind!r}", t)

    @property
    def last_end(self) -> int:
        return self.tokens[self.pos - 1].end if self.pos else 0

    def speculate(self, fn: Callable[[], Any]) -> Any:
        """Run ``fn``; on ParseError rewind and return None."""
        saved = self.pos
        try:
            return fn()
        except ParseError:
            self.pos = saved
            return None

    def consume_semicolon(self) -> None:
        if self.eat(";"):
            return
        t = self.tok
        if t.kind == "eof" or t.nl_before or self.at_punct("}"):
            return
        self.fail("expected ';'")

    # -- program and statements ---------------------------------------

    def parse_program(self) -> Node:
        body = self.parse_statement_list(top_level=True)
        return Node("Program", 0, len(self.text), body=body)

    def parse_statement_list(self, top_level: bool = False) -> list[Node]:
        body: list[Node] = []
        while self.tok.kind != "eof" and not (not top_level and self.at_punct("}")):
            stmt = self.parse_statement_recovering()
            if stmt is not None:
                body.append(stmt)
        return body

    def parse_statement_recovering(self) -> Node | None:
        start_pos = self.pos
        try:
            return self.parse_statement()
        except ParseError as exc:
            self.pos = start_pos
            return self._recover(exc)

    def _recover(self, exc: ParseError) -> Node:
        start_tok = self.tok
        self.errors.append((exc.token.start, str(exc)))
        depth = 0
        consumed = 0
        while self.tok.kind != "eof":
            t = self.tok
            if consumed and depth <= 0 and t.nl_before:
                break
            if t.kind == "punct":
                if t.value in ("(", "[", "{"):
                    depth += 1
                elif t.value in (")", "]", "}"):
                    if depth <= 0 and consumed:
                        break
                    depth -= 1
                elif t.value == ";" and depth <= 0:
                    self.advance()
                    consumed += 1
                    break
            elif t.kind == "tmpl_head":
                depth += 1
            elif t.kind == "tmpl_tail":
                depth -= 1
            self.advance()
            consumed += 1
        end = self.last_end if consumed else start_tok.end
        return Node("ErrorStatement", start_tok.start, max(end, start_tok.start), message=str(exc))

    def parse_statement(self) -> Node | None:
        t = self.tok
        start = t.start
        if t.kind == "punct":
            if t.value == "{":
                return self.parse_block()
            if t.value == ";":
                self.advance()
                return Node("EmptyStatement", start, t.end)
            if t.value == "@":
                self.parse_decorators()
                return self.parse_statement()
        if t.kind == "name":
            v = t.value
            nxt = self.peek()
            if v in ("var", "const") or (v == "let" and nxt.kind in ("name",) or v == "let" and nxt.value in ("[", "{")):
                if v == "const" and self.ts and nxt.value == "enum":
                    return self.skip_ts_declaration()
                decl = self.parse_variable_declaration()
                self.consume_semicolon()
                decl.end = self.last_end
                return decl
            if v == "function" or (v == "async" and nxt.value == "function" and not nxt.nl_before):
                return self.parse_function(declaration=True)
            if v == "class":
                return self.parse_class(declaration=True)
            if v == "if":
                return self.parse_if()
            if v == "for":
                return self.parse_for()
            if v == "while":
                self.advance()
                self.expect("(")
                test = self.parse_expression()
                self.expect(")")
                body = self.parse_statement_recovering()
                return Node("WhileStatement", start, self.last_end, test=test, body=body)
            if v == "do":
                self.advance()
                body = self.parse_statement_recovering()
                self.expect("while")
                self.expect("(")
                test = self.parse_expression()
                self.expect(")")
                self.eat(";")
                return Node("DoWhileStatement", start, self.last_end, body=body, test=test)
            if v == "return":
                self.advance()
                arg = None
                if not (self.at_punct(";") or self.at_punct("}") or self.tok.nl_before or self.tok.kind == "eof"):
                    arg = self.parse_expression()
                self.consume_semicolon()
                return Node("ReturnStatement", start, self.last_end, argument=arg)
            if v in ("break", "continue"):
                self.advance()
                if self.tok.kind == "name" and not self.tok.nl_before:
                    self.advance()
                self.consume_semicolon()
                kind = "BreakStatement" if v == "break" else "ContinueStatement"
                return Node(kind, start, self.last_end)
            if v == "throw":
                self.advance()
                arg = self.parse_expression()
                self.consume_semicolon()
                return Node("ThrowStatement", start, self.last_end, argument=arg)
            if v == "try":
                return self.parse_try()
            if v == "switch":
                return self.parse_switch()
            if v == "import" and nxt.value not in ("(", "."):
                return self.parse_import()
            if v == "export":
                return self.parse_export()
            if v == "debugger":
                self.advance()
                self.consume_semicolon()
                return Node("EmptyStatement", start, self.last_end)
            if self.ts and self._at_ts_declaration():
                return self.skip_ts_declaration()
            if self.ts and v == "abstract" and nxt.value == "class":
                self.advance()
                return self.parse_class(declaration=True)
            if self.ts and v in ("namespace", "module") and nxt.kind in ("name", "string") and not nxt.nl_before:
                self.advance()
                self.advance()
                while self.eat("."):
                    self.advance()
                block = self.parse_block()
                return Node("BlockStatement", start, self.last_end, body=block.body)
            if nxt.kind == "punct" and nxt.value == ":" and v not in _STATEMENT_KEYWORDS:
                self.advance()
                self.advance()
                body = self.parse_statement_recovering()
                return Node("LabeledStatement", start, self.last_end, body=body)
        expr = self.parse_expression()
        self.consume_semicolon()
        return Node("ExpressionStatement", start, self.last_end, expression=expr)

    def parse_block(self) -> Node:
        start = self.expect("{").start
        body = self.parse_statement_list()
        self.expect("}")
        return Node("BlockStatement", start, self.last_end, body=body)

    def parse_variable_declaration(self, no_in: bool = False) -> Node:
        t = self.advance()
        declarations = []
        while True:
            d_start = self.tok.start
            target = self.parse_binding_target()
            if self.ts:
                self.eat("!")
                if self.eat(":"):
                    self.skip_type()
            init = None
            if self.eat("="):
                init = self.parse_assignment(no_in=no_in)
            declarations.append(Node("VariableDeclarator", d_start, self.last_end, id=target, init=init))
            if not self.eat(","):
                break
        return Node("VariableDeclaration", t.start, self.last_end, kind=t.value, declarations=declarations)

    def parse_if(self) -> Node:
        start = self.advance().start
        self.expect("(")
        test = self.parse_expression()
        self.expect(")")
        consequent = self.parse_statement_recovering()
        alternate = None
        if self.eat("else"):
            alternate = self.parse_statement_recovering()
        return Node("IfStatement", start, self.last_end, test=test, consequent=consequent, alternate=alternate)

    def parse_for(self) -> Node:
        start = self.advance().start
        self.eat("await")
        self.expect("(")
        init = None
        if self.at_punct(";"):
            pass
        elif self.tok.value in ("var", "let", "const") and self.tok.kind == "name" and (
            self.peek().kind == "name" or self.peek().value in ("[", "{")
        ):
            init = self.parse_variable_declaration(no_in=True)
        else:
            init = self.parse_expression(no_in=True)
        if self.tok.kind == "name" and self.tok.value in ("of", "in"):
            kind = "ForOfStatement" if self.advance().value == "of" else "ForInStatement"
            right = self.parse_assignment() if kind == "ForOfStatement" else self.parse_expression()
            self.expect(")")
            body = self.parse_statement_recovering()
            return Node(kind, start, self.last_end, left=init, right=right, body=body)
        self.expect(";")
        test = None if self.at_punct(";") else self.parse_expression()
        self.expect(";")
        update = None if self.at_punct(")") else self.parse_expression()
        self.expect(")")
        body = self.parse_statement_recovering()
        return Node("ForStatement", start, self.last_end, init=init, test=test, update=update, body=body)

    def parse_try(self) -> Node:
        start = self.advance().start
        block = self.parse_block()
        handler = finalizer = None
        if self.at("catch"):
            c_start = self.advance().start
            param = None
            if self.eat("("):
                param = self.parse_binding_target()
                if self.ts and self.eat(":"):
                    self.skip_type()
                self.expect(")")
            body = self.parse_block()
            handler = Node("CatchClause", c_start, self.last_end, param=param, body=body)
        if self.eat("finally"):
            finalizer = self.parse_block()
        if handler is None and finalizer is None:
            self.fail("expected 'catch' or 'finally'")
        return Node("TryStatement", start, self.last_end, block=block, handler=handler, finalizer=finalizer)

    def parse_switch(self) -> Node:
        start = self.advance().start
        self.expect("(")
        disc = self.parse_expression()
        self.expect(")")
        self.expect("{")
        cases = []
        while not self.at_punct("}"):
            c_start = self.tok.start
            if self.eat("case"):
                test = self.parse_expression()
            else:
                self.expect("default")
                test = None
            self.expect(":")
            body = []
            while not (self.at("case") or self.at("default") or self.at_punct("}") or self.tok.kind == "eof"):
                stmt = self.parse_statement_recovering()
                if stmt is not None:
                    body.append(stmt)
            cases.append(Node("SwitchCase", c_start, self.last_end, test=test, consequent=body))
        self.expect("}")
        return Node("SwitchStatement", start, self.last_end, discriminant=disc, cases=cases)

    def parse_import(self) -> Node:
        start = self.advance().start
        specifiers: list[tuple[str, str | None]] = []  # (local, imported); imported None = namespace
        if self.ts and self.tok.value == "type" and self.peek().value not in (",", "from", "="):
            self.advance()
            self._skip_to_statement_end()
            return Node("TSDeclaration", start, self.last_end)
        if self.tok.kind == "string":
            source = self.advance()
            self.consume_semicolon()
            return Node("ImportDeclaration", start, self.last_end, source=_string_value(source.value), specifiers=[])
        if self.tok.kind == "name" and self.tok.value != "from" or (self.tok.value == "from" and self.peek().value in (",", "from")):
            local = self.advance().value
            if self.ts and self.at_punct("="):
                # import x = require("y")
                self.advance()
                expr = self.parse_assignment()
                self.consume_semicolon()
                src = _require_source(expr)
                return Node(
                    "ImportDeclaration", start, self.last_end, source=src or "", specifiers=[(local, None)]
                )
            specifiers.append((local, "default"))
            self.eat(",")
        if self.eat("*"):
            self.expect("as")
            specifiers.append((self.advance().value, None))
        elif self.eat("{"):
            while not self.at_punct("}"):
                if self.ts and self.tok.value == "type" and self.peek().kind in ("name", "string") and self.peek().value != "as":
                    self.advance()
                imported = _string_value(self.advance().value)
                local = imported
                if self.eat("as"):
                    local = self.advance().value
                specifiers.append((local, imported))
                if not self.eat(","):
                    break
            self.expect("}")
        self.expect("from")
        source = self.advance()
        if source.kind != "string":
            self.fail("expected module specifier")
        if self.tok.value in ("assert", "with") and not self.tok.nl_before and self.peek().value == "{":
            self.advance()
            self._skip_balanced()
        self.consume_semicolon()
        return Node("ImportDeclaration", start, self.last_end, source=_string_value(source.value), specifiers=specifiers)

    def parse_export(self) -> Node:
        start = self.advance().start
        if self.eat("default"):
            if self.at("function") or (self.at("async") and self.peek().value == "function"):
                decl = self.parse_function(declaration=True, allow_anonymous=True)
            elif self.at("class"):
                decl = self.parse_class(declaration=True, allow_anonymous=True)
            else:
                decl = self.parse_assignment()
                self.consume_semicolon()
            return Node("ExportDefaultDeclaration", start, self.last_end, declaration=decl)
        if self.ts and (self.at("=") or self.at("as")):
            self._skip_to_statement_end()
            return Node("TSDeclaration", start, self.last_end)
        if self.eat("*"):
            if self.eat("as"):
                self.advance()
            self.expect("from")
            source = self.advance()
            self.consume_semicolon()
            return Node("ExportAllDeclaration", start, self.last_end, source=_string_value(source.value))
        if self.at_punct("{") or (self.ts and self.at("type") and self.peek().value == "{"):
            if self.at("type"):
                self.advance()
            self.advance()
            specifiers = []
            while not self.at_punct("}"):
                local = self.advance().value
                exported = local
                if self.eat("as"):
                    exported = self.advance().value
                specifiers.append((local, exported))
                if not self.eat(","):
                    break
            self.expect("}")
            source = None
            if self.eat("from"):
                source = _string_value(self.advance().value)
            self.consume_semicolon()
            return Node(
                "ExportNamedDeclaration", start, self.last_end, declaration=None, specifiers=specifiers, source=source
            )
        decl = self.parse_statement()
        return Node("ExportNamedDeclaration", start, self.last_end, declaration=decl, specifiers=[], source=None)

    # -- TypeScript skipping -------------------------------------------

    def _at_ts_declaration(self) -> bool:
        t, nxt = self.tok, self.peek()
        if t.kind != "name" or nxt.nl_before:
            return False
        if t.value == "interface" and nxt.kind == "name":
            return True
        if t.value == "type" and nxt.kind == "name" and self.peek(2).value in ("=", "<"):
            return True
        if t.value == "enum" and nxt.kind == "name":
            return True
        if t.value == "declare" and nxt.kind == "name":
            return True
        return False

    def skip_ts_declaration(self) -> Node:
        start = self.tok.start
        while self.tok.kind != "eof":
            if self.at_punct("{"):
                self._skip_balanced()
                if self.at_punct(";"):
                    self.advance()
                break
            if self.at_punct(";"):
                self.advance()
                break
            if self.at_punct("=") :
                self.advance()
                self.skip_type()
                self.consume_semicolon()
                break
            if self.at_punct("<"):
                self.skip_type_args()
                continue
            self.advance()
            if self.tok.nl_before and not self.at_punct("{") and not self.at_punct("=") and self.tok.value not in (
                "extends",
                "implements",
                "|",
                "&",
            ):
                break
        return Node("TSDeclaration", start, self.last_end)

    def _skip_to_statement_end(self) -> None:
        depth = 0
        while self.tok.kind != "eof":
            t = self.tok
            if t.kind == "punct" and t.value in "([{":
                depth += 1
            elif t.kind == "punct" and t.value in ")]}":
                if depth == 0:
                    return
                depth -= 1
            elif depth == 0 and t.kind == "punct" and t.value == ";":
                self.advance()
                return
            self.advance()
            if depth == 0 and self.tok.nl_before:
                return

    def _skip_balanced(self) -> None:
        opener = self.tok
        closer = {"(": ")", "[": "]", "{": "}"}.get(opener.value) if opener.kind == "punct" else None
        if closer is None:
            raise ParseError("expected a bracket", opener)
        self.advance()
        depth = 1
        while self.tok.kind != "eof":
            t = self.advance()
            if t.kind != "punct":
                if t.kind == "tmpl_head":
                    depth += 1
                elif t.kind == "tmpl_tail":
                    depth -= 1
                continue
            if t.value in "([{":
                depth += 1
            elif t.value in ")]}":
                depth -= 1
                if depth == 0:
                    if t.value != closer:
                        raise ParseError("mismatched bracket", t)
                    return
        raise ParseError("unbalanced bracket", self.tok)

    def skip_type(self) -> None:
        """Skip one TypeScript type expression."""
        self._skip_type_operand()
        while True:
            t = self.tok
            if t.kind == "punct" and t.value in ("|", "&") :
                self.advance()
                self._skip_type_operand()
            elif t.kind == "punct" and t.value == "[" and not t.nl_before:
                self._skip_balanced()
            elif t.kind == "name" and t.value == "extends" and not t.nl_before:
                self.advance()
                self._skip_type_operand()
                if self.eat("?"):
                    self.skip_type()
                    self.expect(":")
                    self.skip_type()
            elif t.kind == "name" and t.value == "is" and not t.nl_before:
                self.advance()
                self.skip_type()
            else:
                return

    def _skip_type_operand(self) -> None:
        while self.tok.kind == "punct" and self.tok.value in ("|", "&"):
            self.advance()
        t = self.tok
        if t.kind == "name" and t.value in ("keyof", "typeof", "readonly", "unique", "infer", "asserts", "new", "abstract"):
            self.advance()
            if t.value == "new" or t.value == "abstract":
                if self.at("new"):
                    self.advance()
                if self.at_punct("<"):
                    self.skip_type_args()
                self._skip_balanced()
                self.expect("=>")
                self.skip_type()
                return
            if t.value == "asserts" and not self.tok.kind == "name":
                return
            self._skip_type_operand()
            return
        if t.kind == "punct" and t.value == "(":
            self._skip_balanced()
            if self.eat("=>"):
                self.skip_type()
            return
        if t.kind == "punct" and t.value == "<":
            self.skip_type_args()
            self._skip_balanced()
            self.expect("=>")
            self.skip_type()
            return
        if t.kind == "punct" and t.value in ("{", "["):
            self._skip_balanced()
            return
        if t.kind in ("string", "num", "template"):
            self.advance()
            return
        if t.kind == "tmpl_head":
            depth = 0
            while self.tok.kind != "eof":
                k = self.advance().kind
                if k == "tmpl_head":
                    depth += 1
                elif k == "tmpl_tail":
                    depth -= 1
                    if depth == 0:
                        return
            return
        if t.kind == "punct" and t.value == "-" and self.peek().kind == "num":
            self.advance()
            self.advance()
            return
        if t.kind == "name":
            self.advance()
            while self.at_punct(".") and self.peek().kind == "name":
                self.advance()
                self.advance()
            if self.at_punct("<") and not self.tok.nl_before:
                self.skip_type_args()
            return
        self.fail("expected a type")

    def skip_type_args(self) -> None:
        """Skip ``<...>``; the closing angle may be fused into ``>>`` or ``>=``."""
        self.expect("<")
        depth = 1
        while self.tok.kind != "eof":
            t = self.tok
            if t.kind == "punct":
                if t.value in ("(", "[", "{"):
                    self._skip_balanced()
                    continue
                if t.value in (")", "]", "}", ";"):
                    self.fail("unterminated type arguments")
                if t.value == "<":
                    depth += 1
                elif t.value == "=>":
                    pass
                elif t.value.startswith(">"):
                    closes = len(t.value) - len(t.value.lstrip(">"))
                    if closes >= depth:
                        rest = t.value[depth:]
                        self.advance()
                        if rest:
                            # re-inject the remainder (e.g. "=" of ">=") as its own token
                            tok = Token("punct", rest, t.end - len(rest), t.end, False)
                            self.tokens.insert(self.pos, tok)
                        return
                    depth -= closes
            self.advance()
        self.fail("unterminated type arguments")

    # -- functions and classes -----------------------------------------

    def parse_decorators(self) -> list[Node]:
        decorators = []
        while self.at_punct("@"):
            self.advance()
            decorators.append(self.parse_lhs(allow_call=True))
        return decorators

    def parse_function(self, declaration: bool, allow_anonymous: bool = False) -> Node:
        start = self.tok.start
        is_async = self.eat("async")
        self.expect("function")
        self.eat("*")
        name = None
        if self.tok.kind == "name" and not self.at_punct("("):
            name = self.advance().value
        elif declaration and not allow_anonymous:
            self.fail("expected function name")
        if self.ts and self.at_punct("<"):
            self.skip_type_args()
        params = self.parse_params()
        if self.ts and self.eat(":"):
            self.skip_type()
        if self.ts and not self.at_punct("{"):
            # overload signature without a body
            self.consume_semicolon()
            return Node("TSDeclaration", start, self.last_end)
        body = self.parse_function_body()
        kind = "FunctionDeclaration" if declaration else "FunctionExpression"
        return Node(kind, start, self.last_end, name=name, params=params, body=body, expression=False, is_async=is_async)

    def parse_function_body(self) -> Node:
        return self.parse_block()

    def parse_params(self) -> list[Node]:
        self.expect("(")
        params = []
        while not self.at_punct(")"):
            while self.at_punct("@"):
                self.parse_decorators()
            if self.ts:
                while self.tok.kind == "name" and self.tok.value in _CLASS_MODIFIERS and self.peek().kind == "name":
                    self.advance()
            params.append(self.parse_binding_element(allow_types=True))
            if not self.eat(","):
                break
        self.expect(")")
        return params

    def parse_binding_element(self, allow_types: bool = False) -> Node:
        start = self.tok.start
        if self.eat("..."):
            target = self.parse_binding_target()
            if allow_types and self.ts and self.eat(":"):
                self.skip_type()
            return Node("RestElement", start, self.last_end, argument=target)
        target = self.parse_binding_target()
        if allow_types and self.ts:
            self.eat("?")
            if self.eat(":"):
                self.skip_type()
        if self.eat("="):
            default = self.parse_assignment()
            return Node("AssignmentPattern", start, self.last_end, left=target, right=default)
        return target

    def parse_binding_target(self) -> Node:
        t = self.tok
        if t.kind == "punct" and t.value == "[":
            self.advance()
            elements: list[Node | None] = []
            while not self.at_punct("]"):
                if self.at_punct(","):
                    self.advance()
                    elements.append(None)
                    continue
                elements.append(self.parse_binding_element())
                if not self.eat(","):
                    break
            self.expect("]")
            return Node("ArrayPattern", t.start, self.last_end, elements=elements)
        if t.kind == "punct" and t.value == "{":
            self.advance()
            props = []
            while not self.at_punct("}"):
                p_start = self.tok.start
                if self.eat("..."):
                    arg = self.parse_binding_target()
                    props.append(Node("RestElement", p_start, self.last_end, argument=arg))
                else:
                    if self.eat("["):
                        key = self.parse_assignment()
                        self.expect("]")
                        key_name = None
                    else:
                        key_tok = self.advance()
                        key_name = _string_value(key_tok.value) if key_tok.kind == "string" else key_tok.value
                        key = Node("Identifier", key_tok.start, key_tok.end, name=key_name)
                    if self.eat(":"):
                        value = self.parse_binding_element()
                    else:
                        value = Node("Identifier", key.start, key.end, name=key_name)
                        if self.eat("="):
                            default = self.parse_assignment()
                            value = Node("AssignmentPattern", p_start, self.last_end, left=value, right=default)
                    props.append(Node("Property", p_start, self.last_end, key=key, value=value, computed=key_name is None, shorthand=False, kind="init"))
                if not self.eat(","):
                    break
            self.expect("}")
            return Node("ObjectPattern", t.start, self.last_end, properties=props)
        if t.kind == "name":
            self.advance()
            return Node("Identifier", t.start, t.end, name=t.value)
        self.fail("expected a binding name or pattern")
        raise AssertionError  # unreachable

    def parse_class(self, declaration: bool, allow_anonymous: bool = False) -> Node:
        start = self.expect("class").start
        name = None
        if self.tok.kind == "name" and self.tok.value not in ("extends", "implements") and not self.at_punct("{"):
            name = self.advance().value
        elif declaration and not allow_anonymous:
            self.fail("expected class name")
        if self.ts and self.at_punct("<"):
            self.skip_type_args()
        superclass = None
        if self.eat("extends"):
            superclass = self.parse_lhs(allow_call=True)
            if self.ts and self.at_punct("<"):
                self.skip_type_args()
        if self.ts and self.eat("implements"):
            self.skip_type()
            while self.eat(","):
                self.skip_type()
        self.expect("{")
        members = []
        while not self.at_punct("}") and self.tok.kind != "eof":
            if self.eat(";"):
                continue
            m_start = self.pos
            try:
                member = self.parse_class_member()
            except ParseError as exc:
                self.pos = m_start
                member = self._recover(exc)
            if member is not None:
                members.append(member)
        self.expect("}")
        kind = "ClassDeclaration" if declaration else "ClassExpression"
        return Node(kind, start, self.last_end, name=name, superclass=superclass, members=members)

    def parse_class_member(self) -> Node | None:
        start = self.tok.start
        self.parse_decorators()
        is_static = False
        while (
            self.tok.kind == "name"
            and self.tok.value in _CLASS_MODIFIERS
            and self.peek().value not in ("(", "=", ";", ":", "?", "!", "<")
            and not self.peek().nl_before
        ):
            if self.advance().value == "static":
                is_static = True
        if is_static and self.at_punct("{"):
            block = self.parse_block()
            return Node("StaticBlock", start, self.last_end, body=block.body)
        if self.ts and self.at_punct("[") and self.peek().kind == "name" and self.peek(2).value == ":":
            self._skip_balanced()
            self.eat("?")
            if self.eat(":"):
                self.skip_type()
            self.consume_semicolon()
            return None
        kind = "method"
        if self.tok.value in ("get", "set") and self.peek().value not in ("(", "=", ";", ":", "?", "}") and not self.peek().nl_before:
            kind = self.advance().value
        if self.tok.value == "async" and self.peek().value not in ("(", "=", ";", ":") and not self.peek().nl_before:
            self.advance()
        self.eat("*")
        key, key_name = self.parse_property_key()
        if self.ts:
            self.eat("?")
            self.eat("!")
        if self.at_punct("(") or self.at_punct("<"):
            if self.ts and self.at_punct("<"):
                self.skip_type_args()
            fn_start = self.tok.start
            params = self.parse_params()
            if self.ts and self.eat(":"):
                self.skip_type()
            if not self.at_punct("{"):
                self.consume_semicolon()
                return None
            body = self.parse_function_body()
            fn = Node("FunctionExpression", fn_start, self.last_end, name=key_name, params=params, body=body, expression=False, is_async=False)
            return Node("MethodDefinition", start, self.last_end, key=key, name=key_name, value=fn, kind=kind, static=is_static)
        if self.ts and self.eat(":"):
            self.skip_type()
        value = None
        if self.eat("="):
            value = self.parse_assignment()
        self.consume_semicolon()
        return Node("PropertyDefinition", start, self.last_end, key=key, name=key_name, value=value, static=is_static)

    def parse_property_key(self) -> tuple[Node, str | None]:
        t = self.tok
        if t.kind == "punct" and t.value == "[":
            self.advance()
            expr = self.parse_assignment()
            self.expect("]")
            return expr, None
        if t.kind in ("name", "string", "num"):
            self.advance()
            name = _string_value(t.value) if t.kind == "string" else t.value
            return Node("Identifier", t.start, t.end, name=name), name
        self.fail("expected property key")
        raise AssertionError  # unreachable

    # -- expressions ---------------------------------------------------

    def parse_expression(self, no_in: bool = False) -> Node:
        start = self.tok.start
        expr = self.parse_assignment(no_in=no_in)
        if self.at_punct(","):
            exprs = [expr]
            while self.eat(","):
                exprs.append(self.parse_assignment(no_in=no_in))
            return Node("SequenceExpression", start, self.last_end, expressions=exprs)
        return expr

    def parse_assignment(self, no_in: bool = False) -> Node:
        arrow = self.try_arrow(no_in)
        if arrow is not None:
            return arrow
        t = self.tok
        if t.kind == "name" and t.value == "yield":
            nxt = self.peek()
            self.advance()
            self.eat("*")
            arg = None
            if not (nxt.nl_before or nxt.kind == "eof" or (nxt.kind == "punct" and nxt.value in (")", "]", "}", ",", ";", ":"))):
                arg = self.parse_assignment(no_in)
            return Node("YieldExpression", t.start, self.last_end, argument=arg)
        start = t.start
        left = self.parse_conditional(no_in)
        op = self.tok
        if op.kind == "punct" and op.value in _ASSIGN_OPS:
            self.advance()
            right = self.parse_assignment(no_in)
            return Node("AssignmentExpression", start, self.last_end, operator=op.value, left=left, right=right)
        return left

    def try_arrow(self, no_in: bool) -> Node | None:
        t = self.tok
        nxt = self.peek()
        if t.kind == "name" and t.value == "async" and not nxt.nl_before:
            if nxt.kind == "name" and self.peek(2).value == "=>":
                start = t.start
                self.advance()
                return self._arrow_from_single(start, no_in)
            if nxt.value in ("(", "<"):
                start = t.start
                saved = self.pos
                self.advance()
                result = self.speculate(lambda: self._arrow_params_then_body(start, no_in))
                if result is None:
                    self.pos = saved
                return result
            return None
        if t.kind == "name" and nxt.kind == "punct" and nxt.value == "=>" and not nxt.nl_before:
            return self._arrow_from_single(t.start, no_in)
        if t.kind == "punct" and (t.value == "(" or (self.ts and t.value == "<")):
            if t.value == "(" and not self._paren_followed_by_arrow():
                return None
            return self.speculate(lambda: self._arrow_params_then_body(t.start, no_in))
        return None

    def _paren_followed_by_arrow(self) -> bool:
        depth = 0
        i = self.pos
        toks = self.tokens
        while i < len(toks):
            t = toks[i]
            if t.kind == "eof":
                return False
            if t.kind == "punct":
                if t.value in ("(", "[", "{"):
                    depth += 1
                elif t.value in (")", "]", "}"):
                    depth -= 1
                    if depth == 0:
                        nxt = toks[i + 1] if i + 1 < len(toks) else t
                        if nxt.kind == "punct" and nxt.value == "=>" and not nxt.nl_before:
                            return True
                        return self.ts and nxt.kind == "punct" and nxt.value == ":"
            elif t.kind == "tmpl_head":
                depth += 1
            elif t.kind == "tmpl_tail":
                depth -= 1
            i += 1
        return False

    def _arrow_from_single(self, start: int, no_in: bool) -> Node:
        p = self.advance()
        param = Node("Identifier", p.start, p.end, name=p.value)
        self.expect("=>")
        return self._arrow_body(start, [param], no_in)

    def _arrow_params_then_body(self, start: int, no_in: bool) -> Node:
        if self.ts and self.at_punct("<"):
            self.skip_type_args()
        params = self.parse_params()
        if self.ts and self.eat(":"):
            self.skip_type()
        if self.tok.nl_before:
            self.fail("line break before '=>'")
        self.expect("=>")
        return self._arrow_body(start, params, no_in)

    def _arrow_body(self, start: int, params: list[Node], no_in: bool) -> Node:
        if self.at_punct("{"):
            body = self.parse_function_body()
            return Node("ArrowFunctionExpression", start, self.last_end, name=None, params=params, body=body, expression=False, is_async=False)
        body = self.parse_assignment(no_in)
        return Node("ArrowFunctionExpression", start, self.last_end, name=None, params=params, body=body, expression=True, is_async=False)

    def parse_conditional(self, no_in: bool = False) -> Node:
        start = self.tok.start
        test = self.parse_binary(0, no_in)
        if self.at_punct("?"):
            self.advance()
            consequent = self.parse_assignment()
            self.expect(":")
            alternate = self.parse_assignment(no_in)
            return Node("ConditionalExpression", start, self.last_end, test=test, consequent=consequent, alternate=alternate)
        return test

    def parse_binary(self, min_prec: int, no_in: bool) -> Node:
        start = self.tok.start
        left = self.parse_unary()
        while True:
            t = self.tok
            if self.ts and t.kind == "name" and t.value in ("as", "satisfies") and not t.nl_before:
                self.advance()
                if self.at("const"):
                    self.advance()
                else:
                    self.skip_type()
                left = Node("TSAsExpression", start, self.last_end, expression=left)
                continue
            if t.kind not in ("punct", "name"):
                break
            op = t.value
            prec = _BINARY_PRECEDENCE.get(op)
            if prec is None or prec <= min_prec and not (op == "**" and prec == min_prec):
                break
            if t.kind == "name" and op not in ("in", "instanceof"):
                break
            if op == "in" and no_in:
                break
            self.advance()
            next_min = prec - 1 if op == "**" else prec
            right = self.parse_binary(next_min, no_in)
            kind = "LogicalExpression" if op in _LOGICAL else "BinaryExpression"
            left = Node(kind, start, self.last_end, operator=op, left=left, right=right)
        return left

    def parse_unary(self) -> Node:
        t = self.tok
        start = t.start
        if t.kind == "punct" and t.value in ("!", "~", "+", "-"):
            self.advance()
            arg = self.parse_unary()
            return Node("UnaryExpression", start, self.last_end, operator=t.value, argument=arg)
        if t.kind == "punct" and t.value in ("++", "--"):
            self.advance()
            arg = self.parse_unary()
            return Node("UpdateExpression", start, self.last_end, operator=t.value, argument=arg, prefix=True)
        if t.kind == "name" and t.value in _UNARY_WORDS:
            self.advance()
            arg = self.parse_unary()
            return Node("UnaryExpression", start, self.last_end, operator=t.value, argument=arg)
        if t.kind == "name" and t.value == "await":
            nxt = self.peek()
            if not (nxt.kind == "punct" and nxt.value in (")", "]", "}", ",", ";", ":", "=", ".", "?.")) and nxt.kind != "eof":
                self.advance()
                arg = self.parse_unary()
                return Node("AwaitExpression", start, self.last_end, argument=arg)
        if self.ts and t.kind == "punct" and t.value == "<":
            self.skip_type_args()
            arg = self.parse_unary()
            return Node("TSAsExpression", start, self.last_end, expression=arg)
        expr = self.parse_lhs(allow_call=True)
        t = self.tok
        if t.kind == "punct" and t.value in ("++", "--") and not t.nl_before:
            self.advance()
            return Node("UpdateExpression", start, self.last_end, operator=t.value, argument=expr, prefix=False)
        return expr

    def parse_arguments(self) -> list[Node]:
        self.expect("(")
        args = []
        while not self.at_punct(")"):
            a_start = self.tok.start
            if self.eat("..."):
                arg = self.parse_assignment()
                args.append(Node("SpreadElement", a_start, self.last_end, argument=arg))
            else:
                args.append(self.parse_assignment())
            if not self.eat(","):
                break
        self.expect(")")
        return args

    def parse_lhs(self, allow_call: bool) -> Node:
        t = self.tok
        start = t.start
        if t.kind == "name" and t.value == "new":
            self.advance()
            if self.eat("."):
                self.advance()
                expr: Node = Node("MetaProperty", start, self.last_end)
            else:
                callee = self.parse_lhs(allow_call=False)
                if self.ts and self.at_punct("<"):
                    self.speculate(self.skip_type_args)
                args = self.parse_arguments() if self.at_punct("(") else []
                expr = Node("NewExpression", start, self.last_end, callee=callee, arguments=args)
        else:
            expr = self.parse_primary()
        return self.parse_call_tail(expr, start, allow_call)

    def parse_call_tail(self, expr: Node, start: int, allow_call: bool) -> Node:
        while True:
            t = self.tok
            if t.kind == "punct":
                if t.value == ".":
                    self.advance()
                    prop = self.advance()
                    if prop.kind != "name":
                        raise ParseError("expected property name", prop)
                    expr = Node("MemberExpression", start, prop.end, object=expr, property=Node("Identifier", prop.start, prop.end, name=prop.value), computed=False, optional=False)
                    continue
                if t.value == "?.":
                    self.advance()
                    if self.at_punct("(") and allow_call:
                        args = self.parse_arguments()
                        expr = Node("CallExpression", start, self.last_end, callee=expr, arguments=args, optional=True)
                    elif self.at_punct("["):
                        self.advance()
                        prop_expr = self.parse_expression()
                        self.expect("]")
                        expr = Node("MemberExpression", start, self.last_end, object=expr, property=prop_expr, computed=True, optional=True)
                    else:
                        prop = self.advance()
                        expr = Node("MemberExpression", start, prop.end, object=expr, property=Node("Identifier", prop.start, prop.end, name=prop.value), computed=False, optional=True)
                    continue
                if t.value == "[":
                    self.advance()
                    prop_expr = self.parse_expression()
                    self.expect("]")
                    expr = Node("MemberExpression", start, self.last_end, object=expr, property=prop_expr, computed=True, optional=False)
                    continue
                if t.value == "(" and allow_call:
                    args = self.parse_arguments()
                    expr = Node("CallExpression", start, self.last_end, callee=expr, arguments=args, optional=False)
                    continue
                if t.value == "!" and self.ts and not t.nl_before:
                    self.advance()
                    continue
                if t.value == "<" and self.ts and allow_call and not t.nl_before:
                    ok = self.speculate(self._type_args_before_call)
                    if ok:
                        continue
                    break
            if t.kind in ("template", "tmpl_head") and not (t.nl_before and False):
                quasi = self.parse_template()
                expr = Node("TaggedTemplateExpression", start, self.last_end, tag=expr, quasi=quasi)
                continue
            return expr
        return expr

    def _type_args_before_call(self) -> bool:
        self.skip_type_args()
        if not (self.at_punct("(") or self.tok.kind in ("template", "tmpl_head")):
            self.fail("type arguments not followed by a call")
        return True

    def parse_template(self) -> Node:
        t = self.advance()
        start = t.start
        quasis = [t.value]
        exprs = []
        if t.kind == "template":
            return Node("TemplateLiteral", start, t.end, quasis=quasis, expressions=exprs)
        while True:
            exprs.append(self.parse_expression())
            part = self.advance()
            if part.kind == "tmpl_middle":
                quasis.append(part.value)
                continue
            if part.kind == "tmpl_tail":
                quasis.append(part.value)
                return Node("TemplateLiteral", start, part.end, quasis=quasis, expressions=exprs)
            raise ParseError("unterminated template substitution", part)

    def parse_primary(self) -> Node:
        t = self.tok
        start = t.start
        if t.kind == "name":
            v = t.value
            if v == "function" or (v == "async" and self.peek().value == "function" and not self.peek().nl_before):
                return self.parse_function(declaration=False)
            if v == "class":
                return self.parse_class(declaration=False)
            if v == "this":
                self.advance()
                return Node("ThisExpression", start, t.end)
            if v == "super":
                self.advance()
                return Node("Super", start, t.end)
            if v in ("true", "false", "null"):
                self.advance()
                return Node("Literal", start, t.end, value=v, raw=v, kind="keyword")
            if v == "import":
                self.advance()
                if self.eat("."):
                    prop = self.advance()
                    return Node("MetaProperty", start, prop.end, meta="import", property=prop.value)
                args = self.parse_arguments()
                return Node("ImportExpression", start, self.last_end, arguments=args)
            if v in _STATEMENT_KEYWORDS and v not in ("let",) and v not in ("async",):
                if v not in ("import",):
                    self.fail(f"unexpected keyword {v!r}")
            self.advance()
            return Node("Identifier", start, t.end, name=v)
        if t.kind == "num":
            self.advance()
            return Node("Literal", start, t.end, value=t.value, raw=t.value, kind="number")
        if t.kind == "string":
            self.advance()
            return Node("Literal", start, t.end, value=_string_value(t.value), raw=t.value, kind="string")
        if t.kind == "regex":
            self.advance()
            return Node("Literal", start, t.end, value=t.value, raw=t.value, kind="regex")
        if t.kind in ("template", "tmpl_head"):
            return self.parse_template()
        if t.kind == "punct":
            if t.value == "(":
                self.advance()
                expr = self.parse_expression()
                self.expect(")")
                return Node("ParenthesizedExpression", start, self.last_end, expression=expr)
            if t.value == "[":
                return self.parse_array()
            if t.value == "{":
                return self.parse_object()
        self.fail("unexpected token")
        raise AssertionError  # unreachable

    def parse_array(self) -> Node:
        start = self.expect("[").start
        elements: list[Node | None] = []
        while not self.at_punct("]"):
            if self.at_punct(","):
                self.advance()
                elements.append(None)
                continue
            e_start = self.tok.start
            if self.eat("..."):
                arg = self.parse_assignment()
                elements.append(Node("SpreadElement", e_start, self.last_end, argument=arg))
            else:
                elements.append(self.parse_assignment())
            if not self.eat(","):
                break
        self.expect("]")
        return Node("ArrayExpression", start, self.last_end, elements=elements)

    def parse_object(self) -> Node:
        start = self.expect("{").start
        props = []
        while not self.at_punct("}"):
            p_start = self.tok.start
            if self.eat("..."):
                arg = self.parse_assignment()
                props.append(Node("SpreadElement", p_start, self.last_end, argument=arg))
            else:
                props.append(self.parse_object_member(p_start))
            if not self.eat(","):
                break
        self.expect("}")
        return Node("ObjectExpression", start, self.last_end, properties=props)

    def parse_object_member(self, start: int) -> Node:
        kind = "init"
        nxt = self.peek()
        if self.tok.value in ("get", "set") and self.tok.kind == "name" and nxt.value not in (",", ":", "(", "}", "="):
            kind = self.advance().value
        elif self.tok.value == "async" and self.tok.kind == "name" and nxt.value not in (",", ":", "(", "}", "=") and not nxt.nl_before:
            self.advance()
        self.eat("*")
        key, key_name = self.parse_property_key()
        if self.at_punct("(") or (self.ts and self.at_punct("<")):
            if self.ts and self.at_punct("<"):
                self.skip_type_args()
            fn_start = self.tok.start
            params = self.parse_params()
            if self.ts and self.eat(":"):
                self.skip_type()
            body = self.parse_function_body()
            fn = Node("FunctionExpression", fn_start, self.last_end, name=key_name, params=params, body=body, expression=False, is_async=False)
            return Node("Property", start, self.last_end, key=key, value=fn, computed=key_name is None, shorthand=False, kind=kind)
        if self.eat(":"):
            value = self.parse_assignment()
            return Node("Property", start, self.last_end, key=key, value=value, computed=key_name is None, shorthand=False, kind=kind)
        if self.at_punct("="):
            # shorthand with default, only valid as a destructuring target
            self.advance()
            default = self.parse_assignment()
            value = Node("AssignmentPattern", start, self.last_end, left=Node("Identifier", key.start, key.end, name=key_name), right=default)
            return Node("Property", start, self.last_end, key=key, value=value, computed=False, shorthand=True, kind=kind)
        value = Node("Identifier", key.start, key.end, name=key_name)
        return Node("Property", start, self.last_end, key=key, value=value, computed=False, shorthand=True, kind=kind)


def _string_value(raw: str) -> str:
    if len(raw) >= 2 and raw[0] in "'\"`" and raw[-1] == raw[0]:
        body = raw[1:-1]
    else:
        body = raw[1:] if raw[:1] in "'\"" else raw
    if "\\" not in body:
        return body
    out = []
    i = 0
    simple = {"n": "\n", "t": "\t", "r": "\r", "b": "\b", "f": "\f", "v": "\v", "0": "\0"}
    while i < len(body):
        ch = body[i]
        if ch == "\\" and i + 1 < len(body):
            nxt = body[i + 1]
            if nxt in simple:
                out.append(simple[nxt])
            elif nxt == "\n":
                pass
            else:
                out.append(nxt)
            i += 2
            continue
        out.append(ch)
        i += 1
    return "".join(out)


def _require_source(expr: Node) -> str | None:
    if (
        expr.type == "CallExpression"
        and expr.callee.type == "Identifier"
        and expr.callee.name == "require"
        and expr.arguments
        and expr.arguments[0].type == "Literal"
        and expr.arguments[0].kind == "string"
    ):
        return expr.arguments[0].value
    return None


def parse(text: str, typescript: bool = False) -> tuple[Node, list[tuple[int, str]]]:
    """Parse a whole file; returns the Program node and ``(offset, message)`` errors."""
    parser = Parser(text, typescript)
    program = parser.parse_program()
    return program, parser.errors
