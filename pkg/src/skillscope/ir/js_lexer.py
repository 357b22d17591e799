"""Tokenizer for JavaScript and TypeScript source.

Produces a flat token list.  Template literals are split into head, middle
and tail pieces around their ``${...}`` substitutions so the parser can
recurse into the embedded expressions.  Regex-versus-division is decided from
the previous significant token, which is right for all but contrived inputs.
The lexer never raises: malformed input yields ``invalid`` tokens and an
entry in ``errors``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

_PUNCTUATORS = sorted(
    """
    >>>= ... === !== **= <<= >>= >>> &&= ||= ??= => == != <= >= && || ?? ?. ++ -- += -= *= /= %=
    &= |= ^= ** << >> { } ( ) [ ] ; , < > + - * / % & | ^ ! ~ ? : = . @
    """.split(),
    key=len,
    reverse=True,
)

_REGEX_AFTER_WORDS = frozenset(
    "return typeof instanceof in of new delete void throw case do else yield await".split()
)

_IDENT_START = re.compile("[A-Za-z_$\u0080-\uffff]")
_IDENT = re.compile("[A-Za-z0-9_$\u0080-\uffff]*")
_NUMBER = re.compile(
    r"""
    0[xX][0-9a-fA-F_]+n?
  | 0[oO][0-7_]+n?
  | 0[bB][01_]+n?
  | (?:\d[\d_]*(?:\.[\d_]*)?|\.\d[\d_]*)(?:[eE][+-]?\d[\d_]*)?n?
    """,
    re.VERBOSE,
)


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # name, num, string, regex, template, tmpl_head, tmpl_middle, tmpl_tail, punct, invalid, eof
    value: str
    start: int
    end: int
    nl_before: bool = False


class _Lexer:
    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0
        self.tokens: list[Token] = []
        self.errors: list[tuple[int, str]] = []
        # one entry per open "{" or "${": True for a template substitution
        self.brace_stack: list[bool] = []

    def run(self) -> list[Token]:
        text = self.text
        n = len(text)
        nl = False
        if text.startswith("#!"):
            self.pos = text.find("\n") if "\n" in text else n
        while True:
            nl = self._skip_trivia() or nl
            if self.pos >= n:
                self.tokens.append(Token("eof", "", n, n, True))
                return self.tokens
            tok = self._next(nl)
            self.tokens.append(tok)
            nl = False

    def _skip_trivia(self) -> bool:
        text, n = self.text, len(self.text)
        newline = False
        while self.pos < n:
            c = text[self.pos]
            if c in "\n\r\u2028\u2029":
                newline = True
                self.pos += 1
            elif c.isspace() or c == "\ufeff":
                self.pos += 1
            elif text.startswith("//", self.pos):
                end = text.find("\n", self.pos)
                self.pos = n if end < 0 else end
            elif text.startswith("/*", self.pos):
                end = text.find("*/", self.pos + 2)
                if end < 0:
                    self.errors.append((self.pos, "unterminated block comment"))
                    end = n - 2
                if "\n" in text[self.pos : end]:
                    newline = True
                self.pos = end + 2
            else:
                break
        return newline

    def _prev_allows_regex(self) -> bool:
        if not self.tokens:
            return True
        prev = self.tokens[-1]
        if prev.kind == "punct":
            return prev.value not in (")", "]")
        if prev.kind == "name":
            return prev.value in _REGEX_AFTER_WORDS
        return False

    def _next(self, nl: bool) -> Token:
        text, start = self.text, self.pos
        c = text[start]
        if _IDENT_START.match(c) or (c == "#" and start + 1 < len(text) and _IDENT_START.match(text[start + 1])):
            m = _IDENT.match(text, start + 1)
            self.pos = m.end()
            return Token("name", text[start : self.pos], start, self.pos, nl)
        if c == "\\" and text.startswith("\\u", start):
            m = re.compile(r"(?:\\u[0-9a-fA-F]{4}|\\u\{[0-9a-fA-F]+\}|[\w$])+").match(text, start)
            self.pos = m.end()
            return Token("name", text[start : self.pos], start, self.pos, nl)
        if c.isdigit() or (c == "." and start + 1 < len(text) and text[start + 1].isdigit()):
            m = _NUMBER.match(text, start)
            self.pos = m.end() if m and m.end() > start else start + 1
            return Token("num", text[start : self.pos], start, self.pos, nl)
        if c in "'\"":
            return self._string(c, nl)
        if c == "`":
            self.pos += 1
            return self._template_chunk(start, "template", "tmpl_head", nl)
        if c == "}" and self.brace_stack and self.brace_stack[-1]:
            self.brace_stack.pop()
            self.pos += 1
            return self._template_chunk(start, "tmpl_tail", "tmpl_middle", nl)
        if c == "/" and self._prev_allows_regex():
            tok = self._regex(nl)
            if tok is not None:
                return tok
        for p in _PUNCTUATORS:
            if text.startswith(p, start):
                if p == "?." and start + 2 < len(text) and text[start + 2].isdigit():
                    continue
                self.pos = start + len(p)
                if p == "{":
                    self.brace_stack.append(False)
                elif p == "}" and self.brace_stack:
                    self.brace_stack.pop()
                return Token("punct", p, start, self.pos, nl)
        self.pos += 1
        self.errors.append((start, f"unexpected character {c!r}"))
        return Token("invalid", c, start, self.pos, nl)

    def _string(self, quote: str, nl: bool) -> Token:
        text, start = self.text, self.pos
        i = start + 1
        n = len(text)
        while i < n:
            ch = text[i]
            if ch == "\\":
                i += 2
                continue
            if ch == quote:
                self.pos = i + 1
                return Token("string", text[start : self.pos], start, self.pos, nl)
            if ch == "\n":
                break
            i += 1
        self.errors.append((start, "unterminated string literal"))
        self.pos = min(i, n)
        return Token("string", text[start : self.pos], start, self.pos, nl)

    def _template_chunk(self, start: int, closed_kind: str, open_kind: str, nl: bool) -> Token:
        text, n = self.text, len(self.text)
        i = self.pos
        while i < n:
            ch = text[i]
            if ch == "\\":
                i += 2
                continue
            if ch == "`":
                self.pos = i + 1
                return Token(closed_kind, text[start : self.pos], start, self.pos, nl)
            if ch == "$" and i + 1 < n and text[i + 1] == "{":
                self.pos = i + 2
                self.brace_stack.append(True)
                return Token(open_kind, text[start : self.pos], start, self.pos, nl)
            i += 1
        self.errors.append((start, "unterminated template literal"))
        self.pos = n
        return Token(closed_kind, text[start:n], start, n, nl)

    def _regex(self, nl: bool) -> Token | None:
        text, start, n = self.text, self.pos, len(self.text)
        i = start + 1
        in_class = False
        while i < n:
            ch = text[i]
            if ch == "\\":
                i += 2
                continue
            if ch == "\n":
                return None
            if ch == "[":
                in_class = True
            elif ch == "]":
                in_class = False
            elif ch == "/" and not in_class:
                i += 1
                m = _IDENT.match(text, i)
                self.pos = m.end()
                return Token("regex", text[start : self.pos], start, self.pos, nl)
            i += 1
        return None


def tokenize(text: str) -> tuple[list[Token], list[tuple[int, str]]]:
    """Tokenize ``text``; returns the tokens (ending with ``eof``) and lexer errors."""
    lexer = _Lexer(text)
    tokens = lexer.run()
    return tokens, lexer.errors
