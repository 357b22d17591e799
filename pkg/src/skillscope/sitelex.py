"""Light lexing of short source fragments ("sites").

Both rule matching and node rendering work on single expressions or
statements cut out of a file.  Such fragments are often not valid programs on
their own, so this lexer is deliberately forgiving: it only needs to know
where strings and comments are, so that patterns never fire inside them, and
where whitespace separates tokens, so that renderings can be canonicalized.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

ELLIPSIS = "…"
MAX_LITERAL_CHARS = 64

_PY_STRING_PREFIX = re.compile(r"(?i)(?:rb|br|fr|rf|[rbuf])?(?='|\")")
_NAME = re.compile(r"[A-Za-z_$\u0080-\uffff][A-Za-z0-9_$\u0080-\uffff]*")
_NUMBER = re.compile(r"(?:0[xXoObB][0-9a-fA-F_]+|\d[\d_]*(?:\.[\d_]*)?(?:[eE][+-]?\d+)?|\.\d[\d_]*)[jJn]?")
_PUNCT = re.compile(r"\?\.|\.\.\.|=>|\*\*=?|//=?|>>>?=?|<<=?|[=!]==?|[<>]=?|&&=?|\|\|=?|\?\?=?|->|:=|[-+*/%&|^@]=?|[()\[\]{}.,:;~?!#\\]")


@dataclass(frozen=True, slots=True)
class SiteToken:
    kind: str  # name, number, string, op
    text: str
    start: int
    end: int
    space_before: bool


def lex(text: str, language: str = "python") -> list[SiteToken]:
    """Split ``text`` into tokens, dropping comments and whitespace.

    ``language`` is ``"python"`` or anything else for the JavaScript family.
    Unterminated strings run to the end of the fragment instead of failing.
    """
    python = language == "python"
    tokens: list[SiteToken] = []
    i, n = 0, len(text)
    space = False
    while i < n:
        c = text[i]
        if c.isspace():
            space = True
            i += 1
            continue
        if python and c == "#":
            j = text.find("\n", i)
            i = n if j < 0 else j
            space = True
            continue
        if not python and text.startswith("//", i):
            j = text.find("\n", i)
            i = n if j < 0 else j
            space = True
            continue
        if not python and text.startswith("/*", i):
            j = text.find("*/", i + 2)
            i = n if j < 0 else j + 2
            space = True
            continue
        if python:
            m = _PY_STRING_PREFIX.match(text, i)
            if m:
                end = _scan_py_string(text, m.end())
                tokens.append(SiteToken("string", text[i:end], i, end, space))
                i, space = end, False
                continue
        elif c in "'\"":
            end = _scan_quoted(text, i, c)
            tokens.append(SiteToken("string", text[i:end], i, end, space))
            i, space = end, False
            continue
        elif c == "`":
            end = _scan_template(text, i)
            tokens.append(SiteToken("string", text[i:end], i, end, space))
            i, space = end, False
            continue
        m = _NAME.match(text, i)
        if m:
            tokens.append(SiteToken("name", m.group(), i, m.end(), space))
            i, space = m.end(), False
            continue
        m = _NUMBER.match(text, i)
        if m and m.end() > i:
            tokens.append(SiteToken("number", m.group(), i, m.end(), space))
            i, space = m.end(), False
            continue
        m = _PUNCT.match(text, i)
        end = m.end() if m else i + 1
        tokens.append(SiteToken("op", text[i:end], i, end, space))
        i, space = end, False
    return tokens


def _scan_py_string(text: str, q: int) -> int:
    n = len(text)
    quote = text[q]
    triple = text.startswith(quote * 3, q)
    delim = quote * 3 if triple else quote
    i = q + len(delim)
    while i < n:
        if text[i] == "\\":
            i += 2
            continue
        if text.startswith(delim, i):
            return i + len(delim)
        if not triple and text[i] == "\n":
            return i
        i += 1
    return n


def _scan_quoted(text: str, start: int, quote: str) -> int:
    i, n = start + 1, len(text)
    while i < n:
        if text[i] == "\\":
            i += 2
            continue
        if text[i] == quote:
            return i + 1
        if text[i] == "\n":
            return i
        i += 1
    return n


def _scan_template(text: str, start: int) -> int:
    i, n = start + 1, len(text)
    depth = 0
    while i < n:
        c = text[i]
        if c == "\\":
            i += 2
            continue
        if depth == 0 and c == "`":
            return i + 1
        if text.startswith("${", i):
            depth += 1
            i += 2
            continue
        if depth and c == "}":
            depth -= 1
        elif depth and c in "'\"":
            i = _scan_quoted(text, i, c)
            continue
        i += 1
    return n


def string_value(token_text: str) -> str:
    """Contents of a string token without prefix and quotes (escapes left as-is)."""
    m = re.match(r"(?i)(?:rb|br|fr|rf|[rbuf])?", token_text)
    body = token_text[m.end() :] if m else token_text
    for delim in ('"""', "'''", '"', "'", "`"):
        if body.startswith(delim):
            body = body[len(delim) :]
            if body.endswith(delim):
                body = body[: -len(delim)]
            break
    return body


def truncate_literal(token_text: str, limit: int = MAX_LITERAL_CHARS) -> str:
    """Shorten a literal longer than ``limit`` characters, keeping its closing quote."""
    if len(token_text) <= limit:
        return token_text
    closing = token_text[-1] if token_text[-1] in "'\"`" else ""
    keep = limit - 1 - len(closing)
    return token_text[:keep] + ELLIPSIS + closing


def canonical_rendering(text: str, language: str = "python") -> str:
    """Whitespace-normalized rendering of a source fragment.

    Comments are dropped, any run of whitespace between tokens becomes one
    space, and literals longer than 64 characters are truncated with an
    ellipsis.  Token text is otherwise preserved.
    """
    parts: list[str] = []
    for tok in lex(text, language):
        if parts and tok.space_before:
            parts.append(" ")
        parts.append(truncate_literal(tok.text) if tok.kind in ("string", "number") else tok.text)
    return "".join(parts)
