"""Per-file flow IR: frontends plus reachability queries."""

from __future__ import annotations

from ..errors import EncodingError, UnsupportedLanguage
from ..skill import ImplementationFile, Language
from .model import (
    FLOW_KINDS,
    BfsResult,
    EdgeKind,
    FileIR,
    FunctionInfo,
    ImportBinding,
    IrEdge,
    IrNode,
    NodeKind,
    reach_from,
    reachable,
)

__all__ = [
    "FLOW_KINDS",
    "BfsResult",
    "EdgeKind",
    "FileIR",
    "FunctionInfo",
    "ImportBinding",
    "IrEdge",
    "IrNode",
    "NodeKind",
    "analyze_file",
    "analyze_source",
    "reach_from",
    "reachable",
]


def analyze_source(path: str, text: str | bytes, language: Language | str) -> FileIR:
    """Build the IR for ``text`` written in ``language``."""
    language = Language(language)
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise EncodingError(f"{path}: not valid UTF-8 ({exc.reason} at byte {exc.start})") from exc
    else:
        try:
            text.encode("utf-8")
        except UnicodeEncodeError as exc:
            raise EncodingError(f"{path}: text is not encodable as UTF-8 ({exc.reason})") from exc
    if language is Language.PYTHON:
        from .python_frontend import analyze_python

        return analyze_python(path, text)
    if language in (Language.JAVASCRIPT, Language.TYPESCRIPT):
        from .js_frontend import analyze_javascript

        return analyze_javascript(path, text, typescript=language is Language.TYPESCRIPT)
    raise UnsupportedLanguage(f"{path}: no frontend for {language.value} files")


def analyze_file(file: ImplementationFile) -> FileIR:
    """Build the IR for one implementation file.

    Python and JavaScript/TypeScript are supported; Go and other files raise
    :class:`~skillscope.errors.UnsupportedLanguage`.  Syntax errors never
    raise: they degrade to ``Other`` nodes plus warnings.
    """
    return analyze_source(file.path, file.content, file.language)
