"""On-disk representation of a programmatic skill.

A skill is a directory holding a ``SKILL.md`` description plus the
implementation files that actually run.  This module parses the description
layer and classifies the implementation layer; it never interprets either.
"""

from __future__ import annotations

import enum
import os
import re
from dataclasses import dataclass, field
from pathlib import Path, PurePosixPath
from typing import Iterator, Mapping

from .errors import MissingDescription, NotProgrammatic, SkillIOError

DESCRIPTION_FILE = "SKILL.md"
DEFAULT_MAX_FILE_BYTES = 2 * 1024 * 1024
DEFAULT_EXCLUDED_DIRS = frozenset({".git", "node_modules", "__pycache__", ".venv", "venv"})

_FRONTMATTER_KEY = re.compile(r"^([A-Za-z_][A-Za-z0-9_-]*)\s*:(.*)$")
_DELIMITER = "---"


class Language(str, enum.Enum):
    PYTHON = "python"
    JAVASCRIPT = "javascript"
    TYPESCRIPT = "typescript"
    GO = "go"
    OTHER = "other"

    @property
    def analyzable(self) -> bool:
        return self is not Language.OTHER


_SUFFIXES: Mapping[str, Language] = {
    ".py": Language.PYTHON,
    ".js": Language.JAVASCRIPT,
    ".ts": Language.TYPESCRIPT,
    ".go": Language.GO,
}

ANALYZABLE_SUFFIXES = frozenset(_SUFFIXES)


def language_for(path: str | os.PathLike[str]) -> Language:
    return _SUFFIXES.get(PurePosixPath(os.fspath(path)).suffix, Language.OTHER)


@dataclass(frozen=True)
class Description:
    frontmatter: Mapping[str, str]
    body: str
    raw: str
    warnings: tuple[str, ...] = ()

    @property
    def text(self) -> str:
        """Frontmatter values followed by the body, for lexical analysis."""
        parts = [f"{v}" for v in self.frontmatter.values() if v]
        parts.append(self.body)
        return "\n".join(p for p in parts if p)


def parse_skill_md(text: str | bytes) -> Description:
    """Split a SKILL.md into frontmatter fields and body.

    Malformed frontmatter never raises: an unclosed block makes the whole
    text the body, and stray lines inside a closed block are skipped with a
    warning.  Indented lines continue the previous value, which covers the
    usual folded-YAML ``description: >`` layout.
    """
    warnings: list[str] = []
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError:
            text = text.decode("utf-8", errors="replace")
            warnings.append("invalid UTF-8 replaced with U+FFFD")
    raw = text
    lines = raw.splitlines()
    if not lines or lines[0].rstrip() != _DELIMITER:
        return Description({}, raw, raw, tuple(warnings))

    closing = next((i for i in range(1, len(lines)) if lines[i].rstrip() == _DELIMITER), None)
    if closing is None:
        warnings.append("unclosed frontmatter block; treating the file as body text")
        return Description({}, raw, raw, tuple(warnings))

    frontmatter: dict[str, str] = {}
    last_key: str | None = None
    for lineno, line in enumerate(lines[1:closing], start=2):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        m = _FRONTMATTER_KEY.match(line)
        if m and not line[0].isspace():
            key, value = m.group(1), m.group(2).strip()
            if key in frontmatter:
                warnings.append(f"line {lineno}: duplicate key {key!r}, last value wins")
            frontmatter[key] = _unquote(value)
            last_key = key
        elif last_key is not None and line[0].isspace():
            joined = f"{frontmatter[last_key]} {line.strip()}".strip()
            frontmatter[last_key] = joined.lstrip(">|").strip()
        else:
            warnings.append(f"line {lineno}: not a 'key: value' line, ignored")

    body_lines = raw.splitlines(keepends=True)[closing + 1 :]
    return Description(frontmatter, "".join(body_lines).lstrip("\n"), raw, tuple(warnings))


def _unquote(value: str) -> str:
    if len(value) >= 2 and value[0] == value[-1] and value[0] in "'\"":
        return value[1:-1]
    return value


@dataclass(frozen=True)
class ImplementationFile:
    path: str
    language: Language
    content: str

    @classmethod
    def from_text(cls, path: str, content: str) -> "ImplementationFile":
        return cls(path, language_for(path), content)


@dataclass(frozen=True)
class Skill:
    id: str
    root: Path
    description: Description
    files: tuple[ImplementationFile, ...]
    skipped: tuple[tuple[str, str], ...] = field(default=())

    def __post_init__(self) -> None:
        if not any(f.language.analyzable for f in self.files):
            raise NotProgrammatic(f"{self.id}: no .py/.js/.ts/.go implementation file")

    @property
    def analyzable_files(self) -> tuple[ImplementationFile, ...]:
        return tuple(f for f in self.files if f.language.analyzable)


def iter_skill_files(
    root: Path, excluded_dirs: frozenset[str] = DEFAULT_EXCLUDED_DIRS
) -> Iterator[tuple[str, Path]]:
    """Yield ``(relative posix path, absolute path)`` for every regular file, sorted."""

    def onerror(err: OSError) -> None:
        raise SkillIOError(err.filename or root, err.strerror or str(err))

    found: list[tuple[str, Path]] = []
    for dirpath, dirnames, filenames in os.walk(root, onerror=onerror):
        dirnames[:] = sorted(d for d in dirnames if d not in excluded_dirs)
        for name in filenames:
            full = Path(dirpath) / name
            if full.is_symlink() or not full.is_file():
                continue
            found.append((full.relative_to(root).as_posix(), full))
    found.sort()
    return iter(found)


def discover_skill(
    root: str | os.PathLike[str],
    *,
    base: str | os.PathLike[str] | None = None,
    max_file_bytes: int = DEFAULT_MAX_FILE_BYTES,
    excluded_dirs: frozenset[str] = DEFAULT_EXCLUDED_DIRS,
) -> Skill:
    """Load the skill rooted at ``root``.

    The skill id is the root's path relative to ``base`` when given, else the
    root directory name, so ids stay stable across checkouts.
    """
    root = Path(root)
    if not root.is_dir():
        raise SkillIOError(root, "not a readable directory")
    skill_md = root / DESCRIPTION_FILE
    if not skill_md.is_file():
        raise MissingDescription(f"{root}: no {DESCRIPTION_FILE} at skill root")
    try:
        description = parse_skill_md(skill_md.read_bytes())
    except OSError as exc:
        raise SkillIOError(skill_md, exc.strerror or str(exc)) from exc

    files: list[ImplementationFile] = []
    skipped: list[tuple[str, str]] = []
    for rel, full in iter_skill_files(root, excluded_dirs):
        if rel == DESCRIPTION_FILE or PurePosixPath(rel).name == DESCRIPTION_FILE:
            continue
        try:
            size = full.stat().st_size
            if size > max_file_bytes:
                skipped.append((rel, f"larger than {max_file_bytes} bytes"))
                continue
            data = full.read_bytes()
        except OSError as exc:
            raise SkillIOError(full, exc.strerror or str(exc)) from exc
        if b"\x00" in data[:8192]:
            skipped.append((rel, "binary file"))
            continue
        files.append(ImplementationFile(rel, language_for(rel), data.decode("utf-8", errors="replace")))

    if base is not None:
        skill_id = Path(os.path.relpath(root, base)).as_posix()
    else:
        skill_id = Path(os.path.normpath(root)).name
    return Skill(skill_id, root, description, tuple(files), tuple(skipped))
