"""Skill-link ingestion: GitHub URL parsing, subpath normalization, dedup, filtering."""

from __future__ import annotations

import json
import os
import shlex
import subprocess
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path, PurePosixPath
from typing import Iterable, Sequence
from urllib.parse import unquote, urlsplit

from .errors import MalformedPath, ManifestError, NotGitHub, SkillIOError
from .skill import ANALYZABLE_SUFFIXES, DESCRIPTION_FILE, iter_skill_files

DEFAULT_BRANCH = "HEAD"
GITHUB_HOSTS = frozenset({"github.com", "www.github.com"})
DEFAULT_ANCHORS: tuple[str, ...] = ("skills",)


def normalize_subpath(subpath: str, anchors: Sequence[str] = DEFAULT_ANCHORS) -> str:
    """Map a skill subpath onto its download target.

    The path is cut right after the first segment (closest to the repository
    root) equal to one of ``anchors``.  Empty segments are dropped, so the
    result never carries a leading or trailing slash.
    """
    segments = [s for s in subpath.replace("\\", "/").split("/") if s]
    for i, seg in enumerate(segments):
        if seg in anchors:
            segments = segments[: i + 1]
            break
    return "/".join(segments)


@dataclass(frozen=True)
class RepoRef:
    owner: str
    repo: str
    branch: str
    subpath: str = ""
    normalized_subpath: str = field(init=False)

    def __post_init__(self) -> None:
        if not (self.owner and self.repo and self.branch):
            raise MalformedPath("owner, repo and branch must be non-empty")
        object.__setattr__(self, "normalized_subpath", normalize_subpath(self.subpath))

    @property
    def key(self) -> str:
        return f"{self.owner}/{self.repo}@{self.branch}:{self.normalized_subpath}"


def parse_github_url(url: str) -> RepoRef:
    """Decompose ``https://github.com/<owner>/<repo>/tree/<branch>/<path>``.

    URLs without a ``tree`` segment resolve to the ``HEAD`` placeholder
    branch.  ``blob`` links (which name a file) keep the file's directory.
    """
    parts = urlsplit(url.strip())
    if parts.scheme not in ("http", "https") or (parts.hostname or "").lower() not in GITHUB_HOSTS:
        raise NotGitHub(f"not a github.com URL: {url!r}")
    segments = [unquote(s) for s in parts.path.split("/") if s]
    if len(segments) < 2:
        raise MalformedPath(f"expected /<owner>/<repo> in {url!r}")
    owner, repo = segments[0], segments[1]
    if repo.endswith(".git"):
        repo = repo[: -len(".git")]
    rest = segments[2:]
    if not rest:
        return RepoRef(owner, repo, DEFAULT_BRANCH, "")
    if rest[0] not in ("tree", "blob") or len(rest) < 2:
        raise MalformedPath(f"unsupported GitHub path layout in {url!r}")
    branch, path = rest[1], rest[2:]
    if rest[0] == "blob":
        path = path[:-1]
    return RepoRef(owner, repo, branch, "/".join(path))


@dataclass(frozen=True)
class DedupGroup:
    key: str
    members: tuple[str, ...]
    source_tags: tuple[str, ...]

    def to_json(self) -> dict:
        return {"key": self.key, "members": list(self.members), "source_tags": list(self.source_tags)}


@dataclass(frozen=True)
class Reject:
    url: str
    error: str


@dataclass(frozen=True)
class DedupReport:
    groups: tuple[DedupGroup, ...]
    rejects: tuple[Reject, ...]

    @property
    def raw_count(self) -> int:
        return sum(len(g.members) for g in self.groups) + len(self.rejects)

    def to_json(self) -> dict:
        return {
            "groups": [g.to_json() for g in self.groups],
            "rejects": [{"url": r.url, "error": r.error} for r in self.rejects],
        }


def dedup(
    manifest: Iterable[tuple[str, str]], anchors: Sequence[str] = DEFAULT_ANCHORS
) -> DedupReport:
    """Group manifest links by download target.

    Groups come back sorted by key with members and tags sorted, so the
    report does not depend on manifest order.  Unparseable URLs are listed
    once each in ``rejects``.
    """
    members: dict[str, list[str]] = defaultdict(list)
    tags: dict[str, list[str]] = defaultdict(list)
    rejects: dict[str, str] = {}
    for url, source in manifest:
        try:
            ref = parse_github_url(url)
        except (NotGitHub, MalformedPath) as exc:
            rejects.setdefault(url, f"{type(exc).__name__}: {exc}")
            continue
        key = ref.key
        if tuple(anchors) != DEFAULT_ANCHORS:
            key = f"{ref.owner}/{ref.repo}@{ref.branch}:{normalize_subpath(ref.subpath, anchors)}"
        members[key].append(url)
        tags[key].append(source)
    groups = tuple(
        DedupGroup(key, tuple(sorted(members[key])), tuple(sorted(tags[key]))) for key in sorted(members)
    )
    return DedupReport(groups, tuple(Reject(u, rejects[u]) for u in sorted(rejects)))


def load_manifest(path: str | os.PathLike[str]) -> list[tuple[str, str]]:
    """Read line-delimited ``{"url": ..., "source": ...}`` records."""
    records: list[tuple[str, str]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(obj, dict) or not isinstance(obj.get("url"), str):
                raise ManifestError(f"{path}:{lineno}: record needs a string 'url' field")
            records.append((obj["url"], str(obj.get("source", ""))))
    return records


@dataclass(frozen=True)
class FilterResult:
    ok: bool
    reason: str

    def __bool__(self) -> bool:
        return self.ok


def filter_programmatic(root: str | os.PathLike[str]) -> FilterResult:
    """Keep a directory only if it has a root SKILL.md and an analyzable file."""
    root = Path(root)
    if not root.is_dir():
        raise SkillIOError(root, "not a readable directory")
    has_description = (root / DESCRIPTION_FILE).is_file()
    has_code = any(
        PurePosixPath(rel).suffix in ANALYZABLE_SUFFIXES for rel, _ in iter_skill_files(root)
    )
    missing = []
    if not has_description:
        missing.append(f"no {DESCRIPTION_FILE} at root")
    if not has_code:
        missing.append("no .py/.js/.ts/.go implementation file")
    if missing:
        return FilterResult(False, "; ".join(missing))
    return FilterResult(True, "description and implementation present")


def target_dirname(key: str) -> str:
    """Filesystem-safe directory name for a dedup key."""
    safe = key.replace("/", "__").replace("@", "--").replace(":", "--")
    return safe.rstrip("-_") or "root"


@dataclass(frozen=True)
class Funnel:
    raw: int
    deduplicated: int
    programmatic: int
    kept: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "raw": self.raw,
            "deduplicated": self.deduplicated,
            "programmatic": self.programmatic,
            "kept": list(self.kept),
        }


def funnel(report: DedupReport, materialized: str | os.PathLike[str]) -> Funnel:
    """Count the raw -> deduplicated -> programmatic funnel.

    ``materialized`` holds one directory per group, named by
    :func:`target_dirname`; groups without a directory are dropped.
    """
    base = Path(materialized)
    kept = []
    for group in report.groups:
        target = base / target_dirname(group.key)
        if target.is_dir() and filter_programmatic(target):
            kept.append(group.key)
    return Funnel(report.raw_count, len(report.groups), len(kept), tuple(kept))


def fetch_targets(
    report: DedupReport,
    command_template: str,
    dest: str | os.PathLike[str],
    *,
    runner=subprocess.run,
) -> list[tuple[str, int]]:
    """Materialize each group by running a user-supplied command.

    The template is formatted with ``owner``, ``repo``, ``branch``,
    ``subpath`` and ``dest`` (the group's target directory) and split with
    :func:`shlex.split`; no shell is involved.  Returns ``(key, exit code)``.
    """
    results = []
    for group in report.groups:
        ref = parse_github_url(group.members[0])
        target = Path(dest) / target_dirname(group.key)
        argv = [
            part.format(
                owner=ref.owner,
                repo=ref.repo,
                branch=ref.branch,
                subpath=ref.normalized_subpath,
                dest=str(target),
            )
            for part in shlex.split(command_template)
        ]
        proc = runner(argv, check=False)
        results.append((group.key, proc.returncode))
    return results
