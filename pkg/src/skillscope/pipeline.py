"""Per-skill pipeline glue shared by the CLI and the demos.

A skills root is a directory whose immediate subdirectories are candidate
skills.  Each candidate is loaded, turned into an SPG and checked on its
own; results are collected after all workers finish, so the output order
depends only on the skill ids.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence, TypeVar

from .checker.engine import classify
from .checker.model import ChatGateway, check_with_model_safe
from .checker.report import CheckReport, uncertain_report
from .checker.semantics import Lexicon
from .corpus import filter_programmatic
from .errors import AllFilesSkipped, SkillError, TransportError
from .skill import Skill, discover_skill
from .spg import Spg, build_skill_spg, serialize_spg
from .taxonomy import Taxonomy, load_taxonomy

T = TypeVar("T")
R = TypeVar("R")


@dataclass(frozen=True)
class SkillDirs:
    skills: tuple[Path, ...]
    skipped: tuple[tuple[str, str], ...]


def find_skills(root: str | os.PathLike[str]) -> SkillDirs:
    """Split the subdirectories of ``root`` into skills and everything else.

    Raises :class:`OSError` when ``root`` cannot be listed.
    """
    root = Path(root)
    entries = sorted(p for p in root.iterdir() if p.is_dir() and not p.name.startswith("."))
    skills: list[Path] = []
    skipped: list[tuple[str, str]] = []
    for entry in entries:
        verdict = filter_programmatic(entry)
        if verdict:
            skills.append(entry)
        else:
            skipped.append((entry.name, verdict.reason))
    return SkillDirs(tuple(skills), tuple(skipped))


@dataclass(frozen=True)
class ScanResult:
    skill_id: str
    spg: Spg | None
    skipped: tuple[tuple[str, str], ...] = ()
    error: str | None = None

    def summary_line(self) -> str:
        if self.spg is None:
            return f"{self.skill_id}: AllFilesSkipped ({self.error})"
        s = self.spg.stats
        return f"{self.skill_id}: nodes={s.nodes} edges={s.edges} skipped={len(self.spg.skipped_files)}"


def scan_skill(skill: Skill, taxonomy: Taxonomy | None = None) -> ScanResult:
    try:
        spg = build_skill_spg(skill, taxonomy or load_taxonomy())
    except AllFilesSkipped as exc:
        reasons = ", ".join(f"{p}: {r}" for p, r in exc.skipped) or "no analyzable file"
        return ScanResult(skill.id, None, tuple(exc.skipped), reasons)
    return ScanResult(skill.id, spg, spg.skipped_files)


def check_skill(
    skill: Skill,
    taxonomy: Taxonomy | None = None,
    *,
    lexicon: Lexicon | None = None,
    gateway: ChatGateway | None = None,
) -> tuple[ScanResult, CheckReport]:
    """Scan one skill and check it with the rule engine, or a model when given.

    A skill whose files all had to be skipped is reported as uncertain
    without consulting the model.  A model that stays unreachable after its
    retries also yields an uncertain report, so one outage cannot sink a
    whole batch.
    """
    taxonomy = taxonomy or load_taxonomy()
    scan = scan_skill(skill, taxonomy)
    if gateway is None:
        return scan, classify(scan.spg, skill.description, taxonomy, lexicon=lexicon, skill_id=skill.id)
    backend = f"Model({gateway.name})"
    if scan.spg is None:
        return scan, uncertain_report(skill.id, "no implementation file could be analyzed", backend)
    try:
        report = check_with_model_safe(gateway, skill.id, skill.description.raw, serialize_spg(scan.spg), taxonomy)
    except TransportError as exc:
        report = uncertain_report(skill.id, f"model gateway unavailable: {exc}", backend)
    return scan, report


def parallel_map(func: Callable[[T], R], items: Sequence[T], jobs: int = 1) -> list[R]:
    """``map`` over a thread pool, keeping input order."""
    if jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))


def load_skills(dirs: Sequence[Path], base: Path) -> tuple[list[Skill], list[tuple[str, str]]]:
    skills: list[Skill] = []
    failed: list[tuple[str, str]] = []
    for d in dirs:
        try:
            skills.append(discover_skill(d, base=base))
        except SkillError as exc:
            failed.append((d.name, str(exc)))
    return skills, failed
