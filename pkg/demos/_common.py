"""Small helpers shared by the demo scripts."""

from __future__ import annotations

import textwrap
from pathlib import Path


def write_skill(root: Path, name: str, description: str, files: dict[str, str]) -> Path:
    skill = root / name
    skill.mkdir(parents=True, exist_ok=True)
    (skill / "SKILL.md").write_text(
        f"---\nname: {name}\ndescription: {description}\n---\n\n{description}\n", encoding="utf-8"
    )
    for rel, text in files.items():
        target = skill / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(textwrap.dedent(text).lstrip(), encoding="utf-8")
    return skill


def banner(title: str) -> None:
    print()
    print(title)
    print("-" * len(title))
