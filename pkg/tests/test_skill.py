from __future__ import annotations

from pathlib import Path

import pytest

from skillscope.errors import MissingDescription, NotProgrammatic, SkillIOError
from skillscope.skill import Language, discover_skill, language_for, parse_skill_md
from tests.conftest import write_skill


def test_frontmatter_and_body_are_split():
    d = parse_skill_md("---\nname: pdf\ndescription: 'Fill PDF forms.'\n---\n\n# PDF\nBody text.\n")
    assert d.frontmatter == {"name": "pdf", "description": "Fill PDF forms."}
    assert d.body == "# PDF\nBody text.\n"
    assert "Fill PDF forms." in d.text and "Body text." in d.text
    assert d.warnings == ()


def test_missing_frontmatter_means_body_only():
    d = parse_skill_md("# Title\nJust text.")
    assert d.frontmatter == {}
    assert d.body == "# Title\nJust text."


def test_unclosed_frontmatter_degrades_with_warning():
    d = parse_skill_md("---\nname: x\nno end")
    assert d.frontmatter == {}
    assert d.warnings and "unclosed" in d.warnings[0]


def test_folded_description_is_joined():
    d = parse_skill_md("---\ndescription: >\n  first part\n  second part\n---\nbody")
    assert d.frontmatter["description"] == "first part second part"


def test_invalid_utf8_is_replaced_not_fatal():
    d = parse_skill_md(b"---\nname: a\n---\nbad \xff byte")
    assert "�" in d.body
    assert any("UTF-8" in w for w in d.warnings)


@pytest.mark.parametrize(
    "path, language",
    [("a.py", Language.PYTHON), ("x/b.js", Language.JAVASCRIPT), ("c.ts", Language.TYPESCRIPT),
     ("d.go", Language.GO), ("e.md", Language.OTHER), ("Makefile", Language.OTHER)],
)
def test_language_by_suffix(path, language):
    assert language_for(path) is language
    assert language.analyzable == (language is not Language.OTHER)


def test_discover_skill_collects_files_sorted(tmp_path: Path):
    root = write_skill(tmp_path / "s", {
        "SKILL.md": "---\nname: s\n---\nbody",
        "scripts/b.py": "print(1)\n",
        "scripts/a.js": "console.log(1)\n",
        "README.md": "notes",
        "node_modules/dep/index.js": "x",
    })
    skill = discover_skill(root)
    assert skill.id == "s"
    assert [f.path for f in skill.files] == ["README.md", "scripts/a.js", "scripts/b.py"]
    assert [f.path for f in skill.analyzable_files] == ["scripts/a.js", "scripts/b.py"]


def test_skill_id_relative_to_base(tmp_path: Path):
    root = write_skill(tmp_path / "group" / "s", {"SKILL.md": "x", "run.py": ""})
    assert discover_skill(root, base=tmp_path).id == "group/s"


def test_oversize_and_binary_files_are_skipped(tmp_path: Path):
    root = write_skill(tmp_path / "s", {"SKILL.md": "x", "run.py": "print(1)\n", "big.py": "#" * 100})
    (root / "blob.py").write_bytes(b"\x00\x01")
    skill = discover_skill(root, max_file_bytes=50)
    assert dict(skill.skipped) == {"big.py": "larger than 50 bytes", "blob.py": "binary file"}


def test_not_programmatic(tmp_path: Path):
    root = write_skill(tmp_path / "s", {"SKILL.md": "x", "notes.txt": "y"})
    with pytest.raises(NotProgrammatic):
        discover_skill(root)


def test_missing_description(tmp_path: Path):
    root = write_skill(tmp_path / "s", {"run.py": ""})
    with pytest.raises(MissingDescription):
        discover_skill(root)


def test_missing_root(tmp_path: Path):
    with pytest.raises(SkillIOError):
        discover_skill(tmp_path / "absent")
