from __future__ import annotations

import shutil
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = FIXTURES / "golden"
SKILL_FIXTURES = ("coarser_skill", "consistent_skill", "golden_skill", "motivating_skill")

settings.register_profile(
    "default",
    max_examples=100,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("default")

# property suites that the acceptance criteria size explicitly
PROPERTY_CASES = settings(max_examples=500, deadline=None, suppress_health_check=list(HealthCheck))


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


@pytest.fixture
def three_skill_root(tmp_path: Path) -> Path:
    """A skills root holding one inconsistent, one coarser and one consistent skill."""
    root = tmp_path / "skills"
    for name in ("motivating_skill", "coarser_skill", "consistent_skill"):
        shutil.copytree(FIXTURES / name, root / name)
    return root


def write_skill(root: Path, files: dict[str, str]) -> Path:
    for rel, text in files.items():
        target = root / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
    return root
