"""Exception hierarchy shared by every skillscope stage."""

from __future__ import annotations


class SkillscopeError(Exception):
    """Base class for all errors raised by skillscope."""


class SkillError(SkillscopeError):
    """A directory could not be turned into a programmatic skill."""


class MissingDescription(SkillError):
    pass


class NotProgrammatic(SkillError):
    pass


class SkillIOError(SkillError):
    def __init__(self, path: object, message: str) -> None:
        super().__init__(f"{path}: {message}")
        self.path = path


class CorpusError(SkillscopeError):
    pass


class NotGitHub(CorpusError):
    pass


class MalformedPath(CorpusError):
    pass


class ManifestError(CorpusError):
    pass


class TaxonomyInvalid(SkillscopeError):
    pass


class AnalysisError(SkillscopeError):
    pass


class UnsupportedLanguage(AnalysisError):
    pass


class EncodingError(AnalysisError):
    pass


class UnknownNode(AnalysisError, KeyError):
    pass


class AllFilesSkipped(AnalysisError):
    """No implementation file of the skill could be analyzed."""

    def __init__(self, skill_id: str, skipped: list[tuple[str, str]]) -> None:
        super().__init__(f"{skill_id}: no supported implementation file could be analyzed")
        self.skill_id = skill_id
        self.skipped = skipped


class SchemaError(SkillscopeError):
    pass


class CheckerError(SkillscopeError):
    pass


class TransportError(CheckerError):
    pass


class MalformedModelOutput(CheckerError):
    def __init__(self, message: str, raw: str = "") -> None:
        super().__init__(message)
        self.raw = raw


class GatewayConfigError(CheckerError):
    pass


class EvaluationError(SkillscopeError):
    pass


class LabelMismatch(EvaluationError):
    pass


class UnsupportedPattern(EvaluationError):
    pass
