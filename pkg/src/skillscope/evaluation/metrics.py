"""Skill-level precision, recall and the three-class confusion matrix.

Only the Inconsistent class counts as a positive claim.  An uncertain
prediction makes no claim, so it is scored like a Consistent one: it can
miss a labeled inconsistency but never produce a false alarm.
"""

from __future__ import annotations

import enum
import json
import os
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Any, Iterable, Mapping

from ..checker.report import Verdict
from ..errors import LabelMismatch, SchemaError

ZERO_DENOMINATOR_NOTE = "precision and recall are 1.0 when their denominator is 0"


class LabelClass(str, enum.Enum):
    INCONSISTENT = "Inconsistent"
    COARSER = "CoarserDescription"
    CONSISTENT = "Consistent"


CLASS_ORDER = (LabelClass.INCONSISTENT, LabelClass.COARSER, LabelClass.CONSISTENT)
INCONSISTENCY_PATTERNS = tuple(f"IC{i}" for i in range(1, 7))
COARSER_PATTERNS = tuple(f"LU{i}" for i in range(1, 7))


@dataclass(frozen=True)
class GroundTruthLabel:
    skill_id: str
    label: LabelClass
    pattern: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "label", LabelClass(self.label))
        if self.pattern is None:
            return
        if self.pattern in INCONSISTENCY_PATTERNS:
            expected = LabelClass.INCONSISTENT
        elif self.pattern in COARSER_PATTERNS:
            expected = LabelClass.COARSER
        else:
            raise ValueError(f"unknown pattern {self.pattern!r}")
        if self.label is not expected:
            raise ValueError(f"pattern {self.pattern} belongs to class {expected.value}, not {self.label.value}")

    def to_json(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"skill_id": self.skill_id, "class": self.label.value}
        if self.pattern is not None:
            doc["pattern"] = self.pattern
        return doc

    @classmethod
    def from_json(cls, doc: Mapping[str, Any]) -> "GroundTruthLabel":
        try:
            return cls(str(doc["skill_id"]), LabelClass(doc["class"]), doc.get("pattern"))
        except (KeyError, ValueError, TypeError) as exc:
            raise SchemaError(f"bad ground-truth record {dict(doc)!r}: {exc}") from exc


def percent(ratio: float) -> Decimal:
    """A ratio as a percentage rounded half-up to one decimal place."""
    return (Decimal(repr(ratio)) * 100).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP)


def _ratio(num: int, den: int) -> float:
    return 1.0 if den == 0 else num / den


@dataclass(frozen=True)
class Metrics:
    tp: int
    fp: int
    fn: int

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.fn) < 0:
            raise ValueError("counts must be non-negative")

    @property
    def precision(self) -> float:
        return _ratio(self.tp, self.tp + self.fp)

    @property
    def recall(self) -> float:
        return _ratio(self.tp, self.tp + self.fn)

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 0.0 if p + r == 0 else 2 * p * r / (p + r)

    def to_json(self) -> dict[str, Any]:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "percent": {
                "precision": str(percent(self.precision)),
                "recall": str(percent(self.recall)),
                "f1": str(percent(self.f1)),
            },
        }


def metrics_from_counts(tp: int, fp: int, fn: int) -> Metrics:
    return Metrics(tp, fp, fn)


@dataclass(frozen=True)
class ConfusionMatrix:
    """``counts[system][human]`` in Inconsistent, Coarser, Consistent order.

    Uncertain predictions sit in the Consistent row; ``uncertain`` says how
    many of them there were.
    """

    counts: tuple[tuple[int, int, int], ...]
    uncertain: int = 0

    @property
    def total(self) -> int:
        return sum(map(sum, self.counts))

    def cell(self, system: LabelClass | str, human: LabelClass | str) -> int:
        return self.counts[CLASS_ORDER.index(LabelClass(system))][CLASS_ORDER.index(LabelClass(human))]

    def row_total(self, system: LabelClass | str) -> int:
        return sum(self.counts[CLASS_ORDER.index(LabelClass(system))])

    def to_json(self) -> list[list[int]]:
        return [list(row) for row in self.counts]


@dataclass(frozen=True)
class Evaluation:
    metrics: Metrics
    confusion: ConfusionMatrix | None

    def to_json(self) -> dict[str, Any]:
        doc = self.metrics.to_json()
        doc["confusion"] = None if self.confusion is None else self.confusion.to_json()
        doc["classes"] = [c.value for c in CLASS_ORDER]
        doc["uncertain"] = 0 if self.confusion is None else self.confusion.uncertain
        doc["convention"] = ZERO_DENOMINATOR_NOTE
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"


def _system_class(verdict: Verdict | str) -> LabelClass:
    v = Verdict(verdict)
    if v is Verdict.UNCERTAIN:
        return LabelClass.CONSISTENT
    return LabelClass(v.value)


def compute_metrics(
    predictions: Mapping[str, Verdict | str],
    ground_truth: Iterable[GroundTruthLabel],
) -> Evaluation:
    """Score per-skill verdicts against labels.

    Both sides must cover exactly the same skills, otherwise
    :class:`LabelMismatch` names the difference.
    """
    truth = {}
    for label in ground_truth:
        if label.skill_id in truth:
            raise LabelMismatch(f"skill {label.skill_id!r} is labeled twice")
        truth[label.skill_id] = label
    unlabeled = sorted(set(predictions) - set(truth))
    unpredicted = sorted(set(truth) - set(predictions))
    if unlabeled or unpredicted:
        parts = []
        if unlabeled:
            parts.append(f"no ground truth for {', '.join(unlabeled[:5])}")
        if unpredicted:
            parts.append(f"no prediction for {', '.join(unpredicted[:5])}")
        raise LabelMismatch("; ".join(parts))
    grid = [[0, 0, 0] for _ in CLASS_ORDER]
    tp = fp = fn = uncertain = 0
    for skill_id, verdict in predictions.items():
        system = _system_class(verdict)
        uncertain += Verdict(verdict) is Verdict.UNCERTAIN
        human = truth[skill_id].label
        grid[CLASS_ORDER.index(system)][CLASS_ORDER.index(human)] += 1
        predicted = system is LabelClass.INCONSISTENT
        actual = human is LabelClass.INCONSISTENT
        tp += predicted and actual
        fp += predicted and not actual
        fn += actual and not predicted
    confusion = ConfusionMatrix(tuple(tuple(row) for row in grid), uncertain)  # type: ignore[misc]
    return Evaluation(Metrics(tp, fp, fn), confusion)


# -- files ---------------------------------------------------------------------


def _read_jsonl(path: str | os.PathLike[str]) -> list[dict[str, Any]]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
            except ValueError as exc:
                raise SchemaError(f"{path}:{lineno}: not JSON ({exc})") from exc
            if not isinstance(doc, dict):
                raise SchemaError(f"{path}:{lineno}: expected an object")
            out.append(doc)
    return out


def load_ground_truth(path: str | os.PathLike[str]) -> list[GroundTruthLabel]:
    return [GroundTruthLabel.from_json(doc) for doc in _read_jsonl(path)]


def load_predictions(path: str | os.PathLike[str]) -> dict[str, Verdict]:
    """Read ``{skill_id, verdict}`` lines into a mapping."""
    out: dict[str, Verdict] = {}
    for doc in _read_jsonl(path):
        try:
            skill_id, verdict = str(doc["skill_id"]), Verdict(doc["verdict"])
        except (KeyError, ValueError) as exc:
            raise SchemaError(f"bad prediction record {doc!r}: {exc}") from exc
        if skill_id in out:
            raise LabelMismatch(f"skill {skill_id!r} is predicted twice")
        out[skill_id] = verdict
    return out


def load_counts(path: str | os.PathLike[str]) -> Metrics | None:
    """A ``{tp, fp, fn}`` document, or None when the file is something else."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except ValueError:
        return None
    if isinstance(doc, dict) and {"tp", "fp", "fn"} <= doc.keys():
        try:
            return Metrics(int(doc["tp"]), int(doc["fp"]), int(doc["fn"]))
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"{path}: counts must be non-negative integers") from exc
    return None
