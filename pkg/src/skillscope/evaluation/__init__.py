"""Scoring against labeled data and synthetic labeled corpora."""

from __future__ import annotations

from .metrics import (
    CLASS_ORDER,
    COARSER_PATTERNS,
    INCONSISTENCY_PATTERNS,
    ConfusionMatrix,
    Evaluation,
    GroundTruthLabel,
    LabelClass,
    Metrics,
    compute_metrics,
    load_counts,
    load_ground_truth,
    load_predictions,
    metrics_from_counts,
    percent,
)
from .synth import PATTERNS, SyntheticSkill, generate_synthetic_corpus, render_synthetic_corpus

__all__ = [
    "CLASS_ORDER",
    "COARSER_PATTERNS",
    "INCONSISTENCY_PATTERNS",
    "PATTERNS",
    "ConfusionMatrix",
    "Evaluation",
    "GroundTruthLabel",
    "LabelClass",
    "Metrics",
    "SyntheticSkill",
    "compute_metrics",
    "generate_synthetic_corpus",
    "load_counts",
    "load_ground_truth",
    "load_predictions",
    "metrics_from_counts",
    "percent",
    "render_synthetic_corpus",
]
