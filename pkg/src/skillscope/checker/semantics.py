"""What a skill description explicitly declares, read with a phrase lexicon.

Each second-level label has a handful of regular expressions; a label is
declared only when one of them matches the text literally.  Nothing is
inferred: a description that says "run a fixed analysis workflow" declares
no command execution, however likely that may be.

A declared flow needs one sentence that names both a source capability
(file or secret access) and a sink capability (network, API or command
execution) and joins them with a connective.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Any, Iterable, Mapping

from ..errors import SchemaError
from ..skill import Description
from ..taxonomy import Taxonomy, category_of_label, load_taxonomy

FLOW_SOURCES = frozenset({"FILE_READ", "SECRET_ACCESS"})
FLOW_SINKS = frozenset({"NETWORK_ACCESS", "EXTERNAL_API", "SYSTEM_COMMAND"})
_LIST_MARKER = re.compile(r"^(?:[-*#]+|\d+\.)\s+")
_SENTENCE_END = re.compile(r"(?<=[.!?;])\s+|\n\s*\n|\n\s*[-*#]+\s*|\n(?=\s*\d+\.\s)")

Label = tuple[str, "str | None"]


@dataclass(frozen=True)
class Lexicon:
    labels: Mapping[str, tuple[re.Pattern[str], ...]]
    categories: Mapping[str, tuple[re.Pattern[str], ...]]
    connectives: re.Pattern[str]


def _compile(patterns: Iterable[str], where: str) -> tuple[re.Pattern[str], ...]:
    try:
        return tuple(re.compile(p, re.IGNORECASE) for p in patterns)
    except re.error as exc:
        raise SchemaError(f"lexicon {where}: bad pattern ({exc})") from exc


def _build_lexicon(doc: Mapping[str, Any]) -> Lexicon:
    if not isinstance(doc.get("labels"), Mapping):
        raise SchemaError("lexicon: 'labels' must be an object")
    labels = {code: _compile(pats, code) for code, pats in sorted(doc["labels"].items())}
    categories = {cat: _compile(pats, cat) for cat, pats in sorted(doc.get("categories", {}).items())}
    connectives = _compile([doc.get("connectives", r"\b(?:and|then|to)\b")], "connectives")[0]
    return Lexicon(labels, categories, connectives)


@lru_cache(maxsize=1)
def _builtin_lexicon() -> Lexicon:
    text = resources.files("skillscope.data").joinpath("lexicon.json").read_text("utf-8")
    return _build_lexicon(json.loads(text))


def load_lexicon(source: str | os.PathLike[str] | Mapping[str, Any] | None = None) -> Lexicon:
    """The shipped lexicon, or one read from a JSON file or mapping.

    A custom document may omit labels; those keep their shipped patterns.
    """
    if source is None:
        return _builtin_lexicon()
    if isinstance(source, Mapping):
        doc = dict(source)
    else:
        with open(source, encoding="utf-8") as fh:
            doc = json.load(fh)
    base = _builtin_lexicon()
    custom = _build_lexicon(
        {
            "labels": doc.get("labels", {}),
            "categories": doc.get("categories", {}),
            "connectives": doc.get("connectives", base.connectives.pattern),
        }
    )
    return Lexicon({**base.labels, **custom.labels}, {**base.categories, **custom.categories}, custom.connectives)


@dataclass(frozen=True)
class DeclaredSemantics:
    """Labels, flows and supporting phrases found in a description.

    ``labels`` holds ``(category, code)`` pairs; ``code`` is None for a
    category named only in general terms.  ``sentence_labels`` keeps the
    categories each sentence declared, which lets a flow count as declared
    when both its ends are named together.
    """

    labels: frozenset[Label] = frozenset()
    flows: frozenset[tuple[str, str]] = frozenset()
    evidence: Mapping[str, str] = field(default_factory=dict)
    sentence_labels: tuple[frozenset[str], ...] = ()

    @property
    def categories(self) -> frozenset[str]:
        return frozenset(cat for cat, _ in self.labels)

    @property
    def codes(self) -> frozenset[str]:
        return frozenset(code for _, code in self.labels if code is not None)

    def declares(self, category: str) -> bool:
        return category in self.categories

    def declares_label(self, code: str) -> bool:
        return code in self.codes

    def co_declared(self, first: str, second: str) -> bool:
        return any(first in s and second in s for s in self.sentence_labels)

    def with_labels(self, extra: Iterable[Label]) -> "DeclaredSemantics":
        return DeclaredSemantics(self.labels | frozenset(extra), self.flows, self.evidence, self.sentence_labels)

    def to_json(self) -> dict[str, Any]:
        return {
            "labels": [{"category": c, "label": code} for c, code in sorted(self.labels, key=_label_key)],
            "flows": [{"source": s, "sink": t} for s, t in sorted(self.flows)],
            "evidence": dict(sorted(self.evidence.items())),
        }

    @classmethod
    def from_json(cls, doc: Mapping[str, Any]) -> "DeclaredSemantics":
        labels = frozenset((item["category"], item.get("label")) for item in doc.get("labels", ()))
        flows = frozenset((item["source"], item["sink"]) for item in doc.get("flows", ()))
        return cls(labels, flows, dict(doc.get("evidence", {})))


def _label_key(label: Label) -> tuple[str, str]:
    return (label[0], label[1] or "")


def split_sentences(text: str) -> list[str]:
    """Sentences and list items of a description, whitespace-collapsed."""
    out = []
    for piece in _SENTENCE_END.split(text):
        piece = _LIST_MARKER.sub("", " ".join(piece.split()))
        if piece:
            out.append(piece)
    return out


def extract_declared_semantics(
    description: Description | str,
    taxonomy: Taxonomy | None = None,
    lexicon: Lexicon | None = None,
) -> DeclaredSemantics:
    """Apply the phrase lexicon to a description's frontmatter and body."""
    taxonomy = taxonomy or load_taxonomy()
    lexicon = lexicon or load_lexicon()
    text = description.text if isinstance(description, Description) else description
    known_codes = {lab.code for lab in taxonomy.labels}
    known_categories = set(taxonomy.category_ids)
    labels: set[Label] = set()
    evidence: dict[str, str] = {}
    flows: set[tuple[str, str]] = set()
    per_sentence: list[frozenset[str]] = []
    for sentence in split_sentences(text):
        found: set[str] = set()
        for code, patterns in lexicon.labels.items():
            if code not in known_codes:
                continue
            for pattern in patterns:
                m = pattern.search(sentence)
                if m:
                    category = category_of_label(code) or taxonomy.label(code).category
                    labels.add((category, code))
                    evidence.setdefault(code, m.group(0))
                    found.add(category)
                    break
        for category, patterns in lexicon.categories.items():
            if category not in known_categories:
                continue
            for pattern in patterns:
                m = pattern.search(sentence)
                if m:
                    labels.add((category, None))
                    evidence.setdefault(category, m.group(0))
                    found.add(category)
                    break
        if found:
            per_sentence.append(frozenset(found))
        sources, sinks = found & FLOW_SOURCES, found & FLOW_SINKS
        if sources and sinks and lexicon.connectives.search(sentence):
            flows.update((s, t) for s in sources for t in sinks)
    return DeclaredSemantics(frozenset(labels), frozenset(flows), evidence, tuple(per_sentence))
