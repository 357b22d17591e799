"""Security property taxonomy and the code localization rules derived from it.

The taxonomy has two levels: eleven behavior categories, each refined into
second-level labels whose code prefix names the category (``SA-KEY`` belongs
to ``SECRET_ACCESS``).  Localization rules map source-level call sites onto
categories.  Both live in one JSON document so deployments can extend the
rule set without touching code.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Any, Iterable, Mapping, Sequence

from .errors import TaxonomyInvalid
from .sitelex import SiteToken, lex

CATEGORY_IDS: tuple[str, ...] = (
    "FILE_READ",
    "FILE_WRITE",
    "SYSTEM_COMMAND",
    "NETWORK_ACCESS",
    "EXTERNAL_API",
    "SECRET_ACCESS",
    "DEPENDENCY_MODIFICATION",
    "SYSTEM_PERMISSION_ACCESS",
    "SECURITY_CONTROL",
    "OBSERVABILITY",
    "INFRASTRUCTURE",
)

LABEL_PREFIXES: Mapping[str, str] = {
    "FR": "FILE_READ",
    "FW": "FILE_WRITE",
    "SC": "SYSTEM_COMMAND",
    "NA": "NETWORK_ACCESS",
    "EA": "EXTERNAL_API",
    "SA": "SECRET_ACCESS",
    "DM": "DEPENDENCY_MODIFICATION",
    "SPA": "SYSTEM_PERMISSION_ACCESS",
    "SEC": "SECURITY_CONTROL",
    "OBS": "OBSERVABILITY",
    "INF": "INFRASTRUCTURE",
}

EXPECTED_LABEL_COUNT = 32
PATTERN_KINDS = frozenset({"call-prefix", "member-chain", "attribute-access"})
LANGUAGES = frozenset({"python", "javascript", "typescript"})

# Literal fragments that mark an endpoint as an application API rather than
# plain web access.
API_PATH_MARKERS = ("/api/", "/v1/", "/v2/", "/v3/", "/graphql")
SECRET_NAME = re.compile(r"(?i)(?:KEY|TOKEN|SECRET|PASSWORD|PASSWD|PWD|CREDENTIALS?|AUTH)(?![a-z])")


def category_of_label(code: str) -> str | None:
    """Category a label code belongs to, from its prefix."""
    return LABEL_PREFIXES.get(code.split("-", 1)[0])


@dataclass(frozen=True)
class SecondLevelLabel:
    code: str
    category: str
    description: str


@dataclass(frozen=True)
class Category:
    id: str
    labels: tuple[SecondLevelLabel, ...]


@dataclass(frozen=True)
class LocalizationRule:
    """One code pattern that evidences a category.

    Beyond the three pattern kinds, a rule may gate on its argument text
    (``when_args`` must match, ``unless_args`` must not), veto specific
    callees (``exclude``), list several ``candidates`` categories when the
    pattern alone cannot decide, and mark user-input sources.
    """

    category: str
    kind: str
    pattern: str
    languages: frozenset[str]
    label_hint: str | None = None
    candidates: tuple[str, ...] = ()
    when_args: str | None = None
    unless_args: str | None = None
    exclude: str | None = None
    input_source: bool = False
    sdk: bool = False

    @property
    def candidate_categories(self) -> tuple[str, ...]:
        return self.candidates or (self.category,)

    def to_json(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "category": self.category,
            "kind": self.kind,
            "pattern": self.pattern,
            "languages": sorted(self.languages),
        }
        for name in ("label_hint", "when_args", "unless_args", "exclude"):
            value = getattr(self, name)
            if value is not None:
                doc[name] = value
        if self.candidates:
            doc["candidates"] = list(self.candidates)
        if self.input_source:
            doc["input_source"] = True
        if self.sdk:
            doc["sdk"] = True
        return doc


@dataclass(frozen=True)
class Taxonomy:
    categories: tuple[Category, ...]
    rules: tuple[LocalizationRule, ...]
    _labels: Mapping[str, SecondLevelLabel] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "_labels", {lab.code: lab for cat in self.categories for lab in cat.labels}
        )

    @property
    def category_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.categories)

    @property
    def labels(self) -> tuple[SecondLevelLabel, ...]:
        return tuple(self._labels.values())

    def label(self, code: str) -> SecondLevelLabel:
        return self._labels[code]

    def has_label(self, code: str) -> bool:
        return code in self._labels

    def category(self, category_id: str) -> Category:
        for cat in self.categories:
            if cat.id == category_id:
                return cat
        raise KeyError(category_id)


# -- loading --------------------------------------------------------------


def _builtin_document() -> dict[str, Any]:
    text = resources.files("skillscope").joinpath("data/taxonomy.json").read_text(encoding="utf-8")
    return json.loads(text)


@lru_cache(maxsize=1)
def _builtin_taxonomy() -> Taxonomy:
    return _build(_builtin_document())


def load_taxonomy(source: str | os.PathLike[str] | Mapping[str, Any] | None = None) -> Taxonomy:
    """Load and validate a taxonomy document.

    ``source`` may be a parsed document, a path to a JSON file, or ``None``
    for the shipped default.  A document without a ``rules`` key keeps the
    shipped rule set, so a config can override only the label space.
    """
    if source is None:
        return _builtin_taxonomy()
    if isinstance(source, Mapping):
        doc = dict(source)
    else:
        try:
            with open(source, encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise TaxonomyInvalid(f"cannot read taxonomy document {source}: {exc}") from exc
    if not isinstance(doc, dict):
        raise TaxonomyInvalid("taxonomy document must be a JSON object")
    if "rules" not in doc:
        doc["rules"] = _builtin_document()["rules"]
    return _build(doc)


def _build(doc: Mapping[str, Any]) -> Taxonomy:
    raw_categories = doc.get("categories")
    if not isinstance(raw_categories, list):
        raise TaxonomyInvalid("'categories' must be a list")
    categories: list[Category] = []
    seen_codes: set[str] = set()
    for raw in raw_categories:
        cid = raw.get("id") if isinstance(raw, dict) else None
        if cid not in CATEGORY_IDS:
            raise TaxonomyInvalid(f"unknown category id {cid!r}")
        if any(c.id == cid for c in categories):
            raise TaxonomyInvalid(f"duplicate category {cid}")
        labels = []
        for lab in raw.get("labels", []):
            code = lab.get("code") if isinstance(lab, dict) else None
            if not isinstance(code, str) or not code:
                raise TaxonomyInvalid(f"category {cid}: label without a code")
            if code in seen_codes:
                raise TaxonomyInvalid(f"duplicate label code {code}")
            if category_of_label(code) != cid:
                raise TaxonomyInvalid(f"label {code} does not belong to category {cid} by prefix")
            seen_codes.add(code)
            labels.append(SecondLevelLabel(code, cid, str(lab.get("description", ""))))
        if not labels:
            raise TaxonomyInvalid(f"category {cid} has no labels")
        categories.append(Category(cid, tuple(labels)))
    if len(categories) != len(CATEGORY_IDS):
        raise TaxonomyInvalid(
            f"expected {len(CATEGORY_IDS)} categories, found {len(categories)}"
        )
    if len(seen_codes) != EXPECTED_LABEL_COUNT:
        raise TaxonomyInvalid(f"expected {EXPECTED_LABEL_COUNT} labels, found {len(seen_codes)}")

    rules = tuple(_build_rule(r, seen_codes) for r in doc.get("rules", []))
    covered = {c for rule in rules for c in rule.candidate_categories}
    missing = [c for c in CATEGORY_IDS if c not in covered]
    if missing:
        raise TaxonomyInvalid(f"categories without any localization rule: {', '.join(missing)}")
    return Taxonomy(tuple(categories), rules)


def _build_rule(raw: Any, codes: set[str]) -> LocalizationRule:
    if not isinstance(raw, dict):
        raise TaxonomyInvalid("rule entries must be objects")
    category = raw.get("category")
    if category not in CATEGORY_IDS:
        raise TaxonomyInvalid(f"rule with unknown category {category!r}")
    kind = raw.get("kind")
    if kind not in PATTERN_KINDS:
        raise TaxonomyInvalid(f"rule kind must be one of {sorted(PATTERN_KINDS)}, got {kind!r}")
    pattern = raw.get("pattern")
    if not isinstance(pattern, str) or not pattern.strip("."):
        raise TaxonomyInvalid("rule pattern must be a non-empty string")
    languages = frozenset(raw.get("languages") or ())
    if not languages or not languages <= LANGUAGES:
        raise TaxonomyInvalid(f"rule {pattern!r}: languages must be a non-empty subset of {sorted(LANGUAGES)}")
    hint = raw.get("label_hint")
    if hint is not None and (hint not in codes or category_of_label(hint) != category):
        raise TaxonomyInvalid(f"rule {pattern!r}: label hint {hint!r} is not a {category} label")
    candidates = tuple(raw.get("candidates") or ())
    if candidates and (category not in candidates or any(c not in CATEGORY_IDS for c in candidates)):
        raise TaxonomyInvalid(f"rule {pattern!r}: candidates must be categories including {category}")
    for key in ("when_args", "unless_args", "exclude"):
        if raw.get(key) is not None:
            try:
                re.compile(raw[key])
            except re.error as exc:
                raise TaxonomyInvalid(f"rule {pattern!r}: bad {key} regex: {exc}") from exc
    return LocalizationRule(
        category=category,
        kind=kind,
        pattern=pattern,
        languages=languages,
        label_hint=hint,
        candidates=candidates,
        when_args=raw.get("when_args"),
        unless_args=raw.get("unless_args"),
        exclude=raw.get("exclude"),
        input_source=bool(raw.get("input_source", False)),
        sdk=bool(raw.get("sdk", False)),
    )


# -- site analysis --------------------------------------------------------

_LEADING_WORDS = frozenset({"await", "new", "return", "yield", "const", "let", "var", "with", "async", "void", "typeof"})
_ASSIGN_OPS = frozenset({"=", ":=", "+=", "-=", "*=", "/=", "|=", "&=", "??=", "||=", "&&="})
_CLOSERS = {"(": ")", "[": "]", "{": "}"}


@dataclass(frozen=True)
class SiteShape:
    """The leading access chain of a site: names, calls and subscripts."""

    names: tuple[str, ...]
    callee: str  # dotted rendering, intermediate calls as "()" and subscripts as "[]"
    is_call: bool
    args: str  # source text inside the final call's parentheses
    start: int
    callee_end: int
    end: int


def _language_family(language: str) -> str:
    return "python" if str(language).lower() == "python" else "javascript"


def analyze_site(site: str, language: str) -> SiteShape | None:
    """Parse the access chain a site starts with, or ``None`` if there is none."""
    toks = lex(site, _language_family(language))
    i = _chain_start(toks)
    if i is None:
        return None
    names: list[str] = []
    callee_parts: list[str] = []
    start = toks[i].start
    last_call: tuple[int, int, int] | None = None  # (callee_end, args_start, args_end)
    end = toks[i].end
    n = len(toks)
    expect_name = True
    while i < n:
        t = toks[i]
        if expect_name:
            if t.kind != "name":
                break
            names.append(t.text)
            callee_parts.append(t.text)
            end = t.end
            i += 1
            expect_name = False
            last_call = None
            continue
        if t.kind == "op" and t.text in (".", "?."):
            if i + 1 < n and toks[i + 1].kind == "name":
                callee_parts.append(".")
                expect_name = True
                i += 1
                continue
            break
        if t.kind == "op" and t.text in ("(", "["):
            close = _matching(toks, i)
            if close is None:
                close_end, inner_end = len(site), len(site)
                j = n
            else:
                close_end, inner_end = toks[close].end, toks[close].start
                j = close + 1
            if t.text == "(":
                last_call = (toks[i - 1].end if i else start, t.end, inner_end)
                callee_parts.append("()")
            else:
                last_call = None
                callee_parts.append("[]")
            end = close_end
            i = j
            continue
        if t.kind == "op" and t.text == "!" and i + 1 < n and toks[i + 1].text in (".", "(", "?."):
            i += 1  # TypeScript non-null assertion
            continue
        break
    if not names:
        return None
    is_call = last_call is not None
    parts = callee_parts[:-1] if is_call else callee_parts
    callee = "".join(parts)
    if is_call:
        args = site[last_call[1] : last_call[2]]
        callee_end = last_call[0]
    else:
        args = ""
        callee_end = end
    return SiteShape(tuple(names), callee, is_call, args, start, callee_end, end)


def _chain_start(toks: Sequence[SiteToken]) -> int | None:
    """Index where the leading chain starts, after keywords and assignment targets."""
    i = 0
    n = len(toks)
    # skip a (possibly destructured) assignment prefix at bracket depth 0
    depth = 0
    last_assign = None
    for j, t in enumerate(toks):
        if t.kind != "op":
            continue
        if t.text in _CLOSERS:
            depth += 1
        elif t.text in (")", "]", "}"):
            depth -= 1
        elif depth == 0 and t.text in _ASSIGN_OPS:
            last_assign = j
        elif depth == 0 and t.text == "=>":
            break
    if last_assign is not None:
        i = last_assign + 1
    while i < n and toks[i].kind == "name" and toks[i].text in _LEADING_WORDS:
        # "new" and friends only prefix the chain when followed by more tokens
        i += 1
    if i < n and toks[i].kind == "name":
        return i
    return None


def _matching(toks: Sequence[SiteToken], i: int) -> int | None:
    opener = toks[i].text
    closer = _CLOSERS[opener]
    depth = 0
    for j in range(i, len(toks)):
        t = toks[j]
        if t.kind != "op":
            continue
        if t.text in _CLOSERS:
            depth += 1
        elif t.text in (")", "]", "}"):
            depth -= 1
            if depth == 0:
                return j if t.text == closer else None
    return None


def _split_pattern(pattern: str) -> tuple[list[str], bool, bool]:
    """Pattern segments, whether a receiver is required, whether a call is required."""
    call = pattern.endswith("(")
    body = pattern[:-1] if call else pattern
    leading_dot = body.startswith(".")
    segments = [s for s in body.split(".") if s]
    return segments, leading_dot, call


def _rule_matches(rule: LocalizationRule, shape: SiteShape) -> tuple[int, int] | None:
    kind = rule.kind
    if kind == "call-prefix":
        if not shape.is_call or "()" in shape.callee or "[]" in shape.callee:
            return None
        canon = shape.callee + "("
        if not canon.startswith(rule.pattern):
            return None
        span = (shape.start, shape.start + len(rule.pattern.rstrip("(")))
    elif kind == "member-chain":
        segments, needs_receiver, needs_call = _split_pattern(rule.pattern)
        names = list(shape.names)
        if needs_call:
            if not shape.is_call or len(names) < len(segments):
                return None
            if names[len(names) - len(segments) :] != segments:
                return None
            if needs_receiver and len(names) == len(segments):
                return None
        else:
            found = any(
                names[k : k + len(segments)] == segments
                for k in range(len(names) - len(segments) + 1)
            )
            if not found or (needs_receiver and names[: len(segments)] == segments):
                return None
        span = (shape.start, shape.callee_end)
    else:  # attribute-access
        segments = _split_pattern(rule.pattern)[0]
        if shape.is_call or list(shape.names[: len(segments)]) != segments:
            return None
        span = (shape.start, shape.end)
    if rule.exclude and re.search(rule.exclude, shape.callee):
        return None
    if rule.when_args and not re.search(rule.when_args, shape.args):
        return None
    if rule.unless_args and re.search(rule.unless_args, shape.args):
        return None
    return span


def _language_key(language: Any) -> str:
    value = getattr(language, "value", language)
    return str(value).lower()


def match_rules(
    site: str,
    language: Any,
    rules: Iterable[LocalizationRule] | Taxonomy | None = None,
) -> list[tuple[LocalizationRule, tuple[int, int]]]:
    """All rules whose pattern matches ``site``, with the matched character span.

    Only the access chain a site starts with is considered (after leading
    keywords such as ``await`` or ``new`` and any assignment target), and the
    site is tokenized first, so text inside string literals and comments can
    never match.  The result is sorted, so rule order does not matter.
    """
    if rules is None:
        rules = _builtin_taxonomy().rules
    elif isinstance(rules, Taxonomy):
        rules = rules.rules
    lang = _language_key(language)
    shape = analyze_site(site, lang)
    if shape is None:
        return []
    hits = []
    for rule in rules:
        if lang not in rule.languages:
            continue
        span = _rule_matches(rule, shape)
        if span is not None:
            hits.append((rule, span))
    hits.sort(key=lambda h: (h[0].category, h[0].kind, h[0].pattern, h[0].label_hint or "", h[1]))
    return hits


def refine_label(rule: LocalizationRule, site: str, language: Any) -> str | None:
    """Best-effort second-level label for a matched site.

    Secret reads whose variable name looks like a credential are ``SA-KEY``;
    otherwise the rule's own hint is kept.
    """
    if rule.category == "SECRET_ACCESS" and rule.label_hint is None:
        names = [t.text for t in lex(site, _language_family(_language_key(language))) if t.kind in ("string", "name")]
        if any(SECRET_NAME.search(n) for n in names[1:]):
            return "SA-KEY"
    return rule.label_hint


def looks_like_api_endpoint(literal: str) -> bool:
    return any(marker in literal for marker in API_PATH_MARKERS)
