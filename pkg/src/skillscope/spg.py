"""Security property graphs (SPGs) built from per-file flow IR.

Construction has two phases.  Phase I works one file at a time: every call
or member-access node whose rendering matches a localization rule becomes an
:class:`SpgNode`, and an ``IntraFlow`` edge joins two such nodes whenever the
IR has a control- or data-flow path between them.  Phase II looks at every
ordered pair of files and adds cross-file edges for resolved calls, imported
module state, and files written by one script and read by another.

Only security nodes are ever materialized; the IR nodes a path runs through
are traversed but never copied into the graph.
"""

from __future__ import annotations

import json
import posixpath
import re
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import jsonschema

from .errors import AllFilesSkipped, EncodingError, SchemaError, UnsupportedLanguage
from .ir import EdgeKind, FileIR, NodeKind, analyze_file, reach_from
from .ir.model import MAX_DEPTH, MAX_VISITED, FunctionInfo, ImportBinding
from .skill import ImplementationFile, Language, Skill, language_for
from .taxonomy import (
    LocalizationRule,
    Taxonomy,
    load_taxonomy,
    looks_like_api_endpoint,
    match_rules,
    refine_label,
)

INTRA_FLOW = "IntraFlow"
CROSS_IMPORT = "CrossImport"
CROSS_CALL = "CrossCall"
CROSS_PATH = "CrossPath"
EDGE_KINDS = (INTRA_FLOW, CROSS_IMPORT, CROSS_CALL, CROSS_PATH)
CROSS_KINDS = frozenset({CROSS_IMPORT, CROSS_CALL, CROSS_PATH})

NETWORK, EXTERNAL_API = "NETWORK_ACCESS", "EXTERNAL_API"
_LOCATABLE = (NodeKind.CALL, NodeKind.MEMBER)
_JS_EXTENSIONS = (".js", ".ts", ".mjs", ".cjs")
_FILE_EXTENSION = re.compile(r"\.[A-Za-z0-9]{1,8}$")


@dataclass(frozen=True, order=True)
class SpgNode:
    id: int
    file: str
    line: int
    col: int
    category: str
    candidates: tuple[str, ...]
    label_hint: str | None
    pattern: str
    operation: str
    function: str | None = None
    ir_node: int = field(default=-1, compare=False)

    @property
    def span(self) -> tuple[int, int]:
        return (self.line, self.col)

    def to_json(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "file": self.file,
            "line": self.line,
            "col": self.col,
            "category": self.category,
            "candidates": list(self.candidates),
            "label_hint": self.label_hint,
            "pattern": self.pattern,
            "operation": self.operation,
            "function": self.function,
        }


@dataclass(frozen=True, order=True)
class SpgEdge:
    src: int
    dst: int
    kind: str

    def to_json(self) -> dict[str, Any]:
        return {"from": self.src, "to": self.dst, "kind": self.kind}


@dataclass(frozen=True)
class FileGraph:
    """Phase I result for one file: its nodes and IntraFlow edges."""

    file: str
    nodes: tuple[SpgNode, ...]
    edges: tuple[SpgEdge, ...]
    truncated: bool = False


@dataclass(frozen=True)
class SpgStats:
    nodes: int
    edges: int
    distinct_operations: int
    truncated: bool

    def to_json(self) -> dict[str, Any]:
        return {
            "nodes": self.nodes,
            "edges": self.edges,
            "distinct_operations": self.distinct_operations,
            "truncated": self.truncated,
        }


@dataclass(frozen=True)
class Spg:
    skill_id: str
    nodes: tuple[SpgNode, ...] = ()
    edges: tuple[SpgEdge, ...] = ()
    skipped_files: tuple[tuple[str, str], ...] = ()
    file_warnings: tuple[tuple[str, tuple[str, ...]], ...] = ()
    truncated: bool = False

    @property
    def stats(self) -> SpgStats:
        return SpgStats(
            nodes=len(self.nodes),
            edges=len(self.edges),
            distinct_operations=len({n.operation for n in self.nodes}),
            truncated=self.truncated,
        )

    @property
    def per_file(self) -> dict[str, tuple[tuple[int, ...], tuple[int, ...]]]:
        """file -> (node ids, indices into ``edges`` of its IntraFlow edges)."""
        files: dict[str, tuple[list[int], list[int]]] = {}
        for f, _ in self.file_warnings:
            files.setdefault(f, ([], []))
        by_id = {}
        for n in self.nodes:
            files.setdefault(n.file, ([], []))[0].append(n.id)
            by_id[n.id] = n.file
        for i, e in enumerate(self.edges):
            if e.kind == INTRA_FLOW:
                files[by_id[e.src]][1].append(i)
        return {f: (tuple(ns), tuple(es)) for f, (ns, es) in sorted(files.items())}

    def node(self, node_id: int) -> SpgNode:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    @property
    def analyzed_files(self) -> tuple[str, ...]:
        return tuple(f for f, _ in self.file_warnings)


# -- rules ----------------------------------------------------------------


def _rules(rules: Taxonomy | Iterable[LocalizationRule] | None) -> tuple[LocalizationRule, ...]:
    if rules is None:
        return load_taxonomy().rules
    if isinstance(rules, Taxonomy):
        return rules.rules
    return tuple(rules)


def _rule_preference(rule: LocalizationRule) -> tuple:
    # the longest, most specific pattern wins; a hinted rule beats an unhinted one
    return (-len(rule.pattern), rule.label_hint is None, rule.kind, rule.pattern, rule.label_hint or "")


# -- phase I: localization --------------------------------------------------


def _backward_literals(ir: FileIR, node_id: int) -> list[str]:
    """Decoded values of string literals whose value flows into ``node_id``."""
    seen = {node_id}
    queue = deque([node_id])
    values = []
    while queue and len(seen) < MAX_VISITED:
        current = queue.popleft()
        for pred in ir.predecessors(current, (EdgeKind.DFG,)):
            if pred in seen:
                continue
            seen.add(pred)
            node = ir.nodes[pred]
            if node.kind is NodeKind.LITERAL and node.value is not None:
                values.append(node.value)
            queue.append(pred)
    return values


def disambiguate(rule: LocalizationRule, ir: FileIR, node_id: int) -> str:
    """Pick one category for a rule that lists several candidates.

    Only the network/API split is ambiguous in practice: a vendor SDK call,
    or a request whose URL literal carries an API-style path, counts as an
    external API call; any other request is plain network access.
    """
    candidates = rule.candidate_categories
    if len(candidates) == 1:
        return candidates[0]
    if set(candidates) == {NETWORK, EXTERNAL_API}:
        if rule.sdk or any(looks_like_api_endpoint(v) for v in _backward_literals(ir, node_id)):
            return EXTERNAL_API
        return NETWORK
    return rule.category if rule.category in candidates else sorted(candidates)[0]


def locate_security_nodes(
    ir: FileIR, rules: Taxonomy | Iterable[LocalizationRule] | None = None
) -> list[SpgNode]:
    """Security nodes of one file, with file-local ids in (line, col) order.

    Each IR call or member access yields at most one node per category.  When
    a member access is only the receiver of a call and both evidence the same
    category (``os.environ`` inside ``os.environ.get(...)``), the call is kept.
    """
    rule_list = _rules(rules)
    found: dict[tuple[int, str], tuple[LocalizationRule, str]] = {}
    for node in ir.nodes:
        if node.kind not in _LOCATABLE:
            continue
        for rule, _span in match_rules(node.rendering, ir.language, rule_list):
            category = disambiguate(rule, ir, node.id)
            key = (node.id, category)
            if key not in found or _rule_preference(rule) < _rule_preference(found[key][0]):
                found[key] = (rule, category)
    for receiver, call in ir.receivers.items():
        for node_id, category in list(found):
            if node_id == receiver and (call, category) in found:
                del found[(node_id, category)]
    located = []
    for (node_id, category), (rule, _) in found.items():
        node = ir.nodes[node_id]
        located.append(
            SpgNode(
                id=-1,
                file=ir.file,
                line=node.line,
                col=node.col,
                category=category,
                candidates=tuple(sorted(rule.candidate_categories)),
                label_hint=refine_label(rule, node.rendering, ir.language),
                pattern=rule.pattern,
                operation=node.rendering,
                function=node.function,
                ir_node=node_id,
            )
        )
    located.sort(key=_node_key)
    return [_with_id(n, i) for i, n in enumerate(located)]


def _node_key(n: SpgNode) -> tuple:
    return (n.file, n.line, n.col, n.category, n.pattern, n.operation, n.ir_node)


def _with_id(n: SpgNode, new_id: int) -> SpgNode:
    return SpgNode(
        new_id, n.file, n.line, n.col, n.category, n.candidates, n.label_hint, n.pattern, n.operation, n.function, n.ir_node
    )


def _reach_cache(ir: FileIR):
    cache: dict[int, tuple[set[int], bool]] = {}

    def reached(start: int) -> tuple[set[int], bool]:
        if start not in cache:
            result = reach_from(ir, start, (EdgeKind.CFG, EdgeKind.DFG), max_visited=MAX_VISITED, max_depth=MAX_DEPTH)
            cache[start] = (result.reached, result.truncated)
        return cache[start]

    return reached


def discover_edges_bfs(ir: FileIR, nodes: Sequence[SpgNode]) -> list[SpgEdge]:
    """IntraFlow edges between every ordered pair of nodes joined by an IR flow path."""
    return _discover(ir, nodes)[0]


def _discover(ir: FileIR, nodes: Sequence[SpgNode]) -> tuple[list[SpgEdge], bool]:
    reached = _reach_cache(ir)
    edges = []
    truncated = False
    for u in nodes:
        targets, cut = reached(u.ir_node)
        truncated |= cut
        for v in nodes:
            if u.id != v.id and v.ir_node in targets:
                edges.append(SpgEdge(u.id, v.id, INTRA_FLOW))
    edges.sort()
    return edges, truncated


def build_file_graph(
    ir: FileIR, rules: Taxonomy | Iterable[LocalizationRule] | None = None
) -> FileGraph:
    nodes = locate_security_nodes(ir, rules)
    edges, truncated = _discover(ir, nodes)
    return FileGraph(ir.file, tuple(nodes), tuple(edges), truncated)


# -- phase II: cross-file edges --------------------------------------------


def _python_module_path(file: str) -> str:
    stem = file[: -len(".py")] if file.endswith(".py") else file
    if stem.endswith("/__init__"):
        stem = stem[: -len("/__init__")]
    return stem.replace("/", ".")


def _python_targets(binding: ImportBinding, importer: str) -> list[tuple[str, str | None]]:
    """Candidate (module path, symbol) readings of a Python import."""
    module = binding.module
    level = len(module) - len(module.lstrip("."))
    name = module[level:]
    if level:
        base = posixpath.dirname(importer)
        for _ in range(level - 1):
            base = posixpath.dirname(base)
        prefix = base.replace("/", ".")
        absolute = ".".join(p for p in (prefix, name) if p)
    else:
        absolute = name
    readings: list[tuple[str, str | None]] = []
    if binding.symbol is None:
        readings.append((absolute, None))
    else:
        readings.append((absolute, binding.symbol))
        readings.append((".".join(p for p in (absolute, binding.symbol) if p), None))
    return [(m, s) for m, s in readings if m]


def _python_resolves(module: str, target_file: str, relative: bool) -> bool:
    target = _python_module_path(target_file)
    if relative:
        return target == module
    return target == module or target.endswith("." + module)


def _js_resolves(module: str, importer: str, target_file: str) -> bool:
    if not module.startswith(("./", "../")):
        return False
    base = posixpath.normpath(posixpath.join(posixpath.dirname(importer), module))
    if target_file == base:
        return True
    candidates = [base + ext for ext in _JS_EXTENSIONS]
    stem, ext = posixpath.splitext(base)
    if ext in (".js", ".mjs", ".cjs"):
        candidates += [stem + e for e in _JS_EXTENSIONS]
    candidates += [posixpath.join(base, "index" + e) for e in _JS_EXTENSIONS]
    return target_file in candidates


def resolve_imports(ir_i: FileIR, ir_j: FileIR) -> list[tuple[ImportBinding, str | None]]:
    """Bindings of file i that refer to file j, as (binding, symbol in j or None for the module)."""
    out = []
    for binding in ir_i.imports:
        if ir_i.language == "python":
            if ir_j.language != "python":
                continue
            relative = binding.module.startswith(".")
            for module, symbol in _python_targets(binding, ir_i.file):
                if _python_resolves(module, ir_j.file, relative):
                    out.append((binding, symbol))
                    break
        elif ir_j.language != "python" and _js_resolves(binding.module, ir_i.file, ir_j.file):
            out.append((binding, binding.symbol))
    return out


def _exported_functions(ir: FileIR) -> dict[str, FunctionInfo]:
    """Name -> callable function visible to importers of ``ir``."""
    top = {fn.name: fn for fn in ir.functions if fn.top_level and not fn.method}
    visible = dict(top)
    for exported, local in ir.exports.items():
        if local in top:
            visible[exported] = top[local]
    return visible


def _path_literal(value: str) -> str | None:
    p = value.strip().strip("'\"`").strip()
    if not p or "://" in p or "{}" in p or "\n" in p:
        return None
    if "/" not in p and not _FILE_EXTENSION.search(p):
        return None
    while p.startswith("./"):
        p = p[2:]
    while "/./" in p:
        p = p.replace("/./", "/")
    return p or None


def _path_literals(ir: FileIR, node_id: int) -> set[str]:
    out = set()
    for value in _backward_literals(ir, node_id):
        p = _path_literal(value)
        if p is not None:
            out.add(p)
    return out


def complete_cross_file_edges(
    g_i: FileGraph,
    g_j: FileGraph,
    ir_i: FileIR,
    ir_j: FileIR,
    criteria: Iterable[str] = (CROSS_CALL, CROSS_IMPORT, CROSS_PATH),
) -> list[SpgEdge]:
    """Cross-file edges contributed by file i's references to file j.

    Covers calls from i into functions defined in j, module state of j
    imported by i (in both flow directions, conservatively at module level),
    and files that i writes and j reads.
    """
    kinds = frozenset(criteria)
    edges: set[SpgEdge] = set()
    if not g_i.nodes or not g_j.nodes:
        return []
    reached = _reach_cache(ir_i)

    def upstream(target: int) -> list[SpgNode]:
        return [u for u in g_i.nodes if u.ir_node == target or target in reached(u.ir_node)[0]]

    functions = _exported_functions(ir_j)
    for binding, symbol in resolve_imports(ir_i, ir_j):
        called: list[tuple[str, FunctionInfo]] = []
        if symbol is not None and symbol in functions:
            called.append((binding.local, functions[symbol]))
        elif symbol is None:
            called.extend((f"{binding.local}.{name}", fn) for name, fn in functions.items())
        if CROSS_CALL in kinds:
            for callee, fn in called:
                for site, rendering in ir_i.call_sites:
                    if rendering != callee:
                        continue
                    inside = [v for v in g_j.nodes if fn.contains(v.ir_node)]
                    for u in upstream(site):
                        for v in inside:
                            edges.add(SpgEdge(u.id, v.id, CROSS_CALL))
        if CROSS_IMPORT in kinds and (symbol is None or symbol not in functions):
            module_level = [v for v in g_j.nodes if ir_j.function_at(v.ir_node) is None]
            usages = ir_i.successors(binding.node, (EdgeKind.DFG,))
            for usage in usages:
                downstream = reached(usage)[0] | {usage}
                for u in upstream(usage):
                    for v in module_level:
                        edges.add(SpgEdge(u.id, v.id, CROSS_IMPORT))
                for v in module_level:
                    for w in g_i.nodes:
                        if w.ir_node in downstream:
                            edges.add(SpgEdge(v.id, w.id, CROSS_IMPORT))
    if CROSS_PATH in kinds:
        readers = [(v, _path_literals(ir_j, v.ir_node)) for v in g_j.nodes if v.category == "FILE_READ"]
        for u in g_i.nodes:
            if u.category != "FILE_WRITE":
                continue
            written = _path_literals(ir_i, u.ir_node)
            for v, read in readers:
                if written & read:
                    edges.add(SpgEdge(u.id, v.id, CROSS_PATH))
    return sorted(edges)


# -- whole skill --------------------------------------------------------------


def _analyze(file: ImplementationFile) -> FileIR | tuple[str, str]:
    try:
        return analyze_file(file)
    except UnsupportedLanguage:
        return (file.path, f"unsupported language: {file.language.value}")
    except EncodingError as exc:
        return (file.path, f"encoding error: {exc}")


def _renumber(graph: FileGraph, mapping: Mapping[int, int]) -> FileGraph:
    nodes = tuple(_with_id(n, mapping[n.id]) for n in graph.nodes)
    edges = tuple(SpgEdge(mapping[e.src], mapping[e.dst], e.kind) for e in graph.edges)
    return FileGraph(graph.file, nodes, edges, graph.truncated)


def build_skill_spg(
    skill: Skill,
    rules: Taxonomy | Iterable[LocalizationRule] | None = None,
    *,
    jobs: int = 1,
) -> Spg:
    """Build the SPG of a programmatic skill.

    Files are analyzed independently (in parallel when ``jobs`` > 1) and the
    result does not depend on file order.  Raises :class:`AllFilesSkipped`
    when no implementation file could be analyzed.
    """
    rule_list = _rules(rules)
    files = sorted((f for f in skill.files if f.language.analyzable), key=lambda f: f.path)
    skipped: list[tuple[str, str]] = [
        (path, reason) for path, reason in skill.skipped if language_for(path) is not Language.OTHER
    ]

    def phase_one(file: ImplementationFile):
        result = _analyze(file)
        if isinstance(result, tuple):
            return result
        return result, build_file_graph(result, rule_list)

    if jobs > 1 and len(files) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(phase_one, files))
    else:
        results = [phase_one(f) for f in files]

    analyzed: list[tuple[FileIR, FileGraph]] = []
    for result in results:
        if isinstance(result[0], str):
            skipped.append(result)  # type: ignore[arg-type]
        else:
            analyzed.append(result)  # type: ignore[arg-type]
    skipped.sort()
    if not analyzed:
        raise AllFilesSkipped(skill.id, tuple(skipped))

    # skill-unique ids in (file, line, col, ...) order
    ordered = sorted((n for _, g in analyzed for n in g.nodes), key=_node_key)
    new_ids = {(n.file, n.id): i for i, n in enumerate(ordered)}
    renumbered = [
        (ir, _renumber(g, {n.id: new_ids[(g.file, n.id)] for n in g.nodes})) for ir, g in analyzed
    ]
    nodes = tuple(_with_id(n, new_ids[(n.file, n.id)]) for n in ordered)
    edges: set[SpgEdge] = set()
    for _, g in renumbered:
        edges.update(g.edges)
    for ir_i, g_i in renumbered:
        for ir_j, g_j in renumbered:
            if ir_i.file != ir_j.file:
                edges.update(complete_cross_file_edges(g_i, g_j, ir_i, ir_j))
    return Spg(
        skill_id=skill.id,
        nodes=nodes,
        edges=tuple(sorted(edges)),
        skipped_files=tuple(skipped),
        file_warnings=tuple((ir.file, tuple(ir.warnings)) for ir, _ in renumbered),
        truncated=any(g.truncated for _, g in renumbered),
    )


# -- serialization ------------------------------------------------------------

_NULLABLE_STRING = {"type": ["string", "null"]}
CODE_GRAPH_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["skill_id", "nodes", "edges", "stats", "skipped_files"],
    "properties": {
        "skill_id": {"type": "string"},
        "nodes": {
            "type": "array",
            "items": {
                "type": "object",
                "required": [
                    "id", "file", "line", "col", "category", "candidates",
                    "label_hint", "pattern", "operation", "function",
                ],
                "properties": {
                    "id": {"type": "integer", "minimum": 0},
                    "file": {"type": "string"},
                    "line": {"type": "integer", "minimum": 1},
                    "col": {"type": "integer", "minimum": 1},
                    "category": {"type": "string"},
                    "candidates": {"type": "array", "items": {"type": "string"}},
                    "label_hint": _NULLABLE_STRING,
                    "pattern": {"type": "string"},
                    "operation": {"type": "string"},
                    "function": _NULLABLE_STRING,
                },
            },
        },
        "edges": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["from", "to", "kind"],
                "properties": {
                    "from": {"type": "integer"},
                    "to": {"type": "integer"},
                    "kind": {"enum": list(EDGE_KINDS)},
                },
            },
        },
        "stats": {
            "type": "object",
            "required": ["nodes", "edges", "distinct_operations", "truncated"],
            "properties": {
                "nodes": {"type": "integer"},
                "edges": {"type": "integer"},
                "distinct_operations": {"type": "integer"},
                "truncated": {"type": "boolean"},
            },
        },
        "skipped_files": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["file", "reason"],
                "properties": {"file": {"type": "string"}, "reason": {"type": "string"}},
            },
        },
        "files": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["file", "warnings"],
                "properties": {
                    "file": {"type": "string"},
                    "warnings": {"type": "array", "items": {"type": "string"}},
                },
            },
        },
    },
}


def serialize_spg(g: Spg) -> dict[str, Any]:
    """The ``code_graph_json`` document for ``g``."""
    return {
        "skill_id": g.skill_id,
        "nodes": [n.to_json() for n in g.nodes],
        "edges": [e.to_json() for e in g.edges],
        "stats": g.stats.to_json(),
        "skipped_files": [{"file": f, "reason": r} for f, r in g.skipped_files],
        "files": [{"file": f, "warnings": list(w)} for f, w in g.file_warnings],
    }


def dumps_spg(g: Spg) -> str:
    return json.dumps(serialize_spg(g), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def deserialize_spg(doc: Mapping[str, Any] | str | bytes) -> Spg:
    """Inverse of :func:`serialize_spg`; raises :class:`SchemaError` on malformed input."""
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except ValueError as exc:
            raise SchemaError(f"code graph is not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(doc, CODE_GRAPH_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"code graph: {exc.message}") from exc
    nodes = tuple(
        SpgNode(
            id=n["id"],
            file=n["file"],
            line=n["line"],
            col=n["col"],
            category=n["category"],
            candidates=tuple(n["candidates"]),
            label_hint=n["label_hint"],
            pattern=n["pattern"],
            operation=n["operation"],
            function=n["function"],
        )
        for n in doc["nodes"]
    )
    ids = [n.id for n in nodes]
    if len(set(ids)) != len(ids):
        raise SchemaError("code graph: duplicate node id")
    files = {n.id: n.file for n in nodes}
    edges = []
    for e in doc["edges"]:
        src, dst, kind = e["from"], e["to"], e["kind"]
        if src not in files or dst not in files:
            raise SchemaError(f"code graph: edge {src}->{dst} references a missing node")
        if src == dst:
            raise SchemaError(f"code graph: self-edge on node {src}")
        if (kind == INTRA_FLOW) != (files[src] == files[dst]):
            raise SchemaError(f"code graph: {kind} edge {src}->{dst} has inconsistent files")
        edges.append(SpgEdge(src, dst, kind))
    g = Spg(
        skill_id=doc["skill_id"],
        nodes=nodes,
        edges=tuple(sorted(edges)),
        skipped_files=tuple((s["file"], s["reason"]) for s in doc["skipped_files"]),
        file_warnings=tuple((f["file"], tuple(f["warnings"])) for f in doc.get("files", ())),
        truncated=doc["stats"]["truncated"],
    )
    stats = doc["stats"]
    if (stats["nodes"], stats["edges"], stats["distinct_operations"]) != (
        g.stats.nodes,
        g.stats.edges,
        g.stats.distinct_operations,
    ):
        raise SchemaError("code graph: stats disagree with nodes and edges")
    return g


def loads_spg(text: str | bytes) -> Spg:
    return deserialize_spg(text)
