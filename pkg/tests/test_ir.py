from __future__ import annotations

from collections import Counter, defaultdict

import pytest
from hypothesis import given
from hypothesis import strategies as st

from skillscope.errors import EncodingError, UnknownNode, UnsupportedLanguage
from skillscope.ir import EdgeKind, NodeKind, analyze_file, analyze_source, reach_from, reachable
from skillscope.skill import ImplementationFile, Language

from .conftest import PROPERTY_CASES

STATEMENT_KINDS = {NodeKind.STATEMENT, NodeKind.ASSIGN, NodeKind.FUNCTION, NodeKind.OTHER}


def _edges(ir, kind):
    return [(e.src, e.dst) for e in ir.edges if e.kind is EdgeKind(kind)]


def _by_rendering(ir, text):
    return next(n.id for n in ir.nodes if n.rendering == text)


def assert_well_formed(ir, text):
    ids = {n.id for n in ir.nodes}
    assert ids == set(range(len(ir.nodes)))
    lines = text.splitlines() or [""]
    for n in ir.nodes:
        assert 1 <= n.line <= n.end_line <= len(lines) + 1
        if n.kind is NodeKind.CALL:
            assert n.id in {caller for caller, _ in ir.call_sites}
    for e in ir.edges:
        assert e.src in ids and e.dst in ids
    # Ast edges form a forest: one parent at most, and no cycles.
    parents: dict[int, int] = {}
    for src, dst in _edges(ir, "Ast"):
        assert dst not in parents
        parents[dst] = src
    for n in ids:
        seen, cur = set(), n
        while cur in parents:
            assert cur not in seen
            seen.add(cur)
            cur = parents[cur]
        assert ir.nodes[cur].kind in STATEMENT_KINDS
    for src, dst in _edges(ir, "Cfg"):
        assert ir.nodes[src].kind in STATEMENT_KINDS and ir.nodes[dst].kind in STATEMENT_KINDS


def test_secret_flows_into_post_call():
    ir = analyze_source("a.py", "key = os.getenv('API_KEY')\nrequests.post(url, headers={'k': key})\n", "python")
    assign = _by_rendering(ir, "key = os.getenv('API_KEY')")
    post = next(n.id for n in ir.nodes if n.kind is NodeKind.CALL and n.rendering.startswith("requests.post"))
    assert (assign, post) in _edges(ir, "Dfg")
    assert reachable(ir, _by_rendering(ir, "os.getenv('API_KEY')"), post, {"Dfg"})
    assert set(ir.call_sites) == {(1, "os.getenv"), (post, "requests.post")}


def test_empty_file():
    ir = analyze_source("e.py", "", "python")
    assert ir.nodes == () and ir.edges == () and ir.warnings == ()


def test_bad_line_between_valid_statements():
    ir = analyze_source("b.py", "x = 1\ny = (\nz = 3\n", "python")
    assert len(ir.warnings) == 1 and "line 2" in ir.warnings[0]
    x, z = _by_rendering(ir, "x = 1"), _by_rendering(ir, "z = 3")
    assert (x, z) in _edges(ir, "Cfg")
    others = [n for n in ir.nodes if n.kind is NodeKind.OTHER]
    assert len(others) == 1 and others[0].line == 2
    assert len(ir.nodes) == 3


def test_chain_of_assignments():
    ir = analyze_source("c.py", "a = 1\nb = a\nc = b\n", "python")
    a, b, c = (_by_rendering(ir, t) for t in ("a = 1", "b = a", "c = b"))
    assert (a, b) in _edges(ir, "Dfg") and (b, c) in _edges(ir, "Dfg")
    assert reachable(ir, a, c, {"Dfg"})
    assert not reachable(ir, c, a)


def test_disjoint_functions_do_not_reach():
    ir = analyze_source("d.py", "def f(a):\n    return a\n\ndef g(b):\n    return b\n", "python")
    f_ret = _by_rendering(ir, "return a")
    g_ret = _by_rendering(ir, "return b")
    assert not reachable(ir, f_ret, g_ret)
    assert not reachable(ir, g_ret, f_ret)
    assert [fn.name for fn in ir.functions] == ["f", "g"]


def test_ast_edges_are_never_followed():
    ir = analyze_source("a.py", "x = foo(1)\n", "python")
    assert _edges(ir, "Ast")
    for src, dst in _edges(ir, "Ast"):
        assert dst not in reach_from(ir, src, {"Ast"}).reached


def test_unknown_node():
    ir = analyze_source("a.py", "x = 1\n", "python")
    with pytest.raises(UnknownNode):
        reachable(ir, 0, 99)
    with pytest.raises(UnknownNode):
        reachable(ir, -1, 0)


def test_local_call_links_argument_to_parameter():
    src = "def send(v):\n    requests.post(u, data=v)\n\nsecret = os.getenv('TOKEN')\nsend(secret)\n"
    ir = analyze_source("h.py", src, "python")
    getenv = _by_rendering(ir, "os.getenv('TOKEN')")
    post = _by_rendering(ir, "requests.post(u, data=v)")
    assert reachable(ir, getenv, post, {"Dfg"})


def test_augmented_assignment_is_use_and_def():
    ir = analyze_source("a.py", "n = 1\nn += 2\nprint(n)\n", "python")
    first, aug, use = _by_rendering(ir, "n = 1"), _by_rendering(ir, "n += 2"), _by_rendering(ir, "print(n)")
    dfg = _edges(ir, "Dfg")
    assert (first, aug) in dfg
    assert reachable(ir, aug, use, {"Dfg"})


def test_python_imports():
    ir = analyze_source("a.py", "import os\nimport numpy as np\nfrom .util import helper as h\n", "python")
    got = {(b.local, b.module, b.symbol) for b in ir.imports}
    assert ("os", "os", None) in got
    assert ("np", "numpy", None) in got
    assert any(local == "h" and symbol == "helper" for local, _, symbol in got)


def test_javascript_require_and_flow():
    src = 'const cp = require("child_process");\nlet cmd = process.argv[2];\ncp.execSync(cmd);\n'
    ir = analyze_source("a.js", src, "javascript")
    assert [(b.local, b.module) for b in ir.imports] == [("cp", "child_process")]
    argv = next(n.id for n in ir.nodes if n.rendering.startswith("process.argv"))
    call = next(n.id for n in ir.nodes if n.kind is NodeKind.CALL and n.rendering.startswith("cp.execSync"))
    assert reachable(ir, argv, call, {"Dfg"})


def test_typescript_annotations_are_stripped():
    src = (
        'import fs from "fs";\n'
        "const p: string = process.env.HOME as string;\n"
        "function f(x: number): void { fs.writeFileSync(p, String(x)); }\n"
        "f(1);\n"
    )
    ir = analyze_source("a.ts", src, "typescript")
    assert ir.warnings == ()
    assert {name for _, name in ir.call_sites} == {"fs.writeFileSync", "String", "f"}
    write = next(n for n in ir.nodes if n.kind is NodeKind.CALL and n.rendering.startswith("fs.write"))
    assert write.function == "f"
    assert_well_formed(ir, src)


def test_unsupported_and_encoding_errors():
    with pytest.raises(UnsupportedLanguage):
        analyze_source("main.go", "package main\n", "go")
    with pytest.raises(EncodingError):
        analyze_source("a.py", b"x = '\xff'\n", "python")
    with pytest.raises(UnsupportedLanguage):
        analyze_file(ImplementationFile("main.go", Language.GO, "package main\n"))


def test_analyze_file_matches_analyze_source():
    text = "import os\nx = os.getenv('A')\n"
    f = ImplementationFile("a.py", Language.PYTHON, text)
    assert analyze_file(f) == analyze_source("a.py", text, "python")


def test_long_literals_are_truncated():
    text = "x = '" + "a" * 200 + "'\n"
    ir = analyze_source("a.py", text, "python")
    lit = next(n for n in ir.nodes if n.kind is NodeKind.LITERAL)
    assert len(lit.rendering) < 80 and "..." in lit.rendering or "\u2026" in lit.rendering


def test_rendering_collapses_whitespace():
    ir = analyze_source("a.py", "y = foo(1,\n        2)\n", "python")
    assert any(n.rendering == "foo(1, 2)" for n in ir.nodes)


# -- properties ------------------------------------------------------------

PY_STATEMENTS = [
    "x = 1", "y = x + 1", "print(y)", "z = os.getenv('K')", "requests.post(u, data=z)",
    "x += 2", "data = open(p).read()", "items = [a for a in range(3)]", "obj.attr = x",
    "subprocess.run(cmd, shell=True)", "log.info('done %s', y)",
]
JS_STATEMENTS = [
    "let x = 1;", "const y = x + 1;", "console.log(y);", "const z = process.env.K;",
    "fetch(u, {body: z});", "x += 2;", "const d = fs.readFileSync(p, 'utf8');",
    "obj.attr = x;", "execSync(cmd);", "const f = (a) => a * 2;", "f(x);",
]


@PROPERTY_CASES
@given(st.lists(st.sampled_from(PY_STATEMENTS), min_size=1, max_size=25))
def test_straight_line_python_cfg_count(stmts):
    text = "\n".join(stmts) + "\n"
    ir = analyze_source("s.py", text, "python")
    assert len(_edges(ir, "Cfg")) == len(stmts) - 1
    assert_well_formed(ir, text)


@PROPERTY_CASES
@given(st.lists(st.sampled_from(JS_STATEMENTS), min_size=1, max_size=25))
def test_straight_line_javascript_cfg_count(stmts):
    text = "\n".join(stmts) + "\n"
    ir = analyze_source("s.js", text, "javascript")
    assert len(_edges(ir, "Cfg")) == len(stmts) - 1
    assert_well_formed(ir, text)


BLOCKS = [
    "if x:\n    y = 1\nelse:\n    y = 2",
    "for i in range(3):\n    x += i",
    "def f(a):\n    return a",
    "while x:\n    x -= 1",
    "try:\n    f(1)\nexcept Exception:\n    pass",
    "with open(p) as fh:\n    data = fh.read()",
    "class C:\n    def m(self):\n        return f(2)",
    "x = (",
    "print(f(x), g(y))",
]


@PROPERTY_CASES
@given(st.lists(st.sampled_from(BLOCKS + PY_STATEMENTS), max_size=15))
def test_python_structure_invariants(parts):
    text = "\n".join(parts) + "\n"
    ir = analyze_source("s.py", text, "python")
    assert_well_formed(ir, text)
    assert ir == analyze_source("s.py", text, "python")


@PROPERTY_CASES
@given(st.text(max_size=200), st.sampled_from(["python", "javascript", "typescript"]))
def test_frontends_are_total(text, language):
    ir = analyze_source("t", text, language)
    again = analyze_source("t", text, language)
    assert (len(ir.nodes), len(ir.edges)) == (len(again.nodes), len(again.edges))
    ids = set(range(len(ir.nodes)))
    assert all(e.src in ids and e.dst in ids for e in ir.edges)


JS_FRAGMENTS = [
    "{", "}", "(", ")", "[", "]", ",", "=", "?", ":", "!", "*", "function f(a) {", "=>", "`t ${x}`", "/re/g",
    "'s'", "x.y", "require('m')", ";", "\n", "class A extends B {", "async ", "await f()", "?.", "...", "// c",
    "/* c */", "interface I {", "type T = ", "<T>", ": string", "as any", "enum E {", "import {", "export ",
    "from 'x'", "switch (x) {", "case 1:", "default:", "get", "static", "@dec", "new ", "for (", "of", "if (",
    "else", "try {", "catch (e)", "return", "yield", "import(", "namespace N {", "readonly", "'", "`", "${",
]


@PROPERTY_CASES
@given(
    st.lists(st.sampled_from(JS_FRAGMENTS + JS_STATEMENTS), max_size=30),
    st.sampled_from([" ", "", "\n"]),
    st.sampled_from(["javascript", "typescript"]),
)
def test_javascript_frontend_is_total_on_token_soup(parts, sep, language):
    text = sep.join(parts)
    ir = analyze_source("t", text, language)
    counts = Counter(e.kind for e in ir.edges)
    assert sum(counts.values()) == len(ir.edges)
    parents = defaultdict(int)
    for src, dst in _edges(ir, "Ast"):
        parents[dst] += 1
    assert all(v == 1 for v in parents.values())


def test_unterminated_class_body_does_not_hang():
    ir = analyze_source("t.js", "`t ${x}`\nclass A extends B {", "javascript")
    assert ir.warnings


def test_type_alias_to_non_bracket_is_recovered():
    ir = analyze_source("t.ts", "type T = new function f(a) {}\nlet y = 1;", "typescript")
    assert any(n.rendering == "let y = 1;" for n in ir.nodes)


PY_FRAGMENTS = ["def f(a):", "    ", "return", "(", ")", "[", "]", "{", "}", ":", "lambda x:", "if x:", "else:",
                "'s'", '"""', "f'{x}'", "\\", "\n", "x = ", "import os", "from . import y", "@dec", "async def g():",
                "await h()", "yield", "class C(B):", "with open(p) as fh:", "#", "try:", "except:", "*args", "**kw"]


@PROPERTY_CASES
@given(st.lists(st.sampled_from(PY_FRAGMENTS + PY_STATEMENTS), max_size=30), st.sampled_from([" ", "", "\n"]))
def test_python_frontend_is_total_on_token_soup(parts, sep):
    text = sep.join(parts)
    ir = analyze_source("t.py", text, "python")
    assert_well_formed_ids(ir)


def assert_well_formed_ids(ir):
    ids = set(range(len(ir.nodes)))
    assert {n.id for n in ir.nodes} == ids
    assert all(e.src in ids and e.dst in ids for e in ir.edges)
