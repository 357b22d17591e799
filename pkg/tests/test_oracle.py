"""Reachability checked against an independent transitive-closure oracle."""

from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st

from skillscope.ir import EdgeKind, FileIR, IrEdge, IrNode, NodeKind, reachable
from skillscope.spg import INTRA_FLOW, SpgEdge, SpgNode, discover_edges_bfs

ALL_KINDS = [EdgeKind.AST, EdgeKind.CFG, EdgeKind.DFG]


def closure(n: int, edges: list[tuple[int, int]]) -> list[list[bool]]:
    """Warshall's algorithm: reach[i][j] iff a path of length >= 1 exists."""
    reach = [[False] * n for _ in range(n)]
    for a, b in edges:
        reach[a][b] = True
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                row_k = reach[k]
                row_i = reach[i]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    return reach


@st.composite
def random_irs(draw, max_nodes: int = 50):
    n = draw(st.integers(min_value=1, max_value=max_nodes))
    edge = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.sampled_from(ALL_KINDS))
    raw = draw(st.lists(edge, max_size=3 * n))
    nodes = tuple(IrNode(i, NodeKind.CALL, i + 1, 1, i + 1, 2, f"f{i}()") for i in range(n))
    return FileIR("r.py", "python", nodes, tuple(IrEdge(a, b, k) for a, b, k in raw))


@settings(max_examples=1000, deadline=None)
@given(random_irs(), st.sets(st.sampled_from([EdgeKind.CFG, EdgeKind.DFG, EdgeKind.AST]), min_size=1))
def test_reachable_matches_closure(ir, kinds):
    allowed = kinds - {EdgeKind.AST}
    oracle = closure(len(ir.nodes), [(e.src, e.dst) for e in ir.edges if e.kind in allowed])
    for i in range(len(ir.nodes)):
        for j in range(len(ir.nodes)):
            assert reachable(ir, i, j, kinds) == oracle[i][j]


@settings(max_examples=1000, deadline=None)
@given(random_irs(), st.data())
def test_discover_edges_matches_closure(ir, data):
    n = len(ir.nodes)
    picks = data.draw(st.lists(st.integers(0, n - 1), max_size=min(n, 8), unique=True))
    nodes = [
        SpgNode(idx, "r.py", ir_id + 1, 1, "FILE_READ", ("FILE_READ",), None, "f(", f"f{ir_id}()", None, ir_id)
        for idx, ir_id in enumerate(picks)
    ]
    oracle = closure(n, [(e.src, e.dst) for e in ir.edges if e.kind is not EdgeKind.AST])
    expected = sorted(
        SpgEdge(u.id, v.id, INTRA_FLOW)
        for u in nodes
        for v in nodes
        if u.id != v.id and oracle[u.ir_node][v.ir_node]
    )
    assert discover_edges_bfs(ir, nodes) == expected


def test_five_node_fixture_all_twenty_pairs():
    # 0 -> 1 -> 2 by data flow, 3 -> 4 by control flow, 4 -> 0 only through Ast.
    edges = [(0, 1, EdgeKind.DFG), (1, 2, EdgeKind.DFG), (3, 4, EdgeKind.CFG), (4, 0, EdgeKind.AST), (2, 5, EdgeKind.CFG)]
    nodes = tuple(IrNode(i, NodeKind.CALL, i + 1, 1, i + 1, 2, f"f{i}()") for i in range(6))
    ir = FileIR("r.py", "python", nodes, tuple(IrEdge(a, b, k) for a, b, k in edges))
    spg_nodes = [SpgNode(i, "r.py", i + 1, 1, "FILE_READ", ("FILE_READ",), None, "f(", f"f{i}()", None, i) for i in range(5)]
    got = {(e.src, e.dst) for e in discover_edges_bfs(ir, spg_nodes)}
    assert got == {(0, 1), (0, 2), (1, 2), (3, 4)}
    assert discover_edges_bfs(ir, spg_nodes[:1]) == []
