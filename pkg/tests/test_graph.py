import numpy as np
import pytest
import scipy.sparse as sp
from helpers import random_graph
from hypothesis import given, settings
from hypothesis import strategies as st

from hetmod import HetGraph, NodeRef, build, degree_summary, read_edge_list, write_edge_list
from hetmod.graph import EdgeListError
from hetmod.sbm import sample, setting_spec


def test_build_two_types_counts():
    g = build([2, 1], [((0, 0), (0, 1)), ((0, 0), (1, 0))])
    assert g.edge_count(0, 0) == 1
    assert g.edge_count(0, 1) == 1
    np.testing.assert_array_equal(g.degrees(0, 0), [1, 1])
    np.testing.assert_array_equal(g.degrees(0, 1), [1, 0])
    np.testing.assert_array_equal(g.degrees(1, 0), [1])


def test_build_triangle():
    g = build([3], [((0, 0), (0, 1)), ((0, 1), (0, 2)), ((0, 0), (0, 2))])
    np.testing.assert_array_equal(g.homo_degrees[0], [2, 2, 2])
    assert g.homo_edge_counts[0] == 3


def test_build_three_types_cross_only():
    g = build([2, 2, 2], [((0, 0), (1, 0)), ((0, 1), (2, 1)), ((2, 0), (1, 1))])
    assert g.cross_edge_counts == {(0, 1): 1, (0, 2): 1, (1, 2): 1}
    assert g.homo_edge_counts == (0, 0, 0)


def test_cross_edge_order_irrelevant():
    a = build([2, 2], [((0, 1), (1, 0))])
    b = build([2, 2], [((1, 0), (0, 1))])
    assert a == b
    assert a.weight(NodeRef(1, 0), NodeRef(0, 1)) == 1


@pytest.mark.parametrize(
    "edges, match",
    [
        ([((0, 0), (0, 3))], "out of range"),
        ([((0, 0), (2, 0))], "out of range"),
        ([((0, 0), (0, 1)), ((0, 1), (0, 0))], "duplicate"),
        ([((0, 0), (1, 0)), ((1, 0), (0, 0))], "duplicate"),
        ([((0, 0), (0, 0))], "self-loop"),
        ([((0, 0), (0, 1), 2.0)], "weight"),
    ],
)
def test_build_rejects_in_simple_mode(edges, match):
    with pytest.raises(ValueError, match=match):
        build([3, 1], edges)


def test_negative_weight_rejected():
    with pytest.raises(ValueError, match="weight"):
        build([2], [((0, 0), (0, 1), -1.0)], simple=False)


def test_weighted_self_loop_convention():
    g = build([2], [((0, 0), (0, 0), 1.5), ((0, 0), (0, 1), 1.0)], simple=False)
    assert g.homo_blocks[0][0, 0] == 3.0
    np.testing.assert_array_equal(g.self_loop_weights[0], [1.5, 0.0])
    np.testing.assert_array_equal(g.homo_degrees[0], [4.0, 1.0])
    assert g.homo_edge_counts[0] == 2.5


def test_asymmetric_homo_block_rejected():
    with pytest.raises(ValueError, match="symmetric"):
        HetGraph([2], [sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))])


def test_cross_block_is_transpose_view():
    B = sp.csr_matrix(np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 0.0]]))
    g = HetGraph([2, 3], cross_blocks={(0, 1): B})
    np.testing.assert_array_equal(g.block(1, 0).toarray(), B.toarray().T)
    h = HetGraph([2, 3], cross_blocks={(1, 0): B.T})
    assert g == h


def test_blocks_are_read_only():
    g = build([2], [((0, 0), (0, 1))])
    with pytest.raises(ValueError):
        g.homo_blocks[0].data[0] = 5.0
    with pytest.raises(ValueError):
        g.homo_degrees[0][0] = 5.0


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.booleans())
def test_degree_sums_match_edge_counts(seed, weighted):
    g = random_graph(np.random.default_rng(seed), weighted=weighted)
    for l in range(g.num_types):
        assert g.homo_degrees[l].sum() == pytest.approx(2 * g.homo_edge_counts[l], abs=0)
        for k in range(g.num_types):
            if k != l:
                assert g.degrees(l, k).sum() == g.edge_count(l, k) == g.degrees(k, l).sum()


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_weight_symmetry(seed):
    g = random_graph(np.random.default_rng(seed), max_size=5, weighted=True)
    refs = g.node_refs()
    for u in refs:
        for v in refs:
            assert g.weight(u, v) == g.weight(v, u)


def test_neighbors_cover_all_blocks():
    g = build([2, 1], [((0, 0), (0, 1)), ((0, 0), (1, 0))])
    assert sorted(g.neighbors(NodeRef(0, 0))) == [(NodeRef(0, 1), 1.0), (NodeRef(1, 0), 1.0)]
    assert list(g.neighbors(NodeRef(1, 0))) == [(NodeRef(0, 0), 1.0)]


# -- edge-list files --------------------------------------------------------------------

DEMO = "# users/events demo\n\nuser\tu1\tuser\tu2\nuser\tu1\tevent\te1\n# end\n"


def test_read_demo_file(tmp_path):
    path = tmp_path / "demo.tsv"
    path.write_text(DEMO)
    g = read_edge_list(path)
    assert g.num_types == 2
    assert g.num_nodes == 3
    assert g.type_names == ("user", "event")
    assert g.node_names == (("u1", "u2"), ("e1",))
    assert g.homo_edge_counts[0] + g.cross_edge_counts[(0, 1)] == 2
    assert g == build([2, 1], [((0, 0), (0, 1)), ((0, 0), (1, 0))], type_names=["user", "event"], node_names=[["u1", "u2"], ["e1"]])


def test_read_rejects_self_loop(tmp_path):
    path = tmp_path / "loop.tsv"
    path.write_text("author\ta1\tauthor\ta1\n")
    with pytest.raises(EdgeListError, match="self-loop") as info:
        read_edge_list(path)
    assert info.value.lineno == 1


def test_read_rejects_duplicate_with_line_number(tmp_path):
    path = tmp_path / "dup.tsv"
    path.write_text("# x\na\t1\tb\t2\nb\t2\ta\t1\n")
    with pytest.raises(EdgeListError, match="line 3") as info:
        read_edge_list(path)
    assert info.value.lineno == 3


@pytest.mark.parametrize("line", ["a\t1\tb\n", "a\t1\tb\t2\tx\n", "a\t1\tb\t2\t1\t1\n", "a\t1 2\tb\t3\n"])
def test_read_rejects_malformed_lines(tmp_path, line):
    path = tmp_path / "bad.tsv"
    path.write_text(line)
    with pytest.raises(EdgeListError):
        read_edge_list(path)


def test_read_weighted_file(tmp_path):
    path = tmp_path / "w.tsv"
    path.write_text("a\t1\ta\t2\t2.5\na\t1\tb\t1\n")
    g = read_edge_list(path, simple=False)
    assert g.homo_edge_counts[0] == 2.5
    with pytest.raises(EdgeListError, match="weights"):
        read_edge_list(path)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_round_trip_simple(tmp_path_factory, seed):
    g = random_graph(np.random.default_rng(seed))
    path = tmp_path_factory.mktemp("rt") / "g.tsv"
    write_edge_list(g, path, header="round trip")
    assert read_edge_list(path) == g


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_round_trip_weighted(tmp_path_factory, seed):
    g = random_graph(np.random.default_rng(seed), weighted=True)
    path = tmp_path_factory.mktemp("rtw") / "g.tsv"
    write_edge_list(g, path)
    assert read_edge_list(path, simple=False) == g


# -- degree summary ---------------------------------------------------------------------


def test_summary_empty_graph():
    for row in degree_summary(HetGraph([3, 2, 4])):
        assert row.max_degree == 0 and row.edge_count == 0 and not row.density_ok


def test_summary_star():
    g = build([5], [((0, 0), (0, i)) for i in range(1, 5)])
    (row,) = degree_summary(g)
    assert row.max_degree == 4 and row.edge_count == 4


def test_summary_flags_dense_blocks():
    # a 4-regular graph on 200 nodes: m = 400 > n and 4 > (log 200)^(1/3) ~ 1.74
    n = 200
    edges = [((0, i), (0, (i + k) % n)) for i in range(n) for k in (1, 2)]
    (row,) = degree_summary(build([n], edges))
    assert row.edge_count == 400 and not row.density_ok
    # a perfect matching is sparse enough but has too few edges
    (row,) = degree_summary(build([n], [((0, 2 * i), (0, 2 * i + 1)) for i in range(n // 2)]))
    assert row.max_degree == 1 and not row.density_ok


def test_summary_cross_edge_count_setting1():
    spec = setting_spec(1, 0.05)
    P = spec.probs(0, 1)
    sizes1, sizes2 = spec.community_sizes
    mean = float(sizes1 @ P @ sizes2)
    var = float(sizes1 @ (P * (1 - P)) @ sizes2)
    assert mean == pytest.approx(600 * 300 * (0.05 + 0.05 / 3))
    for seed in range(3):
        g, _ = sample(spec, seed)
        row = [r for r in degree_summary(g) if r.block == (0, 1)][0]
        assert abs(row.edge_count - mean) < 3 * np.sqrt(var)
