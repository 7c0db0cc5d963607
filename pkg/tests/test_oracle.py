import itertools
from fractions import Fraction

import numpy as np
import pytest
from helpers import naive_modularity, random_graph
from hypothesis import given, settings
from hypothesis import strategies as st

from hetmod import HetGraph, Partition, build
from hetmod.oracle import (
    exact_null_count,
    exact_null_expectation,
    exact_null_matrix,
    max_modularity_exhaustive,
    null_expectation_gaps,
    set_partitions,
)

TRIANGLES = [((0, 0), (0, 1)), ((0, 1), (0, 2)), ((0, 0), (0, 2)), ((0, 3), (0, 4)), ((0, 4), (0, 5)), ((0, 3), (0, 5))]
BELL = [1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147]


@pytest.mark.parametrize("n", range(10))
def test_set_partitions_are_bell_many_and_distinct(n):
    rgs = set_partitions(n)
    assert len(rgs) == BELL[n]
    assert len({tuple(r) for r in rgs}) == BELL[n]
    if n:
        assert (rgs[:, 0] == 0).all()
        # each label is at most one more than the running maximum
        running = np.maximum.accumulate(rgs, axis=1)
        assert (rgs[:, 1:] <= running[:, :-1] + 1).all()


def test_single_node():
    res = max_modularity_exhaustive(HetGraph([1]))
    assert res.modularity == 0.0
    assert res.partitions == [Partition.from_labels([[0]])]


def test_two_triangles():
    res = max_modularity_exhaustive(build([6], TRIANGLES))
    assert res.modularity == pytest.approx(0.5, abs=1e-15)
    assert res.partitions == [Partition.from_labels([[0, 0, 0, 1, 1, 1]])]


def test_size_cap():
    with pytest.raises(ValueError, match="cap"):
        max_modularity_exhaustive(HetGraph([7, 6]))


def test_ties_are_all_returned():
    # a 6-cycle: three ways to cut it into two paths and two ways into three
    # adjacent pairs all reach 2*(1/3 - 1/4) = 3*(1/6 - 1/9) = 1/6
    g = build([6], [((0, i), (0, (i + 1) % 6)) for i in range(6)])
    res = max_modularity_exhaustive(g)
    assert res.modularity == pytest.approx(1 / 6, abs=1e-15)
    assert sorted(p.num_communities for p in res.partitions) == [2, 2, 2, 3, 3]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_maximum_agrees_with_modularity(seed):
    g = random_graph(np.random.default_rng(seed), max_size=3, weighted=True)
    res = max_modularity_exhaustive(g)
    for p in res.partitions:
        assert naive_modularity(g, p) == pytest.approx(res.modularity, abs=1e-12)
    # no partition beats it, checked through the independent entrywise path
    offsets = g.offsets()
    for row in set_partitions(g.num_nodes):
        p = Partition.from_labels([row[offsets[l] : offsets[l + 1]] for l in range(g.num_types)])
        assert naive_modularity(g, p) <= res.modularity + 1e-12


def test_maximum_invariant_under_node_relabeling():
    rng = np.random.default_rng(2)
    g = random_graph(rng, num_types=2, max_size=4, allow_empty_blocks=False)
    perms = [rng.permutation(n) for n in g.type_sizes]
    h = HetGraph(
        g.type_sizes,
        [g.homo_blocks[l][perms[l]][:, perms[l]] for l in range(2)],
        {(0, 1): g.block(0, 1)[perms[0]][:, perms[1]]},
    )
    assert max_modularity_exhaustive(h).modularity == pytest.approx(max_modularity_exhaustive(g).modularity, abs=1e-13)


# -- exact null expectations -----------------------------------------------------------


def _brute_simple(d):
    """Enumerate every edge subset and keep those with degree sequence ``d``."""
    n = len(d)
    pairs = list(itertools.combinations(range(n), 2))
    graphs = []
    for mask in range(1 << len(pairs)):
        deg = [0] * n
        chosen = [pairs[k] for k in range(len(pairs)) if mask >> k & 1]
        for i, j in chosen:
            deg[i] += 1
            deg[j] += 1
        if deg == list(d):
            graphs.append(set(chosen))
    return graphs


def _brute_bipartite(r, c):
    pairs = list(itertools.product(range(len(r)), range(len(c))))
    graphs = []
    for mask in range(1 << len(pairs)):
        chosen = [pairs[k] for k in range(len(pairs)) if mask >> k & 1]
        dr, dc = [0] * len(r), [0] * len(c)
        for i, j in chosen:
            dr[i] += 1
            dc[j] += 1
        if dr == list(r) and dc == list(c):
            graphs.append(set(chosen))
    return graphs


def test_forced_edge():
    assert exact_null_expectation((1, 1), "homo", 0, 1) == 1


def test_regular_bipartite_pair():
    E = exact_null_matrix(((1, 1), (1, 1)), "cross")
    assert (E == Fraction(1, 2)).all()


def test_2211_gaps_against_enumeration():
    d = (2, 2, 1, 1)
    graphs = _brute_simple(d)
    E = exact_null_matrix(d, "homo")
    for i, j in itertools.combinations(range(4), 2):
        assert E[i, j] == Fraction(sum((i, j) in G for G in graphs), len(graphs))
    # the unique-per-pair values: the two degree-2 nodes are always adjacent
    assert E[0, 1] == 1 and E[2, 3] == 0 and E[0, 2] == Fraction(1, 2)
    g = build([4], [((0, 0), (0, 1)), ((0, 0), (0, 2)), ((0, 1), (0, 3))])
    gaps = null_expectation_gaps(g, 0, 0)
    off = ~np.eye(4, dtype=bool)
    # the leading-order form underestimates the hub pair and overestimates the leaf pair
    assert gaps[0, 1] == pytest.approx(1 - 4 / 6)
    assert gaps[2, 3] == pytest.approx(0 - 1 / 6)
    assert np.abs(gaps[off]).max() == pytest.approx(1 / 3)


@pytest.mark.parametrize("d", [(0,), (1, 1), (2, 2, 2), (1, 1, 1, 1), (2, 2, 1, 1), (3, 1, 1, 1), (2, 2, 2, 2, 2), (3, 3, 2, 1, 1), (4, 2, 2, 2, 1, 1)])
def test_simple_count_matches_enumeration(d):
    assert exact_null_count(d, "homo") == len(_brute_simple(d))


@pytest.mark.parametrize("r, c", [((1, 1), (1, 1)), ((2, 1), (1, 1, 1)), ((2, 2), (1, 2, 1)), ((2, 1, 1), (2, 1, 1)), ((3, 2, 1), (2, 2, 1, 1))])
def test_bipartite_count_matches_enumeration(r, c):
    graphs = _brute_bipartite(r, c)
    assert exact_null_count((r, c), "cross") == len(graphs)
    E = exact_null_matrix((r, c), "cross")
    for i in range(len(r)):
        for j in range(len(c)):
            assert E[i, j] == Fraction(sum((i, j) in G for G in graphs), len(graphs))


def test_infeasible_sequences():
    with pytest.raises(ValueError, match="no graph"):
        exact_null_expectation((1, 1, 1), "homo", 0, 1)
    with pytest.raises(ValueError, match="no graph"):
        exact_null_expectation((3, 1, 1), "homo", 0, 1)
    with pytest.raises(ValueError, match="no graph"):
        exact_null_expectation(((2,), (1,)), "cross", 0, 0)


def test_null_size_cap():
    with pytest.raises(ValueError, match="cap"):
        exact_null_expectation((1,) * 10, "homo", 0, 1)
    with pytest.raises(ValueError, match="kind"):
        exact_null_expectation((1, 1), "mixed", 0, 1)


def test_diagonal_is_zero():
    assert exact_null_expectation((2, 2, 2), "homo", 1, 1) == 0


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 5), min_size=1, max_size=7))
def test_homo_rows_sum_to_degrees(d):
    if exact_null_count(d, "homo") == 0:
        return
    E = exact_null_matrix(d, "homo")
    for i in range(len(d)):
        assert sum(E[i]) == d[i]
    assert (E == E.T).all()
