"""Brute-force references for tiny instances.

:func:`max_modularity_exhaustive` scores every set partition of the node set
against a dense modularity matrix built entry by entry.  :func:`exact_null_matrix`
gives the exact probability of each edge under the uniform distribution over
simple graphs with a fixed degree sequence, by counting those graphs.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .graph import HetGraph
from .modularity import Partition

__all__ = [
    "OracleResult",
    "exact_null_count",
    "exact_null_expectation",
    "exact_null_matrix",
    "max_modularity_exhaustive",
    "modularity_matrix",
    "null_expectation_gaps",
    "set_partitions",
]

MAX_PARTITION_NODES = 12
MAX_NULL_NODES = 8


@dataclass
class OracleResult:
    modularity: float
    partitions: list[Partition]


def modularity_matrix(g: HetGraph) -> np.ndarray:
    """Dense ``n x n`` matrix whose same-community entries sum to ``Q``.

    Entry ``(u, v)`` is ``(A_uv - E_uv) / (L^2 * 2m)`` within a type and
    ``(A_uv - E_uv) / (L^2 * m)`` across types, zero for blocks without edges.
    Built one entry at a time from the adjacency and degrees.
    """
    L = g.num_types
    refs = g.node_refs()
    n = len(refs)
    M = np.zeros((n, n))
    for a, u in enumerate(refs):
        for b, v in enumerate(refs):
            m = g.edge_count(u.type, v.type)
            if m == 0:
                continue
            du = g.degrees(u.type, v.type)[u.index]
            dv = g.degrees(v.type, u.type)[v.index]
            if u.type == v.type:
                M[a, b] = (g.weight(u, v) - du * dv / (2 * m)) / (L * L * 2 * m)
            else:
                M[a, b] = (g.weight(u, v) - du * dv / m) / (L * L * m)
    return M


def set_partitions(n: int) -> np.ndarray:
    """All set partitions of ``n`` items as restricted growth strings, one per row."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int8)
    rgs = np.zeros((1, 1), dtype=np.int8)
    top = np.zeros(1, dtype=np.int8)
    for _ in range(1, n):
        counts = top.astype(np.int64) + 2
        parent = np.repeat(np.arange(len(rgs)), counts)
        start = np.repeat(np.cumsum(counts) - counts, counts)
        value = (np.arange(counts.sum()) - start).astype(np.int8)
        rgs = np.hstack([rgs[parent], value[:, None]])
        top = np.maximum(top[parent], value)
    return rgs


def max_modularity_exhaustive(
    g: HetGraph,
    max_nodes: int = MAX_PARTITION_NODES,
    tol: float = 1e-12,
) -> OracleResult:
    """Exact maximum of ``Q`` over all partitions of all nodes, with every maximizer.

    Communities may mix node types.  Feasible up to about 12 nodes
    (Bell(12) = 4,213,597 partitions).
    """
    n = g.num_nodes
    if n > max_nodes:
        raise ValueError(f"{n} nodes exceed the exhaustive-search cap of {max_nodes}")
    M = modularity_matrix(g)
    rgs = set_partitions(n)
    q = np.full(len(rgs), float(np.trace(M)))
    sym = M + M.T
    for i in range(n):
        for j in range(i + 1, n):
            if sym[i, j] != 0:
                q += sym[i, j] * (rgs[:, i] == rgs[:, j])
    best = float(q.max())
    offsets = g.offsets()
    winners = []
    for row in rgs[q >= best - tol]:
        winners.append(Partition.from_labels([row[offsets[l] : offsets[l + 1]] for l in range(g.num_types)]))
    return OracleResult(best, winners)


# -- exact null model -----------------------------------------------------------------


def _key(seq) -> tuple[int, ...]:
    return tuple(sorted((d for d in seq if d > 0), reverse=True))


def _choose_groups(pool: tuple[int, ...], r: int):
    """Ways to take one unit from ``r`` distinct members of ``pool``.

    Yields ``(multiplicity, new_pool)``; members with equal values are
    interchangeable, so choices are grouped by value.
    """
    groups = sorted(Counter(pool).items(), reverse=True)

    def rec(k: int, left: int):
        if k == len(groups):
            if left == 0:
                yield 1, []
            return
        value, count = groups[k]
        for take in range(min(count, left) + 1):
            for mult, rest in rec(k + 1, left - take):
                yield comb(count, take) * mult, [value] * (count - take) + [value - 1] * take + rest

    for mult, rest in rec(0, r):
        yield mult, _key(rest)


@lru_cache(maxsize=None)
def _count_simple(degs: tuple[int, ...]) -> int:
    if not degs:
        return 1
    if sum(degs) % 2:
        return 0
    r, rest = degs[0], degs[1:]
    if r > len(rest):
        return 0
    return sum(mult * _count_simple(new) for mult, new in _choose_groups(rest, r))


@lru_cache(maxsize=None)
def _count_bipartite(rows: tuple[int, ...], cols: tuple[int, ...]) -> int:
    if sum(rows) != sum(cols):
        return 0
    if not rows:
        return 1
    r, rest = rows[0], rows[1:]
    if r > len(cols):
        return 0
    return sum(mult * _count_bipartite(rest, new) for mult, new in _choose_groups(cols, r))


def _parse_degrees(degrees, kind: str, max_nodes: int):
    if kind == "homo":
        d = tuple(int(x) for x in degrees)
        if len(d) > max_nodes:
            raise ValueError(f"{len(d)} nodes exceed the cap of {max_nodes}")
        if min(d, default=0) < 0:
            raise ValueError("degrees must be non-negative")
        return d
    if kind == "cross":
        rows, cols = (tuple(int(x) for x in side) for side in degrees)
        if max(len(rows), len(cols)) > max_nodes:
            raise ValueError(f"a side exceeds the cap of {max_nodes} nodes")
        if min(rows + cols, default=0) < 0:
            raise ValueError("degrees must be non-negative")
        return rows, cols
    raise ValueError(f"kind must be 'homo' or 'cross', not {kind!r}")


def exact_null_count(degrees, kind: str = "homo", max_nodes: int = MAX_NULL_NODES) -> int:
    """Number of simple (``"homo"``) or bipartite (``"cross"``, degrees given as
    ``(row_degrees, col_degrees)``) graphs with the given degree sequence."""
    d = _parse_degrees(degrees, kind, max_nodes)
    if kind == "homo":
        return _count_simple(_key(d))
    return _count_bipartite(_key(d[0]), _key(d[1]))


def _with_edge_homo(d: list[int], i: int, j: int) -> int:
    # graphs on d holding edge ij <-> graphs on d - e_i - e_j lacking it
    if d[i] == 0 or d[j] == 0:
        return 0
    d = list(d)
    d[i] -= 1
    d[j] -= 1
    return _count_simple(_key(d)) - _with_edge_homo(d, i, j)


def _with_edge_cross(rows: list[int], cols: list[int], i: int, j: int) -> int:
    if rows[i] == 0 or cols[j] == 0:
        return 0
    rows, cols = list(rows), list(cols)
    rows[i] -= 1
    cols[j] -= 1
    return _count_bipartite(_key(rows), _key(cols)) - _with_edge_cross(rows, cols, i, j)


def exact_null_expectation(degrees, kind: str, i: int, j: int, max_nodes: int = MAX_NULL_NODES) -> Fraction:
    """Exact ``E(A_ij)`` under the uniform distribution on graphs with the given degrees."""
    d = _parse_degrees(degrees, kind, max_nodes)
    total = exact_null_count(degrees, kind, max_nodes)
    if total == 0:
        raise ValueError("no graph has this degree sequence")
    if kind == "homo":
        if not (0 <= i < len(d) and 0 <= j < len(d)):
            raise IndexError("node index out of range")
        return Fraction(0) if i == j else Fraction(_with_edge_homo(list(d), i, j), total)
    rows, cols = d
    if not (0 <= i < len(rows) and 0 <= j < len(cols)):
        raise IndexError("node index out of range")
    return Fraction(_with_edge_cross(list(rows), list(cols), i, j), total)


def exact_null_matrix(degrees, kind: str = "homo", max_nodes: int = MAX_NULL_NODES) -> np.ndarray:
    """All exact expectations as an object array of :class:`~fractions.Fraction`."""
    d = _parse_degrees(degrees, kind, max_nodes)
    shape = (len(d), len(d)) if kind == "homo" else (len(d[0]), len(d[1]))
    out = np.empty(shape, dtype=object)
    for i in range(shape[0]):
        for j in range(shape[1]):
            if kind == "homo" and j < i:
                out[i, j] = out[j, i]
            else:
                out[i, j] = exact_null_expectation(degrees, kind, i, j, max_nodes)
    return out


def null_expectation_gaps(g: HetGraph, l1: int, l2: int) -> np.ndarray:
    """Exact minus leading-order expectation for every pair of one block of ``g``."""
    if l1 == l2:
        degrees, kind = g.homo_degrees[l1].astype(int), "homo"
    else:
        degrees, kind = (g.cross_degrees[(l1, l2)].astype(int), g.cross_degrees[(l2, l1)].astype(int)), "cross"
    exact = exact_null_matrix(degrees, kind).astype(float)
    m = g.edge_count(l1, l2)
    d1, d2 = g.degrees(l1, l2), g.degrees(l2, l1)
    approx = np.outer(d1, d2) / (2 * m if l1 == l2 else m)
    return exact - approx
