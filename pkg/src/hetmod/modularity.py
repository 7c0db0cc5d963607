"""Block modularity of a heterogeneous partition and its incremental updates.

For a graph with ``L`` types the modularity is::

    Q = 1/L^2 * [ sum_l  1/(2 m_l)   sum_ij (A^l_ij  - d_i d_j / 2 m_l)  [c_i == c_j]
                + sum_{l1 != l2} 1/m_l1l2 sum_ij (A^l1l2_ij - d_i d_j / m_l1l2) [c_i == c_j] ]

where the cross sum runs over ordered type pairs, so every cross block is
counted twice.  Blocks without edges contribute nothing.

Writing ``In[c, s, t]`` for the weight of ordered type-``s``/type-``t`` pairs
inside community ``c`` and ``D[c, s, t]`` for the total ``d^[s t]`` of the
type-``s`` members of ``c``, this becomes::

    Q = sum_c  sum_st coef[s, t] * In[c, s, t] - 1/2 sum_st gamma[s, t] * D[c, s, t] * D[c, t, s]

with ``coef`` and ``gamma`` from :func:`block_coefficients`.  Everything in this
module and in the optimizer is expressed through these two ``L x L`` tables.
"""
from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .graph import HetGraph, NodeRef

__all__ = [
    "CommunityStats",
    "Partition",
    "block_coefficients",
    "delta_modularity",
    "expected_weight",
    "modularity",
]


@dataclass(frozen=True, eq=False)
class Partition:
    """Community label for every node, one integer vector per node type.

    Labels are compact: every id in ``range(num_communities)`` is used.  Use
    :meth:`from_labels` to relabel arbitrary integer labels.
    """

    labels: tuple[np.ndarray, ...]
    num_communities: int

    def __post_init__(self):
        labels = tuple(np.asarray(x, dtype=np.int64) for x in self.labels)
        object.__setattr__(self, "labels", labels)
        used = np.unique(np.concatenate(labels)) if labels else np.empty(0, np.int64)
        if not np.array_equal(used, np.arange(self.num_communities)):
            raise ValueError("labels must use exactly the ids 0..K-1")
        for x in labels:
            x.flags.writeable = False

    @classmethod
    def from_labels(cls, labels: Sequence[Iterable[int]]) -> Partition:
        """Compact arbitrary labels, numbering communities by first appearance."""
        arrays = [np.asarray(list(x) if not isinstance(x, np.ndarray) else x, dtype=np.int64) for x in labels]
        flat = np.concatenate(arrays) if arrays else np.empty(0, np.int64)
        _, first, inverse = np.unique(flat, return_index=True, return_inverse=True)
        rank = np.empty(len(first), dtype=np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(len(first))
        compact = rank[inverse]
        splits = np.cumsum([len(a) for a in arrays])[:-1]
        return cls(tuple(np.split(compact, splits)), len(first))

    @classmethod
    def singletons(cls, type_sizes: Sequence[int]) -> Partition:
        offsets = np.concatenate([[0], np.cumsum(type_sizes)])
        return cls(tuple(np.arange(a, b) for a, b in zip(offsets[:-1], offsets[1:])), int(offsets[-1]))

    @classmethod
    def single_community(cls, type_sizes: Sequence[int]) -> Partition:
        k = 1 if sum(type_sizes) else 0
        return cls(tuple(np.zeros(n, dtype=np.int64) for n in type_sizes), k)

    @property
    def type_sizes(self) -> tuple[int, ...]:
        return tuple(len(x) for x in self.labels)

    def flat(self) -> np.ndarray:
        """Labels of all nodes concatenated in type order."""
        return np.concatenate(self.labels) if self.labels else np.empty(0, np.int64)

    def of(self, u: NodeRef) -> int:
        return int(self.labels[u.type][u.index])

    def assignment_matrix(self, l: int) -> sp.csr_matrix:
        """The 0-1 matrix ``B^[l]`` (``n_l x K``) with ``B_ij = 1`` iff node ``i`` is in community ``j``."""
        x = self.labels[l]
        return sp.csr_matrix((np.ones(len(x)), (np.arange(len(x)), x)), shape=(len(x), self.num_communities))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self.num_communities == other.num_communities and all(
            np.array_equal(a, b) for a, b in zip(self.labels, other.labels)
        ) and len(self.labels) == len(other.labels)

    __hash__ = None  # type: ignore[assignment]


def block_coefficients(g: HetGraph) -> tuple[np.ndarray, np.ndarray]:
    """Pair and null-model weights of every ordered block.

    Returns ``(coef, gamma)``; ``coef[s, s] = 1/(2 L^2 m_s)``,
    ``coef[s, t] = 1/(L^2 m_st)``, ``gamma[s, s] = 1/(2 L^2 m_s^2)``,
    ``gamma[s, t] = 2/(L^2 m_st^2)``; zero for blocks without edges.
    """
    L = g.num_types
    coef = np.zeros((L, L))
    gamma = np.zeros((L, L))
    norm = 1.0 / (L * L)
    for s in range(L):
        for t in range(L):
            m = g.edge_count(s, t)
            if m <= 0:
                continue
            if s == t:
                coef[s, t] = norm / (2.0 * m)
                gamma[s, t] = norm / (2.0 * m * m)
            else:
                coef[s, t] = norm / m
                gamma[s, t] = 2.0 * norm / (m * m)
    return coef, gamma


def expected_weight(g: HetGraph, u: NodeRef, v: NodeRef) -> float:
    """Leading-order null expectation of ``A_uv`` given the degree sequence.

    ``d_u d_v / 2m`` within a type and ``d^[l1 l2]_u d^[l2 l1]_v / m^[l1 l2]``
    across types.  Raises ``ValueError`` when the block has no edges; such a
    block contributes zero to the modularity.
    """
    m = g.edge_count(u.type, v.type)
    if m <= 0:
        raise ValueError(f"block ({u.type}, {v.type}) has no edges")
    du = g.degrees(u.type, v.type)[u.index]
    dv = g.degrees(v.type, u.type)[v.index]
    if u.type == v.type:
        return float(du * dv / (2.0 * m))
    return float(du * dv / m)


class CommunityStats:
    """Sufficient statistics of a partition for computing ``Q`` and ``dQ``.

    Holds a mutable copy of the labels together with ``degree_totals[c, s, t]``
    (sum of ``d^[s t]`` over type-``s`` members of ``c``; ``t == s`` is the
    within-type degree) and ``internal[c, s, t]`` (weight of ordered pairs of a
    type-``s`` and a type-``t`` node both in ``c``).  Empty communities keep
    their id until the stats are rebuilt.
    """

    def __init__(self, g: HetGraph, p: Partition):
        if p.type_sizes != g.type_sizes:
            raise ValueError(f"partition sizes {p.type_sizes} do not match graph {g.type_sizes}")
        self.graph = g
        self.labels = [np.array(x, dtype=np.int64) for x in p.labels]
        self.coef, self.gamma = block_coefficients(g)
        L, K = g.num_types, p.num_communities
        self.degree_totals = np.zeros((K, L, L))
        self.internal = np.zeros((K, L, L))
        self.sizes = np.bincount(p.flat(), minlength=K) if K else np.zeros(0, np.int64)
        for s in range(L):
            for t in range(L):
                self.degree_totals[:, s, t] = np.bincount(self.labels[s], weights=g.degrees(s, t), minlength=K)
                if t < s:
                    self.internal[:, s, t] = self.internal[:, t, s]
                    continue
                coo = g.block(s, t).tocoo()
                same = self.labels[s][coo.row] == self.labels[t][coo.col]
                self.internal[:, s, t] = np.bincount(
                    self.labels[s][coo.row[same]], weights=coo.data[same], minlength=K
                )

    @property
    def num_communities(self) -> int:
        return int(np.count_nonzero(self.sizes))

    def modularity(self) -> float:
        D = self.degree_totals
        gain = np.einsum("st,cst->", self.coef, self.internal)
        penalty = 0.5 * np.einsum("st,cst,cts->", self.gamma, D, D)
        return float(gain - penalty)

    def _unit_terms(self, unit: Sequence[NodeRef]) -> tuple[np.ndarray, dict[int, float]]:
        g = self.graph
        L = g.num_types
        members = set(unit)
        ud = np.zeros((L, L))
        links: dict[int, float] = {}
        for u in members:
            for t in range(L):
                ud[u.type, t] += g.degrees(u.type, t)[u.index]
            for v, w in g.neighbors(u):
                if v in members:
                    continue
                c = int(self.labels[v.type][v.index])
                links[c] = links.get(c, 0.0) + 2.0 * self.coef[u.type, v.type] * w
        return ud, links

    def _penalty(self, totals: np.ndarray, ud: np.ndarray) -> float:
        return float(np.einsum("st,st,ts->", self.gamma, totals, ud))

    def delta(self, unit: Sequence[NodeRef], source: int, target: int) -> float:
        unit = [NodeRef(*u) for u in unit]
        if not unit:
            raise ValueError("empty unit")
        for u in unit:
            if self.labels[u.type][u.index] != source:
                raise ValueError(f"node {u} is not in community {source}")
        if target == source:
            return 0.0
        K = len(self.sizes)
        if not 0 <= target <= K:
            raise ValueError(f"target community {target} out of range")
        ud, links = self._unit_terms(unit)
        remaining = self.degree_totals[source] - ud
        stay = links.get(source, 0.0) - self._penalty(remaining, ud)
        if target == K:
            return -stay
        go = links.get(target, 0.0) - self._penalty(self.degree_totals[target], ud)
        return float(go - stay)

    def move(self, unit: Sequence[NodeRef], target: int) -> None:
        """Move every node of ``unit`` (all in one community) to ``target``."""
        unit = [NodeRef(*u) for u in unit]
        source = int(self.labels[unit[0].type][unit[0].index])
        if any(self.labels[u.type][u.index] != source for u in unit):
            raise ValueError("unit spans several communities")
        if target == source:
            return
        K = len(self.sizes)
        if target == K:
            L = self.graph.num_types
            self.degree_totals = np.concatenate([self.degree_totals, np.zeros((1, L, L))])
            self.internal = np.concatenate([self.internal, np.zeros((1, L, L))])
            self.sizes = np.append(self.sizes, 0)
        members = set(unit)
        g = self.graph
        for u in members:
            for v, w in g.neighbors(u):
                cv = self.labels[v.type][v.index]
                if v in members:
                    # pair moves with the unit; counted once per ordered pair
                    self.internal[source, u.type, v.type] -= w
                    self.internal[target, u.type, v.type] += w
                elif cv == source:
                    self.internal[source, u.type, v.type] -= w
                    self.internal[source, v.type, u.type] -= w
                elif cv == target:
                    self.internal[target, u.type, v.type] += w
                    self.internal[target, v.type, u.type] += w
            for t in range(g.num_types):
                d = g.degrees(u.type, t)[u.index]
                self.degree_totals[source, u.type, t] -= d
                self.degree_totals[target, u.type, t] += d
        for u in members:
            self.labels[u.type][u.index] = target
        self.sizes[source] -= len(members)
        self.sizes[target] += len(members)

    def partition(self) -> Partition:
        return Partition.from_labels(self.labels)


def modularity(g: HetGraph, p: Partition) -> float:
    """Heterogeneous modularity ``Q`` of partition ``p``, in ``O(edges + K L^2)``."""
    return CommunityStats(g, p).modularity()


def delta_modularity(
    stats: CommunityStats,
    g: HetGraph,
    unit: Sequence[NodeRef],
    source: int,
    target: int,
) -> float:
    """Change in ``Q`` when every node of ``unit`` moves from ``source`` to ``target``.

    ``target`` may equal ``K`` (number of community ids) to mean a new, empty
    community.  Costs time proportional to the unit's degree.
    """
    if stats.graph is not g:
        raise ValueError("stats were built for a different graph")
    return stats.delta(unit, source, target)
