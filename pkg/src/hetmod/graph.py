"""Sparse typed representation of a heterogeneous network.

A network with ``L`` node types is stored block-wise: one symmetric matrix per
type for same-type edges and one rectangular bi-adjacency matrix per unordered
type pair for cross-type edges.  Type ids are 0-based throughout the library.

Self-loops only appear in aggregated (coarse) graphs.  A self-loop of weight
``w`` on node ``i`` is stored as ``2w`` on the diagonal of its homo block, so
that row sums are degrees and ``sum(A) == 2m`` holds unchanged.
"""
from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

__all__ = [
    "BlockSummary",
    "EdgeListError",
    "HetGraph",
    "NodeRef",
    "build",
    "degree_summary",
    "read_edge_list",
    "write_edge_list",
]


class NodeRef(NamedTuple):
    """Address of one node: its type id and its index within that type."""

    type: int
    index: int


class EdgeListError(ValueError):
    """Raised for malformed edge-list input; carries the offending line number."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


def _freeze(mat: sp.csr_matrix) -> sp.csr_matrix:
    mat = sp.csr_matrix(mat, dtype=np.float64, copy=True)
    mat.sum_duplicates()
    mat.eliminate_zeros()
    mat.sort_indices()
    for arr in (mat.data, mat.indices, mat.indptr):
        arr.flags.writeable = False
    return mat


class HetGraph:
    """Immutable heterogeneous graph with per-block degree bookkeeping.

    Parameters
    ----------
    type_sizes : sequence of int
        Number of nodes of each type.
    homo_blocks : sequence of sparse matrices, optional
        ``homo_blocks[l]`` is the symmetric ``n_l x n_l`` adjacency of type ``l``.
        Missing blocks are empty.
    cross_blocks : mapping, optional
        ``{(l1, l2): A}`` with ``A`` of shape ``n_l1 x n_l2``.  Either key order
        is accepted; the block is stored once under ``l1 < l2``.
    type_names, node_names : optional
        Labels used by ingestion and the CLI.  Default to ``"0", "1", ...``.
    """

    def __init__(
        self,
        type_sizes: Sequence[int],
        homo_blocks: Sequence[sp.spmatrix | None] | None = None,
        cross_blocks: dict[tuple[int, int], sp.spmatrix] | None = None,
        type_names: Sequence[str] | None = None,
        node_names: Sequence[Sequence[str]] | None = None,
    ):
        sizes = tuple(int(n) for n in type_sizes)
        if not sizes:
            raise ValueError("need at least one node type")
        if any(n < 0 for n in sizes):
            raise ValueError("type sizes must be non-negative")
        L = len(sizes)
        self.type_sizes = sizes

        homo_blocks = list(homo_blocks) if homo_blocks is not None else [None] * L
        if len(homo_blocks) != L:
            raise ValueError(f"expected {L} homo blocks, got {len(homo_blocks)}")
        homo = []
        for l, (n, block) in enumerate(zip(sizes, homo_blocks)):
            block = _freeze(sp.csr_matrix((n, n)) if block is None else block)
            if block.shape != (n, n):
                raise ValueError(f"homo block {l} has shape {block.shape}, expected {(n, n)}")
            if block.nnz and block.data.min() < 0:
                raise ValueError(f"homo block {l} has negative weights")
            if (abs(block - block.T) > 0).nnz:
                raise ValueError(f"homo block {l} is not symmetric")
            homo.append(block)
        self._homo = tuple(homo)

        cross = {}
        for (l1, l2), block in (cross_blocks or {}).items():
            if l1 == l2 or not (0 <= l1 < L and 0 <= l2 < L):
                raise ValueError(f"invalid cross block key {(l1, l2)}")
            block = _freeze(block)
            if l1 > l2:
                l1, l2, block = l2, l1, _freeze(block.T)
            if (l1, l2) in cross:
                raise ValueError(f"cross block {(l1, l2)} given twice")
            if block.shape != (sizes[l1], sizes[l2]):
                raise ValueError(f"cross block {(l1, l2)} has shape {block.shape}")
            if block.nnz and block.data.min() < 0:
                raise ValueError(f"cross block {(l1, l2)} has negative weights")
            cross[(l1, l2)] = block
        for l1 in range(L):
            for l2 in range(l1 + 1, L):
                cross.setdefault((l1, l2), _freeze(sp.csr_matrix((sizes[l1], sizes[l2]))))
        self._cross = cross
        # transposed copies are derived, never stored as independent input
        self._cross_t = {k: _freeze(b.T) for k, b in cross.items()}

        self.type_names = tuple(type_names) if type_names is not None else tuple(str(l) for l in range(L))
        if len(self.type_names) != L or len(set(self.type_names)) != L:
            raise ValueError("type_names must be L distinct names")
        if node_names is None:
            node_names = [[str(i) for i in range(n)] for n in sizes]
        self.node_names = tuple(tuple(names) for names in node_names)
        if tuple(len(names) for names in self.node_names) != sizes:
            raise ValueError("node_names do not match type_sizes")

        self.homo_degrees = tuple(np.asarray(b.sum(axis=1)).ravel() for b in self._homo)
        self.cross_degrees = {}
        for (l1, l2), block in self._cross.items():
            self.cross_degrees[(l1, l2)] = np.asarray(block.sum(axis=1)).ravel()
            self.cross_degrees[(l2, l1)] = np.asarray(block.sum(axis=0)).ravel()
        self.homo_edge_counts = tuple(float(d.sum()) / 2.0 for d in self.homo_degrees)
        self.cross_edge_counts = {k: float(b.sum()) for k, b in self._cross.items()}
        for arr in (*self.homo_degrees, *self.cross_degrees.values()):
            arr.flags.writeable = False

    # -- structure -----------------------------------------------------------------

    @property
    def num_types(self) -> int:
        return len(self.type_sizes)

    @property
    def num_nodes(self) -> int:
        return sum(self.type_sizes)

    @property
    def homo_blocks(self) -> tuple[sp.csr_matrix, ...]:
        return self._homo

    @property
    def cross_blocks(self) -> dict[tuple[int, int], sp.csr_matrix]:
        """Stored cross blocks, keyed ``(l1, l2)`` with ``l1 < l2``."""
        return dict(self._cross)

    @property
    def self_loop_weights(self) -> tuple[np.ndarray, ...]:
        return tuple(b.diagonal() / 2.0 for b in self._homo)

    def block(self, l1: int, l2: int) -> sp.csr_matrix:
        """Adjacency block between types ``l1`` and ``l2`` (rows are type ``l1``)."""
        if l1 == l2:
            return self._homo[l1]
        if l1 < l2:
            return self._cross[(l1, l2)]
        return self._cross_t[(l2, l1)]

    def degrees(self, l1: int, l2: int) -> np.ndarray:
        """``d^[l1]`` when ``l1 == l2``, else ``d^[l1 l2]`` (type-``l1`` nodes' links to type ``l2``)."""
        return self.homo_degrees[l1] if l1 == l2 else self.cross_degrees[(l1, l2)]

    def edge_count(self, l1: int, l2: int) -> float:
        if l1 == l2:
            return self.homo_edge_counts[l1]
        return self.cross_edge_counts[(min(l1, l2), max(l1, l2))]

    def weight(self, u: NodeRef, v: NodeRef) -> float:
        """Entry of the full adjacency matrix (a self-loop of weight w reads as 2w)."""
        self._check_ref(u)
        self._check_ref(v)
        if u.type <= v.type:
            return float(self.block(u.type, v.type)[u.index, v.index])
        return float(self.block(v.type, u.type)[v.index, u.index])

    def neighbors(self, u: NodeRef) -> Iterable[tuple[NodeRef, float]]:
        """Yield ``(v, A_uv)`` for every nonzero entry in ``u``'s row, across all blocks."""
        self._check_ref(u)
        for t in range(self.num_types):
            block = self.block(u.type, t)
            lo, hi = block.indptr[u.index], block.indptr[u.index + 1]
            for j, w in zip(block.indices[lo:hi], block.data[lo:hi]):
                yield NodeRef(t, int(j)), float(w)

    def node_refs(self) -> list[NodeRef]:
        return [NodeRef(l, i) for l, n in enumerate(self.type_sizes) for i in range(n)]

    def offsets(self) -> np.ndarray:
        """Start index of each type in the concatenated node order."""
        return np.concatenate([[0], np.cumsum(self.type_sizes)]).astype(np.int64)

    def full_adjacency(self) -> sp.csr_matrix:
        """All blocks assembled into one sparse ``n x n`` matrix (types in order)."""
        L = self.num_types
        rows = [[self.block(a, b) for b in range(L)] for a in range(L)]
        return sp.csr_matrix(sp.bmat(rows, format="csr"), dtype=np.float64)

    def is_simple(self) -> bool:
        blocks = [*self._homo, *self._cross.values()]
        return all(b.nnz == 0 or np.all(b.data == 1.0) for b in blocks) and all(
            not b.diagonal().any() for b in self._homo
        )

    def edges(self) -> Iterable[tuple[NodeRef, NodeRef, float]]:
        """Undirected edges, each once, as ``(u, v, weight)``; self-loops report ``w`` not ``2w``."""
        for l, block in enumerate(self._homo):
            coo = sp.triu(block).tocoo()
            for i, j, w in zip(coo.row, coo.col, coo.data):
                yield NodeRef(l, int(i)), NodeRef(l, int(j)), float(w / 2.0 if i == j else w)
        for (l1, l2), block in sorted(self._cross.items()):
            coo = block.tocoo()
            for i, j, w in zip(coo.row, coo.col, coo.data):
                yield NodeRef(l1, int(i)), NodeRef(l2, int(j)), float(w)

    def _check_ref(self, u: NodeRef) -> None:
        if not (0 <= u.type < self.num_types and 0 <= u.index < self.type_sizes[u.type]):
            raise IndexError(f"node {u} out of range")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HetGraph):
            return NotImplemented
        if (self.type_sizes, self.type_names, self.node_names) != (
            other.type_sizes,
            other.type_names,
            other.node_names,
        ):
            return False
        pairs = [(a, b) for a, b in zip(self._homo, other._homo)]
        pairs += [(self._cross[k], other._cross[k]) for k in self._cross]
        return all((a != b).nnz == 0 for a, b in pairs)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        m = ", ".join(f"{x:g}" for x in self.homo_edge_counts)
        mc = ", ".join(f"{k}: {v:g}" for k, v in sorted(self.cross_edge_counts.items()))
        return f"HetGraph(type_sizes={self.type_sizes}, m_homo=({m}), m_cross={{{mc}}})"


def build(
    type_sizes: Sequence[int],
    edges: Iterable[tuple],
    *,
    simple: bool = True,
    type_names: Sequence[str] | None = None,
    node_names: Sequence[Sequence[str]] | None = None,
) -> HetGraph:
    """Build a :class:`HetGraph` from ``(u, v)`` or ``(u, v, weight)`` tuples.

    In simple mode (the default) every weight must be 1 and duplicate undirected
    edges or self-loops raise ``ValueError``.  With ``simple=False`` repeated
    edges accumulate and a self-loop ``(u, u, w)`` is recorded as weight ``w``.
    """
    sizes = tuple(int(n) for n in type_sizes)
    L = len(sizes)
    homo = [([], [], []) for _ in range(L)]
    cross: dict[tuple[int, int], tuple[list, list, list]] = {}
    seen: set[tuple[NodeRef, NodeRef]] = set()
    for k, edge in enumerate(edges):
        u, v = NodeRef(*edge[0]), NodeRef(*edge[1])
        w = float(edge[2]) if len(edge) > 2 else 1.0
        for x in (u, v):
            if not (0 <= x.type < L and 0 <= x.index < sizes[x.type]):
                raise ValueError(f"edge {k}: node {x} out of range")
        if w < 0 or not math.isfinite(w):
            raise ValueError(f"edge {k}: invalid weight {w}")
        if simple:
            if w != 1.0:
                raise ValueError(f"edge {k}: weight must be 1 in simple mode")
            if u == v:
                raise ValueError(f"edge {k}: self-loop at {u}")
            key = (u, v) if u <= v else (v, u)
            if key in seen:
                raise ValueError(f"edge {k}: duplicate edge {key}")
            seen.add(key)
        if u.type == v.type:
            rows, cols, vals = homo[u.type]
            if u.index == v.index:
                rows.append(u.index)
                cols.append(u.index)
                vals.append(2.0 * w)
            else:
                rows += [u.index, v.index]
                cols += [v.index, u.index]
                vals += [w, w]
        else:
            if u.type > v.type:
                u, v = v, u
            rows, cols, vals = cross.setdefault((u.type, v.type), ([], [], []))
            rows.append(u.index)
            cols.append(v.index)
            vals.append(w)
    homo_blocks = [sp.coo_matrix((vals, (rows, cols)), shape=(n, n)) for n, (rows, cols, vals) in zip(sizes, homo)]
    cross_blocks = {
        (a, b): sp.coo_matrix((vals, (rows, cols)), shape=(sizes[a], sizes[b]))
        for (a, b), (rows, cols, vals) in cross.items()
    }
    return HetGraph(sizes, homo_blocks, cross_blocks, type_names=type_names, node_names=node_names)


# -- typed edge-list files -------------------------------------------------------------

_NODE_DECL = "#@node"


def read_edge_list(path: str | Path, *, simple: bool = True) -> HetGraph:
    """Read a typed TSV edge list.

    Data lines are ``TYPE_A ID_A TYPE_B ID_B [WEIGHT]`` separated by tabs; lines
    starting with ``#`` are comments.  Types and nodes are numbered in order of
    first appearance.  The comment directive ``#@node<TAB>TYPE<TAB>ID`` (written
    by :func:`write_edge_list`) declares a node ahead of its edges, which keeps
    isolated nodes and the node order across a round trip.
    """
    type_ids: dict[str, int] = {}
    node_ids: list[dict[str, int]] = []

    def intern(tname: str, nname: str, lineno: int) -> NodeRef:
        if not tname or not nname:
            raise EdgeListError("empty type or node name", lineno)
        if tname not in type_ids:
            type_ids[tname] = len(type_ids)
            node_ids.append({})
        t = type_ids[tname]
        table = node_ids[t]
        if nname not in table:
            table[nname] = len(table)
        return NodeRef(t, table[nname])

    edges = []
    seen: dict[tuple[NodeRef, NodeRef], int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if line.startswith(_NODE_DECL):
                parts = line.split("\t")
                if len(parts) != 3:
                    raise EdgeListError("node declaration needs TYPE and ID", lineno)
                intern(parts[1], parts[2], lineno)
                continue
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) not in (4, 5):
                raise EdgeListError(f"expected 4 or 5 tab-separated fields, got {len(parts)}", lineno)
            if any(any(c.isspace() for c in p) for p in parts):
                raise EdgeListError("names must not contain whitespace", lineno)
            u = intern(parts[0], parts[1], lineno)
            v = intern(parts[2], parts[3], lineno)
            w = 1.0
            if len(parts) == 5:
                try:
                    w = float(parts[4])
                except ValueError:
                    raise EdgeListError(f"bad weight {parts[4]!r}", lineno) from None
                if w < 0 or not math.isfinite(w):
                    raise EdgeListError(f"invalid weight {w}", lineno)
            if simple:
                if u == v:
                    raise EdgeListError(f"self-loop at {parts[0]} {parts[1]}", lineno)
                if w != 1.0:
                    raise EdgeListError("weights other than 1 are not allowed for simple graphs", lineno)
                key = (u, v) if u <= v else (v, u)
                if key in seen:
                    raise EdgeListError(f"duplicate edge (first seen on line {seen[key]})", lineno)
                seen[key] = lineno
            edges.append((u, v, w))
    if not type_ids:
        raise EdgeListError("no nodes found")
    type_names = sorted(type_ids, key=type_ids.get)
    node_names = [sorted(table, key=table.get) for table in node_ids]
    return build(
        [len(t) for t in node_names],
        edges,
        simple=simple,
        type_names=type_names,
        node_names=node_names,
    )


def write_edge_list(g: HetGraph, path: str | Path, *, header: str | None = None) -> None:
    """Write ``g`` in the typed TSV format, node declarations first."""
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        for l, names in enumerate(g.node_names):
            for name in names:
                fh.write(f"{_NODE_DECL}\t{g.type_names[l]}\t{name}\n")
        for u, v, w in g.edges():
            fields = [g.type_names[u.type], g.node_names[u.type][u.index], g.type_names[v.type], g.node_names[v.type][v.index]]
            if w != 1.0:
                fields.append(repr(w))
            fh.write("\t".join(fields) + "\n")


# -- diagnostics -----------------------------------------------------------------------


@dataclass(frozen=True)
class BlockSummary:
    """Per-block degree diagnostics.

    ``block`` is ``(l, l)`` for a homo block and ``(l1, l2)`` with ``l1 < l2``
    for a cross block; ``max_degree`` is ``max(d^[l1 l2]_max, d^[l2 l1]_max)``
    for cross blocks.  ``density_ok`` reports whether the degree and edge-count
    conditions under which the ``d_i d_j / 2m`` null approximation is justified
    hold at this size.  Detection never depends on it.
    """

    block: tuple[int, int]
    max_degree: float
    edge_count: float
    density_ok: bool


def degree_summary(g: HetGraph) -> list[BlockSummary]:
    """Max degree, edge count and null-approximation conditions for every block.

    Homo block ``l``: ``d_max <= (log n_l)^(1/3)`` and ``m > n_l``.  Cross block:
    both directions' ``d_max <= (log n_min)^(1/3)`` and ``m > 2 n_max``, with
    ``n_min``/``n_max`` the smallest/largest type size.  The ``eta > 0`` slack of
    the lower bounds is taken arbitrarily small, which turns them into strict
    inequalities (and makes ``m >= eta * d_max`` automatic when ``m > 0``).
    """
    out = []
    L = g.num_types
    nonempty = [n for n in g.type_sizes if n > 0]
    n_min = min(nonempty) if nonempty else 0
    n_max = max(nonempty) if nonempty else 0

    def cap(n: int) -> float:
        return math.log(n) ** (1.0 / 3.0) if n > 1 else 0.0

    for l in range(L):
        d = g.homo_degrees[l]
        dmax = float(d.max()) if d.size else 0.0
        m = g.homo_edge_counts[l]
        ok = m > 0 and dmax <= cap(g.type_sizes[l]) and m > g.type_sizes[l]
        out.append(BlockSummary((l, l), dmax, m, bool(ok)))
    for l1 in range(L):
        for l2 in range(l1 + 1, L):
            d12, d21 = g.cross_degrees[(l1, l2)], g.cross_degrees[(l2, l1)]
            dmax12 = float(d12.max()) if d12.size else 0.0
            dmax21 = float(d21.max()) if d21.size else 0.0
            m = g.cross_edge_counts[(l1, l2)]
            ok = m > 0 and max(dmax12, dmax21) <= cap(n_min) and m > 2 * n_max
            out.append(BlockSummary((l1, l2), max(dmax12, dmax21), m, bool(ok)))
    return out
