"""Unit-based Louvain maximization of heterogeneous modularity.

A *unit* is a group of at most one node per type that always moves as a whole.
Every level starts with each unit in its own community and greedily moves units
to the neighboring community with the largest gain.  The resulting communities
are then collapsed: the members of each type become one weighted super-node and
the super-nodes of a community form the next level's unit.  Collapsing keeps
``Q`` exact, so levels are compared on the original objective.
"""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .graph import HetGraph, NodeRef
from .modularity import CommunityStats, Partition, block_coefficients, modularity

__all__ = [
    "LouvainConfig",
    "LouvainResult",
    "aggregate",
    "local_move_phase",
    "merge_to_k",
    "run",
]

Unit = tuple[NodeRef, ...]

_LEVEL_TOL = 1e-10


@dataclass(frozen=True)
class LouvainConfig:
    restarts: int = 100
    seed: int = 0
    target_k: int | None = None
    max_sweeps: int = 1000

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.target_k is not None and self.target_k < 1:
            raise ValueError("target_k must be >= 1")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")


@dataclass
class LouvainResult:
    partition: Partition
    modularity: float
    num_communities: int
    restart_modularity: list[float] = field(default_factory=list)
    levels: int = 0
    best_restart: int = 0


class _FlatGraph:
    """Concatenated-node CSR view of a :class:`HetGraph` for the kernel."""

    def __init__(self, g: HetGraph):
        adj = g.full_adjacency()
        self.indptr = adj.indptr.astype(np.int64)
        self.indices = adj.indices.astype(np.int64)
        self.data = adj.data.astype(np.float64)
        self.offsets = g.offsets()
        self.node_type = np.repeat(np.arange(g.num_types), g.type_sizes).astype(np.int64)
        L = g.num_types
        self.deg = np.zeros((g.num_nodes, L))
        for s in range(L):
            lo, hi = self.offsets[s], self.offsets[s + 1]
            for t in range(L):
                self.deg[lo:hi, t] = g.degrees(s, t)
        coef, self.gamma = block_coefficients(g)
        self.edge_coef = 2.0 * coef

    def unit_arrays(self, units: Sequence[Unit]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        n = len(self.node_type)
        unit_of = np.full(n, -1, dtype=np.int64)
        members = []
        ptr = [0]
        for k, unit in enumerate(units):
            types = [u.type for u in unit]
            if not unit or len(set(types)) != len(types):
                raise ValueError(f"unit {k} must be nonempty with at most one node per type")
            for u in unit:
                i = self.offsets[u.type] + u.index
                if unit_of[i] >= 0:
                    raise ValueError(f"node {u} belongs to two units")
                unit_of[i] = k
                members.append(i)
            ptr.append(len(members))
        if (unit_of < 0).any():
            raise ValueError("every node must belong to a unit")
        return unit_of, np.asarray(ptr, dtype=np.int64), np.asarray(members, dtype=np.int64)


def _singleton_units(g: HetGraph) -> list[Unit]:
    return [(u,) for u in g.node_refs()]


def _phase(
    g: HetGraph,
    units: Sequence[Unit],
    order: np.ndarray,
    seed: int,
    max_sweeps: int,
    target_k: int | None,
) -> tuple[Partition, int, bool]:
    flat = _FlatGraph(g)
    unit_of, unit_ptr, unit_members = flat.unit_arrays(units)
    comm = np.arange(len(units), dtype=np.int64)
    moves, _, reached = _kernels.local_move(
        flat.indptr,
        flat.indices,
        flat.data,
        flat.node_type,
        flat.deg,
        unit_of,
        unit_ptr,
        unit_members,
        np.asarray(order, dtype=np.int64),
        flat.edge_coef,
        flat.gamma,
        comm,
        max_sweeps,
        target_k or 0,
        seed,
    )
    node_labels = comm[unit_of]
    labels = [node_labels[flat.offsets[l] : flat.offsets[l + 1]] for l in range(g.num_types)]
    return Partition.from_labels(labels), int(moves), bool(reached)


def local_move_phase(
    g: HetGraph,
    units: Sequence[Unit] | None = None,
    *,
    rng: np.random.Generator | int | None = None,
    order: Sequence[int] | None = None,
    max_sweeps: int = 1000,
    target_k: int | None = None,
) -> tuple[Partition, bool]:
    """One local-moving phase starting from every unit in its own community.

    Units are visited in ``order`` (a permutation of unit indices; random when
    omitted) for repeated sweeps until none moves.  A unit only moves to a
    community holding a neighbor of one of its members, and only if ``Q``
    strictly increases; equal best gains are broken uniformly at random.

    Returns the partition of ``g``'s nodes and whether any unit moved.
    """
    rng = np.random.default_rng(rng)
    units = _singleton_units(g) if units is None else [tuple(NodeRef(*u) for u in unit) for unit in units]
    order = rng.permutation(len(units)) if order is None else np.asarray(order)
    if sorted(order.tolist()) != list(range(len(units))):
        raise ValueError("order must be a permutation of the unit indices")
    p, moves, _ = _phase(g, units, order, int(rng.integers(2**31)), max_sweeps, target_k)
    return p, moves > 0


def _super_index(p: Partition) -> list[np.ndarray]:
    """Per type, map each node to its super-node: communities present in that type, in id order."""
    out = []
    for x in p.labels:
        present = np.unique(x)
        out.append(np.searchsorted(present, x))
    return out


def aggregate(g: HetGraph, p: Partition) -> tuple[HetGraph, list[Unit]]:
    """Collapse each community's same-type members into one weighted super-node.

    Super-nodes of type ``l`` are numbered by community id.  Edge weights are
    summed; weight inside a super-node becomes a self-loop.  Unit ``c`` of the
    result holds the super-nodes of community ``c``, so ``Q`` of the coarse graph
    with one community per unit equals ``modularity(g, p)``.
    """
    if p.type_sizes != g.type_sizes:
        raise ValueError("partition does not match graph")
    L = g.num_types
    index = _super_index(p)
    proj = []
    for l in range(L):
        n_super = int(index[l].max()) + 1 if len(index[l]) else 0
        n = g.type_sizes[l]
        proj.append(sp.csr_matrix((np.ones(n), (np.arange(n), index[l])), shape=(n, n_super)))
    homo = [proj[l].T @ g.homo_blocks[l] @ proj[l] for l in range(L)]
    cross = {(a, b): proj[a].T @ block @ proj[b] for (a, b), block in g.cross_blocks.items()}
    names = []
    for l in range(L):
        present = np.unique(p.labels[l])
        names.append([f"c{c}" for c in present])
    coarse = HetGraph([pr.shape[1] for pr in proj], homo, cross, type_names=g.type_names, node_names=names)
    members: list[list[NodeRef]] = [[] for _ in range(p.num_communities)]
    for l in range(L):
        for k, c in enumerate(np.unique(p.labels[l])):
            members[c].append(NodeRef(l, k))
    return coarse, [tuple(m) for m in members]


def merge_to_k(
    g: HetGraph,
    p: Partition,
    k: int,
    rng: np.random.Generator | int | None = None,
) -> Partition:
    """Merge communities pairwise until exactly ``k`` remain.

    Each step applies the merge with the largest (least negative) change in
    ``Q``, preferring pairs of linked communities; ties are broken at random.
    """
    rng = np.random.default_rng(rng)
    K = p.num_communities
    if k < 1 or k > K:
        raise ValueError(f"cannot merge {K} communities down to {k}")
    if K == k:
        return p
    flat = _FlatGraph(g)
    labels = p.flat()
    coo = g.full_adjacency().tocoo()
    coef = flat.edge_coef / 2.0
    w = coo.data * coef[flat.node_type[coo.row], flat.node_type[coo.col]]
    links = np.zeros((K, K))
    np.add.at(links, (labels[coo.row], labels[coo.col]), w)
    totals = CommunityStats(g, p).degree_totals
    gamma = flat.gamma
    penalty = np.einsum("st,ast,bts->ab", gamma, totals, totals)
    alive = np.ones(K, dtype=bool)
    parent = np.arange(K)
    for _ in range(K - k):
        gain = 2.0 * links - penalty
        pair_ok = np.outer(alive, alive)
        np.fill_diagonal(pair_ok, False)
        linked = pair_ok & (links > 0)
        cand = linked if linked.any() else pair_ok
        scores = np.where(cand, gain, -np.inf)
        best = scores.max()
        ties = np.argwhere(np.triu(cand) & (scores >= best - _kernels.TIE_TOL))
        a, b = ties[rng.integers(len(ties))]
        links[a] += links[b]
        links[:, a] += links[:, b]
        links[b] = 0.0
        links[:, b] = 0.0
        totals[a] += totals[b]
        alive[b] = False
        parent[parent == b] = a
        row = np.einsum("st,st,bts->b", gamma, totals[a], totals)
        penalty[a] = row
        penalty[:, a] = row
    merged = parent[labels]
    offsets = g.offsets()
    return Partition.from_labels([merged[offsets[l] : offsets[l + 1]] for l in range(g.num_types)])


def _restart(g: HetGraph, cfg: LouvainConfig, seed: int) -> tuple[Partition, int]:
    rng = np.random.default_rng(seed)
    level_graph = g
    units = _singleton_units(g)
    node_map = [np.arange(n) for n in g.type_sizes]
    labels = Partition.singletons(g.type_sizes)
    q_prev = modularity(g, labels)
    levels = 0
    while True:
        order = rng.permutation(len(units))
        p, moves, reached = _phase(level_graph, units, order, int(rng.integers(2**31)), cfg.max_sweeps, cfg.target_k)
        levels += 1
        if moves == 0 and not reached:
            break
        labels = Partition.from_labels([p.labels[l][node_map[l]] for l in range(g.num_types)])
        if reached:
            break
        q = modularity(level_graph, p)
        if q < q_prev - _LEVEL_TOL:
            raise RuntimeError(f"modularity decreased across levels: {q_prev} -> {q}")
        if q <= q_prev:
            break
        index = _super_index(p)
        node_map = [index[l][node_map[l]] for l in range(g.num_types)]
        level_graph, units = aggregate(level_graph, p)
        q_prev = q
    if cfg.target_k is not None and labels.num_communities > cfg.target_k:
        labels = merge_to_k(g, labels, cfg.target_k, rng)
    return labels, levels


def run(g: HetGraph, config: LouvainConfig | None = None, **kwargs) -> LouvainResult:
    """Maximize heterogeneous modularity with ``config.restarts`` random restarts.

    Restart ``r`` is seeded with ``config.seed + r`` and the best ``Q`` wins,
    lowest restart index first on ties.  With ``target_k`` set, a restart stops
    as soon as the community count reaches it, and a result with more
    communities is merged down by :func:`merge_to_k`.
    """
    cfg = config if config is not None else LouvainConfig(**kwargs)
    if config is not None and kwargs:
        raise TypeError("pass either a config or keyword options, not both")
    if cfg.target_k is not None and cfg.target_k > g.num_nodes:
        raise ValueError(f"target_k={cfg.target_k} exceeds the number of nodes ({g.num_nodes})")
    best = None
    trace = []
    for r in range(cfg.restarts):
        p, levels = _restart(g, cfg, cfg.seed + r)
        q = modularity(g, p)
        trace.append(q)
        if best is None or q > best[0]:
            best = (q, p, levels, r)
    q, p, levels, r = best
    return LouvainResult(p, q, p.num_communities, trace, levels, r)
