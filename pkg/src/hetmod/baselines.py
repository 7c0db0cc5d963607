"""Homogeneous comparison methods built on the same optimizer.

Method 1 forgets node types and maximizes Newman-Girvan modularity of the whole
network.  Method 2 keeps only same-type edges and handles each type on its own.
Both reduce the input to one-type :class:`HetGraph` objects, for which the
heterogeneous objective is exactly Newman-Girvan modularity, and call
:func:`hetmod.louvain.run`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import HetGraph
from .louvain import LouvainConfig, run
from .metrics import nmi
from .modularity import Partition

__all__ = ["BaselineResult", "flatten", "method1", "method2", "type_subgraph"]


@dataclass
class BaselineResult:
    """Labels per node type plus the objective values reached.

    ``method == 1``: one global partition (community ids shared across types),
    one entry in ``modularity``.  ``method == 2``: one independent partition per
    type (ids not comparable across types) and one ``modularity`` per type;
    ``no_structure[l]`` marks types without same-type edges, which are left as
    singletons.
    """

    method: int
    labels: list[np.ndarray]
    modularity: list[float]
    num_communities: list[int]
    no_structure: list[bool]

    def nmi_per_type(self, truth: Partition) -> list[float]:
        """NMI against ``truth`` per type; types without structure score 0."""
        return [
            0.0 if flag else nmi(x, t)
            for x, t, flag in zip(self.labels, truth.labels, self.no_structure)
        ]


def flatten(g: HetGraph) -> HetGraph:
    """The same network as a single-type graph on all ``n`` nodes."""
    names = [f"{g.type_names[l]}:{name}" for l in range(g.num_types) for name in g.node_names[l]]
    return HetGraph([g.num_nodes], [g.full_adjacency()], node_names=[names])


def type_subgraph(g: HetGraph, l: int) -> HetGraph:
    """Type-``l`` nodes with their same-type edges only."""
    return HetGraph([g.type_sizes[l]], [g.homo_blocks[l]], type_names=[g.type_names[l]], node_names=[g.node_names[l]])


def method1(g: HetGraph, config: LouvainConfig | None = None) -> BaselineResult:
    flat = flatten(g)
    if flat.homo_edge_counts[0] == 0:
        raise ValueError("graph has no edges")
    res = run(flat, config or LouvainConfig())
    labels = res.partition.labels[0]
    offsets = g.offsets()
    per_type = [labels[offsets[l] : offsets[l + 1]] for l in range(g.num_types)]
    return BaselineResult(1, per_type, [res.modularity], [res.num_communities], [False] * g.num_types)


def method2(g: HetGraph, config: LouvainConfig | None = None) -> BaselineResult:
    cfg = config or LouvainConfig()
    labels, qs, ks, flags = [], [], [], []
    for l in range(g.num_types):
        sub = type_subgraph(g, l)
        if sub.homo_edge_counts[0] == 0:
            labels.append(np.arange(g.type_sizes[l]))
            qs.append(0.0)
            ks.append(g.type_sizes[l])
            flags.append(True)
            continue
        res = run(sub, cfg)
        labels.append(res.partition.labels[0])
        qs.append(res.modularity)
        ks.append(res.num_communities)
        flags.append(False)
    return BaselineResult(2, labels, qs, ks, flags)
