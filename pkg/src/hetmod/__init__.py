"""Modularity-based community detection in heterogeneous networks."""
from .graph import HetGraph, NodeRef, build, degree_summary, read_edge_list, write_edge_list
from .louvain import LouvainConfig, LouvainResult, aggregate, local_move_phase, run
from .modularity import CommunityStats, Partition, delta_modularity, expected_weight, modularity

__version__ = "0.1.0"
