"""Parallel-style expander decomposition built from bounded-height unit flow."""

from .graph_core import (DegreeReduction, Graph, GraphFormatError, SelfLoopError, Subgraph,
                         VertexSet, connected_components, cut_edges, degree_reduce,
                         induced_subgraph, load_edge_list, volume)
from .unit_flow import (FlowContractError, FlowInstance, LevelState, excess,
                        parallel_unit_flow, push_then_relabel)
from .trimming import LevelCutError, TrimResult, certify_expander, level_cut, trim
from .cut_matching import (CutMatchResult, MatchResult, cut_matching, parallel_matching,
                           path_decompose, untangle_paths)
from .decomposition import Partition, PartitionError, compute_exp_decomp, measure_error
from .verify import (ExpansionReport, TooLargeError, brute_force_expansion,
                     brute_force_nearly_expander, check_flow_feasible)

__all__ = [
    "DegreeReduction", "Graph", "GraphFormatError", "SelfLoopError", "Subgraph", "VertexSet",
    "connected_components", "cut_edges", "degree_reduce", "induced_subgraph", "load_edge_list",
    "volume", "FlowContractError", "FlowInstance", "LevelState", "excess", "parallel_unit_flow",
    "push_then_relabel", "LevelCutError", "TrimResult", "certify_expander", "level_cut", "trim",
    "CutMatchResult", "MatchResult", "cut_matching", "parallel_matching", "path_decompose",
    "untangle_paths", "Partition", "PartitionError", "compute_exp_decomp", "measure_error",
    "ExpansionReport", "TooLargeError", "brute_force_expansion", "brute_force_nearly_expander",
    "check_flow_feasible",
]
