"""Ultrametric and rooted tree fitting by hierarchical correlation clustering."""

from .baselines import gromov_tree_fit, neighbor_join, single_linkage_ultrametric
from .estimators import (
    GromovTreeFit,
    HCCTreeFit,
    HCCUltrametric,
    NeighborJoining,
    SingleLinkageUltrametric,
)
from .fitters import (
    ReductionContext,
    best_base_tree_fit,
    hcc_rooted_tree_fit,
    hcc_ultra_fit,
    restrict_reduced_ultrametric,
)
from .graphs import (
    Graph,
    SyntheticSpec,
    balanced_tree,
    largest_component,
    parse_edge_list,
    perturb_tree,
    shortest_path_matrix,
)
from .hcc import EdgeOrdering, MergeLog, PartitionView, hcc_triangle, is_highly_connected, partition_at
from .metricspace import (
    HypStats,
    HypVector,
    bad_triangles,
    check_distance_matrix,
    four_point,
    gromov_product,
    hyp_stats,
    hyperbolicity_vector,
    integral_bad_triangles,
    is_metric,
    three_point,
    ultrametricity_vector,
)
from .report import BenchSummary, FitReport, fit_errors
from .tree import WeightedTree, construct_rooted_tree, tree_path_metric

__version__ = "0.1.0"
