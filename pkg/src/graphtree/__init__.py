"""Graphon-based hierarchical graph clustering.

Core pieces: step graphons and measure preserving maps (graphon), exact
mergeons and cluster trees (mergeon), W-random graph sampling (sampling),
neighborhood smoothing estimators (smoothing), single linkage (linkage),
file formats (graph_io), and the experiment harness (experiments).
"""

from .errors import ValidationError
from .experiments import (
    BUILTIN_GRAPHONS,
    ExperimentConfig,
    RECORD_HEADER,
    RunRecord,
    group_of_thirds,
    load_graph_file,
    resolve_graphon,
    run_dataset_clustering,
    run_synthetic_experiment,
    separated_three_block_graphon,
    three_group_graphon,
)
from .graph_io import (
    GmlGraph,
    load_adjacency_csv,
    load_edge_list,
    load_gml_subset,
    load_matrix_csv,
    save_adjacency_csv,
    save_edge_list,
    save_matrix_csv,
)
from .graphon import (
    BlockPartition,
    MeasurePreservingMap,
    StepGraphon,
    load_step_graphon,
    save_step_graphon,
    step_graphon_from_dict,
    step_graphon_to_dict,
)
from .linkage import (
    Dendrogram,
    Leaf,
    Merge,
    build_dendrogram,
    clusters_at_level,
    dendrogram_merge_matrix,
    merge_estimate,
)
from .mergeon import (
    BlockMergeMatrix,
    ClusterTree,
    cluster_tree_of,
    discretization_oracle,
    induced_merge_height,
    merge_distortion,
    mergeon_eval,
    mergeon_eval_matrix,
    step_mergeon,
)
from .sampling import (
    LatentSample,
    derive_seed,
    edge_probabilities,
    exact_graph_probability,
    rho_dense_check,
    sample_graph,
    sample_latents,
)
from .smoothing import (
    SmoothingConfig,
    bandwidth,
    column_distance_matrix,
    estimate_edge_probabilities,
    estimate_modified,
    estimate_original,
    estimation_errors,
)

__version__ = "0.1.0"

__all__ = [
    "ValidationError",
    "BlockPartition",
    "StepGraphon",
    "MeasurePreservingMap",
    "load_step_graphon",
    "save_step_graphon",
    "step_graphon_from_dict",
    "step_graphon_to_dict",
    "BlockMergeMatrix",
    "ClusterTree",
    "step_mergeon",
    "discretization_oracle",
    "cluster_tree_of",
    "mergeon_eval",
    "mergeon_eval_matrix",
    "induced_merge_height",
    "merge_distortion",
    "LatentSample",
    "derive_seed",
    "sample_latents",
    "edge_probabilities",
    "sample_graph",
    "exact_graph_probability",
    "rho_dense_check",
    "SmoothingConfig",
    "bandwidth",
    "estimate_modified",
    "estimate_original",
    "estimate_edge_probabilities",
    "column_distance_matrix",
    "estimation_errors",
    "Leaf",
    "Merge",
    "Dendrogram",
    "merge_estimate",
    "build_dendrogram",
    "clusters_at_level",
    "dendrogram_merge_matrix",
    "GmlGraph",
    "load_edge_list",
    "save_edge_list",
    "load_adjacency_csv",
    "save_adjacency_csv",
    "load_matrix_csv",
    "save_matrix_csv",
    "load_gml_subset",
    "BUILTIN_GRAPHONS",
    "three_group_graphon",
    "separated_three_block_graphon",
    "resolve_graphon",
    "ExperimentConfig",
    "RunRecord",
    "RECORD_HEADER",
    "run_synthetic_experiment",
    "run_dataset_clustering",
    "load_graph_file",
    "group_of_thirds",
    "__version__",
]
