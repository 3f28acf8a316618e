"""Weisfeiler-Leman refinement (1-WL, k-WL, δ-k-WL, local δ-k-LWL) and graph kernels."""
from .errors import (
    ConflictingEdgeLabel,
    MemoryBudgetExceeded,
    OutOfRangeVertex,
    SelfLoop,
    WLError,
)
from .graph import (
    AtomicType,
    Graph,
    Neighborhood,
    TupleIndex,
    atomic_type,
    from_edge_list,
    is_local_neighbor,
    phi,
)
from .kernels import (
    FeatureVector,
    GramMatrix,
    gram_matrix,
    graphlet3_features,
    normalize_gram,
    shortest_path_features,
    wl_feature_vector,
    wl_feature_vectors,
)
from .refinement import (
    Algorithm,
    ColorDictionary,
    Coloring,
    RefinementTrace,
    delta_klwl_refine,
    delta_kwl_refine,
    distinguishes,
    kwl_refine,
    refine_many,
    refine_to_stable,
    wl1_refine,
)

__version__ = "0.1.0"

__all__ = [
    "Algorithm", "AtomicType", "ColorDictionary", "Coloring", "ConflictingEdgeLabel",
    "FeatureVector", "Graph", "GramMatrix", "MemoryBudgetExceeded", "Neighborhood",
    "OutOfRangeVertex", "RefinementTrace", "SelfLoop", "TupleIndex", "WLError", "atomic_type",
    "delta_klwl_refine", "delta_kwl_refine", "distinguishes", "from_edge_list", "gram_matrix",
    "graphlet3_features", "is_local_neighbor", "kwl_refine", "normalize_gram", "phi",
    "refine_many", "refine_to_stable", "shortest_path_features", "wl1_refine",
    "wl_feature_vector", "wl_feature_vectors",
]
