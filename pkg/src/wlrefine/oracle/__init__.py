"""Brute-force oracles and executable checks of the refinement theory."""
from .checks import (
    CheckReport,
    all_pairs,
    check_ktrees,
    check_lemma_wlk,
    check_soundness,
    check_theorem_equivalence,
    check_tree_iso_theorem,
    directed_wl1_distinguishes,
)
from .corpora import (
    RootedTree,
    all_graphs,
    connected_graphs,
    connected_graphs_upto,
    random_labelings,
    rooted_trees,
)
from .isomorphism import brute_force_isomorphic
from .tuple_graph import (
    TupleGraph,
    UnrolledTree,
    build_tuple_graph,
    tree_code,
    trees_isomorphic,
    unroll,
    wl1_star_refine,
)

__all__ = [
    "CheckReport", "RootedTree", "TupleGraph", "UnrolledTree", "all_graphs", "all_pairs",
    "brute_force_isomorphic", "build_tuple_graph", "check_ktrees", "check_lemma_wlk",
    "check_soundness", "check_theorem_equivalence", "check_tree_iso_theorem",
    "connected_graphs", "connected_graphs_upto", "directed_wl1_distinguishes",
    "random_labelings", "rooted_trees", "tree_code", "trees_isomorphic", "unroll",
    "wl1_star_refine",
]
