"""Exhaustive corpora of small graphs and rooted trees, free of isomorphic duplicates."""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..graph import Graph, from_edge_list
from .isomorphism import brute_force_isomorphic


def _certificate(g: Graph):
    """Isomorphism invariant used only to bucket candidates before the exact test."""
    dense = g.dense() > 0
    tri = np.diag(np.linalg.matrix_power(dense.astype(np.int64), 3)).tolist()
    deg = g.degrees.tolist()
    labels = g.vertex_labels.tolist()
    per_vertex = sorted(
        (labels[v], deg[v], tri[v], tuple(sorted(deg[u] for u in g.neighbors(v))))
        for v in range(g.n))
    return g.n, g.num_edges, tuple(per_vertex)


class _IsoFreeCollector:
    def __init__(self):
        self.graphs: list[Graph] = []
        self._buckets: dict = defaultdict(list)

    def add(self, g: Graph) -> bool:
        bucket = self._buckets[_certificate(g)]
        if any(brute_force_isomorphic(g, other) for other in bucket):
            return False
        bucket.append(g)
        self.graphs.append(g)
        return True


def all_graphs(n: int) -> list[Graph]:
    """Every graph on ``n`` vertices up to isomorphism (edge-subset enumeration)."""
    pairs = list(itertools.combinations(range(n), 2))
    out = _IsoFreeCollector()
    for r in range(len(pairs) + 1):
        for edges in itertools.combinations(pairs, r):
            out.add(from_edge_list(n, edges))
    return out.graphs


@lru_cache(maxsize=None)
def _connected(n: int) -> tuple[Graph, ...]:
    if n == 1:
        return (from_edge_list(1, []),)
    out = _IsoFreeCollector()
    # every connected graph has a vertex whose removal keeps it connected
    for base in _connected(n - 1):
        edges = base.edges()
        for r in range(1, n):
            for nbrs in itertools.combinations(range(n - 1), r):
                out.add(from_edge_list(n, edges + [(v, n - 1) for v in nbrs]))
    return tuple(out.graphs)


def connected_graphs(n: int) -> list[Graph]:
    """Every connected unlabeled graph on ``n`` vertices up to isomorphism."""
    return list(_connected(n))


def connected_graphs_upto(max_n: int) -> list[Graph]:
    return [g for n in range(1, max_n + 1) for g in connected_graphs(n)]


def random_labelings(graphs, alphabet: int, per_graph: int, rng: np.random.Generator) -> list[Graph]:
    """Randomly labeled copies of ``graphs``, deduplicated up to labeled isomorphism."""
    out = _IsoFreeCollector()
    for g in graphs:
        for _ in range(per_graph):
            out.add(g.with_vertex_labels(rng.integers(0, alphabet, size=g.n)))
    return out.graphs


# -- rooted trees ----------------------------------------------------------------


@dataclass(frozen=True)
class RootedTree:
    """Directed tree with edges pointing away from vertex 0."""

    parent: tuple[int, ...]  # parent[0] == -1
    labels: tuple[int, ...] | None = None

    @property
    def n(self) -> int:
        return len(self.parent)

    def children(self) -> list[list[int]]:
        out = [[] for _ in self.parent]
        for v, p in enumerate(self.parent):
            if p >= 0:
                out[p].append(v)
        return out

    def label(self, v: int) -> int:
        return 0 if self.labels is None else self.labels[v]

    def permuted(self, perm) -> "RootedTree":
        """Rename vertex ``v`` to ``perm[v]``; ``perm[0]`` must stay 0."""
        if perm[0] != 0:
            raise ValueError("root must remain vertex 0")
        parent = [-1] * self.n
        labels = [0] * self.n
        for v, p in enumerate(self.parent):
            parent[perm[v]] = -1 if p < 0 else perm[p]
            labels[perm[v]] = self.label(v)
        return RootedTree(tuple(parent), None if self.labels is None else tuple(labels))

    def as_marked_graph(self) -> Graph:
        """Undirected graph with the root carrying its own label.

        Isomorphisms of this graph are exactly the isomorphisms of the
        directed tree, since the root is fixed and edge directions follow.
        """
        edges = [(p, v) for v, p in enumerate(self.parent) if p >= 0]
        base = 1 + max((self.label(v) for v in range(self.n)), default=0)
        labels = [self.label(v) for v in range(self.n)]
        labels[0] += base
        return from_edge_list(self.n, edges, labels)


@lru_cache(maxsize=None)
def _shapes(n: int) -> tuple:
    """Canonical nested-tuple shapes of rooted trees with ``n`` vertices."""
    if n == 1:
        return ((),)
    out = []

    def forests(remaining: int, max_shape):
        # multisets of subtrees in non-increasing canonical order
        if remaining == 0:
            yield ()
            return
        for size in range(remaining, 0, -1):
            for shape in _shapes(size):
                if max_shape is not None and (size, shape) > max_shape:
                    continue
                for rest in forests(remaining - size, (size, shape)):
                    yield ((size, shape),) + rest

    for forest in forests(n - 1, None):
        out.append(tuple(shape for _, shape in forest))
    return tuple(out)


def _shape_to_tree(shape) -> RootedTree:
    parent = [-1]

    def place(node_shape, p):
        for child in node_shape:
            parent.append(p)
            place(child, len(parent) - 1)

    place(shape, 0)
    return RootedTree(tuple(parent))


def rooted_trees(n: int) -> list[RootedTree]:
    """All unlabeled rooted trees on ``n`` vertices, one per isomorphism class."""
    return [_shape_to_tree(s) for s in _shapes(n)]
