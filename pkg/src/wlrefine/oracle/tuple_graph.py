"""k-tuple graphs, unrolled trees and the witness-grouped 1-WL that runs on them.

Everything here is deliberately written as plain Python over explicit edge
lists so that it shares no code with the vectorized refinement engine it is
used to check.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from ..errors import NodeBudgetExceeded, SizeLimitExceeded
from ..graph import Graph, TupleIndex, atomic_type, phi
from ..refinement import Algorithm, Coloring, RefinementTrace

MAX_TUPLE_VERTICES = 10_000
DEFAULT_NODE_BUDGET = 1_000_000


@dataclass(frozen=True)
class TupleEdge:
    source: int
    target: int
    position: int  # 1-based j
    local: bool
    witness: int  # the exchanged vertex ex((v_s, v_t))

    @property
    def label(self) -> tuple[int, str]:
        return self.position, "L" if self.local else "G"


@dataclass
class TupleGraph:
    """Directed labeled graph over all k-tuples of a graph.

    Replacements with ``w = s_j`` produce one self-loop per position; they
    are kept because the witness ``w = s_j`` takes part in the δ-k-WL
    aggregate.
    """

    n: int
    k: int
    labels: list[int]
    edges: list[TupleEdge]
    local_only: bool
    out: list[list[int]] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.labels)

    def out_edges(self, v: int) -> list[TupleEdge]:
        return [self.edges[e] for e in self.out[v]]


def build_tuple_graph(g: Graph, k: int, local_only: bool = False,
                      max_vertices: int = MAX_TUPLE_VERTICES) -> TupleGraph:
    size = g.n ** k
    if size > max_vertices:
        raise SizeLimitExceeded(f"tuple graph would have {size} vertices (limit {max_vertices})")
    adjacency = [set(nb) for nb in g.adjacency]
    labels, edges, out = [], [], []
    for s in range(size):
        ts = TupleIndex(s, k, g.n)
        labels.append(atomic_type(g, ts).code)
        mine = []
        for j in range(1, k + 1):
            sj = ts.component(j)
            for w in range(g.n):
                local = w in adjacency[sj]
                if local_only and not local:
                    continue
                mine.append(len(edges))
                edges.append(TupleEdge(s, phi(ts, j, w).value, j, local, w))
        out.append(mine)
    return TupleGraph(g.n, k, labels, edges, local_only, out)


@dataclass
class UnrolledTree:
    """Tree of all walks of length ``<= depth`` from ``root`` in a tuple graph.

    ``node_edge[x]`` is the tuple-graph edge leading into node ``x`` (``-1``
    for the root); labels and witnesses are read through it.
    """

    tuple_graph: TupleGraph
    root: int
    depth: int
    origin: list[int]
    parent: list[int]
    node_edge: list[int]
    level: list[int]
    children: list[list[int]]

    @property
    def size(self) -> int:
        return len(self.origin)

    def label(self, x: int) -> int:
        return self.tuple_graph.labels[self.origin[x]]

    def edge_label(self, x: int):
        return self.tuple_graph.edges[self.node_edge[x]].label

    def witness(self, x: int) -> int:
        return self.tuple_graph.edges[self.node_edge[x]].witness


def unroll(tg: TupleGraph, root: int, depth: int,
           node_budget: int = DEFAULT_NODE_BUDGET) -> UnrolledTree:
    origin, parent, node_edge, level = [root], [-1], [-1], [0]
    children: list[list[int]] = [[]]
    frontier = [0]
    for d in range(1, depth + 1):
        nxt = []
        for x in frontier:
            for e in tg.out[origin[x]]:
                if len(origin) >= node_budget:
                    raise NodeBudgetExceeded(f"unrolled tree exceeds {node_budget} nodes")
                y = len(origin)
                origin.append(tg.edges[e].target)
                parent.append(x)
                node_edge.append(e)
                level.append(d)
                children.append([])
                children[x].append(y)
                nxt.append(y)
        frontier = nxt
    return UnrolledTree(tg, root, depth, origin, parent, node_edge, level, children)


def _groups(tree: UnrolledTree, x: int) -> list[list[tuple]]:
    by_witness = defaultdict(list)
    for y in tree.children[x]:
        by_witness[tree.witness(y)].append((tree.edge_label(y), y))
    return [sorted(v, key=lambda p: p[0]) for _, v in sorted(by_witness.items())]


def trees_isomorphic(a: UnrolledTree, b: UnrolledTree) -> bool:
    """Root-fixing isomorphism that respects ``ex``, found by search.

    Respecting ``ex`` means children sharing a witness in ``a`` map onto
    children sharing a witness in ``b``: the search matches witness groups
    one-to-one, and inside a group edges by their (position, L/G) label.
    Sub-results are memoized per node pair.
    """
    memo: dict[tuple[int, int], bool] = {}

    def group_match(ga, gb) -> bool:
        if len(ga) != len(gb) or [l for l, _ in ga] != [l for l, _ in gb]:
            return False
        return all(match(x, y) for (_, x), (_, y) in zip(ga, gb))

    def match(x: int, y: int) -> bool:
        key = (x, y)
        if key in memo:
            return memo[key]
        result = False
        if a.label(x) == b.label(y) and len(a.children[x]) == len(b.children[y]):
            gx, gy = _groups(a, x), _groups(b, y)
            if len(gx) == len(gy):
                used = [False] * len(gy)

                def assign(i: int) -> bool:
                    if i == len(gx):
                        return True
                    for jdx, cand in enumerate(gy):
                        if not used[jdx] and group_match(gx[i], cand):
                            used[jdx] = True
                            if assign(i + 1):
                                return True
                            used[jdx] = False
                    return False

                result = assign(0)
        memo[key] = result
        return result

    return match(0, 0)


def tree_code(tree: UnrolledTree, x: int = 0):
    """Canonical code of the subtree at ``x`` under ex-respecting isomorphism."""
    groups = []
    for group in _groups(tree, x):
        groups.append(tuple((label, tree_code(tree, y)) for label, y in group))
    return tree.label(x), tuple(sorted(groups))


def wl1_star_refine(tg: TupleGraph, h: int) -> RefinementTrace:
    """1-WL on a tuple graph with out-neighbors grouped by exchanged vertex.

    Iteration ``i + 1`` key of ``v_t``: ``(C(v_t), {{ s(t, w) : w in V(G) }})``
    where ``s(t, w)`` is the set of ``(C(v_s), j, L|G)`` over out-edges with
    witness ``w``. Empty sets are kept, one per witness without edges.
    """
    table: dict = {}

    def compress(keys):
        out = []
        for key in keys:
            if key not in table:
                table[key] = len(table)
            out.append(table[key])
        return out

    colors = compress([("atomic", lab) for lab in tg.labels])
    trace = RefinementTrace(Algorithm.WL1_STAR, tg.k)
    trace.colorings.append(Coloring(0, np.asarray(colors, dtype=np.int64)))
    for i in range(h):
        keys = []
        for v in range(tg.size):
            per_w = [set() for _ in range(tg.n)]
            for e in tg.out_edges(v):
                per_w[e.witness].add((colors[e.target], e.position, e.local))
            multiset = sorted(tuple(sorted(s)) for s in per_w)
            keys.append((i + 1, colors[v], tuple(multiset)))
        colors = compress(keys)
        trace.colorings.append(Coloring(i + 1, np.asarray(colors, dtype=np.int64)))
        trace.inspections.append(len(tg.edges))
    return trace
