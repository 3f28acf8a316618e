"""Exhaustive isomorphism search for small labeled graphs."""
from __future__ import annotations

from collections import Counter

from ..errors import SizeLimitExceeded
from ..graph import Graph

MAX_ORDER = 10


def _profile(g: Graph):
    labels = g.vertex_labels.tolist()
    deg = g.degrees.tolist()
    return [(labels[v], deg[v]) for v in range(g.n)]


def brute_force_isomorphic(g: Graph, h: Graph, max_order: int = MAX_ORDER) -> bool:
    """True iff some bijection preserves edges, vertex labels and edge labels.

    Backtracking over vertices of ``g`` in decreasing-degree order; a vertex
    may only map to a vertex with the same (label, degree), and every new
    pair is checked against all previously mapped vertices.
    """
    if g.n > max_order or h.n > max_order:
        raise SizeLimitExceeded(f"brute-force isomorphism limited to {max_order} vertices")
    if g.n != h.n or g.num_edges != h.num_edges:
        return False
    pg, ph = _profile(g), _profile(h)
    if Counter(pg) != Counter(ph):
        return False
    if Counter(g.edge_label_array.tolist()) != Counter(h.edge_label_array.tolist()):
        return False

    dg, dh = g.dense(), h.dense()
    order = sorted(range(g.n), key=lambda v: (-pg[v][1], v))
    candidates = {v: [u for u in range(h.n) if ph[u] == pg[v]] for v in order}
    mapping = [-1] * g.n
    used = [False] * h.n

    def extend(depth: int) -> bool:
        if depth == len(order):
            return True
        v = order[depth]
        for u in candidates[v]:
            if used[u]:
                continue
            ok = True
            for prev in order[:depth]:
                if dg[v, prev] != dh[u, mapping[prev]]:
                    ok = False
                    break
            if not ok:
                continue
            mapping[v] = u
            used[u] = True
            if extend(depth + 1):
                return True
            used[u] = False
            mapping[v] = -1
        return False

    return extend(0)
