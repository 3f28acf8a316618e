"""Labeled undirected graphs, k-tuple indexing and atomic types.

Vertices are ``0..n-1``. Adjacency is stored in CSR form (``indptr``,
``indices``) with every neighbor list strictly sorted. Labels are small
non-negative integers; unlabeled graphs use the sentinel label ``0``.

A k-tuple ``(v_1, ..., v_k)`` is encoded little-endian in base ``n``::

    value = v_1 + v_2 * n + ... + v_k * n**(k-1)

so enumerating ``V(G)^k`` is a single counter loop.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConflictingEdgeLabel, OutOfRangeVertex, SelfLoop


class Graph:
    """Immutable labeled undirected graph without self-loops or multi-edges."""

    __slots__ = ("n", "indptr", "indices", "_vertex_labels", "_edge_labels", "_dense")

    def __init__(self, n, indptr, indices, vertex_labels=None, edge_labels=None):
        self.n = int(n)
        self.indptr = _frozen(indptr)
        self.indices = _frozen(indices)
        self._vertex_labels = None if vertex_labels is None else _frozen(vertex_labels)
        # aligned with ``indices``
        self._edge_labels = None if edge_labels is None else _frozen(edge_labels)
        self._dense = None

    # -- construction -----------------------------------------------------

    @classmethod
    def from_edge_list(cls, n, edges, vertex_labels=None, edge_labels=None):
        return from_edge_list(n, edges, vertex_labels, edge_labels)

    # -- basic queries ----------------------------------------------------

    @property
    def has_vertex_labels(self) -> bool:
        return self._vertex_labels is not None

    @property
    def has_edge_labels(self) -> bool:
        return self._edge_labels is not None

    @property
    def vertex_labels(self) -> np.ndarray:
        if self._vertex_labels is None:
            return np.zeros(self.n, dtype=np.int64)
        return self._vertex_labels

    @property
    def edge_label_array(self) -> np.ndarray:
        """Edge labels aligned with :attr:`indices` (zeros if unlabeled)."""
        if self._edge_labels is None:
            return np.zeros(len(self.indices), dtype=np.int64)
        return self._edge_labels

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def num_edges(self) -> int:
        return len(self.indices) // 2

    @property
    def adjacency(self) -> list[list[int]]:
        return [self.neighbors(v).tolist() for v in range(self.n)]

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.neighbors(u)
        i = np.searchsorted(nbrs, v)
        return bool(i < len(nbrs) and nbrs[i] == v)

    def edge_label(self, u: int, v: int) -> int:
        nbrs = self.neighbors(u)
        i = int(np.searchsorted(nbrs, v))
        if i >= len(nbrs) or nbrs[i] != v:
            raise KeyError((u, v))
        return int(self.edge_label_array[self.indptr[u] + i])

    def edges(self) -> list[tuple[int, int]]:
        """Undirected edges as ``(u, v)`` with ``u < v``, in sorted order."""
        out = []
        for u in range(self.n):
            for v in self.neighbors(u):
                if u < v:
                    out.append((u, int(v)))
        return out

    def dense(self) -> np.ndarray:
        """``n x n`` matrix: 0 for non-edges, ``edge_label + 1`` for edges."""
        if self._dense is None:
            m = np.zeros((self.n, self.n), dtype=np.int64)
            rows = np.repeat(np.arange(self.n), self.degrees)
            m[rows, self.indices] = self.edge_label_array + 1
            m.flags.writeable = False
            self._dense = m
        return self._dense

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = np.zeros(self.n, dtype=bool)
        seen[0] = True
        stack = [0]
        while stack:
            v = stack.pop()
            for u in self.neighbors(v):
                if not seen[u]:
                    seen[u] = True
                    stack.append(int(u))
        return bool(seen.all())

    def permuted(self, perm: Sequence[int]) -> "Graph":
        """Return the graph with vertex ``v`` renamed to ``perm[v]``."""
        perm = np.asarray(perm, dtype=np.int64)
        edges = [(int(perm[u]), int(perm[v])) for u, v in self.edges()]
        vl = None
        if self.has_vertex_labels:
            vl = np.empty(self.n, dtype=np.int64)
            vl[perm] = self._vertex_labels
        el = None
        if self.has_edge_labels:
            el = [self.edge_label(u, v) for u, v in self.edges()]
        return from_edge_list(self.n, edges, vl, el)

    def with_vertex_labels(self, labels) -> "Graph":
        return Graph(self.n, self.indptr, self.indices, np.asarray(labels, dtype=np.int64),
                     self._edge_labels)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices)
                and np.array_equal(self.vertex_labels, other.vertex_labels)
                and np.array_equal(self.edge_label_array, other.edge_label_array))

    def __hash__(self):
        return hash((self.n, self.indices.tobytes(), self.vertex_labels.tobytes()))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.num_edges})"


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=np.int64)
    a.flags.writeable = False
    return a


def from_edge_list(n: int, edges: Iterable[tuple[int, int]], vertex_labels=None,
                   edge_labels=None) -> Graph:
    """Build a :class:`Graph`; duplicate edges (in either direction) collapse.

    Raises :class:`OutOfRangeVertex`, :class:`SelfLoop` or, when a repeated
    edge carries two different labels, :class:`ConflictingEdgeLabel`.
    """
    n = int(n)
    edges = list(edges)
    if edge_labels is not None:
        edge_labels = list(edge_labels)
        if len(edge_labels) != len(edges):
            raise ValueError("edge_labels must align with edges")
    if vertex_labels is not None:
        vertex_labels = np.asarray(vertex_labels, dtype=np.int64)
        if vertex_labels.shape != (n,):
            raise ValueError(f"expected {n} vertex labels, got {vertex_labels.shape}")

    seen: dict[tuple[int, int], int] = {}
    for i, (u, v) in enumerate(edges):
        u, v = int(u), int(v)
        if not (0 <= u < n and 0 <= v < n):
            raise OutOfRangeVertex(f"edge ({u}, {v}) outside [0, {n})")
        if u == v:
            raise SelfLoop(f"self-loop at vertex {u}")
        key = (u, v) if u < v else (v, u)
        label = 0 if edge_labels is None else int(edge_labels[i])
        if key in seen and seen[key] != label:
            raise ConflictingEdgeLabel(f"edge {key} has labels {seen[key]} and {label}")
        seen[key] = label

    src, dst, lab = [], [], []
    for (u, v), label in seen.items():
        src += (u, v)
        dst += (v, u)
        lab += (label, label)
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    lab = np.asarray(lab, dtype=np.int64)
    order = np.lexsort((dst, src))
    src, dst, lab = src[order], dst[order], lab[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return Graph(n, indptr, dst, vertex_labels, None if edge_labels is None else lab)


# -- k-tuples ------------------------------------------------------------


@dataclass(frozen=True)
class TupleIndex:
    """A k-tuple of vertices packed into one integer in base ``n``."""

    value: int
    k: int
    n: int

    def __post_init__(self):
        if not 0 <= self.value < self.n ** self.k:
            raise ValueError(f"tuple index {self.value} outside [0, {self.n}^{self.k})")

    @classmethod
    def encode(cls, components: Sequence[int], n: int) -> "TupleIndex":
        value = 0
        for i, v in enumerate(components):
            if not 0 <= v < n:
                raise OutOfRangeVertex(f"vertex {v} outside [0, {n})")
            value += int(v) * n ** i
        return cls(value, len(components), n)

    def component(self, i: int) -> int:
        """Component at 1-based position ``i``."""
        return (self.value // self.n ** (i - 1)) % self.n

    def components(self) -> tuple[int, ...]:
        return tuple(self.component(i) for i in range(1, self.k + 1))

    def __iter__(self):
        return iter(self.components())


def phi(t: TupleIndex, j: int, w: int) -> TupleIndex:
    """Replace the component at 1-based position ``j`` with vertex ``w``."""
    if not 1 <= j <= t.k:
        raise ValueError(f"position {j} outside [1, {t.k}]")
    if not 0 <= w < t.n:
        raise OutOfRangeVertex(f"vertex {w} outside [0, {t.n})")
    step = t.n ** (j - 1)
    return TupleIndex(t.value + (w - t.component(j)) * step, t.k, t.n)


def tuple_components(n: int, k: int, start: int = 0, stop: int | None = None) -> list[np.ndarray]:
    """Components (0-based positions) of the tuple indices in ``[start, stop)``."""
    t = np.arange(start, n ** k if stop is None else stop, dtype=np.int64)
    return [(t // n ** j) % n for j in range(k)]


class Neighborhood(enum.Enum):
    LOCAL = "L"
    GLOBAL = "G"


def is_local_neighbor(g: Graph, t: TupleIndex, j: int, w: int) -> Neighborhood:
    """Whether ``phi(t, j, w)`` is a local (``w`` adjacent to ``v_j``) neighbor."""
    return Neighborhood.LOCAL if g.has_edge(t.component(j), w) else Neighborhood.GLOBAL


# -- atomic types ---------------------------------------------------------

_RADIX = 1 << 32


@dataclass(frozen=True)
class AtomicType:
    """Canonical code of the ordered labeled subgraph induced by a tuple."""

    code: int


def atomic_rows(g: Graph, k: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Atomic-type rows for tuples ``[start, stop)``.

    Row layout: ``k`` vertex labels followed by one entry per position pair
    ``i < j``: ``1`` if the components are equal, ``2 + edge_label`` if they
    are adjacent and ``0`` otherwise.
    """
    comps = tuple_components(g.n, k, start, stop)
    labels = g.vertex_labels
    dense = g.dense()
    cols = [labels[c] for c in comps]
    for i in range(k):
        for j in range(i + 1, k):
            a, b = comps[i], comps[j]
            e = dense[a, b]
            cols.append(np.where(a == b, 1, np.where(e > 0, e + 1, 0)))
    if not cols:
        return np.zeros((0, 0), dtype=np.int64)
    return np.stack(cols, axis=1).astype(np.int64)


def atomic_type(g: Graph, t: TupleIndex) -> AtomicType:
    row = atomic_rows(g, t.k, t.value, t.value + 1)[0]
    code = t.k
    for x in row:
        code = code * _RADIX + int(x)
    return AtomicType(code)


# -- small named graphs -------------------------------------------------------


def path_graph(n: int, vertex_labels=None) -> Graph:
    return from_edge_list(n, [(i, i + 1) for i in range(n - 1)], vertex_labels)


def cycle_graph(n: int, vertex_labels=None) -> Graph:
    return from_edge_list(n, [(i, (i + 1) % n) for i in range(n)], vertex_labels)


def complete_graph(n: int, vertex_labels=None) -> Graph:
    return from_edge_list(n, [(i, j) for i in range(n) for j in range(i + 1, n)], vertex_labels)


def star_graph(leaves: int) -> Graph:
    return from_edge_list(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def empty_graph(n: int) -> Graph:
    return from_edge_list(n, [])


def disjoint_union(*graphs: Graph) -> Graph:
    edges, vl, el = [], [], []
    offset = 0
    labeled = any(g.has_edge_labels for g in graphs)
    for g in graphs:
        for u, v in g.edges():
            edges.append((u + offset, v + offset))
            if labeled:
                el.append(g.edge_label(u, v))
        vl.extend(g.vertex_labels.tolist())
        offset += g.n
    has_vl = any(g.has_vertex_labels for g in graphs)
    return from_edge_list(offset, edges, vl if has_vl else None, el if labeled else None)


def random_connected_graph(n: int, mean_degree: float, rng: np.random.Generator,
                           num_labels: int = 0) -> Graph:
    """Random spanning tree plus uniformly chosen extra edges.

    The edge count is ``round(n * mean_degree / 2)`` (at least ``n - 1``).
    """
    m = max(n - 1, int(round(n * mean_degree / 2)))
    m = min(m, n * (n - 1) // 2)
    order = rng.permutation(n)
    edges = set()
    for i in range(1, n):
        u = int(order[i])
        v = int(order[rng.integers(0, i)])
        edges.add((min(u, v), max(u, v)))
    while len(edges) < m:
        u, v = (int(x) for x in rng.integers(0, n, size=2))
        if u != v:
            edges.add((min(u, v), max(u, v)))
    labels = None if num_labels <= 0 else rng.integers(0, num_labels, size=n)
    return from_edge_list(n, sorted(edges), labels)
