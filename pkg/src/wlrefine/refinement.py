"""Weisfeiler-Leman style color refinement: 1-WL, k-WL, δ-k-WL and δ-k-LWL.

Every iteration builds, for each tuple (vertex for 1-WL), a canonical integer
key ``[previous color, aggregate rows sorted lexicographically]`` and maps it
through a :class:`ColorDictionary`. The dictionary is exact (no hashing of
keys into fixed-width digests), so two tuples get the same color iff their
keys are equal, and colors are comparable across every graph refined with the
same dictionary.

Aggregate rows per witness vertex ``w``:

``kwl``
    ``(C(φ_1(t, w)), ..., C(φ_k(t, w)))`` for every ``w`` in ``V(G)``.
``dkwl``
    as ``kwl`` with each entry ``2 * C + flag``, ``flag = 1`` iff ``w`` is a
    neighbor of the replaced component.
``dklwl``
    ``(x_1, ..., x_k)`` with ``x_j = C(φ_j(t, w)) + 1`` if ``w`` is a neighbor
    of ``t_j`` and ``0`` otherwise; only witnesses adjacent to at least one
    component contribute a row.
"""
from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._keytable import KeyTable
from .errors import MemoryBudgetExceeded
from .graph import Graph, atomic_rows, tuple_components

DEFAULT_MEMORY_CAP = 2 << 30
MEMORY_CAP_ENV = "WLREFINE_MEMORY_CAP"
# upper bound on aggregate entries materialized at once
_CHUNK_ENTRIES = 1 << 21


class Algorithm(str, enum.Enum):
    WL1 = "wl1"
    KWL = "kwl"
    DKWL = "dkwl"
    DKLWL = "dklwl"
    WL1_STAR = "wl1*"

    @classmethod
    def parse(cls, value) -> "Algorithm":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


class ColorDictionary:
    """Injective, deterministic map from refinement keys to dense color ids.

    A key is a flat int64 sequence ``[previous color, aggregate rows...]``.
    Keys live in one table per iteration level and all levels draw from a
    single counter, so a color id identifies its iteration as well. Unseen
    keys take ids in order of first appearance.
    """

    def __init__(self):
        self._levels: list[KeyTable] = []
        self.next_id = 0
        self.algorithm: Algorithm | None = None
        self.k: int | None = None

    def bind(self, algorithm, k: int) -> None:
        algorithm = Algorithm.parse(algorithm)
        if self.algorithm is None:
            self.algorithm, self.k = algorithm, k
        elif (self.algorithm, self.k) != (algorithm, k):
            raise ValueError(
                f"dictionary bound to {self.algorithm.value} k={self.k}, "
                f"cannot reuse for {algorithm.value} k={k}")

    def __len__(self):
        return self.next_id

    def level_size(self, level: int) -> int:
        return len(self._levels[level]) if level < len(self._levels) else 0

    def assign(self, level: int, buf: np.ndarray, offsets: np.ndarray) -> np.ndarray:
        """Color ids for the keys ``buf[offsets[i]:offsets[i+1]]``."""
        while len(self._levels) <= level:
            self._levels.append(KeyTable())
        ids, self.next_id = self._levels[level].assign(buf, offsets, self.next_id)
        return ids

    def key_of(self, color: int) -> tuple[int, tuple[int, ...]] | None:
        for level, table in enumerate(self._levels):
            for key, c in table.items():
                if c == color:
                    return level, tuple(key.tolist())
        return None


@dataclass(frozen=True)
class Coloring:
    iteration: int
    colors: np.ndarray

    @property
    def class_count(self) -> int:
        return len(np.unique(self.colors))

    def partition(self) -> np.ndarray:
        return canonical_partition(self.colors)

    def histogram(self) -> dict[int, int]:
        values, counts = np.unique(self.colors, return_counts=True)
        return dict(zip(values.tolist(), counts.tolist()))


@dataclass
class RefinementTrace:
    algorithm: Algorithm
    k: int
    colorings: list[Coloring] = field(default_factory=list)
    stable_at: int | None = None
    # neighbor inspections spent to compute iteration i+1 from iteration i
    inspections: list[int] = field(default_factory=list)

    @property
    def final(self) -> Coloring:
        return self.colorings[-1]

    @property
    def iterations(self) -> int:
        return len(self.colorings) - 1

    def partition(self, i: int) -> np.ndarray:
        return self.colorings[i].partition()

    @property
    def total_inspections(self) -> int:
        return int(sum(self.inspections))


def canonical_partition(colors: np.ndarray) -> np.ndarray:
    """Relabel colors by order of first occurrence (partition fingerprint)."""
    _, first, inverse = np.unique(colors, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    return rank[inverse]


def memory_cap() -> int:
    value = os.environ.get(MEMORY_CAP_ENV)
    return int(value) if value else DEFAULT_MEMORY_CAP


def check_memory(g: Graph, k: int, cap: int | None = None) -> None:
    cap = memory_cap() if cap is None else cap
    need = g.n ** k * 8
    if need > cap:
        raise MemoryBudgetExceeded(
            f"{g.n}^{k} tuples need {need} bytes of color storage, cap is {cap}")


# -- aggregate construction ----------------------------------------------------


def _expand_csr(g: Graph, vertices: np.ndarray):
    """Neighbors of every vertex in ``vertices``, concatenated, and their owners."""
    deg = g.degrees[vertices]
    total = int(deg.sum())
    owner = np.repeat(np.arange(len(vertices), dtype=np.int64), deg)
    starts = np.repeat(g.indptr[vertices], deg)
    within = np.arange(total, dtype=np.int64) - np.repeat(np.cumsum(deg) - deg, deg)
    return g.indices[starts + within], owner


class _Aggregator:
    """Builds the aggregate rows of one algorithm for one graph."""

    def __init__(self, g: Graph, algorithm: Algorithm, k: int):
        self.g = g
        self.algorithm = algorithm
        self.k = k
        n = g.n
        self.size = n if algorithm is Algorithm.WL1 else n ** k
        if algorithm is Algorithm.WL1:
            self.width = 1
        else:
            self.width = k
        if algorithm in (Algorithm.KWL, Algorithm.DKWL):
            per_owner = max(1, n * k)
        elif algorithm is Algorithm.DKLWL:
            per_owner = max(1, k * int(g.degrees.max(initial=0)))
        else:
            per_owner = 1
        self.chunk = max(1, _CHUNK_ENTRIES // per_owner)
        self._local_layout: dict[tuple[int, int], tuple] = {}

    def initial_rows(self, lo: int, hi: int) -> np.ndarray:
        if self.algorithm is Algorithm.WL1:
            return self.g.vertex_labels[lo:hi, None]
        return atomic_rows(self.g, self.k, lo, hi)

    def rows(self, colors: np.ndarray, lo: int, hi: int):
        """Return ``(owner, rows, inspections)`` for owners ``[lo, hi)``.

        ``owner`` is relative to ``lo``.
        """
        g, k, n = self.g, self.k, self.g.n
        if self.algorithm is Algorithm.WL1:
            v = np.arange(lo, hi, dtype=np.int64)
            nbrs, owner = _expand_csr(g, v)
            return owner, colors[nbrs][:, None], len(nbrs)

        t = np.arange(lo, hi, dtype=np.int64)
        comps = tuple_components(n, k, lo, hi)
        if self.algorithm in (Algorithm.KWL, Algorithm.DKWL):
            w = np.arange(n, dtype=np.int64)
            adj = g.dense() > 0
            cols = []
            for j in range(k):
                nb = t[:, None] + (w[None, :] - comps[j][:, None]) * n ** j
                val = colors[nb]
                if self.algorithm is Algorithm.DKWL:
                    val = 2 * val + adj[comps[j][:, None], w[None, :]]
                cols.append(val.ravel())
            owner = np.repeat(np.arange(hi - lo, dtype=np.int64), n)
            return owner, np.stack(cols, axis=1), len(t) * k * n

        # δ-k-LWL: the witness grouping depends on the graph only, so it is
        # built once per chunk; it has one entry per inspected neighbor
        layout = self._local_layout.get((lo, hi))
        if layout is None:
            layout = self._local_layout[(lo, hi)] = self._build_local_layout(lo, hi)
        nb, slot, group, owner = layout
        rows = np.zeros((len(owner), k), dtype=np.int64)
        rows[group, slot] = colors[nb] + 1
        return owner, rows, len(nb)

    def _build_local_layout(self, lo: int, hi: int):
        g, k, n = self.g, self.k, self.g.n
        t = np.arange(lo, hi, dtype=np.int64)
        comps = tuple_components(n, k, lo, hi)
        owners, witnesses, slots, targets = [], [], [], []
        for j in range(k):
            nbrs, rel = _expand_csr(g, comps[j])
            owners.append(rel)
            witnesses.append(nbrs)
            slots.append(np.full(len(nbrs), j, dtype=np.int64))
            targets.append(t[rel] + (nbrs - comps[j][rel]) * n ** j)
        key = np.concatenate(owners) * n + np.concatenate(witnesses)
        # each position contributes a run sorted by (owner, witness), so a
        # stable sort is a k-way merge
        order = np.argsort(key, kind="stable")
        key = key[order]
        first = np.ones(len(key), dtype=bool)
        first[1:] = key[1:] != key[:-1]
        group = np.cumsum(first) - 1
        return (np.concatenate(targets)[order], np.concatenate(slots)[order], group,
                key[first] // n)


def _pack_keys(prev: np.ndarray, owner: np.ndarray, rows: np.ndarray, count: int):
    """Serialize ``[prev[t], sorted rows of t...]`` for each owner ``t``.

    ``owner`` must be non-decreasing.
    """
    m, width = rows.shape
    radix = int(rows.max(initial=0)) + 1
    if count * radix ** width < 1 << 62:
        packed = owner.copy()
        for c in range(width):
            packed *= radix
            packed += rows[:, c]
        order = np.argsort(packed)
    else:
        keys = [rows[:, c] for c in range(width - 1, -1, -1)]
        order = np.lexsort(keys + [owner])
    # owner is the primary sort key, so sorting leaves it unchanged
    rows = rows[order]
    before = np.zeros(count + 1, dtype=np.int64)
    np.cumsum(np.bincount(owner, minlength=count), out=before[1:])
    # owner t starts after t headers and before[t] rows
    offsets = np.arange(count + 1, dtype=np.int64) + before * width
    flat = np.empty(int(offsets[-1]), dtype=np.int64)
    flat[offsets[:-1]] = prev
    pos = np.arange(m, dtype=np.int64) * width + owner + 1
    flat[pos[:, None] + np.arange(width)] = rows
    return flat, offsets


def _unique_rows(rows: np.ndarray):
    """``np.unique(rows, axis=0, return_inverse=True)`` via one packed column if it fits."""
    rows = np.asarray(rows, dtype=np.int64).reshape(len(rows), -1)
    lo = rows.min(axis=0, initial=0)
    span = rows.max(axis=0, initial=0) - lo + 1
    if len(rows) == 0 or rows.min() < 0 or float(np.prod(span.astype(float))) >= 2.0 ** 62:
        uniq, inverse = np.unique(rows, axis=0, return_inverse=True)
        return uniq, inverse.ravel()
    packed = np.zeros(len(rows), dtype=np.int64)
    for c in range(rows.shape[1]):
        packed *= span[c]
        packed += rows[:, c] - lo[c]
    _, first, inverse = np.unique(packed, return_index=True, return_inverse=True)
    return rows[first], inverse


def _pack_rows(rows: np.ndarray):
    rows = np.ascontiguousarray(rows, dtype=np.int64)
    width = rows.shape[1] if rows.ndim == 2 else 1
    return rows.ravel(), np.arange(rows.shape[0] + 1, dtype=np.int64) * width


# -- lockstep driver --------------------------------------------------------------


class _Run:
    """Refinement state of one graph inside a (possibly multi-graph) run."""

    def __init__(self, g: Graph, algorithm: Algorithm, k: int):
        self.agg = _Aggregator(g, algorithm, k)
        self.trace = RefinementTrace(algorithm, k)

    def _chunks(self):
        size, step = self.agg.size, self.agg.chunk
        return [(lo, min(size, lo + step)) for lo in range(0, size, step)] or [(0, 0)]

    def initial(self, dictionary: ColorDictionary):
        parts = []
        for lo, hi in self._chunks():
            rows = self.agg.initial_rows(lo, hi)
            uniq, inverse = _unique_rows(rows)
            ids = dictionary.assign(0, *_pack_rows(uniq))
            parts.append(ids[inverse.ravel()])
        colors = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
        self.trace.colorings.append(Coloring(0, colors))

    def step(self, dictionary: ColorDictionary, pool: ThreadPoolExecutor | None):
        prev = self.trace.final.colors
        level = self.trace.final.iteration + 1

        def build(bounds):
            lo, hi = bounds
            owner, rows, spent = self.agg.rows(prev, lo, hi)
            return _pack_keys(prev[lo:hi], owner, rows, hi - lo), spent

        chunks = self._chunks()
        built = pool.map(build, chunks) if pool is not None else map(build, chunks)
        parts, spent = [], 0
        for (buf, offsets), cost in built:
            parts.append(dictionary.assign(level, buf, offsets))
            spent += cost
        colors = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
        self.trace.colorings.append(Coloring(level, colors))
        self.trace.inspections.append(spent)


def _same_partition(prev: list[np.ndarray], new: list[np.ndarray]) -> bool:
    a = np.concatenate(prev)
    b = np.concatenate(new)
    if len(a) == 0:
        return True
    na = len(np.unique(a))
    nb = len(np.unique(b))
    if na != nb:
        return False
    pairs = len(_unique_rows(np.stack([a, b], axis=1))[0])
    return pairs == na == nb


def refine_many(graphs: Sequence[Graph], algorithm, k: int, h: int | None,
                dictionary: ColorDictionary | None = None, *, until_stable: bool = True,
                workers: int = 1, memory_cap_bytes: int | None = None) -> list[RefinementTrace]:
    """Refine several graphs in lockstep with one shared dictionary.

    Iteration ``i`` is computed for every graph before iteration ``i + 1`` of
    any graph. With ``until_stable`` the run stops at the first iteration that
    leaves the partition of the union of all tuple sets unchanged (or after
    ``h`` iterations, ``h=None`` meaning no limit); without it exactly ``h``
    iterations are computed. ``stable_at`` is set on every trace once the
    union partition is observed to be stable.
    """
    algorithm = Algorithm.parse(algorithm)
    if algorithm is Algorithm.WL1:
        k = 1
    elif algorithm is Algorithm.WL1_STAR:
        raise ValueError("wl1* runs on tuple graphs, see wlrefine.oracle")
    elif k < 2:
        raise ValueError(f"{algorithm.value} needs k >= 2, got {k}")
    if h is not None and h < 0:
        raise ValueError("h must be >= 0")
    if h is None and not until_stable:
        raise ValueError("unbounded refinement needs until_stable")
    dictionary = ColorDictionary() if dictionary is None else dictionary
    dictionary.bind(algorithm, k)
    for g in graphs:
        check_memory(g, k, memory_cap_bytes)

    runs = [_Run(g, algorithm, k) for g in graphs]
    for run in runs:
        run.initial(dictionary)

    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        i = 0
        stable = None
        while h is None or i < h:
            for run in runs:
                run.step(dictionary, pool)
            if stable is None and _same_partition(
                    [r.trace.colorings[i].colors for r in runs],
                    [r.trace.colorings[i + 1].colors for r in runs]):
                stable = i
                if until_stable:
                    break
            i += 1
    finally:
        if pool is not None:
            pool.shutdown()
    for run in runs:
        run.trace.stable_at = stable
    return [run.trace for run in runs]


def _refine(g, algorithm, k, h, dictionary, until_stable=True, **kw):
    return refine_many([g], algorithm, k, h, dictionary, until_stable=until_stable, **kw)[0]


def wl1_refine(g: Graph, h: int, dictionary: ColorDictionary | None = None, *,
               until_stable: bool = True, **kw) -> RefinementTrace:
    """1-WL: key of ``v`` is ``(C(v), {{C(w) : w in δ(v)}})``."""
    return _refine(g, Algorithm.WL1, 1, h, dictionary, until_stable, **kw)


def kwl_refine(g: Graph, k: int, h: int, dictionary: ColorDictionary | None = None, *,
               until_stable: bool = True, **kw) -> RefinementTrace:
    return _refine(g, Algorithm.KWL, k, h, dictionary, until_stable, **kw)


def delta_kwl_refine(g: Graph, k: int, h: int, dictionary: ColorDictionary | None = None, *,
                     until_stable: bool = True, **kw) -> RefinementTrace:
    return _refine(g, Algorithm.DKWL, k, h, dictionary, until_stable, **kw)


def delta_klwl_refine(g: Graph, k: int, h: int, dictionary: ColorDictionary | None = None, *,
                      until_stable: bool = True, **kw) -> RefinementTrace:
    """Local δ-k-WL; per iteration it inspects ``sum_t sum_j deg(t_j)`` neighbors."""
    return _refine(g, Algorithm.DKLWL, k, h, dictionary, until_stable, **kw)


def refine_to_stable(g: Graph, algorithm, k: int = 2,
                     dictionary: ColorDictionary | None = None, **kw) -> RefinementTrace:
    return _refine(g, algorithm, k, None, dictionary, True, **kw)


def histogram_signature(trace: RefinementTrace) -> tuple[tuple[int, int], ...]:
    return tuple(sorted(trace.final.histogram().items()))


def distinguishes(g: Graph, h: Graph, algorithm, k: int = 2, **kw) -> bool:
    """Parallel run on ``g`` and ``h``; True iff stable color histograms differ."""
    tg, th = refine_many([g, h], algorithm, k, None, ColorDictionary(), **kw)
    return histogram_signature(tg) != histogram_signature(th)


def stable_signatures(graphs: Sequence[Graph], algorithm, k: int = 2, **kw) -> list[tuple]:
    """Histogram signatures of a whole corpus refined in lockstep to stability.

    ``distinguishes(a, b)`` equals ``signature[a] != signature[b]`` for every
    pair in the corpus, because refinement past the pair's own stable
    iteration only renames its colors injectively.
    """
    traces = refine_many(graphs, algorithm, k, None, ColorDictionary(), **kw)
    return [histogram_signature(t) for t in traces]


def expected_inspections(g: Graph, algorithm, k: int) -> int:
    """Per-iteration neighbor inspections predicted from the graph alone."""
    algorithm = Algorithm.parse(algorithm)
    n = g.n
    if algorithm is Algorithm.WL1:
        return int(g.degrees.sum())
    if algorithm in (Algorithm.KWL, Algorithm.DKWL):
        return n ** k * k * n
    # every vertex appears n^(k-1) times at each position
    return k * n ** (k - 1) * int(g.degrees.sum())
