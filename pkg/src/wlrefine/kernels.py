"""Explicit-feature graph kernels and gram matrices.

WL-family feature vectors count colors over iterations ``0..h``. Because a
:class:`~wlrefine.refinement.ColorDictionary` never reuses an id across
iterations, one sparse histogram over all iterations is the same vector as
the per-iteration histograms concatenated.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import shortest_path

from .graph import Graph
from .refinement import Algorithm, ColorDictionary, refine_many

_INT64_MAX = np.iinfo(np.int64).max
# field width for packing baseline feature tuples into one integer
_FIELD = 1 << 20

PATH3 = 0
TRIANGLE = 1


class FeatureVector(dict):
    """Sparse ``feature code -> count`` map holding only positive counts."""

    @property
    def total(self) -> int:
        return sum(self.values())

    def dot(self, other: Mapping[int, int]) -> int:
        small, large = (self, other) if len(self) <= len(other) else (other, self)
        return sum(c * large.get(key, 0) for key, c in small.items())

    def dump(self) -> str:
        return " ".join(f"{key}:{count}" for key, count in sorted(self.items()))

    @classmethod
    def parse(cls, line: str) -> "FeatureVector":
        out = cls()
        for item in line.split():
            key, count = item.split(":")
            out[int(key)] = int(count)
        return out


def pack(*fields: int) -> int:
    code = 0
    for f in fields:
        if not 0 <= f < _FIELD:
            raise ValueError(f"feature field {f} outside [0, {_FIELD})")
        code = code * _FIELD + int(f)
    return code


def unpack(code: int, width: int) -> tuple[int, ...]:
    out = []
    for _ in range(width):
        code, f = divmod(code, _FIELD)
        out.append(f)
    return tuple(reversed(out))


def graphlet_code(kind: int, labels: Iterable[int]) -> int:
    a, b, c = sorted(labels)
    return pack(kind, a, b, c)


def sp_code(label_u: int, label_v: int, distance: int) -> int:
    return pack(min(label_u, label_v), max(label_u, label_v), distance)


# -- WL family ------------------------------------------------------------------


def _histogram(trace) -> FeatureVector:
    values, counts = np.unique(np.concatenate([c.colors for c in trace.colorings]),
                               return_counts=True)
    return FeatureVector(zip(values.tolist(), counts.tolist()))


def wl_feature_vectors(graphs: Sequence[Graph], algorithm, k: int, h: int,
                       dictionary: ColorDictionary | None = None, **kw):
    """Feature vectors for a dataset refined in lockstep with one dictionary.

    Returns ``(features, traces)``; the traces carry inspection counters.
    """
    traces = refine_many(graphs, algorithm, k, h, dictionary, until_stable=False, **kw)
    return [_histogram(t) for t in traces], traces


def wl_feature_vector(g: Graph, algorithm, k: int, h: int,
                      dictionary: ColorDictionary, **kw) -> FeatureVector:
    features, _ = wl_feature_vectors([g], algorithm, k, h, dictionary, **kw)
    return features[0]


# -- baselines --------------------------------------------------------------------


def graphlet3_features(g: Graph) -> FeatureVector:
    """Counts of connected induced 3-vertex subgraphs by shape and label multiset.

    Each connected triple is visited once: through its center ``v`` with
    ``u < w`` for paths, and through its smallest vertex for triangles.
    """
    labels = g.vertex_labels.tolist()
    adjacency = [set(nb) for nb in g.adjacency]
    out = FeatureVector()
    for v in range(g.n):
        nbrs = sorted(adjacency[v])
        for u, w in itertools.combinations(nbrs, 2):
            if w in adjacency[u]:
                if v < u:
                    code = graphlet_code(TRIANGLE, (labels[u], labels[v], labels[w]))
                    out[code] = out.get(code, 0) + 1
            else:
                code = graphlet_code(PATH3, (labels[u], labels[v], labels[w]))
                out[code] = out.get(code, 0) + 1
    return out


def shortest_path_features(g: Graph) -> FeatureVector:
    """Counts of ``(min label, max label, hop distance)`` over connected vertex pairs."""
    out = FeatureVector()
    if g.n < 2:
        return out
    adj = sp.csr_matrix((np.ones(len(g.indices)), g.indices, g.indptr), shape=(g.n, g.n))
    dist = shortest_path(adj, method="D", directed=False, unweighted=True)
    iu, ju = np.triu_indices(g.n, 1)
    d = dist[iu, ju]
    keep = np.isfinite(d)
    labels = g.vertex_labels
    a, b = labels[iu[keep]], labels[ju[keep]]
    rows = np.stack([np.minimum(a, b), np.maximum(a, b), d[keep].astype(np.int64)], axis=1)
    uniq, counts = np.unique(rows, axis=0, return_counts=True)
    for (lo, hi, dd), c in zip(uniq.tolist(), counts.tolist()):
        out[sp_code(lo, hi, dd)] = c
    return out


# -- gram matrices ------------------------------------------------------------------


@dataclass
class GramMatrix:
    values: np.ndarray
    ids: list
    normalized: bool = False

    @property
    def size(self) -> int:
        return self.values.shape[0]


def gram_matrix(features: Sequence[Mapping[int, int]], ids=None) -> GramMatrix:
    """Exact integer inner products of sparse feature vectors.

    Raises :class:`OverflowError` if an entry could exceed int64.
    """
    n = len(features)
    ids = list(range(n)) if ids is None else list(ids)
    # |<x, y>| <= max(|x|^2, |y|^2), computed exactly with Python ints
    largest = max((sum(c * c for c in f.values()) for f in features), default=0)
    if largest > _INT64_MAX:
        raise OverflowError(f"feature norm {largest} exceeds int64 range")
    columns = sorted({key for f in features for key in f})
    col = {key: i for i, key in enumerate(columns)}
    indptr = np.zeros(n + 1, dtype=np.int64)
    indices, data = [], []
    for i, f in enumerate(features):
        items = sorted(f.items())
        indices.extend(col[key] for key, _ in items)
        data.extend(c for _, c in items)
        indptr[i + 1] = len(indices)
    x = sp.csr_matrix((np.asarray(data, dtype=np.int64), np.asarray(indices, dtype=np.int64),
                       indptr), shape=(n, len(columns)))
    values = (x @ x.T).toarray().astype(np.int64)
    return GramMatrix(values, ids, normalized=False)


def normalize_gram(m: GramMatrix) -> GramMatrix:
    """``K_ij / sqrt(K_ii K_jj)``; rows with a zero diagonal become unit basis rows."""
    k = m.values.astype(np.float64)
    diag = np.diag(k).copy()
    denom = np.sqrt(np.outer(diag, diag))
    out = np.divide(k, denom, out=np.zeros_like(k), where=denom > 0)
    # exact symmetry; rounding may push collinear pairs a hair above 1
    out = np.minimum((out + out.T) / 2, 1.0)
    np.fill_diagonal(out, 1.0)
    return GramMatrix(out, list(m.ids), normalized=True)


def min_eigenvalue(m: GramMatrix) -> float:
    if m.size == 0:
        return 0.0
    return float(np.linalg.eigvalsh(m.values.astype(np.float64)).min())


# -- file formats -----------------------------------------------------------------


def format_gram(m: GramMatrix) -> str:
    lines = [str(m.size)]
    for row in m.values.tolist():
        if m.normalized:
            lines.append(" ".join(f"{v:.17g}" for v in row))
        else:
            lines.append(" ".join(str(int(v)) for v in row))
    return "\n".join(lines) + "\n"


def write_gram(path, m: GramMatrix, class_labels: Sequence[int] | None = None) -> Path:
    """Write the matrix and, if given, a ``.labels`` file next to it."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_gram(m))
    if class_labels is not None:
        labels_path(path).write_text("".join(f"{int(c)}\n" for c in class_labels))
    return path


def labels_path(path) -> Path:
    return Path(path).with_suffix(".labels")


def read_gram(path) -> np.ndarray:
    lines = Path(path).read_text().splitlines()
    n = int(lines[0])
    if len(lines) != n + 1:
        raise ValueError(f"{path}: expected {n} rows, found {len(lines) - 1}")
    rows = [[float(x) for x in line.split()] for line in lines[1:]]
    if any(len(r) != n for r in rows):
        raise ValueError(f"{path}: ragged row")
    return np.asarray(rows, dtype=np.float64).reshape(n, n)


def write_features(path, features: Sequence[FeatureVector]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(f.dump() + "\n" for f in features))
    return path


def read_features(path) -> list[FeatureVector]:
    return [FeatureVector.parse(line) for line in Path(path).read_text().splitlines()]


def baseline_features(graphs: Sequence[Graph], kernel: str) -> list[FeatureVector]:
    if kernel == "graphlet3":
        return [graphlet3_features(g) for g in graphs]
    if kernel == "sp":
        return [shortest_path_features(g) for g in graphs]
    raise ValueError(f"unknown baseline kernel {kernel!r}")


def dataset_features(graphs: Sequence[Graph], kernel: str, k: int = 2, h: int = 3, **kw):
    """Features for any supported kernel name; returns ``(features, inspections)``."""
    if kernel in ("graphlet3", "sp"):
        return baseline_features(graphs, kernel), 0
    algorithm = Algorithm.parse(kernel)
    feats, traces = wl_feature_vectors(graphs, algorithm, k, h, ColorDictionary(), **kw)
    return feats, sum(t.total_inspections for t in traces)


def is_psd(m: GramMatrix, tol: float = 1e-8) -> bool:
    return min_eigenvalue(m) >= -tol

