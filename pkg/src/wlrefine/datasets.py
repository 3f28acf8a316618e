"""Reader and writer for the TU benchmark dataset directory format.

A dataset ``NAME`` lives in one directory::

    NAME_A.txt               "u, v" per line, 1-based global vertex ids
    NAME_graph_indicator.txt one 1-based graph id per global vertex
    NAME_graph_labels.txt    one class label per graph
    NAME_node_labels.txt     optional, one label per global vertex
    NAME_edge_labels.txt     optional, one label per line of NAME_A.txt
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EdgeAcrossGraphs, IndicatorNotContiguous, MalformedLine, MissingFile
from .graph import Graph, from_edge_list

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DatasetStats:
    graphs: int
    classes: int
    mean_vertices: float
    mean_edges: float
    vertex_labels: bool
    valid: bool = True

    def row(self) -> str:
        return (f"{self.graphs}\t{self.classes}\t{self.mean_vertices:.1f}\t"
                f"{self.mean_edges:.1f}\t{'yes' if self.vertex_labels else 'no'}")


@dataclass
class Dataset:
    name: str
    graphs: list[Graph]
    class_labels: list[int]
    # original label value -> dense code
    node_label_map: dict[int, int] | None = None
    edge_label_map: dict[int, int] | None = None
    stats: DatasetStats | None = field(default=None)

    def __post_init__(self):
        if len(self.graphs) != len(self.class_labels):
            raise ValueError("one class label per graph required")
        if self.stats is None:
            self.stats = dataset_stats(self)

    def __len__(self):
        return len(self.graphs)


def dataset_stats(d: Dataset) -> DatasetStats:
    if not d.graphs:
        return DatasetStats(0, 0, 0.0, 0.0, False, valid=False)
    return DatasetStats(
        graphs=len(d.graphs),
        classes=len(set(d.class_labels)),
        mean_vertices=float(np.mean([g.n for g in d.graphs])),
        mean_edges=float(np.mean([g.num_edges for g in d.graphs])),
        vertex_labels=d.node_label_map is not None,
    )


def _read_ints(path: Path, width: int | None = None, first: bool = False) -> list[list[int]]:
    """Integer rows of a comma-separated file; with ``first`` only field one is parsed."""
    rows = []
    with path.open() as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                fields = line.split(",")
                row = [int(fields[0])] if first else [int(x) for x in fields]
            except ValueError:
                raise MalformedLine(path, lineno, f"expected integers, got {line!r}") from None
            if width is not None and len(row) != width:
                raise MalformedLine(path, lineno, f"expected {width} fields, got {len(row)}")
            rows.append(row)
    return rows


def _dense_codes(values) -> dict[int, int]:
    return {v: i for i, v in enumerate(sorted(set(values)))}


def load_tu_dataset(directory, name: str) -> Dataset:
    directory = Path(directory)

    def required(suffix: str) -> Path:
        path = directory / f"{name}_{suffix}.txt"
        if not path.is_file():
            raise MissingFile(f"missing {path}")
        return path

    def optional(suffix: str) -> Path | None:
        path = directory / f"{name}_{suffix}.txt"
        return path if path.is_file() else None

    edges = _read_ints(required("A"), 2)
    indicator = [r[0] for r in _read_ints(required("graph_indicator"), 1)]
    class_labels = [r[0] for r in _read_ints(required("graph_labels"), 1)]
    node_path, edge_path = optional("node_labels"), optional("edge_labels")
    # some corpora attach several values per vertex; the first is the discrete label
    node_labels = None if node_path is None else [r[0] for r in _read_ints(node_path, first=True)]
    edge_labels = None if edge_path is None else [r[0] for r in _read_ints(edge_path, first=True)]

    num_graphs = len(class_labels)
    if node_labels is not None and len(node_labels) != len(indicator):
        raise MalformedLine(node_path, len(node_labels), "node label count != vertex count")
    if edge_labels is not None and len(edge_labels) != len(edges):
        raise MalformedLine(edge_path, len(edge_labels), "edge label count != edge count")

    # vertices of graph g must form one contiguous run, graphs in order 1..N
    starts = [0] * (num_graphs + 1)
    prev = 0
    for v, gid in enumerate(indicator):
        if gid != prev:
            if gid != prev + 1 or gid > num_graphs:
                raise IndicatorNotContiguous(
                    f"vertex {v + 1} has graph id {gid} after graph {prev}")
            starts[gid - 1] = v
            prev = gid
    if prev != num_graphs:
        raise IndicatorNotContiguous(f"indicator ends at graph {prev}, labels list {num_graphs}")
    starts[num_graphs] = len(indicator)

    node_map = None if node_labels is None else _dense_codes(node_labels)
    edge_map = None if edge_labels is None else _dense_codes(edge_labels)

    per_graph_edges: list[list[tuple[int, int]]] = [[] for _ in range(num_graphs)]
    per_graph_elabels: list[list[int]] = [[] for _ in range(num_graphs)]
    directed = set()
    for lineno, (u, v) in enumerate(edges, 1):
        if not (1 <= u <= len(indicator) and 1 <= v <= len(indicator)):
            raise MalformedLine(directory / f"{name}_A.txt", lineno, f"vertex id out of range: {u}, {v}")
        gid = indicator[u - 1]
        if indicator[v - 1] != gid:
            raise EdgeAcrossGraphs(f"edge ({u}, {v}) joins graphs {gid} and {indicator[v - 1]}")
        base = starts[gid - 1]
        per_graph_edges[gid - 1].append((u - 1 - base, v - 1 - base))
        if edge_labels is not None:
            per_graph_elabels[gid - 1].append(edge_map[edge_labels[lineno - 1]])
        directed.add((u, v))
    one_way = sum(1 for u, v in directed if (v, u) not in directed)
    if one_way:
        log.warning("%s: %d edges listed in one direction only; symmetrized", name, one_way)

    graphs = []
    for gi in range(num_graphs):
        lo, hi = starts[gi], starts[gi + 1]
        vl = None
        if node_labels is not None:
            vl = [node_map[x] for x in node_labels[lo:hi]]
        el = per_graph_elabels[gi] if edge_labels is not None else None
        graphs.append(from_edge_list(hi - lo, per_graph_edges[gi], vl, el))
    return Dataset(name, graphs, class_labels, node_map, edge_map)


def write_tu_dataset(d: Dataset, directory, name: str | None = None) -> Path:
    """Write ``d`` in TU format, both directions per edge, original label values."""
    name = name or d.name
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    inv_node = None if d.node_label_map is None else {c: v for v, c in d.node_label_map.items()}
    inv_edge = None if d.edge_label_map is None else {c: v for v, c in d.edge_label_map.items()}
    a_lines, e_lines, ind_lines, n_lines = [], [], [], []
    offset = 0
    for gi, g in enumerate(d.graphs, 1):
        ind_lines.extend([f"{gi}\n"] * g.n)
        if inv_node is not None:
            n_lines.extend(f"{inv_node[int(x)]}\n" for x in g.vertex_labels)
        for u in range(g.n):
            for v in g.neighbors(u):
                a_lines.append(f"{u + 1 + offset}, {int(v) + 1 + offset}\n")
                if inv_edge is not None:
                    e_lines.append(f"{inv_edge[g.edge_label(u, int(v))]}\n")
        offset += g.n
    (directory / f"{name}_A.txt").write_text("".join(a_lines))
    (directory / f"{name}_graph_indicator.txt").write_text("".join(ind_lines))
    (directory / f"{name}_graph_labels.txt").write_text("".join(f"{c}\n" for c in d.class_labels))
    if inv_node is not None:
        (directory / f"{name}_node_labels.txt").write_text("".join(n_lines))
    if inv_edge is not None:
        (directory / f"{name}_edge_labels.txt").write_text("".join(e_lines))
    return directory
