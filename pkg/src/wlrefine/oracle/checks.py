"""Executable checks of the equivalence results on small graphs.

Each check returns a :class:`CheckReport`; ``report.lines()`` renders the
line-oriented ``PASS``/``FAIL`` text used by ``wlrefine verify``.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ..graph import Graph
from ..refinement import (
    Algorithm,
    ColorDictionary,
    canonical_partition,
    delta_klwl_refine,
    delta_kwl_refine,
    distinguishes,
    stable_signatures,
)
from .corpora import RootedTree
from .isomorphism import brute_force_isomorphic
from .tuple_graph import build_tuple_graph, trees_isomorphic, unroll, wl1_star_refine


def serialize_graph(g: Graph) -> str:
    edges = " ".join(f"{u}-{v}" for u, v in g.edges())
    labels = ""
    if g.has_vertex_labels:
        labels = " labels=" + ",".join(str(x) for x in g.vertex_labels.tolist())
    return f"n={g.n} edges=[{edges}]{labels}"


@dataclass
class CheckReport:
    name: str
    checked: int = 0
    violations: list[str] = field(default_factory=list)
    skipped: int = 0

    @property
    def passed(self) -> bool:
        return not self.violations

    def fail(self, message: str) -> None:
        self.violations.append(message)

    def lines(self) -> list[str]:
        status = "PASS" if self.passed else "FAIL"
        out = [f"{status} {self.name} checked={self.checked} violations={len(self.violations)}"
               + (f" skipped={self.skipped}" if self.skipped else "")]
        out.extend(f"  counterexample: {v}" for v in self.violations)
        return out

    def __str__(self):
        return "\n".join(self.lines())


def _first_mismatch(p: np.ndarray, q: np.ndarray):
    """A pair of indices colored equal in one partition and different in the other."""
    for labels, other in ((p, q), (q, p)):
        seen = {}
        for idx, (a, b) in enumerate(zip(labels.tolist(), other.tolist())):
            if a in seen and other[seen[a]] != b:
                return seen[a], idx
            seen.setdefault(a, idx)
    return None


def check_lemma_wlk(g: Graph, k: int = 2, h: int = 3) -> CheckReport:
    """δ-k-WL (δ-k-LWL) partitions equal the witness-grouped 1-WL partition
    on the global (local) tuple graph at every iteration ``0..h``."""
    report = CheckReport(f"lemma-wlk k={k} h={h}")
    for local in (False, True):
        tg = build_tuple_graph(g, k, local_only=local)
        star = wl1_star_refine(tg, h)
        refine = delta_klwl_refine if local else delta_kwl_refine
        trace = refine(g, k, h, ColorDictionary(), until_stable=False)
        for i in range(h + 1):
            report.checked += 1
            p = canonical_partition(trace.colorings[i].colors)
            q = canonical_partition(star.colorings[i].colors)
            if not np.array_equal(p, q):
                pair = _first_mismatch(p, q)
                mode = "local" if local else "global"
                report.fail(f"{mode} iteration={i} tuples={pair} graph: {serialize_graph(g)}")
    return report


def check_ktrees(g: Graph, k: int = 2, max_depth: int = 2) -> CheckReport:
    """Equal colors after ``i`` iterations iff the depth-``i`` unrolled tuple
    trees are isomorphic (global trees for δ-k-WL, local for δ-k-LWL)."""
    report = CheckReport(f"lemma-ktrees k={k} depth<={max_depth}")
    for local in (False, True):
        tg = build_tuple_graph(g, k, local_only=local)
        refine = delta_klwl_refine if local else delta_kwl_refine
        trace = refine(g, k, max_depth, ColorDictionary(), until_stable=False)
        for i in range(max_depth + 1):
            colors = trace.colorings[i].colors
            trees = [unroll(tg, s, i) for s in range(tg.size)]
            for s, t in itertools.combinations(range(tg.size), 2):
                report.checked += 1
                same_color = colors[s] == colors[t]
                if same_color != trees_isomorphic(trees[s], trees[t]):
                    mode = "local" if local else "global"
                    report.fail(f"{mode} depth={i} tuples=({s},{t}) same_color={bool(same_color)} "
                                f"graph: {serialize_graph(g)}")
    return report


def _pair_verdicts(graphs: Sequence[Graph], pairs, k: int, pairwise: bool):
    algorithms = (Algorithm.KWL, Algorithm.DKWL, Algorithm.DKLWL)
    if pairwise:
        return {a: [distinguishes(graphs[i], graphs[j], a, k) for i, j in pairs]
                for a in algorithms}
    verdicts = {}
    for a in algorithms:
        # graphs of different order are always distinguished, so refining
        # each order separately keeps the lockstep runs small
        by_order = defaultdict(list)
        for idx, g in enumerate(graphs):
            by_order[g.n].append(idx)
        sig = [None] * len(graphs)
        for members in by_order.values():
            for idx, s in zip(members, stable_signatures([graphs[m] for m in members], a, k)):
                sig[idx] = (graphs[idx].n, s)
        verdicts[a] = [sig[i] != sig[j] for i, j in pairs]
    return verdicts


def check_theorem_equivalence(pairs: Iterable[tuple[Graph, Graph]], k: int = 2,
                              pairwise: bool = False) -> CheckReport:
    """Local and global δ-k-WL distinguish the same connected pairs, and
    k-WL ⇒ δ-k-WL ⇒ δ-k-LWL along the refinement chain.

    Pairs with a disconnected member are skipped. ``pairwise=True`` runs one
    parallel refinement per pair instead of corpus-wide stable signatures.
    """
    report = CheckReport(f"theorem-equivalence k={k}")
    index: dict[Graph, int] = {}
    graphs: list[Graph] = []
    idx_pairs = []
    for g, h in pairs:
        if not (g.is_connected() and h.is_connected()):
            report.skipped += 1
            continue
        ids = []
        for x in (g, h):
            if x not in index:
                index[x] = len(graphs)
                graphs.append(x)
            ids.append(index[x])
        idx_pairs.append(tuple(ids))

    verdict = _pair_verdicts(graphs, idx_pairs, k, pairwise)
    for p, (i, j) in enumerate(idx_pairs):
        report.checked += 1
        kwl, dkwl, dklwl = (verdict[a][p] for a in (Algorithm.KWL, Algorithm.DKWL, Algorithm.DKLWL))
        problems = []
        if dkwl != dklwl:
            problems.append(f"dkwl={dkwl} dklwl={dklwl}")
        if kwl and not dkwl:
            problems.append("kwl distinguishes but dkwl does not")
        if kwl and not dklwl:
            problems.append("kwl distinguishes but dklwl does not")
        if problems:
            report.fail("; ".join(problems) + f" | G: {serialize_graph(graphs[i])} "
                        f"| H: {serialize_graph(graphs[j])}")
    return report


def all_pairs(graphs: Sequence[Graph]) -> list[tuple[Graph, Graph]]:
    return list(itertools.combinations(graphs, 2))


def check_soundness(graphs: Sequence[Graph], k: int = 2) -> CheckReport:
    """No algorithm distinguishes a pair the brute-force oracle calls isomorphic."""
    report = CheckReport(f"soundness k={k}")
    rng = np.random.default_rng(0)
    for g in graphs:
        h = g.permuted(rng.permutation(g.n))
        for a in Algorithm:
            if a is Algorithm.WL1_STAR:
                continue
            report.checked += 1
            if brute_force_isomorphic(g, h) and distinguishes(g, h, a, k):
                report.fail(f"{a.value} separates isomorphic copies of {serialize_graph(g)}")
    return report


# -- directed trees ---------------------------------------------------------------


def directed_wl1_distinguishes(a: RootedTree, b: RootedTree) -> bool:
    """1-WL on directed labeled trees (children multisets), run in parallel."""
    table: dict = {}

    def compress(key):
        if key not in table:
            table[key] = len(table)
        return table[key]

    trees = (a, b)
    kids = [t.children() for t in trees]
    colors = [[compress(("init", t.label(v))) for v in range(t.n)] for t in trees]
    classes = len(set(colors[0]) | set(colors[1]))
    for i in itertools.count(1):
        colors = [[compress((i, c[v], tuple(sorted(c[u] for u in ch[v]))))
                   for v in range(len(c))] for c, ch in zip(colors, kids)]
        now = len(set(colors[0]) | set(colors[1]))
        if now == classes:
            break
        classes = now
    return sorted(colors[0]) != sorted(colors[1])


def check_tree_iso_theorem(pairs: Iterable[tuple[RootedTree, RootedTree]]) -> CheckReport:
    report = CheckReport("tree-isomorphism")
    for a, b in pairs:
        report.checked += 1
        iso = brute_force_isomorphic(a.as_marked_graph(), b.as_marked_graph())
        if directed_wl1_distinguishes(a, b) == iso:
            report.fail(f"parents {a.parent} vs {b.parent}: isomorphic={iso}")
    return report
