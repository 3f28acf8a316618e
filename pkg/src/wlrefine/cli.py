"""Command line interface: ``wlrefine {colors,gram,bench,verify,stats}``.

Exit codes: 0 success, 1 verification failure, 2 bad configuration or
unreadable dataset, 3 color storage over the memory cap (reported as OOM).
"""
from __future__ import annotations

import argparse
import itertools
import logging
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .datasets import Dataset, load_tu_dataset
from .errors import DatasetError, MemoryBudgetExceeded
from .graph import random_connected_graph

log = logging.getLogger("wlrefine")

WL_KERNELS = ("wl1", "kwl", "dkwl", "dklwl")
BASELINES = ("graphlet3", "sp")
KERNELS = BASELINES + WL_KERNELS
EXIT_FAIL, EXIT_CONFIG, EXIT_OOM = 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    dataset: str | None = None
    name: str | None = None
    kernel: str = "dklwl"
    k: int = 2
    iterations: int | None = None
    normalize: bool = False
    output: str | None = None
    seed: int = 0
    memory_cap: int | None = None
    workers: int = 1
    random_graphs: int = 0
    random_n: int = 30
    random_degree: float = 3.0

    def validate(self) -> None:
        if self.kernel not in KERNELS:
            raise ConfigError(f"unknown kernel {self.kernel!r}; choose from {', '.join(KERNELS)}")
        if self.kernel in ("kwl", "dkwl", "dklwl") and self.k < 2:
            raise ConfigError(f"--k must be >= 2 for {self.kernel}")
        if self.iterations is not None and self.iterations < 0:
            raise ConfigError("--iterations must be >= 0")
        if self.workers < 1:
            raise ConfigError("--workers must be >= 1")
        if self.command in ("colors", "gram", "bench", "stats"):
            if self.random_graphs <= 0 and not (self.dataset and self.name):
                raise ConfigError("need --dataset DIR --name NAME or --random-graphs N")
        if self.command in ("colors", "gram") and not self.output:
            raise ConfigError("--output is required")


def load_input(cfg: RunConfig) -> Dataset:
    if cfg.random_graphs > 0:
        rng = np.random.default_rng(cfg.seed)
        graphs = [random_connected_graph(cfg.random_n, cfg.random_degree, rng)
                  for _ in range(cfg.random_graphs)]
        return Dataset(f"random-n{cfg.random_n}-d{cfg.random_degree:g}", graphs, [0] * len(graphs))
    return load_tu_dataset(cfg.dataset, cfg.name)


def _features(cfg: RunConfig, graphs, kernel: str, h: int):
    return kernels.dataset_features(graphs, kernel, k=cfg.k, h=h, workers=cfg.workers,
                                    memory_cap_bytes=cfg.memory_cap)


def cmd_colors(cfg: RunConfig) -> int:
    data = load_input(cfg)
    h = 3 if cfg.iterations is None else cfg.iterations
    feats, _ = _features(cfg, data.graphs, cfg.kernel, h)
    kernels.write_features(cfg.output, feats)
    print(f"wrote\t{cfg.output}\t{len(feats)} graphs")
    return 0


def _gram_paths(output: str, h: int | None, sweep: bool) -> Path:
    path = Path(output)
    if not sweep:
        return path
    return path.with_name(f"{path.stem}_h{h}{path.suffix or '.gram'}")


def cmd_gram(cfg: RunConfig) -> int:
    data = load_input(cfg)
    baseline = cfg.kernel in BASELINES
    sweep = cfg.iterations is None and not baseline
    heights = [None] if baseline else (range(6) if sweep else [cfg.iterations])
    for h in heights:
        start = time.perf_counter()
        feats, _ = _features(cfg, data.graphs, cfg.kernel, 0 if h is None else h)
        m = kernels.gram_matrix(feats)
        if cfg.normalize:
            m = kernels.normalize_gram(m)
        seconds = time.perf_counter() - start
        path = kernels.write_gram(_gram_paths(cfg.output, h, sweep), m, data.class_labels)
        print(f"gram\t{cfg.kernel}\tk={cfg.k}\th={h}\t{m.size}x{m.size}\t{path}")
        print(f"time\t{seconds:.3f}")
    return 0


def cmd_bench(cfg: RunConfig, kernel_names=None) -> int:
    data = load_input(cfg)
    h = 3 if cfg.iterations is None else cfg.iterations
    names = list(kernel_names or KERNELS)
    lines = ["kernel\tk\titerations\tseconds\tinspections"]
    # load the compiled dictionary kernels before any timed run
    kernels.dataset_features(data.graphs[:1], "wl1", h=1)
    results = {}
    for name in names:
        start = time.perf_counter()
        try:
            _, spent = _features(cfg, data.graphs, name, h)
        except MemoryBudgetExceeded:
            lines.append(f"{name}\t{cfg.k}\t{h}\tOOM\tOOM")
            continue
        seconds = time.perf_counter() - start
        results[name] = (seconds, spent)
        k = cfg.k if name in ("kwl", "dkwl", "dklwl") else "-"
        its = "-" if name in BASELINES else h
        lines.append(f"{name}\t{k}\t{its}\t{seconds:.3f}\t{spent}")
    if "dklwl" in results and "dkwl" in results:
        (t_local, c_local), (t_global, c_global) = results["dklwl"], results["dkwl"]
        time_ratio = t_global / t_local if t_local > 0 else float("inf")
        count_ratio = c_global / c_local if c_local > 0 else float("inf")
        lines.append(f"speedup dkwl/dklwl\ttime={time_ratio:.2f}\tinspections={count_ratio:.2f}")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if cfg.output:
        Path(cfg.output).parent.mkdir(parents=True, exist_ok=True)
        Path(cfg.output).write_text(text)
    return 0


def cmd_stats(cfg: RunConfig) -> int:
    data = load_input(cfg)
    print("dataset\tgraphs\tclasses\tmean_vertices\tmean_edges\tvertex_labels")
    print(f"{data.name}\t{data.stats.row()}")
    return 0 if data.stats.valid else EXIT_CONFIG


def cmd_verify(cfg: RunConfig, max_n: int = 6, labelings: int = 2, random_pairs: int = 500,
               random_n: int = 8, wlk_max_n: int = 5, ktrees_max_n: int = 4,
               trees_max_n: int = 8) -> int:
    from . import oracle

    rng = np.random.default_rng(cfg.seed)
    h = 3 if cfg.iterations is None else cfg.iterations
    reports = []

    unlabeled = oracle.connected_graphs_upto(max_n)
    labeled = oracle.random_labelings(unlabeled, 2, labelings, rng) if labelings else []
    for corpus, tag in ((unlabeled, "unlabeled"), (labeled, "2-labels")):
        if corpus:
            r = oracle.check_theorem_equivalence(oracle.all_pairs(corpus), cfg.k)
            r.name += f" {tag} n<={max_n}"
            reports.append(r)
    if random_pairs:
        pairs = [(random_connected_graph(random_n, 3, rng), random_connected_graph(random_n, 3, rng))
                 for _ in range(random_pairs)]
        r = oracle.check_theorem_equivalence(pairs, cfg.k)
        r.name += f" random n={random_n}"
        reports.append(r)

    wlk = oracle.CheckReport(f"lemma-wlk k={cfg.k} h={h} connected n<={wlk_max_n}")
    for g in oracle.connected_graphs_upto(wlk_max_n):
        r = oracle.check_lemma_wlk(g, cfg.k, h)
        wlk.checked += r.checked
        wlk.violations += r.violations
    reports.append(wlk)

    kt = oracle.CheckReport(f"lemma-ktrees k=2 depth<=2 n<={ktrees_max_n}")
    for n in range(1, ktrees_max_n + 1):
        for g in oracle.all_graphs(n):
            r = oracle.check_ktrees(g, 2, 2)
            kt.checked += r.checked
            kt.violations += r.violations
    reports.append(kt)

    trees = [t for n in range(1, trees_max_n + 1) for t in oracle.rooted_trees(n)]
    pairs = list(itertools.combinations_with_replacement(trees, 2))
    pairs += [(t, t.permuted([0] + [1 + int(x) for x in rng.permutation(t.n - 1)])) for t in trees]
    r = oracle.check_tree_iso_theorem(pairs)
    r.name += f" n<={trees_max_n}"
    reports.append(r)

    ok = True
    for r in reports:
        for line in r.lines():
            print(line)
        ok &= r.passed
    return 0 if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wlrefine", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, dataset=True):
        sp.add_argument("--k", type=int, default=2)
        sp.add_argument("--iterations", type=int, default=None)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--memory-cap", type=int, default=None,
                        help="bytes of color storage (env WLREFINE_MEMORY_CAP)")
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("-v", "--verbose", action="store_true")
        if dataset:
            sp.add_argument("--dataset", help="TU dataset directory")
            sp.add_argument("--name", help="TU dataset name")
            sp.add_argument("--random-graphs", type=int, default=0,
                            help="use N random connected graphs instead of a dataset")
            sp.add_argument("--random-n", type=int, default=30)
            sp.add_argument("--random-degree", type=float, default=3.0)

    for name in ("colors", "gram"):
        sp = sub.add_parser(name)
        common(sp)
        sp.add_argument("--kernel", default="dklwl", choices=KERNELS)
        sp.add_argument("--output", required=True)
        if name == "gram":
            sp.add_argument("--normalize", action="store_true")

    sp = sub.add_parser("bench")
    common(sp)
    sp.add_argument("--kernels", default=",".join(KERNELS))
    sp.add_argument("--output")

    sp = sub.add_parser("stats")
    common(sp)

    sp = sub.add_parser("verify")
    common(sp, dataset=False)
    sp.add_argument("--max-n", type=int, default=6)
    sp.add_argument("--labelings", type=int, default=2)
    sp.add_argument("--random-pairs", type=int, default=500)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = RunConfig(
        command=args.command,
        dataset=getattr(args, "dataset", None),
        name=getattr(args, "name", None),
        kernel=getattr(args, "kernel", "dklwl"),
        k=args.k,
        iterations=args.iterations,
        normalize=getattr(args, "normalize", False),
        output=getattr(args, "output", None),
        seed=args.seed,
        memory_cap=args.memory_cap,
        workers=args.workers,
        random_graphs=getattr(args, "random_graphs", 0),
        random_n=getattr(args, "random_n", 30),
        random_degree=getattr(args, "random_degree", 3.0),
    )
    try:
        if args.command == "bench":
            names = [x.strip() for x in args.kernels.split(",") if x.strip()]
            for name in names:
                RunConfig(**{**cfg.__dict__, "kernel": name}).validate()
            cfg.validate()
            return cmd_bench(cfg, names)
        cfg.validate()
        if args.command == "verify":
            return cmd_verify(cfg, max_n=args.max_n, labelings=args.labelings,
                              random_pairs=args.random_pairs)
        return {"colors": cmd_colors, "gram": cmd_gram, "stats": cmd_stats}[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MemoryBudgetExceeded as exc:
        print(f"OOM: {exc}", file=sys.stderr)
        return EXIT_OOM


if __name__ == "__main__":
    sys.exit(main())
