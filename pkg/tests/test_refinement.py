import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wlrefine import refinement
from wlrefine.errors import MemoryBudgetExceeded
from wlrefine.graph import (
    TupleIndex,
    atomic_type,
    complete_graph,
    cycle_graph,
    disjoint_union,
    path_graph,
    phi,
    random_connected_graph,
    star_graph,
)
from wlrefine.refinement import (
    Algorithm,
    ColorDictionary,
    canonical_partition,
    delta_klwl_refine,
    delta_kwl_refine,
    distinguishes,
    expected_inspections,
    kwl_refine,
    refine_many,
    refine_to_stable,
    wl1_refine,
)

from conftest import graphs

TUPLE_ALGORITHMS = (Algorithm.KWL, Algorithm.DKWL, Algorithm.DKLWL)


def reference_refine(g, algorithm, k, h):
    """Slow textbook refinement with tuple keys; returns one partition per iteration."""
    if algorithm is Algorithm.WL1:
        colors = [int(x) for x in g.vertex_labels]
        size = g.n
    else:
        size = g.n ** k
        colors = [atomic_type(g, TupleIndex(t, k, g.n)).code for t in range(size)]
    out = [canonical_partition(np.array(colors))]
    for _ in range(h):
        keys = []
        for t in range(size):
            if algorithm is Algorithm.WL1:
                agg = sorted(colors[w] for w in g.neighbors(t))
            else:
                tt = TupleIndex(t, k, g.n)
                comps = tt.components()
                agg = []
                for w in range(g.n):
                    nbr = [colors[phi(tt, j, w).value] for j in range(1, k + 1)]
                    adj = [g.has_edge(comps[j - 1], w) for j in range(1, k + 1)]
                    if algorithm is Algorithm.KWL:
                        agg.append(tuple(nbr))
                    elif algorithm is Algorithm.DKWL:
                        agg.append(tuple(zip(nbr, adj)))
                    else:
                        s = tuple(sorted({(c, j) for j, (c, a) in enumerate(zip(nbr, adj)) if a}))
                        if s:
                            agg.append(s)
                agg.sort()
            keys.append((colors[t], tuple(agg)))
        table = {key: i for i, key in enumerate(sorted(set(keys)))}
        colors = [table[key] for key in keys]
        out.append(canonical_partition(np.array(colors)))
    return out


def partitions(trace):
    return [canonical_partition(c.colors) for c in trace.colorings]


class TestAgainstReference:
    @settings(max_examples=40, deadline=None)
    @given(graphs(max_n=5, labels=2, edge_labels=2), st.sampled_from(list(TUPLE_ALGORITHMS)))
    def test_tuple_algorithms_k2(self, g, algorithm):
        trace = refine_many([g], algorithm, 2, 3, until_stable=False)[0]
        expected = reference_refine(g, algorithm, 2, 3)
        for got, want in zip(partitions(trace), expected):
            assert np.array_equal(got, want)

    @settings(max_examples=10, deadline=None)
    @given(graphs(max_n=4, labels=2), st.sampled_from(list(TUPLE_ALGORITHMS)))
    def test_tuple_algorithms_k3(self, g, algorithm):
        trace = refine_many([g], algorithm, 3, 2, until_stable=False)[0]
        for got, want in zip(partitions(trace), reference_refine(g, algorithm, 3, 2)):
            assert np.array_equal(got, want)

    @settings(max_examples=40, deadline=None)
    @given(graphs(max_n=8, labels=3))
    def test_wl1(self, g):
        trace = wl1_refine(g, 4, until_stable=False)
        for got, want in zip(partitions(trace), reference_refine(g, Algorithm.WL1, 1, 4)):
            assert np.array_equal(got, want)

    def test_chunked_matches_unchunked(self, monkeypatch, rng):
        gs = [random_connected_graph(7, 2.5, rng, num_labels=2) for _ in range(3)]
        for algorithm in TUPLE_ALGORITHMS:
            whole = refine_many(gs, algorithm, 2, 3, until_stable=False)
            monkeypatch.setattr(refinement, "_CHUNK_ENTRIES", 50)
            parts = refine_many(gs, algorithm, 2, 3, until_stable=False)
            monkeypatch.undo()
            # ids may differ with chunking; the joint partition may not
            for i in range(4):
                a = np.concatenate([t.colorings[i].colors for t in whole])
                b = np.concatenate([t.colorings[i].colors for t in parts])
                assert np.array_equal(canonical_partition(a), canonical_partition(b))


class TestExamples:
    def test_c6_uniform(self):
        trace = refine_to_stable(cycle_graph(6), "wl1")
        assert all(c.class_count == 1 for c in trace.colorings)
        assert trace.stable_at == 0

    def test_p3(self):
        trace = refine_to_stable(path_graph(3), "wl1")
        assert trace.colorings[1].class_count == 2
        assert trace.stable_at == 1
        p = trace.colorings[1].partition()
        assert p[0] == p[2] != p[1]

    def test_star(self):
        assert wl1_refine(star_graph(3), 1).colorings[1].class_count == 2

    def test_k3_kwl(self):
        trace = refine_to_stable(complete_graph(3), "kwl", 2)
        p = trace.colorings[0].partition().reshape(3, 3)
        assert trace.stable_at == 0
        assert len(np.unique(p)) == 2
        assert len({p[i, i] for i in range(3)}) == 1

    def test_k3_delta_variants_agree(self):
        k3 = complete_graph(3)
        base = partitions(refine_to_stable(k3, "kwl", 2))[-1]
        for algorithm in ("dkwl", "dklwl"):
            assert np.array_equal(partitions(refine_to_stable(k3, algorithm, 2))[-1], base)

    @pytest.mark.parametrize("algorithm", ["kwl", "dkwl", "dklwl"])
    def test_h0_is_atomic_partition(self, algorithm):
        g = path_graph(4, [0, 1, 1, 0])
        trace = refine_many([g], algorithm, 2, 0)[0]
        codes = np.array([atomic_type(g, TupleIndex(t, 2, 4)).code for t in range(16)])
        assert np.array_equal(trace.final.partition(), canonical_partition(codes))

    def test_c6_within_cardinality_bound(self):
        trace = refine_to_stable(cycle_graph(6), "kwl", 2)
        assert trace.stable_at is not None and trace.stable_at <= 36

    def test_c6_vs_two_triangles(self):
        c6, two_c3 = cycle_graph(6), disjoint_union(complete_graph(3), complete_graph(3))
        assert not distinguishes(c6, two_c3, "wl1")
        assert distinguishes(c6, two_c3, "kwl", 2)
        assert distinguishes(c6, two_c3, "dkwl", 2)

    @pytest.mark.parametrize("algorithm", ["wl1", "kwl", "dkwl", "dklwl"])
    def test_self_not_distinguished(self, algorithm):
        g = path_graph(4)
        assert not distinguishes(g, g, algorithm, 2)


class TestProperties:
    @settings(max_examples=30, deadline=None)
    @given(graphs(max_n=5, labels=2), st.sampled_from(list(Algorithm)[:4]))
    def test_monotone_and_stable(self, g, algorithm):
        trace = refine_to_stable(g, algorithm, 2)
        counts = [c.class_count for c in trace.colorings]
        assert counts == sorted(counts)
        for prev, new in zip(trace.colorings, trace.colorings[1:]):
            # equal at i + 1 implies equal at i
            pairs = set(zip(new.colors.tolist(), prev.colors.tolist()))
            assert len(pairs) == len(set(new.colors.tolist()))
        i = trace.stable_at
        assert np.array_equal(trace.partition(i), trace.partition(i + 1))

    @settings(max_examples=30, deadline=None)
    @given(graphs(max_n=5, labels=2, edge_labels=2), st.sampled_from(list(Algorithm)[:4]),
           st.data())
    def test_permutation_invariant_histograms(self, g, algorithm, data):
        perm = data.draw(st.permutations(list(range(g.n))))
        d = ColorDictionary()
        a, b = refine_many([g, g.permuted(perm)], algorithm, 2, 3, d, until_stable=False)
        for ca, cb in zip(a.colorings, b.colorings):
            assert ca.histogram() == cb.histogram()

    @settings(max_examples=20, deadline=None)
    @given(graphs(max_n=5, labels=2))
    def test_delta_refines_kwl(self, g):
        kw = refine_many([g], "kwl", 2, 3, until_stable=False)[0]
        dk = refine_many([g], "dkwl", 2, 3, until_stable=False)[0]
        for a, b in zip(kw.colorings, dk.colorings):
            pairs = set(zip(b.colors.tolist(), a.colors.tolist()))
            assert len(pairs) == len(set(b.colors.tolist()))

    def test_deterministic(self, rng):
        g = random_connected_graph(9, 3, rng, num_labels=2)
        for algorithm in ("wl1", "kwl", "dkwl", "dklwl"):
            a = refine_to_stable(g, algorithm, 2)
            b = refine_to_stable(g, algorithm, 2)
            for ca, cb in zip(a.colorings, b.colorings):
                assert np.array_equal(ca.colors, cb.colors)

    def test_workers_do_not_change_results(self, monkeypatch, rng):
        monkeypatch.setattr(refinement, "_CHUNK_ENTRIES", 200)
        gs = [random_connected_graph(8, 3, rng) for _ in range(4)]
        for algorithm in TUPLE_ALGORITHMS:
            one = refine_many(gs, algorithm, 2, 3, until_stable=False)
            many = refine_many(gs, algorithm, 2, 3, until_stable=False, workers=3)
            for a, b in zip(one, many):
                assert a.inspections == b.inspections
                for ca, cb in zip(a.colorings, b.colorings):
                    assert np.array_equal(ca.colors, cb.colors)

    def test_ids_unique_across_iterations(self, rng):
        g = random_connected_graph(8, 3, rng)
        trace = refine_many([g], "dklwl", 2, 3, until_stable=False)[0]
        seen = [set(c.colors.tolist()) for c in trace.colorings]
        for i in range(len(seen)):
            for j in range(i + 1, len(seen)):
                assert not seen[i] & seen[j]


class TestCosts:
    @settings(max_examples=25, deadline=None)
    @given(graphs(max_n=6), st.sampled_from(list(Algorithm)[:4]))
    def test_counter_matches_formula(self, g, algorithm):
        trace = refine_many([g], algorithm, 2, 2, until_stable=False)[0]
        k = 1 if algorithm is Algorithm.WL1 else 2
        assert trace.inspections == [expected_inspections(g, algorithm, k)] * 2

    def test_local_counter_bound(self, rng):
        g = random_connected_graph(10, 3, rng)
        trace = delta_klwl_refine(g, 2, 1, until_stable=False)
        assert trace.inspections[0] == sum(
            g.degree(t % 10) + g.degree(t // 10) for t in range(100))
        assert trace.inspections[0] <= 100 * 2 * int(g.degrees.max())

    def test_complete_graph_local_equals_global_order(self):
        g = complete_graph(6)
        local = expected_inspections(g, "dklwl", 2)
        glob = expected_inspections(g, "dkwl", 2)
        assert glob / local == pytest.approx(6 / 5)


class TestErrors:
    def test_memory_cap(self):
        with pytest.raises(MemoryBudgetExceeded):
            kwl_refine(path_graph(10), 3, 1, memory_cap_bytes=1000)

    def test_memory_cap_env(self, monkeypatch):
        monkeypatch.setenv("WLREFINE_MEMORY_CAP", "100")
        with pytest.raises(MemoryBudgetExceeded):
            delta_kwl_refine(path_graph(5), 2, 1)

    def test_dictionary_bound_to_algorithm(self):
        d = ColorDictionary()
        kwl_refine(path_graph(3), 2, 1, d)
        with pytest.raises(ValueError):
            delta_kwl_refine(path_graph(3), 2, 1, d)
        with pytest.raises(ValueError):
            kwl_refine(path_graph(3), 3, 1, d)

    def test_k_must_be_two_or_more(self):
        with pytest.raises(ValueError):
            refine_many([path_graph(3)], "kwl", 1, 1)

    def test_negative_h(self):
        with pytest.raises(ValueError):
            wl1_refine(path_graph(3), -1)


class TestColorDictionary:
    def test_injective_and_stable(self):
        d = ColorDictionary()
        buf = np.array([1, 2, 3, 1, 2, 1, 2, 3, 7], dtype=np.int64)
        offsets = np.array([0, 3, 5, 8, 9])
        ids = d.assign(0, buf, offsets).tolist()
        assert ids[0] == ids[2]
        assert len({ids[0], ids[1], ids[3]}) == 3
        again = d.assign(0, buf, offsets).tolist()
        assert again == ids
        assert len(d) == 3

    def test_levels_never_share_ids(self):
        d = ColorDictionary()
        buf = np.array([5, 5], dtype=np.int64)
        a = d.assign(0, buf, np.array([0, 2]))
        b = d.assign(1, buf, np.array([0, 2]))
        assert a[0] != b[0]
        assert d.key_of(int(b[0])) == (1, (5, 5))

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.lists(st.integers(0, 4), max_size=4), max_size=60))
    def test_matches_python_dict(self, keys):
        d = ColorDictionary()
        buf = np.array([x for key in keys for x in key], dtype=np.int64)
        offsets = np.cumsum([0] + [len(key) for key in keys])
        ids = d.assign(0, buf, offsets).tolist()
        first = {}
        for key, i in zip(map(tuple, keys), ids):
            assert first.setdefault(key, i) == i
        assert len(set(ids)) == len(first)
        assert sorted(set(ids)) == list(range(len(first)))
