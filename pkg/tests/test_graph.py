import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wlrefine.errors import ConflictingEdgeLabel, OutOfRangeVertex, SelfLoop
from wlrefine.graph import (
    Neighborhood,
    TupleIndex,
    atomic_type,
    complete_graph,
    cycle_graph,
    disjoint_union,
    from_edge_list,
    is_local_neighbor,
    path_graph,
    phi,
    random_connected_graph,
    tuple_components,
)

from conftest import graphs


def ordered_subgraph_iso(g, s, t):
    """Oracle: does v_i -> w_i preserve equality, labels, edges and edge labels?"""
    labels = g.vertex_labels
    for i in range(len(s)):
        if labels[s[i]] != labels[t[i]]:
            return False
        for j in range(len(s)):
            if (s[i] == s[j]) != (t[i] == t[j]):
                return False
            if g.has_edge(s[i], s[j]) != g.has_edge(t[i], t[j]):
                return False
            if g.has_edge(s[i], s[j]) and g.edge_label(s[i], s[j]) != g.edge_label(t[i], t[j]):
                return False
    return True


def assert_well_formed(g):
    adj = g.adjacency
    for v, nbrs in enumerate(adj):
        assert v not in nbrs
        assert nbrs == sorted(set(nbrs))
        for u in nbrs:
            assert v in adj[u]
            assert g.edge_label(u, v) == g.edge_label(v, u)


class TestConstruction:
    def test_path(self):
        g = from_edge_list(3, [(0, 1), (1, 2)])
        assert g.degrees.tolist() == [1, 2, 1]
        assert g.adjacency == [[1], [0, 2], [1]]

    def test_single_vertex(self):
        g = from_edge_list(1, [])
        assert g.adjacency == [[]]
        assert g.num_edges == 0

    def test_cycle(self):
        assert cycle_graph(6).degrees.tolist() == [2] * 6

    def test_duplicates_collapse(self):
        g = from_edge_list(3, [(0, 1), (1, 0), (0, 1)])
        assert g.num_edges == 1

    def test_conflicting_labels(self):
        with pytest.raises(ConflictingEdgeLabel):
            from_edge_list(2, [(0, 1), (1, 0)], edge_labels=[1, 2])

    def test_same_label_duplicate_is_fine(self):
        g = from_edge_list(2, [(0, 1), (1, 0)], edge_labels=[4, 4])
        assert g.edge_label(1, 0) == 4

    def test_out_of_range(self):
        with pytest.raises(OutOfRangeVertex):
            from_edge_list(2, [(0, 2)])

    def test_self_loop(self):
        with pytest.raises(SelfLoop):
            from_edge_list(3, [(1, 1)])

    def test_disjoint_union(self):
        g = disjoint_union(cycle_graph(3), cycle_graph(3))
        assert g.n == 6 and g.num_edges == 6 and not g.is_connected()

    @given(graphs(max_n=7, labels=2, edge_labels=2))
    def test_invariants(self, g):
        assert_well_formed(g)

    def test_random_connected(self, rng):
        for _ in range(20):
            g = random_connected_graph(12, 3, rng)
            assert g.is_connected()
            assert g.num_edges == 18
            assert_well_formed(g)

    def test_permuted_moves_labels(self):
        g = path_graph(3, [5, 6, 7])
        h = g.permuted([2, 0, 1])
        assert h.vertex_labels.tolist() == [6, 7, 5]
        assert h.has_edge(2, 0) and h.has_edge(0, 1) and not h.has_edge(2, 1)


class TestTuples:
    def test_phi_examples(self):
        u, v, w, x = 0, 1, 2, 3
        t = TupleIndex.encode((u, v, w), 4)
        assert phi(t, 3, x).components() == (u, v, x)
        assert phi(t, 1, x).components() == (x, v, w)

    def test_phi_with_same_vertex(self):
        t = TupleIndex.encode((0, 1), 2)
        assert phi(t, 1, 0) == t

    def test_little_endian(self):
        assert TupleIndex.encode((1, 2), 5).value == 1 + 2 * 5
        assert TupleIndex(11, 2, 5).component(1) == 1

    @given(st.integers(1, 6), st.integers(1, 3), st.data())
    def test_roundtrip_and_phi(self, n, k, data):
        value = data.draw(st.integers(0, n ** k - 1))
        t = TupleIndex(value, k, n)
        assert TupleIndex.encode(t.components(), n) == t
        j = data.draw(st.integers(1, k))
        w = data.draw(st.integers(0, n - 1))
        assert phi(t, j, t.component(j)) == t
        s = phi(t, j, w)
        assert s.component(j) == w
        assert all(s.component(i) == t.component(i) for i in range(1, k + 1) if i != j)

    def test_tuple_components_match(self):
        comps = tuple_components(4, 3)
        for value in range(64):
            assert tuple(int(c[value]) for c in comps) == TupleIndex(value, 3, 4).components()

    def test_range_checks(self):
        with pytest.raises(ValueError):
            TupleIndex(9, 2, 3)
        with pytest.raises(ValueError):
            phi(TupleIndex(0, 2, 3), 3, 0)


class TestNeighborhood:
    def test_c6(self):
        g = cycle_graph(6)
        t = TupleIndex.encode((0, 1), 6)
        assert is_local_neighbor(g, t, 1, 5) is Neighborhood.LOCAL
        assert is_local_neighbor(g, t, 1, 3) is Neighborhood.GLOBAL

    @given(graphs(max_n=5), st.data())
    def test_replacing_with_itself_is_global(self, g, data):
        t = TupleIndex(data.draw(st.integers(0, g.n ** 2 - 1)), 2, g.n)
        j = data.draw(st.integers(1, 2))
        assert is_local_neighbor(g, t, j, t.component(j)) is Neighborhood.GLOBAL


class TestAtomicType:
    def test_triangle(self):
        g = complete_graph(3)
        assert atomic_type(g, TupleIndex.encode((0, 1), 3)) == atomic_type(g, TupleIndex.encode((1, 2), 3))

    def test_path_edge_vs_nonedge(self):
        g = path_graph(3)
        assert atomic_type(g, TupleIndex.encode((0, 2), 3)) != atomic_type(g, TupleIndex.encode((0, 1), 3))

    def test_labeled_triangle(self):
        g = complete_graph(3, [1, 1, 2])
        assert atomic_type(g, TupleIndex.encode((0, 1), 3)) != atomic_type(g, TupleIndex.encode((0, 2), 3))

    @settings(max_examples=60)
    @given(graphs(max_n=4, labels=2, edge_labels=2), st.integers(1, 3))
    def test_matches_brute_force(self, g, k):
        tuples = [TupleIndex(v, k, g.n) for v in range(g.n ** k)]
        codes = [atomic_type(g, t) for t in tuples]
        for a, b in itertools.combinations(range(len(tuples)), 2):
            same = ordered_subgraph_iso(g, tuples[a].components(), tuples[b].components())
            assert (codes[a] == codes[b]) == same

    @given(graphs(max_n=5, labels=2, edge_labels=2), st.data())
    def test_permutation_invariant(self, g, data):
        perm = data.draw(st.permutations(list(range(g.n))))
        h = g.permuted(perm)
        for value in range(g.n ** 2):
            t = TupleIndex(value, 2, g.n)
            moved = TupleIndex.encode([perm[v] for v in t.components()], g.n)
            assert atomic_type(g, t) == atomic_type(h, moved)

    def test_code_ignores_graph_size(self):
        # only the local structure matters, not n
        a = atomic_type(path_graph(2), TupleIndex.encode((0, 1), 2))
        b = atomic_type(path_graph(5), TupleIndex.encode((2, 3), 5))
        assert a == b
