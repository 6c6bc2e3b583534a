import numpy as np
import pytest

from commlens.errors import ParseError, ValidationError
from commlens.graph import (
    Graph,
    Partition,
    aggregate,
    parse_edge_list,
    random_graph,
    ring_of_cliques,
)
from helpers import BARBELL_TEXT, TRIANGLE_TEXT, barbell, random_weighted_graph, triangle


class TestParse:
    def test_triangle_counts(self):
        g, dups = parse_edge_list(TRIANGLE_TEXT)
        assert g.n == 3
        assert g.total_weight == 3.0
        assert dups == 0
        assert [g.degree(i) for i in range(3)] == [2.0, 2.0, 2.0]

    def test_duplicate_edges_merge_with_warning(self):
        g, dups = parse_edge_list("0 1\n0 1 2.5\n")
        assert dups == 1
        assert g.total_weight == 3.5
        assert g.num_edges == 1

    def test_reverse_orientation_is_same_edge(self):
        g, dups = parse_edge_list("0 1\n1 0\n")
        assert dups == 1
        assert g.total_weight == 2.0

    def test_comments_and_blank_lines(self):
        text = "# a comment\n\n0 1\n   \n# another\n1 2\n"
        g, _ = parse_edge_list(text)
        assert g.n == 3
        assert g.total_weight == 2.0

    def test_bytes_input(self):
        g, _ = parse_edge_list(b"0 1\n1 2\n2 0\n")
        assert g.n == 3

    def test_default_weight_is_one(self):
        g, _ = parse_edge_list("7 9\n")
        assert g.total_weight == 1.0

    def test_malformed_single_field(self):
        with pytest.raises(ParseError, match="line 2"):
            parse_edge_list("0 1\n42\n")

    def test_malformed_weight(self):
        with pytest.raises(ParseError, match="line 1"):
            parse_edge_list("0 1 heavy\n")

    def test_too_many_fields(self):
        with pytest.raises(ParseError, match="line 1"):
            parse_edge_list("0 1 2 3\n")

    def test_negative_weight_rejected(self):
        with pytest.raises(ValidationError):
            parse_edge_list("0 1 -2\n")

    def test_string_labels(self):
        g, _ = parse_edge_list("alice bob\nbob carol\n")
        assert g.labels == ("alice", "bob", "carol")
        assert g.degree(g.dense_index("bob")) == 2.0

    def test_dense_indices_follow_first_appearance(self):
        g, _ = parse_edge_list("5 3\n3 9\n")
        assert g.labels == ("5", "3", "9")


class TestGraphModel:
    def test_adjacency_symmetric(self):
        g = random_weighted_graph(24, 0.3, seed=5)
        u, v, w = g.edge_arrays()
        seen = {(a, b): c for a, b, c in zip(u.tolist(), v.tolist(), w.tolist())}
        for i in range(g.n):
            nbrs, ws = g.neighbors(i)
            for j, wij in zip(nbrs.tolist(), ws.tolist()):
                key = (min(i, j), max(i, j))
                assert seen[key] == wij

    def test_handshake_lemma(self):
        for seed in range(10):
            g = random_weighted_graph(20, 0.4, seed=seed)
            assert abs(g.degrees.sum() - 2.0 * g.total_weight) <= 1e-9

    def test_symmetry_and_handshake_at_ten_thousand_edges(self):
        g = random_graph(150, 0.9, seed=3)
        assert g.total_weight >= 1e4
        row = np.repeat(np.arange(g.n), np.diff(g.indptr))
        order_fwd = np.lexsort((g.indices, row))
        order_rev = np.lexsort((row, g.indices))
        assert np.array_equal(row[order_fwd], g.indices[order_rev])
        assert np.array_equal(g.indices[order_fwd], row[order_rev])
        assert np.array_equal(g.weights[order_fwd], g.weights[order_rev])
        assert abs(g.degrees.sum() - 2.0 * g.total_weight) <= 1e-9

    def test_self_loop_counts_twice_in_degree(self):
        g, _ = parse_edge_list("0 0 1.5\n0 1\n")
        assert g.degree(0) == 4.0
        assert g.degree(1) == 1.0
        assert g.total_weight == 2.5

    def test_no_duplicate_adjacency_entries(self):
        g, _ = parse_edge_list("0 1\n1 0 2\n0 2\n")
        for i in range(g.n):
            nbrs, _ = g.neighbors(i)
            assert len(set(nbrs.tolist())) == len(nbrs)

    def test_star_center_degree(self):
        from helpers import STAR_TEXT

        g, _ = parse_edge_list(STAR_TEXT)
        assert g.degree(g.dense_index("c")) == 3.0
        assert g.degree(g.dense_index("a")) == 1.0

    def test_degree_out_of_range(self):
        g = triangle()
        with pytest.raises(IndexError):
            g.degree(3)

    def test_roundtrip_through_serialization(self):
        for seed in range(5):
            g = random_weighted_graph(15, 0.35, seed=seed)
            if g.total_weight == 0:
                continue
            reparsed, dups = parse_edge_list(g.to_edge_list_text())
            assert dups == 0
            # isolated nodes cannot survive an edge-list round trip
            kept = [i for i in range(g.n) if g.degrees[i] > 0]
            assert reparsed.n == len(kept)
            assert reparsed.total_weight == pytest.approx(g.total_weight, abs=1e-9)

    def test_roundtrip_identical_when_no_isolated_nodes(self):
        g = barbell()
        assert parse_edge_list(g.to_edge_list_text()).graph == g

    def test_graphs_are_immutable(self):
        g = triangle()
        with pytest.raises(ValueError):
            g.weights[0] = 5.0

    def test_with_added_edges_rejects_existing(self):
        g = triangle()
        with pytest.raises(ValidationError):
            g.with_added_edges([(0, 1)])

    def test_with_added_edges_new_pair(self):
        g, _ = parse_edge_list("1 2\n2 3\n")
        bigger = g.with_added_edges([(0, 2)])
        assert bigger.total_weight == 3.0
        assert bigger.labels == g.labels


class TestPartition:
    def test_canonical_relabeling_by_size_then_member(self):
        p = Partition([7, 7, 2, 2, 2, 5])
        # sizes: 2 -> 3 nodes, 7 -> 2 nodes, 5 -> 1 node
        assert p.assignment.tolist() == [1, 1, 0, 0, 0, 2]
        assert p.sizes == (3, 2, 1)

    def test_tie_broken_by_smallest_member(self):
        p = Partition([9, 4, 9, 4])
        # both size 2; community containing node 0 comes first
        assert p.assignment.tolist() == [0, 1, 0, 1]

    def test_ids_are_consecutive(self):
        p = Partition([10, 20, 30, 10])
        assert sorted(set(p.assignment.tolist())) == [0, 1, 2]

    def test_tsv_round_trip(self):
        g = barbell()
        p = Partition([0, 0, 0, 1, 1, 1])
        text = p.to_tsv(g)
        assert text.splitlines()[0] == "1\t0"
        assert Partition.from_tsv(text, g) == p

    def test_tsv_sorted_numerically(self):
        g, _ = parse_edge_list("10 2\n2 9\n9 10\n")
        text = Partition.all_in_one(3).to_tsv(g)
        assert [line.split("\t")[0] for line in text.splitlines()] == ["2", "9", "10"]

    def test_tsv_mismatched_nodes(self):
        g = triangle()
        with pytest.raises(ValidationError):
            Partition.from_tsv("0\t0\n1\t0\n9\t1\n", g)


class TestAggregate:
    def test_barbell_hand_aggregation(self):
        g = barbell()
        meta = aggregate(g, Partition([0, 0, 0, 1, 1, 1]))
        mg = meta.graph
        assert mg.n == 2
        # self-loop stored weight 3 -> diagonal 6; one bridge of weight 1
        assert mg.total_weight == 7.0
        assert mg.degrees.tolist() == [7.0, 7.0]
        assert meta.members == ((0, 1, 2), (3, 4, 5))
        assert 2.0 * mg.total_weight == 2.0 * g.total_weight == 14.0

    def test_singleton_partition_is_identity(self):
        g = random_weighted_graph(12, 0.4, seed=1)
        meta = aggregate(g, Partition.singletons(g.n))
        assert meta.graph.n == g.n
        assert meta.graph.total_weight == g.total_weight
        assert np.array_equal(meta.graph.degrees, g.degrees)

    def test_triangle_all_in_one(self):
        meta = aggregate(triangle(), Partition.all_in_one(3))
        assert meta.graph.n == 1
        assert meta.graph.degrees.tolist() == [6.0]
        assert meta.graph.total_weight == 3.0

    def test_weight_preserved_on_random_inputs(self):
        from helpers import random_partition

        for seed in range(20):
            g = random_weighted_graph(18, 0.3, seed=seed)
            p = random_partition(g.n, 5, seed)
            meta = aggregate(g, p)
            assert abs(meta.graph.total_weight - g.total_weight) <= 1e-9
            assert meta.graph.n == p.num_communities

    def test_weight_preserved_exactly_when_unweighted(self):
        from helpers import random_partition

        for seed in range(20):
            g = random_graph(20, 0.3, seed=seed)
            p = random_partition(g.n, 4, seed)
            assert aggregate(g, p).graph.total_weight == g.total_weight

    def test_wrong_length_rejected(self):
        with pytest.raises(ValidationError):
            aggregate(triangle(), Partition([0, 0]))


class TestGenerators:
    def test_ring_of_cliques_counts(self):
        g = ring_of_cliques(30, 5)
        assert g.n == 150
        assert g.total_weight == 330.0

    def test_small_ring_counts(self):
        g = ring_of_cliques(3, 3)
        assert g.n == 9
        assert g.total_weight == 12.0

    def test_ring_degrees_gateway_or_interior(self):
        g = ring_of_cliques(6, 4)
        assert set(g.degrees.tolist()) == {3.0, 4.0}
        # exactly two gateways per clique
        assert int(np.sum(g.degrees == 4.0)) == 12

    def test_ring_validation(self):
        with pytest.raises(ValidationError):
            ring_of_cliques(2, 5)
        with pytest.raises(ValidationError):
            ring_of_cliques(5, 2)

    def test_random_graph_extremes(self):
        assert random_graph(8, 0.0, seed=0).total_weight == 0.0
        g = random_graph(4, 1.0, seed=0)
        assert g.total_weight == 6.0

    def test_random_graph_deterministic(self):
        a = random_graph(6, 0.5, seed=7)
        b = random_graph(6, 0.5, seed=7)
        assert a == b

    def test_random_graph_seed_sensitivity(self):
        a = random_graph(30, 0.5, seed=1)
        b = random_graph(30, 0.5, seed=2)
        assert a != b

    def test_random_graph_validation(self):
        with pytest.raises(ValidationError):
            random_graph(0, 0.5, seed=0)
        with pytest.raises(ValidationError):
            random_graph(5, 1.5, seed=0)
