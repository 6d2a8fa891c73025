import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import atlas, brute_invariants, nx_aut, nx_copies, small_patterns
from posgame.graphcore import (Board, EdgeSet, Pattern, all_subgraph_profiles, candidate_subgraphs,
                               complete_copy_count, count_canonical_copies, count_copies, parse_graph,
                               pattern_from_spec)
from posgame.embed import automorphism_count
from posgame.invariants import g1, g2


class TestParseGraph:
    def test_triangle(self):
        P = parse_graph("0 1\n1 2\n0 2")
        assert (P.v, P.e) == (3, 3)

    def test_declared_count_keeps_isolated(self):
        P = parse_graph("n 4\n0 1")
        assert (P.v, P.e) == (4, 1)
        assert P.isolated_vertices() == [2, 3]

    def test_loop_rejected(self):
        with pytest.raises(ValueError, match="loop"):
            parse_graph("0 0")

    @pytest.mark.parametrize("text", ["0 x", "0 1 2", "n 2\n0 5", "-1 2"])
    def test_malformed(self, text):
        with pytest.raises(ValueError):
            parse_graph(text)

    def test_duplicates_merged_order_free(self):
        assert parse_graph("0 1\n1 0\n1 2").e == 2


class TestShorthand:
    @pytest.mark.parametrize("spec,v,e", [("k4", 4, 6), ("p3", 3, 2), ("s4", 4, 3), ("c5", 5, 5), ("k5-3", 5, 7)])
    def test_sizes(self, spec, v, e):
        P = pattern_from_spec(spec)
        assert (P.v, P.e) == (v, e)

    def test_explicit(self):
        assert pattern_from_spec("4:0-1,2-3").edges == ((0, 1), (2, 3))


class TestBlowup:
    @pytest.mark.parametrize("s", [1, 2, 5])
    def test_triangle_counts(self, s):
        b = Board.blowup(Pattern.complete(3), s)
        assert b.vertex_count == 3 * s and len(b) == 3 * s * s

    def test_k2_at_two(self):
        b = Board.blowup(Pattern.complete(2), 2)
        assert list(b.part_vertices(0)) == [0, 1] and list(b.part_vertices(1)) == [2, 3]
        assert sorted(b.elements) == [(0, 2), (0, 3), (1, 2), (1, 3)]

    def test_path_three(self):
        b = Board.blowup(Pattern.path(3), 3)
        assert (b.vertex_count, len(b)) == (9, 18)

    @given(small_patterns(min_e=1), st.integers(1, 4))
    def test_no_element_inside_a_part(self, H, s):
        if H.e == 0:
            return
        b = Board.blowup(H, s)
        assert len(b) == H.e * s * s
        parts = {(u // s, v // s) for u, v in b.elements}
        assert parts == set(H.edges)

    def test_index_roundtrip(self):
        b = Board.blowup(Pattern.cycle(4), 3)
        for i, (u, v) in enumerate(b.elements):
            assert b.index(u, v) == i == b.index(v, u)
        assert b.index(0, 1) == -1

    def test_complete_index(self):
        b = Board.complete(7)
        for i, (u, v) in enumerate(b.elements):
            assert b.index(u, v) == i


class TestCountCopies:
    def test_triangles_in_k4(self):
        b = Board.complete(4)
        assert count_copies(b, b.full(), Pattern.complete(3)) == 4

    def test_edges_of_triangle(self):
        b = Board.complete(3)
        assert count_copies(b, b.full(), Pattern.complete(2)) == 3

    def test_cherries_in_five_cycle(self):
        b = Board.from_edges(5, Pattern.cycle(5).edges)
        assert count_copies(b, b.full(), Pattern.path(3)) == nx_copies(Pattern.cycle(5).edges, 5, Pattern.path(3)) == 5

    def test_empty(self):
        b = Board.complete(5)
        assert count_copies(b, EdgeSet(len(b)), Pattern.complete(3)) == 0

    @pytest.mark.parametrize("H", [P for P in atlas(5, min_edges=1)], ids=lambda P: P.spec())
    def test_complete_closed_form(self, H):
        for m in range(H.v, 7):
            b = Board.complete(m)
            expect = math.perm(m, H.v) // nx_aut(H)
            assert count_copies(b, b.full(), H) == complete_copy_count(m, H) == expect

    @settings(max_examples=60, deadline=None)
    @given(small_patterns(max_v=4, min_e=1), st.integers(4, 7), st.integers(0, 2**31 - 1))
    def test_random_hosts_match_networkx(self, H, n, seed):
        b = Board.complete(n)
        bits = np.random.default_rng(seed).random(len(b)) < 0.5
        es = EdgeSet.from_mask(bits)
        host = [b.element(i) for i in es.ids()]
        assert count_copies(b, es, H) == nx_copies(host, n, H)


class TestCanonical:
    @pytest.mark.parametrize("s", [1, 2, 3])
    def test_full_k2(self, s):
        b = Board.blowup(Pattern.complete(2), s)
        assert count_canonical_copies(b, b.full(), Pattern.complete(2)) == s * s

    @pytest.mark.parametrize("H", [Pattern.complete(3), Pattern.path(4), Pattern.cycle(4), Pattern.star(4)],
                             ids=lambda P: P.spec())
    @pytest.mark.parametrize("s", [1, 2, 3, 4])
    def test_full_blowup(self, H, s):
        b = Board.blowup(H, s)
        assert count_canonical_copies(b, b.full(), H) == s**H.v

    @settings(max_examples=40, deadline=None)
    @given(st.sampled_from([Pattern.complete(3), Pattern.path(3), Pattern.cycle(4)]), st.integers(1, 3),
           st.integers(0, 2**31 - 1))
    def test_bounded_by_labelled_count(self, H, s, seed):
        b = Board.blowup(H, s)
        es = EdgeSet.from_mask(np.random.default_rng(seed).random(len(b)) < 0.6)
        host = [b.element(i) for i in es.ids()]
        unlabeled = count_copies(b, es, H)
        assert unlabeled == nx_copies(host, b.vertex_count, H)
        assert count_canonical_copies(b, es, H) <= unlabeled * automorphism_count(H)

    def test_missing_part(self):
        b = Board.blowup(Pattern.complete(2), 2)
        with pytest.raises(ValueError):
            count_canonical_copies(b, b.full(), Pattern.complete(2), labels=(0, 3))


class TestCandidateSubgraphs:
    def test_triangle(self):
        prof = set(candidate_subgraphs(Pattern.complete(3)))
        assert {(3, 3, True), (3, 2, False), (2, 1, True), (2, 0, False)} <= prof

    def test_path(self):
        prof = set(candidate_subgraphs(Pattern.path(3)))
        assert (3, 2, False) in prof
        assert not any(v == 3 and e == 3 for v, e, _ in prof)

    def test_k4_minus_edge_matches_brute_force_invariants(self):
        H = pattern_from_spec("k4-1")
        red = candidate_subgraphs(H)
        full = all_subgraph_profiles(H)
        assert g1(H, red) == g1(H, full) and g2(H, red) == g2(H, full)

    @pytest.mark.parametrize("H", atlas(5, min_edges=2), ids=lambda P: P.spec())
    def test_reduced_equals_full(self, H):
        ref = brute_invariants(H)
        red = candidate_subgraphs(H)
        assert g1(H, red) == ref["g1"] and g2(H, red) == ref["g2"]

    def test_cap(self):
        with pytest.raises(ValueError, match="cap"):
            candidate_subgraphs(Pattern.path(11))
