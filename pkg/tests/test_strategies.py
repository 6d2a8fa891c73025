import random
import statistics
from fractions import Fraction
from itertools import combinations
from math import comb, floor, perm

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posgame.engine import CLIENT, FREE, GameState, WinningFamily, play
from posgame.graphcore import Board, Pattern
from posgame.invariants import clique_minus_matching
from posgame.strategies import (CliqueWaiter, GreedyClient, LowestFreeWaiter, MinDegreeWaiter, PotentialClient,
                                PreconditionError, RandomClient, RandomWaiter, TreeDenseWaiter, TreeSparseWaiter,
                                TriangleWaiter, make_client, make_waiter, split_leaf, tree_guarantee,
                                triangle_guarantee, verify_disjoint_copies)
from posgame.strategies.mindegree import BadFamilyState, big_family_admissible


class TestPotentialClient:
    def test_initial_potential_k3_on_k4(self):
        c = PotentialClient(pattern=Pattern.complete(3))
        c.start(GameState(Board.complete(4), 1), random.Random(0))
        assert c.potential == Fraction(1, 2)

    def test_explicit_family_initial_potential(self):
        board = Board.complete(4)
        fam = WinningFamily.copies_of(Pattern.complete(3))
        c = PotentialClient(WinningFamily.explicit(fam.resolve(board)))
        c.start(GameState(board, 1), random.Random(0))
        assert c.potential == Fraction(1, 2) == fam.potential_bound(board, 1)

    def test_disjoint_offer_keeps_potential_and_picks_lowest(self):
        board = Board.matching(6)
        c = PotentialClient(WinningFamily.explicit([[0, 1], [1, 2]]))
        state = GameState(board, 1)
        c.start(state, random.Random(0))
        before = c.potential
        assert c.pick(state, [5, 4]) == 4
        state.apply_round([4, 5], 4)
        c.observe(state, [4, 5], 4)
        assert c.potential == before

    def test_never_completes_k3_on_k4(self):
        for seed in range(10):
            s, _ = play(Board.complete(4), 1, RandomWaiter(), PotentialClient(pattern=Pattern.complete(3)), seed=seed)
            assert WinningFamily.copies_of(Pattern.complete(3)).value(s) == 0

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 30), st.integers(1, 3), st.integers(0, 2**32 - 1))
    def test_monotone_and_bounded_explicit(self, N, b, seed):
        rng = random.Random(seed)
        sets = [rng.sample(range(N), rng.randint(1, min(4, N))) for _ in range(rng.randint(1, 25))]
        fam = WinningFamily.explicit(sets)
        c = PotentialClient(fam, keep_history=True)
        s, _ = play(Board.matching(N), b, RandomWaiter(), c, seed=seed)
        hist = c.potential_history()
        assert all(y <= x for x, y in zip(hist, hist[1:]))
        assert fam.value(s) <= floor(c.initial_potential)

    @settings(max_examples=15, deadline=None)
    @given(st.integers(4, 7), st.integers(1, 2), st.sampled_from([Pattern.complete(3), Pattern.path(3), Pattern.path(4)]),
           st.integers(0, 2**32 - 1))
    def test_implicit_tracking_matches_explicit_ledger(self, n, b, H, seed):
        board = Board.complete(n)
        implicit = PotentialClient(pattern=H, keep_history=True)
        s, t = play(board, b, RandomWaiter(), implicit, seed=seed)
        explicit = PotentialClient(WinningFamily.explicit(WinningFamily.copies_of(H).resolve(board)),
                                   keep_history=True)
        state = GameState(board, b)
        explicit.start(state, random.Random(0))
        for offer, pick in t:
            assert explicit.pick(state, offer) == pick
            state.apply_round(offer, pick)
            explicit.observe(state, offer, pick)
        assert implicit.potential_history() == explicit.potential_history()
        assert implicit.increases == explicit.increases == 0


class TestMinDegree:
    def test_example_offer(self):
        bfs = BadFamilyState([{0, 1}, {0, 2}], 6, 1)
        assert bfs.deg[:3] == [2, 1, 1]
        assert bfs.offer(GameState(Board.matching(6), 1)) == [3, 4]

    def test_pool(self):
        bfs = BadFamilyState([{0, 1}, {0, 2}], 6, 1)
        assert bfs.offer(GameState(Board.matching(6), 1), pool=[0, 1, 2]) == [1, 2]

    def test_pick_bounds_live_family(self):
        bfs = BadFamilyState([{0, 1}, {0, 2}, {1, 2}], 6, 1)
        deg = list(bfs.deg)
        bfs.advance([0, 3], 0)
        assert len(bfs.live) <= deg[0]
        assert {frozenset(x) for x in bfs.live} == {frozenset({1}), frozenset({2})}

    def test_admissibility(self):
        assert big_family_admissible(12, 2, 1, 0.5, 16)
        assert not big_family_admissible(12, 2, 1, 0.5, 17)
        assert big_family_admissible(12, 2, 2, 0.5, 1)
        assert not big_family_admissible(12, 2, 3, 0.5, 1)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(6, 14), st.integers(0, 2**32 - 1))
    def test_contraction_in_random_games(self, N, seed):
        rng = random.Random(seed)
        M, b = 2, 1
        all_pairs = list(combinations(range(N), M))
        k = floor(Fraction(1, 4) * comb(N, M))
        bad = rng.sample(all_pairs, rng.randint(0, k))
        w = MinDegreeWaiter(bad, M)
        play(Board.matching(N), b, w, RandomClient(), seed=seed)
        assert w.bfs.contraction_holds()
        if big_family_admissible(N, M, b, 0.5, len(bad)):
            assert w.bfs.sizes[M] == 0


class TestTreeHelpers:
    def test_guarantee_k1(self):
        assert tree_guarantee(1, 100, 3) == 25

    def test_guarantee_path3(self):
        assert tree_guarantee(3, 1024, 1) == 2**16

    def test_guarantee_k2(self):
        assert tree_guarantee(2, 256, 1) == 512

    def test_split_leaf(self):
        leaf, anchor, rest, a = split_leaf(Pattern.path(3))
        assert (leaf, anchor, a) == (2, 1, 1) and rest.edges == ((0, 1),)

    def test_not_a_tree(self):
        with pytest.raises(ValueError):
            TreeDenseWaiter(Pattern.cycle(4))


class TestTreeDense:
    def test_k2_vs_potential(self):
        H = Pattern.path(2)
        s, _ = play(Board.complete(256), 1, TreeDenseWaiter(H), PotentialClient(pattern=H, track=False), seed=0)
        assert WinningFamily.copies_of(H).value(s) >= tree_guarantee(2, 256, 1)

    def test_window(self):
        with pytest.raises(PreconditionError):
            play(Board.complete(64), 1, TreeDenseWaiter(Pattern.path(3)), RandomClient())

    def test_anchor_counts_recorded(self):
        w = TreeDenseWaiter(Pattern.path(3), enforce_window=False)
        play(Board.complete(32), 1, w, RandomClient(), seed=1)
        assert [k for k, _ in w.anchor_counts] == [2, 3]
        assert w.anchor_counts[0][1] == 8


class CheckedSparse(TreeSparseWaiter):
    """Checks A and B against their definitions whenever the script resumes."""

    checks = 0

    def offer(self, state):
        out = super().offer(state)
        if not self.script_done:
            g = state.graph()
            V2 = set(self.V2)
            assert self.A == {u for u in self.anchors if not V2.intersection(g.cadj[u])}
            assert self.B == {v for v in self.V2 if g.cdeg[v] == 0}
            self.checks += 1
        return out


class TestTreeSparse:
    @pytest.mark.parametrize("n,b", [(64, 1), (48, 2), (40, 40)])
    def test_sets_match_definitions(self, n, b):
        T = Pattern.path(3)
        w = CheckedSparse(T, enforce_window=False)
        s, _ = play(Board.complete(n), b, w, RandomClient(), seed=n + b)
        assert w.checks > 0
        assert verify_disjoint_copies(T, w.copies, s)

    def test_each_stage_round_adds_one_copy(self):
        T = Pattern.path(3)
        w = TreeSparseWaiter(T, enforce_window=False)
        play(Board.complete(64), 1, w, RandomClient(), seed=5)
        top = w.stage_log[-1]
        assert top[0] == 3 and len(w.copies) == top[2]

    def test_window(self):
        with pytest.raises(PreconditionError):
            play(Board.complete(64), 1, TreeSparseWaiter(Pattern.path(3)), RandomClient())


def _paths_through(state):
    """t(x z): Client paths x-y-z with y in the middle part, recomputed directly."""
    board = state.board
    out = {}
    for x in board.part_vertices(0):
        for z in board.part_vertices(2):
            out[board.index(x, z)] = sum(
                1 for y in board.part_vertices(1)
                if state.owner[board.index(x, y)] == CLIENT and state.owner[board.index(y, z)] == CLIENT)
    return out


class StageProbe(TriangleWaiter):
    def offer(self, state):
        out = super().offer(state)
        if "III" in self.stage_starts and not hasattr(self, "t_check"):
            self.t_check = _paths_through(state)
            g = state.graph()
            self.deg12 = [g.client_degree(x, 1) for x in state.board.part_vertices(0)]
            self.deg23 = [g.client_degree(y, 2) for y in state.board.part_vertices(1)]
        return out


class TestTriangle:
    def test_guarantee(self):
        assert triangle_guarantee(30, 2) == 440

    @pytest.mark.parametrize("s,b", [(10, 1), (12, 2), (15, 4)])
    def test_stages(self, s, b):
        w = StageProbe()
        board = Board.blowup(Pattern.complete(3), s)
        play(board, b, w, RandomClient(), seed=s)
        q = s // (b + 1)
        assert w.deg12 == [q] * s and w.deg23 == [q] * s
        assert w.t == w.t_check
        assert max(w.t.values()) <= q
        ts = [w.t[i] for i in w.stage3_order]
        assert all(x >= y for x, y in zip(ts, ts[1:]))

    def test_stage_two_degrees_s10_b1(self):
        w = StageProbe()
        play(Board.blowup(Pattern.complete(3), 10), 1, w, RandomClient(), seed=0)
        assert w.deg12 == [5] * 10

    def test_shape(self):
        with pytest.raises(PreconditionError):
            play(Board.complete(9), 1, TriangleWaiter(), RandomClient())


class TestClique:
    @pytest.mark.parametrize("stage1", ["random", "completion"])
    @pytest.mark.parametrize("k,i,s,b", [(4, 1, 8, 1), (4, 2, 8, 1), (5, 3, 5, 1)])
    def test_members_and_distinct_phase_edges(self, stage1, k, i, s, b):
        w = CliqueWaiter(k, i, stage1)
        board = Board.blowup(Pattern.complete(k), s)
        state, _ = play(board, b, w, RandomClient(), seed=k * 10 + i)
        assert w.members_present(state)
        assert len(w.families) == i + 1
        for j, (a, c) in enumerate(w.removed):
            edges = [board.index(cp[a], cp[c]) for cp in w.families[j]]
            assert len(edges) == len(set(edges))
        for j in range(i):
            assert w.family_sizes[j + 1] >= w.phase_rounds[j]
            if not w.phase_short[j]:
                assert w.phase_rounds[j] == w.family_sizes[j] // (b + 1)

    def test_stage_one_avoids_matching_parts(self):
        w = CliqueWaiter(4, 2, "random")
        board = Board.blowup(Pattern.complete(4), 6)
        state, t = play(board, 1, w, RandomClient(), seed=3)
        forbidden = {(0, 1), (2, 3)}
        for r in range(w.stage2_start):
            offer, _ = t.round(r)
            for x in offer:
                u, v = board.element(x)
                assert (u // 6, v // 6) not in forbidden

    def test_fixture_completion_vs_potential(self):
        H = Pattern.complete(4)
        board = Board.blowup(H, 20)
        w = CliqueWaiter(4, 1, "completion")
        state, _ = play(board, 2, w, make_client("potential-client", H, canonical=True), seed=0)
        value = WinningFamily.copies_of(H, canonical=True).value(state)
        assert value == 3 and w.family_sizes == [10, 3]

    def test_min_degree_stage_one(self):
        w = CliqueWaiter(3, 1, "min-degree")
        board = Board.blowup(Pattern.complete(3), 2)
        state, _ = play(board, 1, w, RandomClient(), seed=0)
        assert w.bfs.sizes[0] >= 1 and w.members_present(state)

    def test_min_degree_cap(self):
        with pytest.raises(PreconditionError):
            play(Board.blowup(Pattern.complete(4), 4), 1, CliqueWaiter(4, 1, "min-degree"), RandomClient())

    def test_phase_pattern(self):
        w = CliqueWaiter(5, 3)
        assert w.phase_pattern(0) == clique_minus_matching(5, 3)
        assert w.phase_pattern(3).is_complete()


class TestGreedyClient:
    def test_avoids_completing(self):
        board = Board.complete(4)
        H = Pattern.complete(3)
        state = GameState(board, 1)
        c = GreedyClient(H)
        c.start(state, random.Random(0))
        e01, e12, e02, e03 = (board.index(*p) for p in [(0, 1), (1, 2), (0, 2), (0, 3)])
        state.apply_round([e01, board.index(2, 3)], e01)
        state.apply_round([e12, board.index(1, 3)], e12)
        assert c.pick(state, [e02, e03]) == e03


class TestRandomPlay:
    def test_reproducible(self):
        a = play(Board.complete(9), 2, RandomWaiter(), RandomClient(), seed=4)[1]
        b = play(Board.complete(9), 2, RandomWaiter(), RandomClient(), seed=4)[1]
        assert a == b

    def test_triangle_mean_matches_uniform_subset(self):
        # Client's final set is a uniform M-subset, so E[K3] = C(n,3) (M)_3 / (N)_3
        n, b = 12, 1
        board = Board.complete(n)
        N = len(board)
        M = N // (b + 1)
        expect = comb(n, 3) * perm(M, 3) / perm(N, 3)
        fam = WinningFamily.copies_of(Pattern.complete(3))
        vals = [fam.value(play(board, b, RandomWaiter(), RandomClient(), seed=s)[0]) for s in range(300)]
        se = statistics.stdev(vals) / len(vals) ** 0.5
        assert abs(statistics.mean(vals) - expect) < 4 * se


WAITER_CASES = [
    ("random", Board.complete(9), Pattern.complete(3), 2),
    ("lowest-free", Board.complete(9), Pattern.complete(3), 3),
    ("tree-dense", Board.complete(20), Pattern.path(3), 1),
    ("tree-dense", Board.complete(20), Pattern.star(4), 2),
    ("tree-sparse", Board.complete(20), Pattern.path(3), 3),
    ("tree-sparse", Board.complete(20), Pattern.path(4), 1),
    ("triangle", Board.blowup(Pattern.complete(3), 6), Pattern.complete(3), 2),
    ("clique:4,1", Board.blowup(Pattern.complete(4), 5), Pattern.complete(4), 1),
    ("clique:5,3", Board.blowup(Pattern.complete(5), 4), Pattern.complete(5), 2),
]


class TestLegality:
    @settings(max_examples=40, deadline=None)
    @given(st.sampled_from(WAITER_CASES), st.sampled_from(["random", "greedy-client", "potential-client"]),
           st.integers(0, 2**32 - 1))
    def test_fuzz(self, case, client, seed):
        name, board, H, b = case
        canonical = board.kind == "blowup"
        w = make_waiter(name, H, enforce_window=False)
        c = make_client(client, H, canonical=canonical)
        state, t = play(board, b, w, c, seed=seed)
        assert state.n_free == 0 and len(t) == len(board) // (b + 1)
        assert sum(1 for o in state.owner if o == FREE) == 0
