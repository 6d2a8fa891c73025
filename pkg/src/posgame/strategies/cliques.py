"""Waiter strategies for canonical cliques on a blow-up of K_k.

The triangle strategy runs three scripted stages.  The general strategy
first builds many canonical copies of K_k minus a partial matching while
never touching the matching's part pairs, keeps a sparse subfamily, and then
adds the missing matching edges one part pair at a time.  Each phase offers
the missing edge of b+1 distinct surviving copies per round, so at least a
1/(b+1) fraction of the copies survives each phase.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterator, Literal, Sequence

import numpy as np

from ..engine import CLIENT, FREE, GameState
from ..graphcore import Board, Pattern
from ..invariants import clique_minus_matching, removal_sequence, round_budget
from ..randmodels import canonical_copies, greedy_sparse
from .base import PreconditionError, ScriptWaiter
from .mindegree import BadFamilyState


def triangle_guarantee(s: int, b: int) -> Fraction:
    """(s^3 / (5 b^2) - s) / (b + 1), exactly."""
    return (Fraction(s**3, 5 * b * b) - s) / (b + 1)


def _check_blowup(board: Board, k: int) -> None:
    if board.kind != "blowup" or board.pattern is None or board.pattern.edges != Pattern.complete(k).edges:
        raise PreconditionError(f"board must be a blow-up of K_{k}, got {board.descriptor}")


class TriangleWaiter(ScriptWaiter):
    """Three-stage Waiter for canonical triangles on a blow-up of K_3.

    Stages I and II give every vertex of the first (second) part
    floor(s/(b+1)) Client neighbours in the next part.  Stage III offers the
    edges between the first and third parts in blocks of b+1, sorted by the
    number of Client paths through the middle part, most first.
    """

    name = "triangle"

    def start(self, state: GameState, rng) -> None:
        _check_blowup(state.board, 3)
        if state.b + 1 > state.board.s:
            raise PreconditionError("triangle strategy needs b + 1 <= s")
        self.stage_starts: dict[str, int] = {}
        self.t: dict[int, int] = {}
        self.stage3_order: list[int] = []
        super().start(state, rng)

    def _star_rounds(self, state: GameState, src: int, dst: int) -> Iterator[list[int]]:
        board = state.board
        w = state.b + 1
        target = list(board.part_vertices(dst))
        for x in board.part_vertices(src):
            for r in range(len(target) // w):
                yield sorted(board.index(x, y) for y in target[r * w:(r + 1) * w])

    def script(self, state: GameState) -> Iterator[Sequence[int]]:
        board = state.board
        s, w = board.s, state.b + 1
        self.stage_starts["I"] = state.round
        yield from self._star_rounds(state, 0, 1)
        self.stage_starts["II"] = state.round
        yield from self._star_rounds(state, 1, 2)
        self.stage_starts["III"] = state.round
        own = np.frombuffer(state.owner, dtype=np.uint8) == CLIENT
        # element ids of a K3 blow-up: part pairs (0,1), (0,2), (1,2), row-major within each
        A = own[:s * s].reshape(s, s).astype(np.int64)
        Bm = own[2 * s * s:3 * s * s].reshape(s, s).astype(np.int64)
        T = A @ Bm
        base = s * s
        ids = [base + i for i in range(s * s)]
        tv = T.reshape(-1).tolist()
        self.t = dict(zip(ids, tv))
        order = sorted(ids, key=lambda i: (-self.t[i], i))
        self.stage3_order = order
        for r in range(s * s // w):
            yield sorted(order[r * w:(r + 1) * w])
        self.stage_starts["end"] = state.round


Stage1 = Literal["random", "completion", "min-degree"]


class CliqueWaiter(ScriptWaiter):
    """Waiter for canonical K_k copies via K_k minus ``i`` matching edges.

    ``stage1`` selects how the first stage is played on the allowed edges:
    uniform random offers, a completion heuristic offering the edges whose
    endpoints carry the most Client edges, or degree minimisation against the
    explicit family of allowed M-subsets spanning fewer than ``min_copies``
    canonical copies (tiny boards only).

    After the game ``family_sizes[j]`` is the number of tracked copies after
    phase j (index 0: the sparse family from the first stage) and
    ``families[j]`` the copies themselves.
    """

    name = "clique"

    def __init__(self, k: int, i: int, stage1: Stage1 = "random", alpha: float = 0.5,
                 min_copies: int = 1, family_cap: int = 200_000):
        self.k, self.i = k, i
        self.H = clique_minus_matching(k, i)
        self.removed = removal_sequence(k)[:i]
        if stage1 not in ("random", "completion", "min-degree"):
            raise ValueError(f"unknown stage-one policy {stage1!r}")
        self.stage1 = stage1
        self.alpha = alpha
        self.min_copies = min_copies
        self.family_cap = family_cap

    def start(self, state: GameState, rng) -> None:
        board = state.board
        _check_blowup(board, self.k)
        s = board.s
        forbidden = set()
        for a, c in self.removed:
            for x in board.part_vertices(a):
                for y in board.part_vertices(c):
                    forbidden.add(board.index(x, y))
        self.pool = [x for x in range(len(board)) if x not in forbidden]
        w = state.b + 1
        self.M = min(round_budget(self.H, s, state.b, self.alpha), len(self.pool) // w)
        self.families: list[list[tuple[int, ...]]] = []
        self.family_sizes: list[int] = []
        self.phase_rounds: list[int] = []
        self.phase_short: list[bool] = []
        self.stage1_copies = 0
        self.stage2_start = None
        self.bfs = None
        if self.stage1 == "min-degree":
            self.bfs = self._bad_family(state)
        super().start(state, rng)

    def _bad_family(self, state: GameState) -> BadFamilyState:
        board = state.board
        if comb(len(self.pool), self.M) > self.family_cap:
            raise PreconditionError("explicit bad family too large for degree minimisation")
        bad = []
        for S in combinations(self.pool, self.M):
            G = board.edge_set(S)
            if len(canonical_copies(self.H, board, G)) < self.min_copies:
                bad.append(S)
        return BadFamilyState(bad, len(board), state.b, self.M)

    def _stage1_offer(self, state: GameState) -> list[int]:
        w = state.b + 1
        owner = state.owner
        if self.stage1 == "random":
            pool, rng = self.pool, self.rng
            picked: set[int] = set()
            while len(picked) < w:
                x = pool[rng.randrange(len(pool))]
                if owner[x] == FREE:
                    picked.add(x)
            return sorted(picked)
        if self.stage1 == "completion":
            g = state.graph()
            us, vs = state.board.ends
            free = [x for x in self.pool if owner[x] == FREE]
            free.sort(key=lambda x: (-(g.cdeg[us[x]] + g.cdeg[vs[x]]), x))
            return sorted(free[:w])
        return self.bfs.offer(state, self.pool)

    def script(self, state: GameState) -> Iterator[Sequence[int]]:
        for _ in range(self.M):
            yield self._stage1_offer(state)
            if self.bfs is not None:
                offer, pick = state.transcript.round(state.round - 1)
                self.bfs.advance(offer, pick)
        board = state.board
        found = canonical_copies(self.H, board, state.edge_set(CLIENT))
        self.stage1_copies = len(found)
        current = greedy_sparse(found, self.H)
        self.families.append(current)
        self.family_sizes.append(len(current))
        self.stage2_start = state.round
        w = state.b + 1
        owner = state.owner
        for a, c in self.removed:
            edges = [board.index(cp[a], cp[c]) for cp in current]
            rounds = len(current) // w
            pos = 0
            done = 0
            for _ in range(rounds):
                offer = []
                while pos < len(edges) and len(offer) < w:
                    x = edges[pos]
                    pos += 1
                    if owner[x] == FREE and x not in offer:
                        offer.append(x)
                if len(offer) < w:
                    break
                yield sorted(offer)
                done += 1
            self.phase_rounds.append(done)
            self.phase_short.append(done < rounds)
            current = [cp for cp, x in zip(current, edges) if owner[x] == CLIENT]
            self.families.append(current)
            self.family_sizes.append(len(current))

    def phase_pattern(self, j: int) -> Pattern:
        """K_k minus the matching edges not yet added after ``j`` phases."""
        missing = set(self.removed[j:])
        edges = tuple(e for e in combinations(range(self.k), 2) if e not in missing)
        return Pattern(self.k, edges, f"k{self.k}-{self.i - j}" if j < self.i else f"k{self.k}")

    def members_present(self, state: GameState) -> bool:
        """Every tracked copy after phase j spans the corresponding pattern in Client's graph."""
        board, owner = state.board, state.owner
        for j, fam in enumerate(self.families):
            P = self.phase_pattern(j)
            for cp in fam:
                for a, c in P.edges:
                    x = board.index(cp[a], cp[c])
                    if x < 0 or owner[x] != CLIENT:
                        return False
        return True
