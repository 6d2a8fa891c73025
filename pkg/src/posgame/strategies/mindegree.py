"""Degree-minimising Waiter against an explicit family of bad sets.

The live family after round i is every bad set that avoids Waiter's elements
and contains all of Client's, with Client's elements removed.  Waiter offers
the b+1 free elements lying in the fewest live sets; whatever Client picks,
the live family can only keep sets through that pick, which shrinks it by a
factor of at most (M - i + 1) / (N_{i-1} - b).
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

from ..engine import CLIENT, FREE, WAITER, GameState


class BadFamilyState:
    """Live bad sets and their per-element degrees."""

    def __init__(self, bad_sets: Iterable[Iterable[int]], N: int, b: int, M: int | None = None):
        self.live: list[frozenset[int]] = [frozenset(s) for s in bad_sets]
        sizes = {len(s) for s in self.live}
        if M is None:
            M = sizes.pop() if len(sizes) == 1 else max(sizes, default=0)
        self.M = M
        self.N = N
        self.b = b
        self.round = 0
        self.deg = [0] * N
        for s in self.live:
            for x in s:
                self.deg[x] += 1
        self.sizes = [len(self.live)]

    @classmethod
    def from_state(cls, bad_sets, state: GameState, M: int | None = None) -> BadFamilyState:
        owner = state.owner
        live = []
        client = set(state.ids(CLIENT))
        for s in bad_sets:
            s = frozenset(s)
            if any(owner[x] == WAITER for x in s) or not client <= s:
                continue
            live.append(s - client)
        bfs = cls(live, state.N, state.b, M)
        bfs.round = state.round
        return bfs

    @property
    def free_count(self) -> int:
        """N_i: free elements after ``round`` rounds."""
        return self.N - self.round * (self.b + 1)

    def offer(self, state: GameState, pool: Iterable[int] | None = None) -> list[int]:
        """The b+1 free elements of least degree, optionally drawn from ``pool``."""
        k = state.b + 1
        if pool is None:
            free = list(state.free)
        else:
            owner = state.owner
            free = [x for x in pool if owner[x] == FREE]
        if len(free) < k:
            raise ValueError("fewer than b+1 free elements")
        deg = self.deg
        return sorted(sorted(free, key=lambda x: (deg[x], x))[:k])

    def advance(self, offer: Sequence[int], pick: int) -> None:
        waiter = [x for x in offer if x != pick]
        new = []
        deg = self.deg
        for s in self.live:
            for x in s:
                deg[x] -= 1
            if pick in s and not any(w in s for w in waiter):
                new.append(s - {pick})
        for s in new:
            for x in s:
                deg[x] += 1
        self.live = new
        self.round += 1
        self.sizes.append(len(new))

    def contraction_holds(self) -> bool:
        """Check |E_i| <= |E_{i-1}| (M - i + 1) / (N_{i-1} - b) for every round so far."""
        return not self.contraction_violations()

    def contraction_violations(self) -> list[int]:
        bad = []
        start = self.round - (len(self.sizes) - 1)
        for j in range(1, len(self.sizes)):
            i = start + j
            if i > self.M:
                break
            n_prev = self.N - (i - 1) * (self.b + 1)
            bound = Fraction(self.sizes[j - 1] * (self.M - i + 1), n_prev - self.b)
            if self.sizes[j] > bound:
                bad.append(i)
        return bad


def big_family_admissible(N: int, M: int, b: int, alpha: float, bad_count: int) -> bool:
    """|bad| <= alpha^M C(N, M) and b+1 <= (1 - alpha) N / M, exactly."""
    a = Fraction(alpha)
    return bad_count <= a**M * comb(N, M) and (b + 1) * M <= (1 - a) * N


class MinDegreeWaiter:
    """Waiter offering the b+1 free elements of least live-set degree."""

    name = "min-degree-waiter"

    def __init__(self, bad_sets: Iterable[Iterable[int]], M: int | None = None):
        self.bad_sets = [tuple(s) for s in bad_sets]
        self.M = M

    def start(self, state: GameState, rng: random.Random) -> None:
        self.bfs = BadFamilyState.from_state(self.bad_sets, state, self.M)

    def offer(self, state: GameState) -> list[int]:
        return self.bfs.offer(state)

    def observe(self, state: GameState, offer: Sequence[int], pick: int) -> None:
        self.bfs.advance(offer, pick)
