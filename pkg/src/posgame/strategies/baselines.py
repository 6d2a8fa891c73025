"""Baseline policies: uniform random play and a one-step greedy Client."""

from __future__ import annotations

import random
from typing import Sequence

from ..engine import GameState
from ..graphcore import Pattern
from .evaluators import make_evaluator


class RandomWaiter:
    """Offers ``b + 1`` free elements chosen uniformly."""

    name = "random"

    def start(self, state: GameState, rng: random.Random) -> None:
        self.rng = rng

    def offer(self, state: GameState) -> Sequence[int]:
        return state.sample_free(state.b + 1, self.rng)


class LowestFreeWaiter:
    name = "lowest-free"

    def start(self, state: GameState, rng: random.Random) -> None:
        pass

    def offer(self, state: GameState) -> Sequence[int]:
        return state.lowest_free(state.b + 1)


class RandomClient:
    name = "random"

    def start(self, state: GameState, rng: random.Random) -> None:
        self.rng = rng

    def pick(self, state: GameState, offer: Sequence[int]) -> int:
        return offer[self.rng.randrange(len(offer))]


class GreedyClient:
    """Picks the offered edge that closes the fewest new copies of ``H``
    in its own graph (ties: lowest id)."""

    name = "greedy-client"

    def __init__(self, pattern: Pattern, canonical: bool = False):
        self.pattern = pattern
        self.canonical = canonical

    def start(self, state: GameState, rng: random.Random) -> None:
        self.host = state.graph().claimed
        self.eval = make_evaluator(self.pattern, state.board, self.canonical)
        self.us, self.vs = state.board.ends

    def pick(self, state: GameState, offer: Sequence[int]) -> int:
        best, best_x = None, None
        for x in sorted(offer):
            c = self.eval.through(self.host, self.us[x], self.vs[x], ())
            if best is None or c < best:
                best, best_x = c, x
        return best_x
