"""Shared plumbing for Waiter and Client policies."""

from __future__ import annotations

import random
from typing import Iterator, Sequence

from ..engine import GameState


class PreconditionError(ValueError):
    """A strategy was asked to start outside the parameter range it supports."""


class ScriptWaiter:
    """Waiter driven by a generator of offers.

    The generator is resumed once per round, after the previous round has been
    applied, so it can read the current state.  When it is exhausted the
    Waiter falls back to offering the lowest free ids until the game ends.
    """

    name = "script"

    def start(self, state: GameState, rng: random.Random) -> None:
        self.state = state
        self.rng = rng
        self.script_rounds = 0
        self.script_done = False
        self._gen = self.script(state)

    def script(self, state: GameState) -> Iterator[Sequence[int]]:
        return iter(())

    def offer(self, state: GameState) -> Sequence[int]:
        if not self.script_done:
            try:
                offer = next(self._gen)
                self.script_rounds += 1
                return offer
            except StopIteration:
                self.script_done = True
        return state.lowest_free(state.b + 1)
