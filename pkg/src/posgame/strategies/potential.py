"""Potential-function Client.

The potential is the sum over surviving winning sets A (no Waiter element)
of (b+1)^-|A \\ C|.  Given an offer O, picking x multiplies the weight of every
surviving set meeting O only in x by b+1 and kills every other set meeting O.
Averaging over the b+1 choices shows the best choice never increases the
potential, so Client ends with at most floor(initial potential) full sets.

Weights are kept as integers scaled by (b+1)^L, L the largest set size, so
all comparisons are exact.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from ..embed import automorphism_count
from ..engine import CLIENT, FREE, WAITER, GameState, WinningFamily
from ..graphcore import Pattern
from .evaluators import make_evaluator


class PotentialLedger:
    """Surviving sets of an explicit family with their missing-element counts."""

    def __init__(self, sets: Sequence[Sequence[int]], state: GameState):
        self.B = state.b + 1
        self.sets = [tuple(s) for s in sets]
        self.L = max((len(s) for s in self.sets), default=0)
        self.alive = [True] * len(self.sets)
        self.missing = [0] * len(self.sets)
        self.incidence: dict[int, list[int]] = {}
        owner = state.owner
        for k, s in enumerate(self.sets):
            for x in s:
                self.incidence.setdefault(x, []).append(k)
                if owner[x] == WAITER:
                    self.alive[k] = False
                elif owner[x] == FREE:
                    self.missing[k] += 1
        self.pow = [self.B**j for j in range(self.L + 1)]
        self.phi = sum(self.weight(k) for k in range(len(self.sets)))

    def weight(self, k: int) -> int:
        if not self.alive[k]:
            return 0
        return self.pow[self.L - self.missing[k]]

    @property
    def potential(self) -> Fraction:
        return Fraction(self.phi, self.B**self.L)

    def exponent(self, k: int) -> int:
        return self.missing[k]

    def rooted(self, x: int, others: set[int]) -> int:
        """Weight of surviving sets through ``x`` that avoid ``others``."""
        total = 0
        for k in self.incidence.get(x, ()):
            if self.alive[k] and not others.intersection(self.sets[k]):
                total += self.weight(k)
        return total

    def touched(self, offer: Sequence[int]) -> int:
        seen: set[int] = set()
        total = 0
        for x in offer:
            for k in self.incidence.get(x, ()):
                if k not in seen:
                    seen.add(k)
                    total += self.weight(k)
        return total

    def choose(self, offer: Sequence[int]) -> tuple[int, int]:
        """Best pick and the potential (scaled) after it."""
        oset = set(offer)
        best_x, best_u = None, None
        for x in sorted(offer):
            u = self.rooted(x, oset - {x})
            if best_u is None or u < best_u:
                best_x, best_u = x, u
        return best_x, self.phi - self.touched(offer) + self.B * best_u

    def apply(self, offer: Sequence[int], pick: int) -> None:
        seen: set[int] = set()
        for x in offer:
            for k in self.incidence.get(x, ()):
                if k in seen or not self.alive[k]:
                    continue
                seen.add(k)
                self.phi -= self.weight(k)
                s = self.sets[k]
                if any(y != pick and y in s for y in offer):
                    self.alive[k] = False
                else:
                    self.missing[k] -= 1
                    self.phi += self.weight(k)


class PotentialClient:
    """Potential Client for an explicit family or for copies of a pattern.

    ``phi`` is the scaled potential and ``scale`` converts it to the true
    one.  ``increases`` counts rounds where the potential went up (it should
    stay 0); ``keep_history`` also records the potential after every round.
    """

    name = "potential-client"

    def __init__(self, family: WinningFamily | None = None, *, pattern: Pattern | None = None,
                 canonical: bool = False, track: bool = True, keep_history: bool = False):
        if family is None:
            if pattern is None:
                raise ValueError("need a family or a pattern")
            family = WinningFamily.copies_of(pattern, canonical)
        self.family = family
        self.track = track
        self.keep_history = keep_history

    def start(self, state: GameState, rng: random.Random) -> None:
        self.B = state.b + 1
        self.history: list[int] = []
        fam = self.family
        if fam.implicit:
            fam.check(state.board)
            self.ledger = None
            self.H = fam.pattern
            self.host = state.graph().weighted
            self.eval = make_evaluator(self.H, state.board, fam.canonical)
            self.us, self.vs = state.board.ends
            aut = 1 if fam.canonical else automorphism_count(self.H)
            self.scale = aut * self.B**self.H.e
            self.phi = self.eval.total(self.host) if self.track else None
        else:
            self.ledger = PotentialLedger(fam.resolve(state.board), state)
            self.scale = self.B**self.ledger.L
            self.phi = self.ledger.phi
        self.phi0 = self.phi
        self.increases = 0
        if self.keep_history:
            self.history.append(self.phi)

    @property
    def potential(self) -> Fraction:
        return Fraction(self.phi, self.scale)

    def _pair(self, x: int) -> tuple[int, int]:
        return self.us[x], self.vs[x]

    def pick(self, state: GameState, offer: Sequence[int]) -> int:
        if self.ledger is not None:
            x, after = self.ledger.choose(offer)
            self._pending = after
            return x
        pairs = {x: self._pair(x) for x in offer}
        best_x, best_u = None, None
        for x in sorted(offer):
            u, v = pairs[x]
            others = [pairs[y] for y in offer if y != x]
            w = self.eval.through(self.host, u, v, others)
            if best_u is None or w < best_u:
                best_x, best_u = x, w
        if self.track:
            # weight of everything the offer touches, counted edge by edge
            touched = 0
            done: list[tuple[int, int]] = []
            for x in offer:
                u, v = pairs[x]
                touched += self.eval.through(self.host, u, v, done)
                done.append((u, v))
            self._pending = self.phi - touched + self.B * best_u
            self._advised = best_x
        return best_x

    def observe(self, state: GameState, offer: Sequence[int], pick: int) -> None:
        before = self.phi
        if self.ledger is not None:
            self.ledger.apply(offer, pick)
            self.phi = self.ledger.phi
        elif self.track:
            # recompute from scratch if the pick was not the one we chose
            if getattr(self, "_pending", None) is not None and self._advised == pick:
                self.phi = self._pending
            else:
                self.phi = self.eval.total(self.host)
        self._pending = None
        if self.phi is not None and before is not None and self.phi > before:
            self.increases += 1
        if self.keep_history:
            self.history.append(self.phi)

    @property
    def initial_potential(self) -> Fraction:
        return Fraction(self.phi0, self.scale)

    def potential_history(self) -> list[Fraction]:
        return [Fraction(p, self.scale) for p in self.history]
