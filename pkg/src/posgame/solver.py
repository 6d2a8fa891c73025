"""Exact values of tiny Waiter-Client games by memoised minimax.

Positions are keyed by the pair of bitmasks (Client elements, Waiter
elements).  Two cut-offs keep the search small without changing any stored
value: Waiter can never beat the number of sets still avoiding his elements,
and Client can never go below the number of sets he already owns.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from typing import Sequence

from .engine import CLIENT, GameState, WinningFamily, policy_rngs
from .graphcore import Board

MAX_ELEMENTS = 12


class SolverCapError(ValueError):
    """The board is too large for exhaustive search."""


def _family_masks(board: Board, family) -> list[int]:
    if isinstance(family, WinningFamily):
        sets = family.resolve(board)
    else:
        sets = [tuple(s) for s in family]
    masks = []
    for s in sets:
        m = 0
        for x in s:
            if not 0 <= x < len(board):
                raise ValueError(f"element {x} is not on the board")
            m |= 1 << x
        masks.append(m)
    return masks


def _vertex_symmetries(board: Board, masks: list[int]) -> list[list[int]]:
    """Element permutations induced by vertex permutations of a small complete
    board that map the family onto itself."""
    if board.kind != "complete" or board.vertex_count > 5:
        return []
    fam = sorted(masks)
    out = []
    for perm in permutations(range(board.vertex_count)):
        emap = [board.index(perm[u], perm[v]) for u, v in board.elements]
        img = sorted(sum(1 << emap[x] for x in range(len(board)) if m >> x & 1) for m in masks)
        if img == fam:
            out.append(emap)
    return out


class Solver:
    """Minimax over all offers and picks for one (board, family, b)."""

    def __init__(self, board: Board, family, b: int):
        N = len(board)
        if N > MAX_ELEMENTS:
            raise SolverCapError(f"board has {N} elements, cap is {MAX_ELEMENTS}")
        if b < 1:
            raise ValueError("bias b must be at least 1")
        self.board, self.b, self.N = board, b, N
        self.masks = _family_masks(board, family)
        self.full = (1 << N) - 1
        self.memo: dict[tuple[int, int], int] = {}
        self.symmetries = _vertex_symmetries(board, self.masks)

    def owned(self, c: int) -> int:
        return sum(1 for m in self.masks if m & c == m)

    def alive(self, w: int) -> int:
        return sum(1 for m in self.masks if not m & w)

    def _offers(self, c: int, w: int):
        free = [x for x in range(self.N) if not (c | w) >> x & 1]
        offers = combinations(free, self.b + 1)
        if c == 0 and w == 0 and self.symmetries:
            seen = set()
            reps = []
            for o in offers:
                key = min(tuple(sorted(e[x] for x in o)) for e in self.symmetries)
                if key not in seen:
                    seen.add(key)
                    reps.append(o)
            return reps
        return offers

    def value(self, c: int = 0, w: int = 0) -> int:
        key = (c, w)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        free = self.full & ~(c | w)
        if free.bit_count() < self.b + 1:
            v = self.owned(c)
        else:
            top = self.alive(w)
            floor = self.owned(c)
            best = -1
            for o in self._offers(c, w):
                om = sum(1 << x for x in o)
                worst = None
                for x in o:
                    r = self.value(c | 1 << x, w | (om & ~(1 << x)))
                    if worst is None or r < worst:
                        worst = r
                        if worst <= best or worst == floor:
                            break
                if worst > best:
                    best = worst
                    if best == top:
                        break
            v = best
        self.memo[key] = v
        return v

    def principal_variation(self) -> list[tuple[tuple[int, ...], int]]:
        """One optimal line: Waiter's best offer and Client's best reply each round."""
        c = w = 0
        target = self.value()
        line = []
        while (self.full & ~(c | w)).bit_count() >= self.b + 1:
            for o in combinations([x for x in range(self.N) if not (c | w) >> x & 1], self.b + 1):
                om = sum(1 << x for x in o)
                replies = [(self.value(c | 1 << x, w | (om & ~(1 << x))), x) for x in o]
                r, x = min(replies)
                if r == target:
                    line.append((o, x))
                    c, w = c | 1 << x, w | (om & ~(1 << x))
                    break
            else:  # pragma: no cover - the value table guarantees a witness
                raise RuntimeError("no offer attains the stored value")
        return line


def exact_value(board: Board, family, b: int) -> int:
    """Value of the game under perfect play on both sides."""
    return Solver(board, family, b).value()


def potential_bound(board: Board, family, b: int) -> Fraction:
    """Sum over winning sets of (b+1)^-|A|."""
    return sum((Fraction(1, (b + 1) ** m.bit_count()) for m in _family_masks(board, family)), Fraction(0))


@dataclass
class Certificate:
    value: int
    worst_line: list[int]
    leaves: int


def certify_waiter(board: Board, family, b: int, waiter, seed: int | None = 0,
                   rounds: int | None = None) -> Certificate:
    """Smallest value Client can hold the given Waiter policy to.

    Every Client reply sequence is replayed from a fresh copy of the policy.
    With ``rounds`` set, the position is scored after that many rounds
    (without the endgame rule) instead of at the end of the game.
    """
    if len(board) > MAX_ELEMENTS:
        raise SolverCapError(f"board has {len(board)} elements, cap is {MAX_ELEMENTS}")
    masks = _family_masks(board, family)
    proto = copy.deepcopy(waiter)

    def score(state: GameState) -> int:
        c = 0
        for x in range(state.N):
            if state.owner[x] == CLIENT:
                c |= 1 << x
        return sum(1 for m in masks if m & c == m)

    def replay(picks: Sequence[int]):
        state = GameState(board, b, seed)
        pol = copy.deepcopy(proto)
        pol.start(state, policy_rngs(seed)[0])
        obs = getattr(pol, "observe", None)
        for x in picks:
            offer = pol.offer(state)
            if x not in offer:
                raise RuntimeError("policy is not deterministic under replay")
            state.apply_round(offer, x)
            if obs is not None:
                obs(state, offer, x)
        return state, pol

    leaves = 0

    def dfs(picks: list[int]) -> tuple[int, list[int]]:
        nonlocal leaves
        state, pol = replay(picks)
        done = state.n_free < b + 1 or (rounds is not None and state.round >= rounds)
        if done:
            if rounds is None or state.n_free < b + 1 and state.round < rounds:
                state.finalize()
            leaves += 1
            return score(state), list(picks)
        best = None
        for x in sorted(pol.offer(state)):
            r = dfs(picks + [x])
            if best is None or r[0] < best[0]:
                best = r
        return best

    v, line = dfs([])
    return Certificate(v, line, leaves)
