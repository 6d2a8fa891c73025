"""Weighted copy counts through a single edge.

``through(host, u, v, excluded)`` sums, over embeddings of the pattern whose
image contains the edge ``{u, v}``, the product of the host weights of the
other edges; the edge itself weighs 1 and any pair in ``excluded`` weighs 0.
Stars get a closed form from degree counters; everything else goes through
the backtracking counter.
"""

from __future__ import annotations

from math import comb, factorial

from ..embed import count_embeddings, count_through_edge
from ..graphcore import Board, Pattern


class GenericEvaluator:
    def __init__(self, H: Pattern, parts: tuple[int, ...] | None):
        self.H = H
        self.parts = parts

    def through(self, host, u: int, v: int, excluded) -> int:
        return count_through_edge(self.H, host, u, v, parts=self.parts,
                                  excluded=set(excluded) if excluded else None, root_weight=1)

    def total(self, host) -> int:
        return count_embeddings(self.H, host, self.parts)


class StarEvaluator:
    """Closed form for K_{1,m}: every copy through ``uv`` is centred at ``u``
    or ``v`` (for m >= 2), so only degree counts at the two endpoints matter."""

    def __init__(self, H: Pattern):
        self.H = H
        self.m = H.e
        self.fact = factorial(self.m)

    def _choose(self, c: int, f: int, r: int, B: int) -> int:
        if r == 1:
            return c * B + f
        return sum(comb(c, j) * comb(f, r - j) * B**j for j in range(max(0, r - f), min(c, r) + 1))

    def through(self, host, u: int, v: int, excluded) -> int:
        if self.m == 1:
            return 2
        B = host.B
        cls = host.cls
        r = self.m - 1
        total = 0
        for c, o in ((u, v), (v, u)):
            cc, ff = host.tail(c, None)
            k = cls(c, o)
            if k == 2:
                cc -= 1
            elif k == 1:
                ff -= 1
            for a, b in excluded:
                if a == c:
                    p = b
                elif b == c:
                    p = a
                else:
                    continue
                if p == o:
                    continue
                k = cls(c, p)
                if k == 2:
                    cc -= 1
                elif k == 1:
                    ff -= 1
            total += self._choose(cc, ff, r, B)
        return self.fact * total

    def total(self, host) -> int:
        return count_embeddings(self.H, host)


def is_star(H: Pattern) -> bool:
    if H.e == 0:
        return False
    if H.e == 1:
        return H.v == 2
    return H.is_tree() and any(H.degree(x) == H.e for x in range(H.v))


def make_evaluator(H: Pattern, board: Board, canonical: bool = False):
    if canonical:
        if board.kind != "blowup":
            raise ValueError("canonical copies need a blow-up board")
        return GenericEvaluator(H, tuple(range(H.v)))
    if is_star(H):
        return StarEvaluator(H)
    return GenericEvaluator(H, None)
