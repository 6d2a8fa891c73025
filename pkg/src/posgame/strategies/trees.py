"""Recursive Waiter strategies forcing many copies of a tree.

Both strategies split the vertex set into a first half V1 and a second half
V2, recurse on V1 with the tree minus a leaf, and then hang the missing leaf
off V1 using edges into V2.  The dense variant attaches each anchor to many
V2 vertices; the sparse variant attaches each anchor to at most one fresh V2
vertex so the resulting copies stay vertex disjoint.
"""

from __future__ import annotations

from fractions import Fraction
from math import ceil, comb
from typing import Iterator, Sequence

from ..embed import ClaimedGraph, count_rooted, iter_embeddings
from ..engine import CLIENT, FREE, GameState
from ..graphcore import Pattern
from .base import PreconditionError, ScriptWaiter


def tree_guarantee(k: int, n: int, b: int) -> Fraction:
    """4^-C(k+1,2) n^k (b+1)^(1-k), exactly."""
    return Fraction(n**k, 4 ** comb(k + 1, 2) * (b + 1) ** (k - 1))


def split_leaf(T: Pattern) -> tuple[int, int, Pattern, int]:
    """Remove the largest-index leaf.

    Returns ``(leaf, anchor, T minus leaf, anchor's label in the smaller tree)``.
    """
    leaves = [x for x in range(T.v) if T.degree(x) == 1]
    if not leaves:
        raise ValueError("pattern has no leaf")
    leaf = max(leaves)
    anchor = next(iter(T.adjacency[leaf]))
    rest = [x for x in range(T.v) if x != leaf]
    return leaf, anchor, T.induced(rest), rest.index(anchor)


def _check_tree(T: Pattern) -> None:
    if not T.is_tree():
        raise ValueError(f"{T.label} is not a tree")


class TreeDenseWaiter(ScriptWaiter):
    """Forces at least ``tree_guarantee(k, n, b)`` copies of the tree ``T``
    on ``K_n`` whenever ``b <= n / 2^(k+6)``."""

    name = "tree-dense"

    def __init__(self, T: Pattern, enforce_window: bool = True):
        _check_tree(T)
        self.T = T
        self.enforce_window = enforce_window

    def start(self, state: GameState, rng) -> None:
        board = state.board
        if board.kind != "complete":
            raise PreconditionError("tree strategies play on complete boards")
        n, k = board.vertex_count, self.T.v
        if self.enforce_window and state.b * 2 ** (k + 6) > n:
            raise PreconditionError(f"b={state.b} exceeds n/2^(k+6) for n={n}, k={k}")
        self.anchor_counts: list[tuple[int, int]] = []
        super().start(state, rng)

    def script(self, state: GameState) -> Iterator[Sequence[int]]:
        yield from self._level(self.T, list(range(state.board.vertex_count)), state)

    def _level(self, T: Pattern, V: list[int], state: GameState):
        if T.v == 1:
            return
        _, _, Tk, a = split_leaf(T)
        half = ceil(len(V) / 2)
        V1, V2 = V[:half], V[half:]
        yield from self._level(Tk, V1, state)
        host = state.graph().claimed
        anchors = [u for u in V1 if count_rooted(Tk, host, {a: u}) > 0]
        self.anchor_counts.append((T.v, len(anchors)))
        w = state.b + 1
        rounds = len(V2) // w
        index = state.board.index
        for u in anchors:
            for r in range(rounds):
                yield sorted(index(u, y) for y in V2[r * w:(r + 1) * w])


class TreeSparseWaiter(ScriptWaiter):
    """Forces at least ``tree_guarantee(k, n, b)`` vertex-disjoint copies of
    ``T`` when ``n <= b <= n^(k/(k-1)) / 2^(k+6)``.

    After the game ``copies`` holds the tracked copies as tuples indexed by
    tree vertex.  ``A`` and ``B`` expose the current second-stage sets, with
    ``anchors`` and ``V2`` the level they belong to.
    """

    name = "tree-sparse"

    def __init__(self, T: Pattern, enforce_window: bool = True):
        _check_tree(T)
        self.T = T
        self.enforce_window = enforce_window

    def start(self, state: GameState, rng) -> None:
        board = state.board
        if board.kind != "complete":
            raise PreconditionError("tree strategies play on complete boards")
        n, k, b = board.vertex_count, self.T.v, state.b
        if self.enforce_window:
            if b < n:
                raise PreconditionError(f"b={b} below n={n}")
            if k >= 2 and (b * 2 ** (k + 6)) ** (k - 1) > n**k:
                raise PreconditionError(f"b={b} exceeds n^(k/(k-1))/2^(k+6) for n={n}, k={k}")
        self.copies: list[tuple[int, ...]] = []
        self.A: set[int] = set()
        self.B: set[int] = set()
        self.V2: list[int] = []
        self.anchors: set[int] = set()
        self.stage_log: list[tuple[int, int, int]] = []
        super().start(state, rng)

    def script(self, state: GameState) -> Iterator[Sequence[int]]:
        self.copies = yield from self._level(self.T, list(range(state.board.vertex_count)), state)

    def _level(self, T: Pattern, V: list[int], state: GameState):
        if T.v == 1:
            return [(v,) for v in V]
        leaf, anchor, Tk, a = split_leaf(T)
        half = ceil(len(V) / 2)
        V1, V2 = V[:half], V[half:]
        sub = yield from self._level(Tk, V1, state)
        t = tree_guarantee(T.v, len(V), state.b)
        tracker = state.graph()
        V2set = set(V2)
        by_anchor = {c[a]: c for c in sub}
        A = {u for u in by_anchor if not any(w in V2set for w in tracker.cadj[u])}
        B = {v for v in V2 if tracker.cdeg[v] == 0}
        self.A, self.B, self.V2, self.anchors = A, B, V2, set(by_anchor)
        index = state.board.index
        owner = state.owner
        cands = sorted(index(u, v) for u in A for v in B)
        us, vs = state.board.ends
        ptr = 0
        w = state.b + 1
        matched: dict[int, int] = {}
        rounds = 0
        while len(V2) - len(B) < t:
            offer = []
            j = ptr
            while j < len(cands) and len(offer) < w:
                x = cands[j]
                if owner[x] == FREE:
                    p, q = us[x], vs[x]
                    u, v = (p, q) if p in A else (q, p)
                    if u in A and v in B:
                        offer.append(x)
                j += 1
            if len(offer) < w:
                break
            ptr = j
            yield offer
            rounds += 1
            pick = state.transcript.picks[-1]
            p, q = us[pick], vs[pick]
            u, v = (p, q) if p in A else (q, p)
            A.discard(u)
            B.discard(v)
            matched[u] = v
        self.stage_log.append((T.v, len(sub), rounds))
        out = []
        for u in sorted(matched):
            c = list(by_anchor[u])
            c.insert(leaf, matched[u])
            out.append(tuple(c))
        return out


def verify_disjoint_copies(T: Pattern, copies: Sequence[Sequence[int]], state: GameState) -> bool:
    """Every copy is a copy of ``T`` in Client's graph and no two share a vertex."""
    index = state.board.index
    seen: set[int] = set()
    for c in copies:
        if len(set(c)) != T.v or seen.intersection(c):
            return False
        seen.update(c)
        for x, y in T.edges:
            i = index(c[x], c[y])
            if i < 0 or state.owner[i] != CLIENT:
                return False
    return True


def disjoint_packing(T: Pattern, state: GameState, seed_copies: Sequence[Sequence[int]] = ()) -> list[tuple[int, ...]]:
    """Greedy vertex-disjoint copies of ``T`` in Client's final graph.

    Starts from ``seed_copies`` and extends them with copies found in
    lexicographic order of their embeddings.
    """
    kept = [tuple(c) for c in seed_copies]
    used = {v for c in kept for v in c}
    host = ClaimedGraph.from_edgeset(state.board, state.edge_set(CLIENT))
    for emb in iter_embeddings(T, host):
        if used.isdisjoint(emb):
            kept.append(emb)
            used.update(emb)
    return kept
