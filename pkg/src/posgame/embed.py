"""Injective embeddings of a small pattern into a host graph.

Hosts classify each vertex pair as absent (0), free (1) or claimed (2).  A
claimed edge weighs ``host.B`` and a free edge weighs 1, so one routine gives
plain embedding counts (hosts with no free edges, ``B = 1``) as well as the
weighted sums behind the potential Client.

Vertices are placed in degree order.  Once every unplaced pattern vertex is a
leaf hanging off a placed vertex, the remaining factor is summed in closed
form from per-vertex degree counters instead of being enumerated.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb, factorial
from typing import Iterator, Sequence

import numpy as np

from .graphcore import Board, EdgeSet, Pattern


class _Plan:
    __slots__ = ("order", "back", "tail", "parts", "single_group")

    def __init__(self, H: Pattern, roots: tuple[int, ...], parts: tuple[int, ...] | None):
        order = list(roots)
        placed = set(roots)
        while len(order) < H.v:
            best = max(
                (u for u in range(H.v) if u not in placed),
                key=lambda u: (len(H.adjacency[u] & placed), H.degree(u), -u),
            )
            order.append(best)
            placed.add(best)
        pos = {u: i for i, u in enumerate(order)}
        self.order = tuple(order)
        self.back = tuple(
            tuple(sorted((w for w in H.adjacency[u] if pos[w] < i), key=pos.__getitem__))
            for i, u in enumerate(order)
        )
        self.parts = parts
        tail: list = [None] * (H.v + 1)
        single: list = [False] * (H.v + 1)
        for d in range(len(roots), H.v):
            rest = order[d:]
            if all(H.degree(x) == 1 and pos[next(iter(H.adjacency[x]))] < d for x in rest):
                leaves = tuple((x, next(iter(H.adjacency[x]))) for x in rest)
                anchors = {a for _, a in leaves}
                if parts is not None or len(anchors) == 1:
                    tail[d] = leaves
                    single[d] = len(anchors) == 1
                break
        self.tail = tuple(tail)
        self.single_group = tuple(single)


@lru_cache(maxsize=256)
def _plan(H: Pattern, roots: tuple[int, ...], parts: tuple[int, ...] | None) -> _Plan:
    return _Plan(H, roots, parts)


def _weighted_choose(c: int, f: int, m: int, B: int) -> int:
    """Sum over m-subsets of (c claimed, f free) candidates of the product of
    weights, times m! for the ordered assignment of leaves."""
    if m == 1:
        return c * B + f
    total = 0
    for j in range(max(0, m - f), min(c, m) + 1):
        total += comb(c, j) * comb(f, m - j) * B**j
    return total * factorial(m)


def _tail_value(plan: _Plan, host, assign: list[int], used: set[int], depth: int, excluded) -> int:
    leaves = plan.tail[depth]
    B = host.B
    if plan.parts is None:
        # one anchor, all leaves interchangeable
        u = assign[leaves[0][1]]
        c, f = host.tail(u, None)
        drop = set(used)
        if excluded:
            for a, b in excluded:
                if a == u:
                    drop.add(b)
                elif b == u:
                    drop.add(a)
        cls = host.cls
        for p in drop:
            k = cls(u, p)
            if k == 2:
                c -= 1
            elif k == 1:
                f -= 1
        return _weighted_choose(c, f, len(leaves), B)
    total = 1
    part_of = host.part_of
    cls = host.cls
    for leaf, anchor in leaves:
        part = plan.parts[leaf]
        u = assign[anchor]
        c, f = host.tail(u, part)
        drop = {p for p in used if part_of(p) == part}
        if excluded:
            for a, b in excluded:
                if a == u and part_of(b) == part:
                    drop.add(b)
                elif b == u and part_of(a) == part:
                    drop.add(a)
        for p in drop:
            k = cls(u, p)
            if k == 2:
                c -= 1
            elif k == 1:
                f -= 1
        total *= c * B + f
        if not total:
            return 0
    return total


def _extend(plan: _Plan, host, assign: list[int], used: set[int], depth: int, excluded) -> int:
    order = plan.order
    if depth == len(order):
        return 1
    if plan.tail[depth] is not None:
        return _tail_value(plan, host, assign, used, depth, excluded)
    v = order[depth]
    back = plan.back[depth]
    part = None if plan.parts is None else plan.parts[v]
    if back:
        cands = host.candidates(assign[back[0]], part)
    else:
        cands = host.vertices(part)
    cls = host.cls
    B = host.B
    total = 0
    for x in cands:
        if x in used:
            continue
        w = 1
        for nb in back:
            y = assign[nb]
            if excluded and ((y, x) in excluded or (x, y) in excluded):
                w = 0
                break
            k = cls(y, x)
            if k == 0:
                w = 0
                break
            if k == 2:
                w *= B
        if not w:
            continue
        assign[v] = x
        used.add(x)
        total += w * _extend(plan, host, assign, used, depth + 1, excluded)
        used.discard(x)
    assign[v] = -1
    return total


def count_embeddings(H: Pattern, host, parts: Sequence[int] | None = None) -> int:
    """Weighted number of injective embeddings of ``H`` into ``host``.

    With ``parts`` given, pattern vertex ``i`` may only land in host part
    ``parts[i]`` (canonical embeddings in a blow-up).
    """
    if H.v == 0:
        return 1
    parts_t = None if parts is None else tuple(parts)
    plan = _plan(H, (), parts_t)
    assign = [-1] * H.v
    return _extend(plan, host, assign, set(), 0, None)


def count_rooted(H: Pattern, host, roots: dict[int, int], parts: Sequence[int] | None = None,
                 excluded=None, root_weight: int | None = None) -> int:
    """Weighted embeddings extending a fixed partial assignment ``roots``
    (pattern vertex -> host vertex).

    Edges among the roots contribute their host weight unless ``root_weight``
    overrides it (used when the root edge is the element being evaluated).
    """
    rv = tuple(roots)
    parts_t = None if parts is None else tuple(parts)
    if parts_t is not None:
        for a, x in roots.items():
            if host.part_of(x) != parts_t[a]:
                return 0
    plan = _plan(H, rv, parts_t)
    assign = [-1] * H.v
    used = set()
    for a, x in roots.items():
        if x in used:
            return 0
        assign[a] = x
        used.add(x)
    w = 1
    for i, a in enumerate(rv):
        for b in rv[:i]:
            if b in H.adjacency[a]:
                if root_weight is not None:
                    w *= root_weight
                    continue
                x, y = assign[a], assign[b]
                if excluded and ((x, y) in excluded or (y, x) in excluded):
                    return 0
                k = host.cls(x, y)
                if k == 0:
                    return 0
                if k == 2:
                    w *= host.B
    if not w:
        return 0
    return w * _extend(plan, host, assign, used, len(rv), excluded)


@lru_cache(maxsize=256)
def _arc_orbits(H: Pattern) -> tuple[tuple[int, int, int], ...]:
    """Representatives ``(a, b, orbit size)`` of the ordered edges of ``H``
    under its automorphism group."""
    autos = automorphisms(H)
    arcs = [(a, b) for a, b in H.edges] + [(b, a) for a, b in H.edges]
    seen: set[tuple[int, int]] = set()
    reps = []
    for a, b in arcs:
        if (a, b) in seen:
            continue
        orbit = {(g[a], g[b]) for g in autos}
        seen |= orbit
        reps.append((a, b, len(orbit)))
    return tuple(reps)


def count_through_edge(H: Pattern, host, u: int, v: int, *, parts: Sequence[int] | None = None,
                       excluded=None, root_weight: int = 1) -> int:
    """Weighted embeddings of ``H`` whose image contains the edge ``{u, v}``.

    Without ``parts`` each copy through the edge is counted ``|Aut(H)|``
    times; with ``parts`` (canonical copies) each is counted once.
    """
    if parts is not None:
        pu, pv = host.part_of(u), host.part_of(v)
        total = 0
        for a, b in H.edges:
            pa, pb = parts[a], parts[b]
            if (pa, pb) == (pu, pv):
                total += count_rooted(H, host, {a: u, b: v}, parts, excluded, root_weight)
            elif (pa, pb) == (pv, pu):
                total += count_rooted(H, host, {a: v, b: u}, parts, excluded, root_weight)
        return total
    total = 0
    for a, b, size in _arc_orbits(H):
        total += size * count_rooted(H, host, {a: u, b: v}, None, excluded, root_weight)
    return total


def iter_embeddings(H: Pattern, host, parts: Sequence[int] | None = None) -> Iterator[tuple[int, ...]]:
    """Yield every injective embedding as a tuple indexed by pattern vertex
    (count-mode hosts only; no closed-form shortcuts)."""
    if H.v == 0:
        yield ()
        return
    parts_t = None if parts is None else tuple(parts)
    plan = _plan(H, (), parts_t)
    assign = [-1] * H.v
    used: set[int] = set()

    def rec(depth: int):
        if depth == H.v:
            yield tuple(assign)
            return
        v = plan.order[depth]
        back = plan.back[depth]
        part = None if parts_t is None else parts_t[v]
        cands = host.candidates(assign[back[0]], part) if back else host.vertices(part)
        for x in cands:
            if x in used:
                continue
            if all(host.cls(assign[nb], x) for nb in back[1:]):
                assign[v] = x
                used.add(x)
                yield from rec(depth + 1)
                used.discard(x)
        assign[v] = -1

    yield from rec(0)


class PatternHost:
    """A pattern viewed as a host graph (all edges claimed)."""

    B = 1

    def __init__(self, H: Pattern):
        self.H = H

    def cls(self, u: int, v: int) -> int:
        return 2 if self.H.has_edge(u, v) else 0

    def tail(self, u: int, part) -> tuple[int, int]:
        return self.H.degree(u), 0

    def candidates(self, u: int, part):
        return sorted(self.H.adjacency[u])

    def vertices(self, part):
        return range(self.H.v)

    def part_of(self, x: int) -> int:
        return 0


@lru_cache(maxsize=256)
def automorphisms(H: Pattern) -> tuple[tuple[int, ...], ...]:
    return tuple(iter_embeddings(H, PatternHost(H)))


def automorphism_count(H: Pattern) -> int:
    return count_embeddings(H, PatternHost(H))


class ClaimedGraph:
    """Static host built from a claimed edge set (all edges claimed)."""

    B = 1

    def __init__(self, vertex_count: int, mat: np.ndarray, part_size: int | None = None):
        self.vertex_count = vertex_count
        self.mat = mat
        self.s = part_size
        self.deg = mat.sum(axis=1, dtype=np.int64).tolist()
        if part_size:
            P = vertex_count // part_size
            self.degp = mat.reshape(vertex_count, P, part_size).sum(axis=2, dtype=np.int64).tolist()
        else:
            self.degp = None

    @classmethod
    def from_edgeset(cls, board: Board, claimed: EdgeSet) -> ClaimedGraph:
        ids = np.flatnonzero(claimed.bits)
        return cls.from_ids(board, ids)

    @classmethod
    def from_ids(cls, board: Board, ids) -> ClaimedGraph:
        V = board.vertex_count
        mat = np.zeros((V, V), dtype=bool)
        ids = np.asarray(ids, dtype=np.int64)
        a, b = board.us[ids], board.vs[ids]
        mat[a, b] = True
        mat[b, a] = True
        return cls(V, mat, board.s if board.kind == "blowup" else None)

    def cls(self, u: int, v: int) -> int:
        return 2 if self.mat[u, v] else 0

    def part_of(self, x: int) -> int:
        return x // self.s if self.s else 0

    def tail(self, u: int, part) -> tuple[int, int]:
        if part is None:
            return self.deg[u], 0
        return self.degp[u][part], 0

    def candidates(self, u: int, part):
        if part is None:
            return np.flatnonzero(self.mat[u]).tolist()
        lo = part * self.s
        return (np.flatnonzero(self.mat[u, lo:lo + self.s]) + lo).tolist()

    def vertices(self, part):
        if part is None:
            return range(self.vertex_count)
        return range(part * self.s, (part + 1) * self.s)
