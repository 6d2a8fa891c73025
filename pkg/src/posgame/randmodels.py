"""Random subgraphs of a blow-up and sparse families of canonical copies.

Two canonical copies of the same pattern H meet in the induced subgraph
H[S], where S is the set of parts on which the copies pick the same vertex.
All intersection tests below work on the bitmask of S.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Literal, Sequence

import numpy as np

from .embed import ClaimedGraph, count_embeddings, iter_embeddings
from .graphcore import Board, EdgeSet, Pattern
from .invariants import expected_canonical_copies, f_lower

EMBEDDING_CAP = 10**7

Copy = tuple[int, ...]


def sample_gnp(H: Pattern, n: int, p: float, seed: int | None) -> EdgeSet:
    """Keep each edge of the n-blow-up of H independently with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    board = Board.blowup(H, n)
    rng = np.random.default_rng(seed)
    return EdgeSet.from_mask(rng.random(len(board)) < p)


def sample_gnm(H: Pattern, n: int, M: int, seed: int | None) -> EdgeSet:
    """A uniform M-subset of the edges of the n-blow-up of H."""
    N = H.e * n * n
    if not 0 <= M <= N:
        raise ValueError(f"M must lie in [0, {N}]")
    rng = np.random.default_rng(seed)
    mask = np.zeros(N, dtype=bool)
    mask[rng.choice(N, size=M, replace=False)] = True
    return EdgeSet.from_mask(mask)


class _Shapes:
    """Per-bitmask facts about induced subgraphs of H."""

    def __init__(self, H: Pattern):
        self.H = H
        full = (1 << H.v) - 1
        self.full = full
        self.size = [m.bit_count() for m in range(full + 1)]
        self.edges = [0] * (full + 1)
        for m in range(full + 1):
            self.edges[m] = sum(1 for a, b in H.edges if m >> a & 1 and m >> b & 1)
        self.clique = [self.edges[m] == self.size[m] * (self.size[m] - 1) // 2 for m in range(full + 1)]

    def allowed(self, m: int) -> bool:
        """Empty or a proper clique of H."""
        return m == 0 or (m != self.full and self.clique[m])


def agreement(a: Copy, b: Copy) -> int:
    m = 0
    for i, (x, y) in enumerate(zip(a, b)):
        if x == y:
            m |= 1 << i
    return m


def _overlaps(copies: Sequence[Copy]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Index pairs ``a < b`` of copies sharing a vertex, with their agreement masks.

    Pairs come out sorted by ``a`` and then ``b``.
    """
    F = len(copies)
    if F < 2:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, empty
    A = np.asarray(copies, dtype=np.int64)
    weights = 1 << np.arange(A.shape[1], dtype=np.int64)
    rows = max(1, 2**22 // (F * A.shape[1]))
    ia, ib, ms = [], [], []
    for lo in range(0, F - 1, rows):
        blk = A[lo:lo + rows]
        rest = A[lo + 1:]
        m = (blk[:, None, :] == rest[None, :, :]) @ weights
        i, j = np.nonzero(m)
        j = j + lo + 1
        keep = j > i + lo
        i, j = i[keep], j[keep]
        ia.append(i + lo)
        ib.append(j)
        ms.append(m[i, j - lo - 1])
    return np.concatenate(ia), np.concatenate(ib), np.concatenate(ms)


def _classify(ia: np.ndarray, ib: np.ndarray, ms: np.ndarray, shapes: _Shapes):
    """Split overlapping pairs into the P3 shape, the P4 shape and per-copy
    counts of each non-clique shape with at least two edges."""
    size = np.asarray(shapes.size)[ms]
    e = np.asarray(shapes.edges)[ms]
    clique = np.asarray(shapes.clique)[ms]
    p3 = (size == 2) & (e == 0)
    p4 = (size >= 3) & (e <= 1)
    sel = (e >= 2) & ~clique
    width = shapes.full + 1
    keys = np.concatenate([ia[sel] * width + ms[sel], ib[sel] * width + ms[sel]])
    uniq, counts = np.unique(keys, return_counts=True)
    per_shape = {(int(k) // width, int(k) % width): int(c) for k, c in zip(uniq, counts)}
    return p3, p4, per_shape


def _copy_edges(H: Pattern, board: Board, c: Copy) -> list[int]:
    return [board.index(c[a], c[b]) for a, b in H.edges]


@dataclass
class SparseFamily:
    """Canonical copies of H whose pairwise intersections are empty or cliques."""

    H: Pattern
    board: Board
    edges: EdgeSet
    copies: list[Copy] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.copies)

    def violations(self) -> list[tuple[Copy, Copy]]:
        """Pairs breaking the clique-or-empty rule, checked over all pairs."""
        shapes = _Shapes(self.H)
        return [(a, b) for a, b in combinations(self.copies, 2) if not shapes.allowed(agreement(a, b))]

    def missing(self) -> list[Copy]:
        """Members not present in the host edge set."""
        bits = self.edges.bits
        out = []
        for c in self.copies:
            if any(i < 0 or not bits[i] for i in _copy_edges(self.H, self.board, c)):
                out.append(c)
        return out

    def valid(self) -> bool:
        return not self.missing() and not self.violations()


@dataclass
class PropertyReport:
    """Outcome of checking the five family properties, with witnesses.

    ``edge_threshold`` is C f / (n^2 p) and ``union_threshold`` is C n^2 p.
    """

    C: float
    p: float
    copies: int
    union_edges: int = 0
    union_threshold: float = 0.0
    edge_threshold: float = 0.0
    p1: bool = True
    p2: bool = True
    p3: bool = True
    p4: bool = True
    p5: bool = True
    p2_witnesses: list[int] = field(default_factory=list)
    p3_witnesses: list[tuple[int, int]] = field(default_factory=list)
    p4_witnesses: list[tuple[int, int]] = field(default_factory=list)
    p5_witnesses: list[tuple[int, int]] = field(default_factory=list)
    rho: float | None = None
    rho_clamped: bool = False
    accepted: int | None = None
    found: int | None = None
    deleted: int | None = None

    @property
    def all_pass(self) -> bool:
        return self.p1 and self.p2 and self.p3 and self.p4 and self.p5

    def flags(self) -> dict[str, bool]:
        return {"p1": self.p1, "p2": self.p2, "p3": self.p3, "p4": self.p4, "p5": self.p5}


def host_density(H: Pattern, n: int, G: EdgeSet) -> float:
    return len(G) / (H.e * n * n)


def _thresholds(H: Pattern, n: int, p: float, C: float) -> tuple[float, float]:
    if p <= 0:
        return 0.0, 0.0
    union = C * n * n * p
    per_edge = C * f_lower(H, n, p) / (n * n * p)
    return union, per_edge


def check_properties(copies: Sequence[Copy], H: Pattern, board: Board, G: EdgeSet, C: float) -> PropertyReport:
    """Evaluate the five family properties literally.

    p is read off the host as |G| / (e(H) n^2).  Witnesses: P2 lists
    overloaded edge ids, P3/P4 list offending index pairs into ``copies``,
    P5 lists ``(copy index, agreement mask)``.
    """
    n = board.s
    p = host_density(H, n, G)
    union_t, edge_t = _thresholds(H, n, p, C)
    rep = PropertyReport(C=C, p=p, copies=len(copies), union_threshold=union_t, edge_threshold=edge_t)
    load: dict[int, int] = {}
    for c in copies:
        for i in _copy_edges(H, board, c):
            load[i] = load.get(i, 0) + 1
    rep.union_edges = len(load)
    rep.p1 = rep.union_edges <= union_t
    rep.p2_witnesses = sorted(i for i, k in load.items() if k > edge_t)
    rep.p2 = not rep.p2_witnesses
    ia, ib, ms = _overlaps(copies)
    p3, p4, per_shape = _classify(ia, ib, ms, _Shapes(H))
    rep.p3_witnesses = list(zip(ia[p3].tolist(), ib[p3].tolist()))
    rep.p4_witnesses = list(zip(ia[p4].tolist(), ib[p4].tolist()))
    rep.p5_witnesses = sorted(k for k, cnt in per_shape.items() if cnt > C)
    rep.p3, rep.p4, rep.p5 = not rep.p3_witnesses, not rep.p4_witnesses, not rep.p5_witnesses
    return rep


def canonical_copies(H: Pattern, board: Board, G: EdgeSet, cap: int = EMBEDDING_CAP) -> list[Copy]:
    """All canonical copies of H in G, sorted lexicographically."""
    host = ClaimedGraph.from_edgeset(board, G)
    parts = range(H.v)
    total = count_embeddings(H, host, parts=parts)
    if total > cap:
        raise ValueError(f"{total} canonical copies exceed the cap of {cap}")
    return sorted(iter_embeddings(H, host, parts=parts))


def greedy_sparse(copies: Iterable[Copy], H: Pattern) -> list[Copy]:
    """Scan copies in order, keeping each one whose intersection with every
    kept copy is empty or a proper clique."""
    shapes = _Shapes(H)
    kept: list[Copy] = []
    by_vertex: dict[int, list[int]] = {}
    for c in copies:
        ok = True
        seen = set()
        for x in c:
            for j in by_vertex.get(x, ()):
                if j in seen:
                    continue
                seen.add(j)
                if not shapes.allowed(agreement(c, kept[j])):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            for x in c:
                by_vertex.setdefault(x, []).append(len(kept))
            kept.append(c)
    return kept


def _delete_pass(copies: list[Copy], H: Pattern, board: Board, edge_t: float, C: float) -> list[Copy]:
    """One deletion pass against the accepted family (no cascading)."""
    doomed = set()
    load: dict[int, int] = {}
    edges_of = [_copy_edges(H, board, c) for c in copies]
    for es in edges_of:
        for i in es:
            load[i] = load.get(i, 0) + 1
    for k, es in enumerate(edges_of):
        if any(load[i] > edge_t for i in es):
            doomed.add(k)
    ia, ib, ms = _overlaps(copies)
    p3, p4, per_shape = _classify(ia, ib, ms, _Shapes(H))
    bad = p3 | p4
    doomed.update(ia[bad].tolist())
    doomed.update(ib[bad].tolist())
    doomed.update(k for (k, _), cnt in per_shape.items() if cnt > C)
    return [c for k, c in enumerate(copies) if k not in doomed]


def extract_sparse_family(G: EdgeSet, H: Pattern, n: int, C: float = 1.0,
                          mode: Literal["paper", "greedy"] = "paper", seed: int | None = 0,
                          cap: int = EMBEDDING_CAP) -> tuple[SparseFamily, PropertyReport]:
    """Pick a sparse family of canonical copies of H out of G.

    ``paper`` mode accepts each copy with probability f_H / E(Y_H), deletes
    every copy breaking one of the property rules, then thins greedily.
    ``greedy`` mode thins all copies directly.  The report describes the
    family just before thinning.
    """
    board = Board.blowup(H, n)
    if G.size != len(board):
        raise ValueError("edge set does not match the blow-up")
    copies = canonical_copies(H, board, G, cap)
    p = host_density(H, n, G)
    if mode == "paper":
        rho, clamped = 0.0, False
        if p > 0:
            raw = f_lower(H, n, p) / expected_canonical_copies(H, n, p)
            rho = min(max(raw, 0.0), 1.0)
            clamped = rho != raw
        rng = np.random.default_rng(seed)
        draws = rng.random(len(copies))
        accepted = [c for c, u in zip(copies, draws) if u < rho]
        _, edge_t = _thresholds(H, n, p, C)
        pre = _delete_pass(accepted, H, board, edge_t, C)
        report = check_properties(pre, H, board, G, C)
        report.rho, report.rho_clamped = rho, clamped
        report.accepted, report.deleted = len(accepted), len(accepted) - len(pre)
    elif mode == "greedy":
        pre = copies
        report = check_properties(pre, H, board, G, C)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    report.found = len(copies)
    family = SparseFamily(H, board, G, greedy_sparse(pre, H))
    return family, report
