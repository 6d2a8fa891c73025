"""Patterns, boards and edge sets.

Every game in the package is played on a :class:`Board`: an indexed edge
universe whose elements are unordered vertex pairs.  Game and strategy code
only ever speaks element ids; the pair <-> id translation lives here.
"""

from __future__ import annotations

import math
import re
from array import array
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

# Boards larger than this are refused; they would not fit the per-element
# arrays the engine keeps.
MAX_ELEMENTS = 50_000_000

# Enumeration cap for candidate_subgraphs (2^v vertex subsets).
MAX_PATTERN_VERTICES = 10


def _norm(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Pattern:
    """A small fixed graph H with labeled vertices ``0..vertex_count-1``."""

    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.vertex_count < 0:
            raise ValueError("vertex_count must be nonnegative")
        seen = set()
        normed = []
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"loop edge at vertex {u}")
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise ValueError(f"edge ({u}, {v}) out of range for {self.vertex_count} vertices")
            e = _norm(int(u), int(v))
            if e in seen:
                raise ValueError(f"repeated edge {e}")
            seen.add(e)
            normed.append(e)
        object.__setattr__(self, "edges", tuple(normed))

    @property
    def v(self) -> int:
        return self.vertex_count

    @property
    def e(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        adj = [set() for _ in range(self.vertex_count)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return tuple(frozenset(a) for a in adj)

    @cached_property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    def has_edge(self, u: int, v: int) -> bool:
        return _norm(u, v) in self.edge_set

    def isolated_vertices(self) -> list[int]:
        return [u for u in range(self.vertex_count) if not self.adjacency[u]]

    def without_isolated(self) -> Pattern:
        """Drop isolated vertices (relabelling the rest in order)."""
        iso = self.isolated_vertices()
        if not iso:
            return self
        warnings.warn(f"stripping {len(iso)} isolated vertices from pattern {self.label}", stacklevel=2)
        keep = [u for u in range(self.vertex_count) if self.adjacency[u]]
        relabel = {u: i for i, u in enumerate(keep)}
        return Pattern(len(keep), tuple((relabel[a], relabel[b]) for a, b in self.edges), self.name)

    def induced(self, vertices: Iterable[int]) -> Pattern:
        vs = sorted(set(vertices))
        relabel = {u: i for i, u in enumerate(vs)}
        es = tuple((relabel[a], relabel[b]) for a, b in self.edges if a in relabel and b in relabel)
        return Pattern(len(vs), es)

    def is_complete(self) -> bool:
        return self.e == self.vertex_count * (self.vertex_count - 1) // 2

    def is_connected(self) -> bool:
        if self.vertex_count <= 1:
            return True
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for w in self.adjacency[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.vertex_count

    def is_forest(self) -> bool:
        # a graph is a forest iff e = v - (#components)
        comps = 0
        seen: set[int] = set()
        for r in range(self.vertex_count):
            if r in seen:
                continue
            comps += 1
            seen.add(r)
            stack = [r]
            while stack:
                u = stack.pop()
                for w in self.adjacency[u]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
        return self.e == self.vertex_count - comps

    def is_tree(self) -> bool:
        return self.vertex_count >= 1 and self.is_connected() and self.e == self.vertex_count - 1

    def contains_cherry(self) -> bool:
        """True iff some vertex has degree >= 2, i.e. K_{1,2} is a subgraph."""
        return any(len(a) >= 2 for a in self.adjacency)

    @property
    def label(self) -> str:
        return self.name or self.spec()

    def spec(self) -> str:
        """Explicit textual form ``<v>:a-b,c-d`` accepted by :func:`pattern_from_spec`."""
        return f"{self.vertex_count}:" + ",".join(f"{a}-{b}" for a, b in self.edges)

    # named families ---------------------------------------------------
    @classmethod
    def complete(cls, k: int) -> Pattern:
        return cls(k, tuple(combinations(range(k), 2)), f"k{k}")

    @classmethod
    def path(cls, k: int) -> Pattern:
        """Path on ``k`` vertices."""
        return cls(k, tuple((i, i + 1) for i in range(k - 1)), f"p{k}")

    @classmethod
    def star(cls, k: int) -> Pattern:
        """Star on ``k`` vertices (centre 0)."""
        return cls(k, tuple((0, i) for i in range(1, k)), f"s{k}")

    @classmethod
    def cycle(cls, k: int) -> Pattern:
        if k < 3:
            raise ValueError("cycle needs at least 3 vertices")
        return cls(k, tuple((i, (i + 1) % k) for i in range(k)), f"c{k}")


_SHORTHAND = re.compile(r"^([kpsc])(\d+)$")
_CLIQUE_MINUS = re.compile(r"^k(\d+)-(\d+)$")


def pattern_from_spec(spec: str) -> Pattern:
    """Resolve ``k4``, ``p3``, ``s4``, ``c5``, ``k5-3`` (K_5 minus 3 matching
    edges) or an explicit ``<v>:a-b,...`` string."""
    spec = spec.strip().lower()
    m = _SHORTHAND.match(spec)
    if m:
        kind, k = m.group(1), int(m.group(2))
        return {"k": Pattern.complete, "p": Pattern.path, "s": Pattern.star, "c": Pattern.cycle}[kind](k)
    m = _CLIQUE_MINUS.match(spec)
    if m:
        from .invariants import clique_minus_matching

        return clique_minus_matching(int(m.group(1)), int(m.group(2)))
    if ":" in spec:
        head, _, body = spec.partition(":")
        edges = []
        for tok in filter(None, body.split(",")):
            a, _, b = tok.partition("-")
            edges.append((int(a), int(b)))
        return Pattern(int(head), tuple(edges))
    raise ValueError(f"unrecognised pattern spec {spec!r}")


def parse_graph(text: str) -> Pattern:
    """Parse the edge-list format: optional ``n <count>`` line, then ``u v`` lines.

    Blank lines and ``#`` comments are ignored; duplicate edges are merged.
    """
    declared = None
    edges: list[tuple[int, int]] = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if toks[0] == "n":
            if len(toks) != 2 or declared is not None or edges:
                raise ValueError(f"line {lineno}: malformed vertex-count line")
            declared = _nonneg(toks[1], lineno)
            continue
        if len(toks) != 2:
            raise ValueError(f"line {lineno}: expected 'u v', got {line!r}")
        u, v = _nonneg(toks[0], lineno), _nonneg(toks[1], lineno)
        if u == v:
            raise ValueError(f"line {lineno}: loop edge at vertex {u}")
        if declared is not None and max(u, v) >= declared:
            raise ValueError(f"line {lineno}: vertex index {max(u, v)} >= declared count {declared}")
        e = _norm(u, v)
        if e not in seen:
            seen.add(e)
            edges.append(e)
    if declared is None:
        declared = 1 + max((max(e) for e in edges), default=-1)
    return Pattern(declared, tuple(edges))


def _nonneg(tok: str, lineno: int) -> int:
    if not tok.isdigit():
        raise ValueError(f"line {lineno}: malformed token {tok!r}")
    return int(tok)


class Board:
    """An indexed edge universe.

    Element ids are dense ``0..N-1``.  Endpoints live in two int32 arrays so
    that boards with millions of elements stay cheap; ``elements`` builds the
    list of pairs on demand.  ``part_of`` is set for blow-ups, where vertex
    ``x`` lies in part ``x // s``.
    """

    def __init__(self, vertex_count: int, us, vs, *, kind: str, descriptor: str,
                 part_of=None, pattern: Pattern | None = None, s: int | None = None):
        self.vertex_count = int(vertex_count)
        self.us = np.asarray(us, dtype=np.int32)
        self.vs = np.asarray(vs, dtype=np.int32)
        self.kind = kind
        self.descriptor = descriptor
        self.part_of = None if part_of is None else np.asarray(part_of, dtype=np.int32)
        self.pattern = pattern
        self.s = s
        self._lookup: dict[tuple[int, int], int] | None = None
        if kind == "complete":
            n = self.vertex_count
            self.index = lambda u, v: _complete_index(n, u, v)  # type: ignore[method-assign]
        elif kind == "blowup":
            self._init_blowup_index()

    # construction ------------------------------------------------------
    @classmethod
    def complete(cls, n: int) -> Board:
        if n < 0:
            raise ValueError("n must be nonnegative")
        N = n * (n - 1) // 2
        if N > MAX_ELEMENTS:
            raise OverflowError(f"K_{n} has {N} elements, above the cap {MAX_ELEMENTS}")
        iu, ju = np.triu_indices(n, k=1)
        return cls(n, iu, ju, kind="complete", descriptor=f"k{n}")

    @classmethod
    def blowup(cls, H: Pattern, s: int) -> Board:
        if s < 1:
            raise ValueError("part size must be >= 1")
        if H.e < 1:
            raise ValueError("blow-up needs a pattern with at least one edge")
        N = H.e * s * s
        if N > MAX_ELEMENTS:
            raise OverflowError(f"blow-up has {N} elements, above the cap {MAX_ELEMENTS}")
        us, vs = [], []
        block = np.arange(s, dtype=np.int32)
        for i, j in H.edges:
            us.append(np.repeat(block + i * s, s))
            vs.append(np.tile(block + j * s, s))
        part_of = np.repeat(np.arange(H.v, dtype=np.int32), s)
        return cls(H.v * s, np.concatenate(us), np.concatenate(vs), kind="blowup",
                   descriptor=f"blowup({H.spec()},{s})", part_of=part_of, pattern=H, s=s)

    @classmethod
    def from_edges(cls, vertex_count: int, pairs: Sequence[tuple[int, int]], part_of=None) -> Board:
        P = Pattern(vertex_count, tuple(pairs))
        us = [a for a, _ in P.edges]
        vs = [b for _, b in P.edges]
        return cls(vertex_count, us, vs, kind="graph", descriptor=f"graph({P.spec()})", part_of=part_of)

    @classmethod
    def matching(cls, N: int) -> Board:
        """Abstract ground set of ``N`` elements, realised as a perfect matching."""
        return cls(2 * N, np.arange(0, 2 * N, 2), np.arange(1, 2 * N, 2), kind="graph",
                   descriptor=f"matching({N})")

    @classmethod
    def from_descriptor(cls, desc: str) -> Board:
        desc = desc.strip()
        if m := re.fullmatch(r"k(\d+)", desc):
            return cls.complete(int(m.group(1)))
        if m := re.fullmatch(r"blowup\((.+),(\d+)\)", desc):
            return cls.blowup(pattern_from_spec(m.group(1)), int(m.group(2)))
        if m := re.fullmatch(r"matching\((\d+)\)", desc):
            return cls.matching(int(m.group(1)))
        if m := re.fullmatch(r"graph\((.+)\)", desc):
            P = pattern_from_spec(m.group(1))
            return cls.from_edges(P.v, P.edges)
        raise ValueError(f"unrecognised board descriptor {desc!r}")

    # queries -------------------------------------------------------------
    def __len__(self) -> int:
        return int(self.us.shape[0])

    @property
    def N(self) -> int:
        return len(self)

    def __repr__(self) -> str:
        return f"Board({self.descriptor}, N={len(self)})"

    @cached_property
    def elements(self) -> list[tuple[int, int]]:
        return list(zip(self.us.tolist(), self.vs.tolist()))

    def element(self, i: int) -> tuple[int, int]:
        return int(self.us[i]), int(self.vs[i])

    @cached_property
    def ends(self) -> tuple[array, array]:
        """Endpoint arrays as stdlib arrays (fast scalar access in hot loops)."""
        return array("i", self.us.tobytes()), array("i", self.vs.tobytes())

    def index(self, u: int, v: int) -> int:
        """Element id of the pair {u, v}, or -1 when it is not on the board."""
        if self._lookup is None:
            self._lookup = {_norm(a, b): i for i, (a, b) in enumerate(self.elements)}
        return self._lookup.get(_norm(u, v), -1)

    def _init_blowup_index(self):
        H, s = self.pattern, self.s
        t = H.v
        offset = [[-1] * t for _ in range(t)]
        for k, (i, j) in enumerate(H.edges):
            offset[i][j] = k * s * s
        ss = s * s

        def index(u: int, v: int) -> int:
            pu, pv = u // s, v // s
            if pu > pv:
                u, v, pu, pv = v, u, pv, pu
            off = offset[pu][pv]
            if off < 0:
                return -1
            return off + (u - pu * s) * s + (v - pv * s)

        self.index = index  # type: ignore[method-assign]
        self._blowup_offset = offset
        self._ss = ss

    @property
    def parts(self) -> int:
        return 1 if self.part_of is None else int(self.pattern.v if self.pattern else self.part_of.max() + 1)

    def part_vertices(self, part: int) -> range:
        if self.kind != "blowup":
            raise ValueError("board has no part structure")
        return range(part * self.s, (part + 1) * self.s)

    def degree_into(self, u: int, part: int | None) -> int:
        """Number of board elements joining ``u`` to ``part`` (``None``: anywhere)."""
        if self.kind == "complete":
            return self.vertex_count - 1
        if self.kind == "blowup":
            pu = u // self.s
            if part is None:
                return self.s * self.pattern.degree(pu)
            return self.s if self.pattern.has_edge(pu, part) else 0
        deg = self._graph_degrees
        if part is None:
            return int(deg[u])
        return sum(1 for w in self._graph_adj[u] if self.part_of is not None and self.part_of[w] == part)

    @cached_property
    def _graph_adj(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for a, b in self.elements:
            adj[a].append(b)
            adj[b].append(a)
        return adj

    @cached_property
    def _graph_degrees(self) -> np.ndarray:
        return np.bincount(np.concatenate([self.us, self.vs]), minlength=self.vertex_count)

    def neighbors(self, u: int) -> list[int]:
        """Board neighbours of ``u`` (all vertices the board joins to ``u``)."""
        if self.kind == "complete":
            return [w for w in range(self.vertex_count) if w != u]
        if self.kind == "blowup":
            pu = u // self.s
            out: list[int] = []
            for q in sorted(self.pattern.adjacency[pu]):
                out.extend(self.part_vertices(q))
            return out
        return sorted(self._graph_adj[u])

    def edge_set(self, ids: Iterable[int] = ()) -> EdgeSet:
        es = EdgeSet(len(self))
        for i in ids:
            es.add(i)
        return es

    def full(self) -> EdgeSet:
        es = EdgeSet(len(self))
        es.bits[:] = True
        return es


def _complete_index(n: int, u: int, v: int) -> int:
    if u == v:
        return -1
    if u > v:
        u, v = v, u
    return u * (2 * n - u - 1) // 2 + (v - u - 1)


class EdgeSet:
    """Mutable bitset over board element ids."""

    __slots__ = ("bits",)

    def __init__(self, size: int, bits=None):
        self.bits = np.zeros(size, dtype=bool) if bits is None else np.asarray(bits, dtype=bool)

    @classmethod
    def from_mask(cls, mask) -> EdgeSet:
        return cls(len(mask), np.array(mask, dtype=bool))

    def add(self, i: int) -> None:
        self.bits[i] = True

    def discard(self, i: int) -> None:
        self.bits[i] = False

    def __contains__(self, i: int) -> bool:
        return bool(self.bits[i])

    def __len__(self) -> int:
        return int(np.count_nonzero(self.bits))

    @property
    def size(self) -> int:
        return int(self.bits.shape[0])

    def ids(self) -> list[int]:
        return np.flatnonzero(self.bits).tolist()

    def copy(self) -> EdgeSet:
        return EdgeSet(self.size, self.bits.copy())

    def __eq__(self, other) -> bool:
        return isinstance(other, EdgeSet) and np.array_equal(self.bits, other.bits)

    def __repr__(self) -> str:
        return f"EdgeSet({len(self)}/{self.size})"


def count_copies(board: Board, claimed: EdgeSet, H: Pattern) -> int:
    """Number of unlabeled copies of ``H`` in the claimed graph."""
    from .embed import ClaimedGraph, automorphism_count, count_embeddings

    if claimed.size != len(board):
        raise ValueError("edge set does not match the board")
    host = ClaimedGraph.from_edgeset(board, claimed)
    emb = count_embeddings(H, host)
    aut = automorphism_count(H)
    assert emb % aut == 0
    return emb // aut


def count_canonical_copies(board: Board, claimed: EdgeSet, Hsub: Pattern,
                           labels: Sequence[int] | None = None) -> int:
    """Canonical copies of ``Hsub`` in a blow-up: pattern vertex ``i`` must land
    in part ``labels[i]`` (default: part ``i``)."""
    from .embed import ClaimedGraph, count_embeddings

    if board.kind != "blowup":
        raise ValueError("canonical copies need a blow-up board")
    labels = tuple(range(Hsub.v)) if labels is None else tuple(labels)
    if len(labels) != Hsub.v or len(set(labels)) != len(labels):
        raise ValueError("labels must assign distinct parts to every vertex")
    if any(not 0 <= p < board.pattern.v for p in labels):
        raise ValueError(f"part labels {labels} reference parts absent from the board")
    host = ClaimedGraph.from_edgeset(board, claimed)
    return count_embeddings(Hsub, host, parts=labels)


def candidate_subgraphs(H: Pattern) -> list[tuple[int, int, bool]]:
    """Subgraph profiles ``(v', e', is_clique)`` sufficient for the density
    invariants.

    For each vertex subset the induced profile is emitted; when the induced
    graph is complete, or already holds every edge of H, the profile with one
    edge fewer is emitted too, plus the two-vertex empty graph.  Every invariant built on this list
    optimises a quantity monotone in ``e'`` for fixed ``v'``, so no other
    edge subsets can win.
    """
    if H.v > MAX_PATTERN_VERTICES:
        raise ValueError(f"pattern has {H.v} vertices, cap is {MAX_PATTERN_VERTICES}")
    masks = [0] * H.v
    for a, b in H.edges:
        masks[a] |= 1 << b
        masks[b] |= 1 << a
    out = set()
    for S in range(1, 1 << H.v):
        k = S.bit_count()
        e = sum((masks[i] & S).bit_count() for i in range(H.v) if S >> i & 1) // 2
        clique = e == k * (k - 1) // 2
        out.add((k, e, clique))
        # g1 excludes cliques and e' = e(H); the next edge count down is then the densest candidate
        if (clique or e == H.e) and e >= 1:
            out.add((k, e - 1, False))
    out.add((2, 0, False))
    return sorted(out)


def all_subgraph_profiles(H: Pattern) -> list[tuple[int, int, bool]]:
    """Exhaustive (vertex subset, edge subset) enumeration; a slow oracle for
    :func:`candidate_subgraphs` on small patterns."""
    out = set()
    for k in range(1, H.v + 1):
        for S in combinations(range(H.v), k):
            Sset = set(S)
            inner = [e for e in H.edges if e[0] in Sset and e[1] in Sset]
            full = k * (k - 1) // 2
            for r in range(len(inner) + 1):
                for sub in combinations(inner, r):
                    out.add((k, len(sub), len(sub) == full))
    return sorted(out)


def complete_copy_count(m: int, H: Pattern) -> int:
    """Closed form for the number of copies of ``H`` in ``K_m``."""
    from .embed import automorphism_count

    if m < H.v:
        return 0
    return math.perm(m, H.v) // automorphism_count(H)
