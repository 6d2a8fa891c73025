"""(b:1) Waiter-Client game mechanics.

Each round Waiter offers ``b + 1`` free elements, Client keeps one and Waiter
takes the rest.  Once fewer than ``b + 1`` elements are free they all go to
Waiter.  The value of a finished game is the number of winning sets Client
owns completely.
"""

from __future__ import annotations

import random
from array import array
from dataclasses import dataclass, field
from typing import Iterator, Protocol, Sequence

import numpy as np

from .graphcore import Board, EdgeSet, Pattern, count_canonical_copies, count_copies

FREE, CLIENT, WAITER = 0, 1, 2

TRANSCRIPT_HEADER = "posgame-transcript v1"


class IllegalMoveError(Exception):
    """A strategy produced a move the rules forbid."""

    def __init__(self, message: str, snapshot: dict | None = None):
        super().__init__(message)
        self.snapshot = snapshot or {}


class Transcript:
    """Compact record of a game: flat offer array plus one pick per round."""

    __slots__ = ("board", "b", "seed", "offers", "picks")

    def __init__(self, board: str, b: int, seed: int | None = None):
        self.board = board
        self.b = b
        self.seed = seed
        self.offers = array("q")
        self.picks = array("q")

    def append(self, offer: Sequence[int], pick: int) -> None:
        self.offers.extend(offer)
        self.picks.append(pick)

    def __len__(self) -> int:
        return len(self.picks)

    def round(self, i: int) -> tuple[tuple[int, ...], int]:
        w = self.b + 1
        return tuple(self.offers[i * w:(i + 1) * w]), self.picks[i]

    def __iter__(self) -> Iterator[tuple[tuple[int, ...], int]]:
        for i in range(len(self.picks)):
            yield self.round(i)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Transcript) and self.board == other.board and self.b == other.b
                and self.seed == other.seed and self.offers == other.offers and self.picks == other.picks)

    def to_text(self) -> str:
        lines = [
            TRANSCRIPT_HEADER,
            f"board: {self.board}",
            f"b: {self.b}",
            f"seed: {'none' if self.seed is None else self.seed}",
        ]
        for i, (offer, pick) in enumerate(self, 1):
            lines.append(f"R{i}: offer={','.join(map(str, offer))} pick={pick}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Transcript:
        lines = text.splitlines()
        if len(lines) < 4 or lines[0] != TRANSCRIPT_HEADER:
            raise ValueError("not a posgame transcript")
        fields = {}
        for line in lines[1:4]:
            key, sep, val = line.partition(": ")
            if not sep:
                raise ValueError(f"malformed header line {line!r}")
            fields[key] = val
        seed = None if fields["seed"] == "none" else int(fields["seed"])
        t = cls(fields["board"], int(fields["b"]), seed)
        for i, line in enumerate(lines[4:], 1):
            head, _, rest = line.partition(": ")
            if head != f"R{i}":
                raise ValueError(f"round {i}: unexpected line {line!r}")
            offer_part, pick_part = rest.split(" ")
            if not offer_part.startswith("offer=") or not pick_part.startswith("pick="):
                raise ValueError(f"round {i}: malformed line {line!r}")
            offer = [int(x) for x in offer_part[6:].split(",")]
            if len(offer) != t.b + 1:
                raise ValueError(f"round {i}: offer has {len(offer)} elements")
            t.append(offer, int(pick_part[5:]))
        return t


class GameState:
    """Ownership of every board element plus the bookkeeping strategies read.

    ``owner`` is a bytearray of FREE / CLIENT / WAITER tags.  A swap-remove
    list of free ids supports uniform sampling and a cursor tracks the lowest
    free id.
    """

    def __init__(self, board: Board, b: int, seed: int | None = None):
        if b < 1:
            raise ValueError("bias b must be at least 1")
        N = len(board)
        if N == 0:
            raise ValueError("board has no elements")
        self.board = board
        self.b = b
        self.N = N
        self.owner = bytearray(N)
        self.round = 0
        self.transcript = Transcript(board.descriptor, b, seed)
        self.free = array("q", range(N))
        self.pos = array("q", range(N))
        self.cursor = 0
        self.finalized = False
        self.finalize_remainder = 0
        self._listeners: list = []
        self._graph: GraphTracker | None = None

    # ------------------------------------------------------------------
    @property
    def n_free(self) -> int:
        return len(self.free)

    @property
    def n_client(self) -> int:
        return self.round

    @property
    def n_waiter(self) -> int:
        return self.round * self.b + self.finalize_remainder

    @property
    def over(self) -> bool:
        return self.finalized

    def is_free(self, i: int) -> bool:
        return self.owner[i] == FREE

    def lowest_free(self, k: int = 1) -> list[int]:
        """The ``k`` smallest free ids (advances the cursor past claimed ids)."""
        owner = self.owner
        c = self.cursor
        N = self.N
        while c < N and owner[c] != FREE:
            c += 1
        self.cursor = c
        out = []
        j = c
        while len(out) < k and j < N:
            if owner[j] == FREE:
                out.append(j)
            j += 1
        return out

    def sample_free(self, k: int, rng: random.Random) -> list[int]:
        """``k`` distinct free ids chosen uniformly."""
        free = self.free
        n = len(free)
        if k > n:
            raise ValueError("not enough free elements")
        picks: set[int] = set()
        while len(picks) < k:
            picks.add(free[rng.randrange(n)])
        return sorted(picks)

    def ids(self, tag: int) -> list[int]:
        return [i for i, o in enumerate(self.owner) if o == tag]

    def client_ids(self) -> list[int]:
        return np.flatnonzero(np.frombuffer(self.owner, dtype=np.uint8) == CLIENT).tolist()

    def edge_set(self, tag: int = CLIENT) -> EdgeSet:
        return EdgeSet(self.N, np.frombuffer(self.owner, dtype=np.uint8) == tag)

    def add_listener(self, listener) -> None:
        self._listeners.append(listener)

    def graph(self) -> GraphTracker:
        """Degree counters and host views for the claimed graphs (built on first use)."""
        if self._graph is None:
            self._graph = GraphTracker(self)
        return self._graph

    # ------------------------------------------------------------------
    def _snapshot(self, offer, pick) -> dict:
        return {"board": self.board.descriptor, "b": self.b, "round": self.round,
                "offer": list(offer), "pick": pick, "free": self.n_free}

    def _take(self, i: int, tag: int) -> None:
        self.owner[i] = tag
        free, pos = self.free, self.pos
        j = pos[i]
        last = free[-1]
        free[j] = last
        pos[last] = j
        free.pop()

    def apply_round(self, offer: Sequence[int], pick: int) -> GameState:
        if self.finalized:
            raise IllegalMoveError("game already finalized", self._snapshot(offer, pick))
        offer = list(offer)
        if len(offer) != self.b + 1:
            raise IllegalMoveError(f"offer has {len(offer)} elements, expected {self.b + 1}",
                                   self._snapshot(offer, pick))
        owner = self.owner
        N = self.N
        for x in offer:
            if not 0 <= x < N or owner[x] != FREE:
                raise IllegalMoveError(f"element {x} is not free", self._snapshot(offer, pick))
        if len(set(offer)) != len(offer):
            raise IllegalMoveError("offer repeats an element", self._snapshot(offer, pick))
        if pick not in offer:
            raise IllegalMoveError(f"pick {pick} is not in the offer", self._snapshot(offer, pick))
        for x in offer:
            self._take(x, CLIENT if x == pick else WAITER)
        self.round += 1
        self.transcript.append(offer, pick)
        for listener in self._listeners:
            listener.on_round(offer, pick)
        return self

    def finalize(self) -> GameState:
        if self.n_free >= self.b + 1:
            raise IllegalMoveError(f"{self.n_free} elements still free; the game is not over",
                                   self._snapshot((), -1))
        rest = list(self.free)
        for x in rest:
            self._take(x, WAITER)
        self.finalize_remainder = len(rest)
        self.finalized = True
        for listener in self._listeners:
            on_final = getattr(listener, "on_finalize", None)
            if on_final is not None:
                on_final(rest)
        return self


def new_game(board: Board, b: int, seed: int | None = None) -> GameState:
    return GameState(board, b, seed)


def apply_round(state: GameState, offer: Sequence[int], pick: int) -> GameState:
    return state.apply_round(offer, pick)


def finalize(state: GameState) -> GameState:
    return state.finalize()


class WaiterPolicy(Protocol):
    def start(self, state: GameState, rng: random.Random) -> None: ...
    def offer(self, state: GameState) -> Sequence[int]: ...


class ClientPolicy(Protocol):
    def start(self, state: GameState, rng: random.Random) -> None: ...
    def pick(self, state: GameState, offer: Sequence[int]) -> int: ...


def policy_rngs(seed: int | None) -> tuple[random.Random, random.Random]:
    """Independent streams for Waiter and Client derived from one seed."""
    ss = np.random.SeedSequence(seed)
    a, b = ss.spawn(2)
    return random.Random(int(a.generate_state(1, np.uint64)[0])), random.Random(int(b.generate_state(1, np.uint64)[0]))


def play(board: Board, b: int, waiter, client, seed: int | None = 0,
         state: GameState | None = None) -> tuple[GameState, Transcript]:
    """Alternate offers and picks until the endgame rule applies."""
    if state is None:
        state = GameState(board, b, seed)
    wr, cr = policy_rngs(seed)
    waiter.start(state, wr)
    client.start(state, cr)
    w_obs = getattr(waiter, "observe", None)
    c_obs = getattr(client, "observe", None)
    bound = b + 1
    while len(state.free) >= bound:
        offer = waiter.offer(state)
        pick = client.pick(state, offer)
        state.apply_round(offer, pick)
        if w_obs is not None:
            w_obs(state, offer, pick)
        if c_obs is not None:
            c_obs(state, offer, pick)
    state.finalize()
    return state, state.transcript


def replay(transcript: Transcript, board: Board | None = None) -> GameState:
    board = Board.from_descriptor(transcript.board) if board is None else board
    state = GameState(board, transcript.b, transcript.seed)
    for offer, pick in transcript:
        state.apply_round(offer, pick)
    state.finalize()
    return state


@dataclass
class WinningFamily:
    """Either explicit element-id sets or an implicit pattern descriptor."""

    sets: list[tuple[int, ...]] | None = None
    pattern: Pattern | None = None
    canonical: bool = False
    _resolved: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if (self.sets is None) == (self.pattern is None):
            raise ValueError("give exactly one of explicit sets or a pattern")
        if self.sets is not None:
            self.sets = [tuple(sorted(set(s))) for s in self.sets]

    @classmethod
    def explicit(cls, sets) -> WinningFamily:
        return cls(sets=list(sets))

    @classmethod
    def copies_of(cls, H: Pattern, canonical: bool = False) -> WinningFamily:
        return cls(pattern=H, canonical=canonical)

    @property
    def implicit(self) -> bool:
        return self.pattern is not None

    def check(self, board: Board) -> None:
        if self.sets is not None:
            N = len(board)
            for s in self.sets:
                if any(not 0 <= x < N for x in s):
                    raise ValueError(f"winning set {s} has ids outside the board")
        elif self.canonical:
            if board.kind != "blowup" or board.pattern.v < self.pattern.v:
                raise ValueError("canonical family needs a blow-up with enough parts")

    def resolve(self, board: Board) -> list[tuple[int, ...]]:
        """Explicit element-id sets (enumerates copies for implicit families)."""
        if self.sets is not None:
            self.check(board)
            return list(self.sets)
        key = board.descriptor
        if key not in self._resolved:
            self.check(board)
            from .embed import ClaimedGraph, iter_embeddings

            host = ClaimedGraph.from_edgeset(board, board.full())
            parts = tuple(range(self.pattern.v)) if self.canonical else None
            seen = set()
            out = []
            for emb in iter_embeddings(self.pattern, host, parts):
                ids = tuple(sorted(board.index(emb[a], emb[b]) for a, b in self.pattern.edges))
                if ids not in seen:
                    seen.add(ids)
                    out.append(ids)
            out.sort()
            self._resolved[key] = out
        return self._resolved[key]

    def value(self, state: GameState) -> int:
        return self.value_of(state.board, state.edge_set(CLIENT))

    def value_of(self, board: Board, claimed: EdgeSet) -> int:
        if self.sets is not None:
            bits = claimed.bits
            return sum(1 for s in self.sets if all(bits[x] for x in s))
        self.check(board)
        if self.canonical:
            return count_canonical_copies(board, claimed, self.pattern)
        return count_copies(board, claimed, self.pattern)

    def potential_bound(self, board: Board, b: int):
        """sum over sets of (b+1)^-|A| as an exact Fraction."""
        from fractions import Fraction

        if self.sets is not None:
            return sum((Fraction(1, (b + 1) ** len(s)) for s in self.sets), Fraction(0))
        if self.canonical:
            count = count_canonical_copies(board, board.full(), self.pattern)
        else:
            count = count_copies(board, board.full(), self.pattern)
        return Fraction(count, (b + 1) ** self.pattern.e)


def value(state: GameState, family: WinningFamily) -> int:
    if not state.finalized:
        raise ValueError("game is not finished")
    return family.value(state)


_CLS = (1, 2, 0)  # FREE -> 1, CLIENT -> 2, WAITER -> 0


class GraphTracker:
    """Per-vertex Client/Waiter degree counters kept in step with a game.

    On blow-ups the counters are also split by target part.  ``weighted`` is
    an embedding host where free edges weigh 1 and Client edges ``b + 1``;
    ``claimed`` is a host over Client's graph alone.
    """

    def __init__(self, state: GameState):
        board = state.board
        self.state = state
        self.board = board
        self.V = board.vertex_count
        self.s = board.s if board.kind == "blowup" else None
        self.P = board.pattern.v if self.s else 1
        self.cdeg = [0] * self.V
        self.wdeg = [0] * self.V
        self.cdegp = [0] * (self.V * self.P) if self.s else None
        self.wdegp = [0] * (self.V * self.P) if self.s else None
        self.cadj: list[list[int]] = [[] for _ in range(self.V)]
        self.us, self.vs = board.ends
        owner = np.frombuffer(state.owner, dtype=np.uint8)
        for i in np.flatnonzero(owner != FREE).tolist():
            self._mark(self.us[i], self.vs[i], state.owner[i])
        self.weighted = _WeightedView(self)
        self.claimed = _ClaimedView(self)
        state.add_listener(self)

    def _mark(self, u: int, v: int, tag: int) -> None:
        if tag == CLIENT:
            self.cdeg[u] += 1
            self.cdeg[v] += 1
            self.cadj[u].append(v)
            self.cadj[v].append(u)
            if self.s:
                self.cdegp[u * self.P + v // self.s] += 1
                self.cdegp[v * self.P + u // self.s] += 1
        elif tag == WAITER:
            self.wdeg[u] += 1
            self.wdeg[v] += 1
            if self.s:
                self.wdegp[u * self.P + v // self.s] += 1
                self.wdegp[v * self.P + u // self.s] += 1

    def on_round(self, offer, pick) -> None:
        us, vs = self.us, self.vs
        for x in offer:
            self._mark(us[x], vs[x], CLIENT if x == pick else WAITER)

    def on_finalize(self, rest) -> None:
        us, vs = self.us, self.vs
        for x in rest:
            self._mark(us[x], vs[x], WAITER)

    def client_degree(self, u: int, part: int | None = None) -> int:
        return self.cdeg[u] if part is None else self.cdegp[u * self.P + part]

    def waiter_degree(self, u: int, part: int | None = None) -> int:
        return self.wdeg[u] if part is None else self.wdegp[u * self.P + part]

    def free_degree(self, u: int, part: int | None = None) -> int:
        return self.board.degree_into(u, part) - self.client_degree(u, part) - self.waiter_degree(u, part)

    def part_of(self, x: int) -> int:
        return x // self.s if self.s else 0


class _HostBase:
    def __init__(self, tracker: GraphTracker):
        self.t = tracker
        board = tracker.board
        self.index = board.index
        self.owner = tracker.state.owner
        self.part_of = tracker.part_of
        self.s = tracker.s
        self.V = tracker.V

    def vertices(self, part):
        if part is None:
            return range(self.V)
        return range(part * self.s, (part + 1) * self.s)


class _WeightedView(_HostBase):
    def __init__(self, tracker: GraphTracker):
        super().__init__(tracker)
        self.B = tracker.state.b + 1
        board = tracker.board
        self._neighbors = None if board.kind in ("complete", "blowup") else board._graph_adj

    def cls(self, u: int, v: int) -> int:
        i = self.index(u, v)
        if i < 0:
            return 0
        return _CLS[self.owner[i]]

    def tail(self, u: int, part) -> tuple[int, int]:
        t = self.t
        c = t.client_degree(u, part)
        return c, t.board.degree_into(u, part) - c - t.waiter_degree(u, part)

    def candidates(self, u: int, part):
        if self._neighbors is not None:
            nb = self._neighbors[u]
            return nb if part is None else [w for w in nb if self.part_of(w) == part]
        return self.vertices(part)


class _ClaimedView(_HostBase):
    B = 1

    def cls(self, u: int, v: int) -> int:
        i = self.index(u, v)
        if i < 0:
            return 0
        return 2 if self.owner[i] == CLIENT else 0

    def tail(self, u: int, part) -> tuple[int, int]:
        return self.t.client_degree(u, part), 0

    def candidates(self, u: int, part):
        nb = self.t.cadj[u]
        if part is None:
            return nb
        s = self.s
        return [w for w in nb if w // s == part]
