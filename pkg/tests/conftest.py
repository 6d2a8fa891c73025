from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import networkx as nx
from hypothesis import strategies as st
from networkx.algorithms.isomorphism import GraphMatcher

from posgame.graphcore import Pattern


def atlas(max_nodes: int, min_edges: int = 0, connected: bool = False) -> list[Pattern]:
    """Every graph of the networkx atlas up to ``max_nodes`` vertices."""
    out = []
    for G in nx.graph_atlas_g()[1:]:
        if G.number_of_nodes() > max_nodes or G.number_of_edges() < min_edges:
            continue
        if connected and not nx.is_connected(G):
            continue
        out.append(Pattern(G.number_of_nodes(), tuple(G.edges())))
    return out


def nx_graph(P: Pattern) -> nx.Graph:
    G = nx.Graph()
    G.add_nodes_from(range(P.v))
    G.add_edges_from(P.edges)
    return G


def nx_copies(host_edges, nvertices: int, H: Pattern) -> int:
    """Unlabeled copies of H via networkx monomorphisms, an independent oracle."""
    G = nx.Graph()
    G.add_nodes_from(range(nvertices))
    G.add_edges_from(host_edges)
    emb = sum(1 for _ in GraphMatcher(G, nx_graph(H)).subgraph_monomorphisms_iter())
    return emb // nx_aut(H)


def nx_aut(H: Pattern) -> int:
    return sum(1 for _ in GraphMatcher(nx_graph(H), nx_graph(H)).isomorphisms_iter())


def brute_profiles(H: Pattern):
    """(v', e', clique) for every vertex subset and every edge subset on it."""
    for k in range(1, H.v + 1):
        for S in combinations(range(H.v), k):
            inner = [e for e in H.edges if e[0] in S and e[1] in S]
            for r in range(len(inner) + 1):
                for sub in combinations(inner, r):
                    yield k, len(sub), len(sub) == k * (k - 1) // 2


def brute_invariants(H: Pattern) -> dict[str, Fraction]:
    prof = set(brute_profiles(H))
    out = {"m": max(Fraction(e, v) for v, e, _ in prof)}
    if H.v >= 3:
        out["m2"] = max(Fraction(e - 1, v - 2) for v, e, _ in prof if v >= 3)
    if H.e >= 2:
        g1 = [Fraction(H.v - v, H.e - e) for v, e, c in prof
              if not c and (2 <= e < H.e or (e == 0 and v == 2))]
        out["g1"] = max(g1)
        out["g2"] = min([Fraction(H.v - 2, H.e - 1)] +
                        [Fraction(v - 2, e - 1) for v, e, c in prof if c and e >= 2])
    return out


@st.composite
def small_patterns(draw, max_v: int = 5, min_e: int = 0):
    v = draw(st.integers(2, max_v))
    pairs = list(combinations(range(v), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, min_size=min(min_e, len(pairs))))
    return Pattern(v, tuple(chosen))
