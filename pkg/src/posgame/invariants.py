"""Density invariants of a pattern and the bias windows built from them.

Everything that is compared for equality (m, m2, g1, g2) is an exact
``Fraction``.  The expected-count functions return floats since they only
feed thresholds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Literal

from .graphcore import Pattern, candidate_subgraphs

Profile = tuple[int, int, bool]
Regime = Literal["dense", "g1g2", "m2balanced"]


class RegimeError(ValueError):
    """The pattern does not satisfy the hypotheses of the requested regime."""


def _profiles(H: Pattern, profiles: Iterable[Profile] | None) -> list[Profile]:
    return list(candidate_subgraphs(H) if profiles is None else profiles)


def max_density(H: Pattern, profiles=None) -> Fraction:
    if H.v < 1:
        raise ValueError("max density needs at least one vertex")
    return max(Fraction(e, v) for v, e, _ in _profiles(H, profiles) if v >= 1)


def max_2density(H: Pattern, profiles=None) -> Fraction:
    if H.v < 3:
        raise ValueError("2-density needs at least three vertices")
    return max(Fraction(e - 1, v - 2) for v, e, _ in _profiles(H, profiles) if v >= 3)


def is_m2_balanced(H: Pattern) -> bool:
    if H.v < 3 or H.e < 2:
        raise ValueError("m2-balance needs v >= 3 and e >= 2")
    profs = candidate_subgraphs(H)
    own = Fraction(H.e - 1, H.v - 2)
    direct = max_2density(H, profs) == own
    # equivalent removal form: removing any proper part with >= 2 edges costs
    # at least the average vertices-per-edge rate of H itself
    via_removal = all(
        Fraction(H.v - v, H.e - e) <= Fraction(H.v - 2, H.e - 1)
        for v, e, _ in profs
        if 2 <= e < H.e
    )
    if not H.isolated_vertices() and direct != via_removal:
        raise AssertionError(f"m2-balance characterisations disagree on {H.label}")
    return direct


def g1(H: Pattern, profiles=None) -> Fraction:
    if H.e < 2:
        raise ValueError("g1 needs at least two edges")
    best = None
    for v, e, clique in _profiles(H, profiles):
        if clique:
            continue
        if 2 <= e < H.e or (e == 0 and v == 2):
            r = Fraction(H.v - v, H.e - e)
            if best is None or r > best:
                best = r
    return best


def g2(H: Pattern, profiles=None) -> Fraction:
    if H.e < 2:
        raise ValueError("g2 needs at least two edges")
    best = Fraction(H.v - 2, H.e - 1)
    for v, e, clique in _profiles(H, profiles):
        if clique and e >= 2:
            best = min(best, Fraction(v - 2, e - 1))
    return best


def has_connected_proper_nonclique(H: Pattern) -> bool:
    """Whether some connected non-clique subgraph has 2 <= e' < e(H).

    Any such subgraph contains a cherry, and a cherry qualifies once e >= 3.
    """
    return H.e >= 3 and H.contains_cherry()


def expected_canonical_copies(Hsub: Pattern, n: float, p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    return float(n) ** Hsub.v * float(p) ** Hsub.e


def _expected(v: int, e: int, n: float, p: float) -> float:
    return float(n) ** v * float(p) ** e


def f_hat(H: Pattern, n: float, p: float) -> float:
    """Smallest expected canonical count over subgraphs with at least one edge."""
    if H.e < 1:
        raise ValueError("f_hat needs at least one edge")
    if not 0.0 < p <= 1.0:
        raise ValueError("p must lie in (0, 1]")
    return min(_expected(v, e, n, p) for v, e, _ in candidate_subgraphs(H) if e >= 1)


def f_lower(H: Pattern, n: float, p: float) -> float:
    """Smallest expected canonical count over non-clique subgraphs with at
    least two edges, together with H itself."""
    if H.e < 2:
        raise ValueError("f needs at least two edges")
    if not 0.0 < p <= 1.0:
        raise ValueError("p must lie in (0, 1]")
    vals = [_expected(v, e, n, p) for v, e, clique in candidate_subgraphs(H) if e >= 2 and not clique]
    vals.append(_expected(H.v, H.e, n, p))
    return min(vals)


def clique_minus_matching(k: int, i: int) -> Pattern:
    """K_k minus the first ``i`` edges of a fixed removal sequence.

    The first ``k // 2`` edges are ``{0,1}, {2,3}, ...``; the rest come from
    the shifted matching ``{1,2}, {3,4}, ...``, which shares no edge with the
    first.
    """
    if k < 3:
        raise ValueError("k must be at least 3")
    if not 1 <= i <= k - 2:
        raise ValueError(f"i must lie in [1, {k - 2}]")
    removed = removal_sequence(k)[:i]
    edges = tuple(e for e in combinations(range(k), 2) if e not in removed)
    return Pattern(k, edges, f"k{k}-{i}")


def removal_sequence(k: int) -> list[tuple[int, int]]:
    first = [(2 * j, 2 * j + 1) for j in range(k // 2)]
    second = [(2 * j + 1, 2 * j + 2) for j in range(k - 2 - k // 2)]
    return first + second


@dataclass(frozen=True)
class BiasWindow:
    """Admissible interval for ``b + 1`` and the round budget for a given b."""

    regime: str
    lower: float
    upper: float
    alpha: float
    round_budget: int | None = None
    constants: tuple[float, ...] = ()

    @property
    def empty(self) -> bool:
        return self.lower > self.upper

    def contains(self, b: int) -> bool:
        return self.lower <= b + 1 <= self.upper


def round_budget(H: Pattern, s: int, b: int, alpha: float = 0.5) -> int:
    """floor((1 - alpha) e(H) s^2 / (b + 1)), evaluated exactly."""
    a = Fraction(alpha)
    return math.floor((1 - a) * H.e * s * s / (b + 1))


def check_regime(H: Pattern, regime: Regime) -> None:
    if regime == "dense":
        if H.e < 2:
            raise RegimeError("dense regime needs at least two edges")
    elif regime == "g1g2":
        if H.e < 3 or not H.contains_cherry():
            raise RegimeError("g1/g2 regime needs e >= 3 and a path on three vertices")
    elif regime == "m2balanced":
        if H.v < 3 or H.e < 2 or not is_m2_balanced(H):
            raise RegimeError("pattern is not m2-balanced")
        if H.is_forest():
            raise RegimeError("m2-balanced regime excludes forests")
    else:
        raise ValueError(f"unknown regime {regime!r}")


def bias_window(H: Pattern, s: int, regime: Regime, alpha: float = 0.5, *,
                c: float = 1.0, c1: float = 1.0, c2: float = 1.0,
                constants: Literal["unit", "proof"] = "unit", delta: float | None = None,
                b: int | None = None) -> BiasWindow:
    """Interval of ``b + 1`` for which the given regime's Waiter argument applies.

    With ``constants="proof"`` the constants are the explicit ones from the
    corresponding existence arguments; the g1/g2 regime then needs ``delta``.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if H.isolated_vertices():
        H = H.without_isolated()
    check_regime(H, regime)
    if constants == "proof":
        if regime == "dense":
            c = (1 - alpha) / 2
        elif regime == "g1g2":
            if delta is None or delta <= 0:
                raise ValueError("proof constants for the g1/g2 regime need delta > 0")
            c1, c2 = (1 - alpha) * H.e / delta, (1 - alpha) * H.e / 2
        else:
            c1, c2 = (1 - alpha) * H.e, 2 * (1 - alpha) * H.e
    elif constants != "unit":
        raise ValueError(f"unknown constants mode {constants!r}")
    if regime == "dense":
        lo, hi = 2.0, c * s ** float(1 / max_2density(H))
        used: tuple[float, ...] = (c,)
    elif regime == "g1g2":
        lo, hi = c1 * s ** float(g1(H)), c2 * s ** float(g2(H))
        used = (c1, c2)
    else:
        x = float(1 / max_2density(H))
        lo, hi = c1 * s ** x, c2 * s ** x
        used = (c1, c2)
    M = None if b is None else round_budget(H, s, b, alpha)
    return BiasWindow(regime, lo, hi, alpha, M, used)
