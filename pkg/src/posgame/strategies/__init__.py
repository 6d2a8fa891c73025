"""Waiter and Client policies, plus a name-keyed registry for the CLI."""

from __future__ import annotations

from ..graphcore import Pattern
from .base import PreconditionError, ScriptWaiter
from .baselines import GreedyClient, LowestFreeWaiter, RandomClient, RandomWaiter
from .cliques import CliqueWaiter, TriangleWaiter, triangle_guarantee
from .mindegree import BadFamilyState, MinDegreeWaiter, big_family_admissible
from .potential import PotentialClient, PotentialLedger
from .trees import (TreeDenseWaiter, TreeSparseWaiter, disjoint_packing, split_leaf,
                    tree_guarantee, verify_disjoint_copies)

WAITERS = ("random", "lowest-free", "tree-dense", "tree-sparse", "triangle", "clique:k,i",
           "min-degree-waiter")
CLIENTS = ("random", "greedy-client", "potential-client")


def make_waiter(name: str, pattern: Pattern | None = None, *, enforce_window: bool = True,
                stage1: str = "random", alpha: float = 0.5, bad_sets=None, M: int | None = None):
    """Build a fresh Waiter policy from its registry name."""
    if name == "random":
        return RandomWaiter()
    if name == "lowest-free":
        return LowestFreeWaiter()
    if name == "tree-dense":
        return TreeDenseWaiter(_need(pattern, name), enforce_window)
    if name == "tree-sparse":
        return TreeSparseWaiter(_need(pattern, name), enforce_window)
    if name == "triangle":
        return TriangleWaiter()
    if name.startswith("clique:"):
        try:
            k, i = (int(t) for t in name[len("clique:"):].split(","))
        except ValueError:
            raise ValueError(f"clique waiter must be named clique:k,i, got {name!r}") from None
        return CliqueWaiter(k, i, stage1, alpha)
    if name == "min-degree-waiter":
        if bad_sets is None:
            raise ValueError("min-degree-waiter needs an explicit bad family")
        return MinDegreeWaiter(bad_sets, M)
    raise ValueError(f"unknown waiter {name!r}; known: {', '.join(WAITERS)}")


def make_client(name: str, pattern: Pattern | None = None, *, canonical: bool = False, family=None):
    """Build a fresh Client policy from its registry name."""
    if name == "random":
        return RandomClient()
    if name == "greedy-client":
        return GreedyClient(_need(pattern, name), canonical)
    if name == "potential-client":
        if family is not None:
            return PotentialClient(family)
        return PotentialClient(pattern=_need(pattern, name), canonical=canonical, track=False)
    raise ValueError(f"unknown client {name!r}; known: {', '.join(CLIENTS)}")


def _need(pattern: Pattern | None, name: str) -> Pattern:
    if pattern is None:
        raise ValueError(f"{name} needs a pattern")
    return pattern


__all__ = [
    "BadFamilyState", "CliqueWaiter", "GreedyClient", "LowestFreeWaiter", "MinDegreeWaiter",
    "PotentialClient", "PotentialLedger", "PreconditionError", "RandomClient", "RandomWaiter",
    "ScriptWaiter", "TreeDenseWaiter", "TreeSparseWaiter", "TriangleWaiter", "big_family_admissible",
    "disjoint_packing", "make_client", "make_waiter", "split_leaf", "tree_guarantee",
    "triangle_guarantee", "verify_disjoint_copies",
]
