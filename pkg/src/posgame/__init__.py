"""Biased Waiter-Client games on graphs."""

from .engine import GameState, IllegalMoveError, Transcript, WinningFamily, new_game, play, replay, value
from .graphcore import Board, EdgeSet, Pattern, parse_graph, pattern_from_spec

__version__ = "0.1.0"

__all__ = [
    "Board", "EdgeSet", "GameState", "IllegalMoveError", "Pattern", "Transcript", "WinningFamily",
    "new_game", "parse_graph", "pattern_from_spec", "play", "replay", "value",
]
