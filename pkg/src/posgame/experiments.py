"""Batch matchups, parameter sweeps and scaling fits.

A config is one flat YAML mapping.  Every (size, bias, seed) cell plays one
game; cells are independent and may run in worker processes, but results
always come back in config order.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from types import SimpleNamespace
from typing import Sequence

import numpy as np
import yaml

from .engine import IllegalMoveError, WinningFamily, play
from .graphcore import Board, Pattern, pattern_from_spec
from .invariants import RegimeError, bias_window, clique_minus_matching, is_m2_balanced
from .strategies import PreconditionError, disjoint_packing, make_client, make_waiter

CSV_COLUMNS = ("pattern", "board", "n", "b", "seed", "waiter", "client", "value", "normalized", "elapsed_ms")
SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """The experiment config is malformed."""


@dataclass
class ExperimentConfig:
    pattern: str
    waiter: str
    client: str
    sizes: list[int]
    biases: list[int]
    seeds: list[int] = field(default_factory=lambda: [0])
    board: str = "complete"
    alpha: float = 0.5
    c: float = 1.0
    c1: float = 1.0
    c2: float = 1.0
    stage1: str = "random"
    enforce_window: bool = True
    surrogate: bool = True
    record_timing: bool = False
    workers: int = 1
    output: str | None = None

    def __post_init__(self):
        for name in ("sizes", "biases", "seeds"):
            val = getattr(self, name)
            if isinstance(val, int):
                val = [val]
                setattr(self, name, val)
            if not isinstance(val, list) or not val:
                raise ConfigError(f"{name} must be a nonempty list")
            if not all(isinstance(x, int) and not isinstance(x, bool) for x in val):
                raise ConfigError(f"{name} must contain integers")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("seeds must be distinct")
        if any(b < 1 for b in self.biases):
            raise ConfigError("biases must be >= 1")
        if any(n < 1 for n in self.sizes):
            raise ConfigError("sizes must be >= 1")
        if self.board not in ("complete", "blowup"):
            raise ConfigError(f"board must be 'complete' or 'blowup', got {self.board!r}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        try:
            pattern_from_spec(self.pattern)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_mapping(cls, data: dict) -> ExperimentConfig:
        if not isinstance(data, dict):
            raise ConfigError("config must be a mapping")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        for k, v in data.items():
            if isinstance(v, dict):
                raise ConfigError(f"config must be flat; {k!r} is nested")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_yaml(cls, path: str | Path) -> ExperimentConfig:
        try:
            data = yaml.safe_load(Path(path).read_text())
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.from_mapping(data)

    @property
    def H(self) -> Pattern:
        H = pattern_from_spec(self.pattern)
        if H.isolated_vertices():
            warnings.warn(f"dropping isolated vertices of {self.pattern}", stacklevel=2)
            H = H.without_isolated()
        return H


@dataclass
class ResultRecord:
    pattern: str
    board: str
    n: int
    b: int
    seed: int
    waiter: str
    client: str
    value: int | None
    normalized: float | None
    elapsed_ms: int = 0
    regime_exceeded: bool = False
    surrogate_b: int | None = None
    error: str | None = None
    envelope: str | None = None
    disjoint_copies: int | None = None

    def row(self) -> list:
        return [self.pattern, self.board, self.n, self.b, self.seed, self.waiter, self.client,
                "" if self.value is None else self.value,
                "" if self.normalized is None else repr(self.normalized), self.elapsed_ms]


def normalized_value(value: int, H: Pattern, n: int, b: int) -> float:
    """value / (n^v(H) (b+1)^-e(H))."""
    return float(Fraction(value * (b + 1) ** H.e, n**H.v))


def cell_seed(master: int, seed: int, n: int, b: int) -> int:
    return int(np.random.SeedSequence([master, seed, n, b]).generate_state(1)[0])


def _make_board(cfg: ExperimentConfig, H: Pattern, n: int) -> Board:
    return Board.complete(n) if cfg.board == "complete" else Board.blowup(H, n)


def _fresh_waiter(cfg: ExperimentConfig, H: Pattern, enforce: bool):
    return make_waiter(cfg.waiter, H, enforce_window=enforce, stage1=cfg.stage1, alpha=cfg.alpha)


def _admissible(cfg: ExperimentConfig, H: Pattern, board: Board, b: int) -> bool:
    # strategies only read the board and the bias when checking their preconditions
    probe = SimpleNamespace(board=board, b=b)
    try:
        _fresh_waiter(cfg, H, True).start(probe, None)
    except PreconditionError:
        return False
    return True


def window_exceeded(cfg: ExperimentConfig, H: Pattern, n: int, b: int) -> bool:
    """Whether (n, b) lies outside the regime the chosen Waiter is built for."""
    k = H.v
    w = cfg.waiter
    if w == "tree-dense":
        return b * 2 ** (k + 6) > n
    if w == "tree-sparse":
        return b < n or (b * 2 ** (k + 6)) ** (k - 1) > n**k
    if w == "triangle":
        return 5 * b * b >= n * n
    if w.startswith("clique:"):
        kk, i = (int(t) for t in w[len("clique:"):].split(","))
        Hi = clique_minus_matching(kk, i)
        regime = "m2balanced" if is_m2_balanced(Hi) else "g1g2"
        try:
            win = bias_window(Hi, n, regime, cfg.alpha, c1=cfg.c1, c2=cfg.c2)
        except RegimeError:
            return True
        return not win.contains(b)
    return False


def run_cell(cfg: ExperimentConfig, n: int, b: int, seed: int, master: int = 0) -> ResultRecord:
    H = cfg.H
    rec = ResultRecord(cfg.pattern, cfg.board, n, b, seed, cfg.waiter, cfg.client, None, None)
    t0 = time.perf_counter()
    try:
        board = _make_board(cfg, H, n)
        rec.regime_exceeded = window_exceeded(cfg, H, n, b)
        play_b = b
        if cfg.enforce_window and cfg.surrogate and not _admissible(cfg, H, board, b):
            # a larger bias only helps Client, so its value bounds this cell from below
            play_b = next((x for x in range(b + 1, len(board)) if _admissible(cfg, H, board, x)), None)
            if play_b is None:
                raise PreconditionError(f"no admissible bias >= {b} for {cfg.waiter}")
            rec.surrogate_b = play_b
        canonical = cfg.board == "blowup"
        waiter = _fresh_waiter(cfg, H, cfg.enforce_window)
        client = make_client(cfg.client, H, canonical=canonical)
        state, _ = play(board, play_b, waiter, client, seed=cell_seed(master, seed, n, b))
        family = WinningFamily.copies_of(H, canonical)
        rec.value = family.value(state)
        rec.normalized = normalized_value(rec.value, H, n, b)
        if cfg.client == "potential-client":
            bound = math.floor(family.potential_bound(board, play_b))
            rec.envelope = "ok" if rec.value <= bound else f"violated: {rec.value} > {bound}"
        if cfg.waiter == "tree-sparse":
            rec.disjoint_copies = len(disjoint_packing(H, state, getattr(waiter, "copies", ())))
    except IllegalMoveError as exc:
        rec.error = f"illegal move: {exc}"
    except (PreconditionError, ValueError) as exc:
        rec.error = str(exc)
    if cfg.record_timing:
        rec.elapsed_ms = int((time.perf_counter() - t0) * 1000)
    return rec


def _cells(cfg: ExperimentConfig) -> list[tuple[int, int, int]]:
    return [(n, b, s) for n in cfg.sizes for b in cfg.biases for s in cfg.seeds]


def _run_star(args):
    return run_cell(*args)


def run_experiment(cfg: ExperimentConfig, master: int = 0) -> list[ResultRecord]:
    """Play every cell; the result list follows config order."""
    jobs = [(cfg, n, b, s, master) for n, b, s in _cells(cfg)]
    if cfg.workers == 1 or len(jobs) == 1:
        return [run_cell(*j) for j in jobs]
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(_run_star, jobs))


def records_csv(records: Sequence[ResultRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def records_json(records: Sequence[ResultRecord]) -> str:
    return json.dumps({"schema": SCHEMA_VERSION, "records": [asdict(r) for r in records]}, indent=2)


def write_outputs(records: Sequence[ResultRecord], path: str | Path) -> tuple[Path, Path]:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(records_csv(records))
    jpath = path.with_suffix(".json")
    jpath.write_text(records_json(records))
    return path, jpath


@dataclass(frozen=True)
class ExponentFit:
    slope_n: float | None
    slope_b: float | None
    intercept: float | None
    excluded: int


def _lsq(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    A = np.column_stack([np.log(x), np.ones(len(x))])
    (slope, icpt), *_ = np.linalg.lstsq(A, np.log(y), rcond=None)
    return float(slope), float(icpt)


def fit_exponents(records: Sequence[ResultRecord]) -> ExponentFit:
    """Log-log least-squares slopes against n (at fixed b) and b+1 (at fixed n).

    Each slope uses the fixed coordinate with the most distinct values of the
    other one; it needs at least three.  Zero or missing values are dropped.
    """
    good = [r for r in records if r.value is not None and r.value > 0]
    excluded = len(records) - len(good)
    if excluded:
        warnings.warn(f"excluding {excluded} records with zero or missing value", stacklevel=2)

    def best_group(fixed: str, free: str):
        groups: dict[int, list[ResultRecord]] = {}
        for r in good:
            groups.setdefault(getattr(r, fixed), []).append(r)
        best = max(groups.values(), key=lambda g: len({getattr(r, free) for r in g}), default=[])
        return best if len({getattr(r, free) for r in best}) >= 3 else None

    slope_n = slope_b = icpt = None
    g = best_group("b", "n")
    if g is not None:
        slope_n, icpt = _lsq([r.n for r in g], [r.value for r in g])
    g = best_group("n", "b")
    if g is not None:
        slope_b, ib = _lsq([r.b + 1 for r in g], [r.value for r in g])
        if icpt is None:
            icpt = ib
    if slope_n is None and slope_b is None:
        raise ValueError("need at least three distinct n at fixed b or three distinct b at fixed n")
    return ExponentFit(slope_n, slope_b, icpt, excluded)
