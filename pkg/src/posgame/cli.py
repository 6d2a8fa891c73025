"""Command-line entry point: invariants, solve, play, sweep, randlab.

Exit codes: 0 success, 2 bad config or arguments, 3 illegal strategy move.
The master seed defaults to the POSGAME_SEED environment variable.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

from .engine import IllegalMoveError, WinningFamily, play
from .experiments import ConfigError, ExperimentConfig, records_csv, run_experiment, write_outputs
from .graphcore import Board, Pattern, parse_graph, pattern_from_spec
from .invariants import g1, g2, is_m2_balanced, max_2density, max_density
from .randmodels import extract_sparse_family, sample_gnm, sample_gnp
from .solver import Solver, potential_bound
from .strategies import PreconditionError, make_client, make_waiter

EXIT_OK, EXIT_CONFIG, EXIT_ILLEGAL = 0, 2, 3


def master_seed() -> int:
    raw = os.environ.get("POSGAME_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"POSGAME_SEED must be an integer, got {raw!r}") from None


def load_pattern(arg: str) -> Pattern:
    """A shorthand name or a path to an edge-list file."""
    p = Path(arg)
    if p.is_file():
        return parse_graph(p.read_text())
    return pattern_from_spec(arg)


def _frac(x) -> str:
    return f"{x} ({float(x):.6f})"


def cmd_invariants(args) -> int:
    H = load_pattern(args.graph)
    print(f"graph: v={H.v} e={H.e}")
    print(f"m   = {_frac(max_density(H))}")
    if H.v >= 3:
        print(f"m2  = {_frac(max_2density(H))}")
        if H.e >= 2:
            print(f"m2-balanced = {is_m2_balanced(H)}")
    if H.e >= 2:
        print(f"g1  = {_frac(g1(H))}")
        print(f"g2  = {_frac(g2(H))}")
    return EXIT_OK


def cmd_solve(args) -> int:
    board = Board.from_descriptor(args.board)
    fam = WinningFamily.copies_of(load_pattern(args.pattern))
    solver = Solver(board, fam, args.b)
    v = solver.value()
    print(f"value: {v}")
    print(f"potential bound: {potential_bound(board, fam, args.b)}")
    for i, (offer, pick) in enumerate(solver.principal_variation()):
        print(f"R{i}: offer={','.join(map(str, offer))} pick={pick}")
    return EXIT_OK


def cmd_play(args) -> int:
    H = load_pattern(args.pattern)
    board = Board.from_descriptor(args.board)
    canonical = board.kind == "blowup"
    seed = master_seed() if args.seed is None else args.seed
    waiter = make_waiter(args.waiter, H, enforce_window=not args.ignore_window, stage1=args.stage1)
    client = make_client(args.client, H, canonical=canonical)
    state, transcript = play(board, args.b, waiter, client, seed=seed)
    print(f"value: {WinningFamily.copies_of(H, canonical).value(state)}")
    print(f"rounds: {state.round}")
    if args.transcript:
        Path(args.transcript).write_text(transcript.to_text())
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = ExperimentConfig.from_yaml(args.config)
    if args.workers:
        cfg.workers = args.workers
    records = run_experiment(cfg, master_seed())
    out = args.output or cfg.output
    if out:
        write_outputs(records, out)
    else:
        sys.stdout.write(records_csv(records))
    failed = [r for r in records if r.error]
    for r in failed:
        print(f"cell n={r.n} b={r.b} seed={r.seed}: {r.error}", file=sys.stderr)
    if any(r.error and r.error.startswith("illegal move") for r in failed):
        return EXIT_ILLEGAL
    return EXIT_OK


def cmd_randlab(args) -> int:
    H = load_pattern(args.pattern)
    if (args.p is None) == (args.m is None):
        raise ConfigError("give exactly one of --p and --m")
    base = master_seed()
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "p", "M", "seed", "copies", "family", "p1", "p2", "p3", "p4", "p5"])
    for seed in args.seeds:
        s = base + seed
        G = sample_gnp(H, args.n, args.p, s) if args.p is not None else sample_gnm(H, args.n, args.m, s)
        fam, rep = extract_sparse_family(G, H, args.n, args.C, args.mode, s)
        f = rep.flags()
        w.writerow([args.n, "" if args.p is None else args.p, len(G), seed, rep.found, len(fam),
                    *(int(f[k]) for k in ("p1", "p2", "p3", "p4", "p5"))])
    return EXIT_OK


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="posgame", description="Biased Waiter-Client games on graphs.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invariants", help="density invariants of a pattern")
    p.add_argument("graph", help="shorthand (k4, p3, s4, c5, k5-3, 4:0-1,1-2) or edge-list file")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("solve", help="exact value on a tiny board")
    p.add_argument("--board", required=True, help="board descriptor, e.g. k5")
    p.add_argument("--pattern", required=True)
    p.add_argument("--b", type=int, default=1)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("play", help="play one game")
    p.add_argument("--waiter", required=True)
    p.add_argument("--client", required=True)
    p.add_argument("--board", required=True, help="k<n> or blowup(<pattern>,<s>)")
    p.add_argument("--pattern", required=True)
    p.add_argument("--b", type=int, default=1)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--stage1", default="random", choices=["random", "completion", "min-degree"])
    p.add_argument("--ignore-window", action="store_true", help="run strategies outside their bias window")
    p.add_argument("--transcript", help="write the transcript to this file")
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("sweep", help="run an experiment config")
    p.add_argument("--config", required=True)
    p.add_argument("--output")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("randlab", help="sample blow-up random graphs and extract sparse families")
    p.add_argument("--pattern", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float)
    p.add_argument("--m", type=int)
    p.add_argument("--seeds", type=_int_list, default=[0])
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--mode", choices=["paper", "greedy"], default="paper")
    p.set_defaults(func=cmd_randlab)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return args.func(args)
    except IllegalMoveError as exc:
        print(f"illegal move: {exc}", file=sys.stderr)
        if exc.snapshot:
            print(f"state: {exc.snapshot}", file=sys.stderr)
        return EXIT_ILLEGAL
    except (ConfigError, PreconditionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
