"""Fit log-log slopes of the forced path-3 count in n and in b+1.

Values are final Client-graph copy counts against the potential Client.
The default sweep takes a few minutes, mostly in the n = 4096 games.
"""

import argparse
import os
from pathlib import Path

from posgame.experiments import ExperimentConfig, fit_exponents, run_experiment, write_outputs

HERE = Path(__file__).parent / "configs"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--seed", type=int, default=int(os.environ.get("POSGAME_SEED", "0")))
    ap.add_argument("--max-n", type=int, default=4096, help="drop sizes above this (quick runs)")
    args = ap.parse_args()
    records = []
    for name in ("tree_dense_p3_n.yaml", "tree_dense_p3_b.yaml"):
        cfg = ExperimentConfig.from_yaml(HERE / name)
        cfg.sizes = [n for n in cfg.sizes if n <= args.max_n] or [args.max_n]
        records += run_experiment(cfg, args.seed)
    Path(args.out).mkdir(parents=True, exist_ok=True)
    write_outputs(records, Path(args.out) / "tree_scaling.csv")
    for r in records:
        if r.error:
            print(f"n={r.n:5d} b={r.b}  skipped: {r.error}")
        else:
            print(f"n={r.n:5d} b={r.b}  value={r.value}  normalized={r.normalized:.4f}")
    fit = fit_exponents([r for r in records if r.value is not None])
    print(f"slope_n = {fit.slope_n:.4f}")
    print(f"slope_b = {fit.slope_b}" if fit.slope_b is None else f"slope_b = {fit.slope_b:.4f}")


if __name__ == "__main__":
    main()
