"""Run one or more sweep configs and write CSV plus JSON next to each other.

    python scripts/run_config.py scripts/configs/triangle.yaml --out results/
"""

import argparse
import os
from pathlib import Path

from posgame.experiments import ExperimentConfig, run_experiment, write_outputs


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("configs", nargs="+")
    ap.add_argument("--out", default="results")
    ap.add_argument("--seed", type=int, default=int(os.environ.get("POSGAME_SEED", "0")))
    ap.add_argument("--workers", type=int)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for path in args.configs:
        cfg = ExperimentConfig.from_yaml(path)
        if args.workers:
            cfg.workers = args.workers
        records = run_experiment(cfg, args.seed)
        csv_path, _ = write_outputs(records, out / (Path(path).stem + ".csv"))
        errors = sum(r.error is not None for r in records)
        print(f"{path}: {len(records)} cells, {errors} errors -> {csv_path}")


if __name__ == "__main__":
    main()
