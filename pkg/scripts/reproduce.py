"""Repeated-split evaluation on a full labelled dataset.

Picks the feature window by the sweep (or --window), then trains and scores
the hierarchy on --splits stratified 85:15 splits and compares the mean
overall accuracy with a reference value.

    python scripts/reproduce.py data/dga_377.csv --splits 20 --reference 91.23
"""

import argparse
import time

from dga_emd.boosting import TrainConfig
from dga_emd.pipeline import PipelineConfig, repeated_splits


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("dataset")
    ap.add_argument("--splits", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--window", type=int, default=None)
    ap.add_argument("--emd-axis", choices=("column", "row"), default="column")
    ap.add_argument("--rounds", type=int, default=TrainConfig.rounds)
    ap.add_argument("--reference", type=float, default=91.23,
                    help="published mean accuracy to compare against")
    ap.add_argument("--band", type=float, default=5.0, help="tolerance in percentage points")
    args = ap.parse_args()

    cfg = PipelineConfig(seed=args.seed, window=args.window, emd_axis=args.emd_axis,
                         train=TrainConfig(rounds=args.rounds, seed=args.seed))
    t0 = time.perf_counter()
    res = repeated_splits(args.dataset, cfg, args.splits)
    elapsed = time.perf_counter() - t0

    print("rank order:", " ".join(map(str, res.ranking.order)))
    if res.sweep is not None:
        for w, a in zip(res.sweep.windows, res.sweep.accuracies):
            print(f"  window {w.rank_start:2d}  {a:6.2f}%")
    print(f"window used: {res.window}")
    for k, a in enumerate(res.accuracies):
        print(f"  split {k:2d} (seed {args.seed + k})  {a:6.2f}%")
    gap = res.mean_accuracy - args.reference
    verdict = "within" if abs(gap) <= args.band else "outside"
    print(f"mean accuracy {res.mean_accuracy:.2f}% (sd {res.std_accuracy:.2f}); "
          f"reference {args.reference:.2f}%, gap {gap:+.2f} pp, {verdict} +/-{args.band:g}")
    print(f"elapsed {elapsed:.1f} s")


if __name__ == "__main__":
    main()
