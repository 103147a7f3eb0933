"""Write the plot-ready tables for one dataset: raw and IMF box plots per
class, and the window sweep curve. Rendering is left to any plotting tool.

    python scripts/plot_data.py src/dga_emd/data/synthetic_60.csv --out out/plots
"""

import argparse
from pathlib import Path

from dga_emd.evaluation import sweep_windows
from dga_emd.emd import transform_matrix
from dga_emd.features import feature_matrix, feature_name
from dga_emd.io import atomic_write_text, boxplot_csv, emit_boxplot_data, ingest
from dga_emd.pipeline import sweep_csv
from dga_emd.ranking import rank_features, select_columns, window_at


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("dataset")
    ap.add_argument("--out", default="out/plots")
    ap.add_argument("--top", type=int, default=3, help="raw features to box-plot, by rank")
    args = ap.parse_args()

    out = Path(args.out)
    ds = ingest(args.dataset)
    X = feature_matrix(ds.samples)
    ranking = rank_features(X)

    top = ranking.order[: args.top]
    raw = emit_boxplot_data(X[:, [k - 1 for k in top]], ds.labels,
                            [feature_name(k) for k in top], "raw-feature")
    atomic_write_text(out / "boxplot_raw_top.csv", boxplot_csv(raw))

    sweep = sweep_windows(ds.samples, ranking)
    atomic_write_text(out / "sweep.csv", sweep_csv(sweep))

    window = window_at(ranking, sweep.best_window)
    Z, _ = transform_matrix(select_columns(X, window))
    names = [feature_name(k) for k in window.feature_indices]
    atomic_write_text(out / "boxplot_imf.csv", boxplot_csv(emit_boxplot_data(Z, ds.labels, names, "imf")))
    print(f"best window {sweep.best_window}; wrote {out}/boxplot_raw_top.csv, sweep.csv, boxplot_imf.csv")


if __name__ == "__main__":
    main()
