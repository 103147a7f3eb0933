"""Command-line interface: ``dga-emd <subcommand> ...``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import baselines
from .baselines import verdict_name
from .boosting import TrainConfig
from .emd import SiftConfig, transform_matrix
from .errors import DiagnosisError
from .evaluation import compare_methods, score_verdicts, split_dataset, sweep_windows
from .features import FEATURE_NAMES, feature_matrix
from .hierarchy import train_hierarchy
from .io import (
    ModelArtifact,
    atomic_write_text,
    boxplot_csv,
    emit_boxplot_data,
    format_class_table,
    ingest,
    load_model,
    save_model,
    to_csv,
)
from .pipeline import (
    PipelineConfig,
    comparison_csv,
    confusion_csv,
    features_csv,
    metrics_csv,
    ranking_csv,
    run_pipeline,
    sweep_csv,
)
from .ranking import rank_features, select_columns, window_at

logger = logging.getLogger("dga_emd")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-fraction", type=float, default=0.85)
    p.add_argument("--no-stratify", action="store_true", help="plain random split")
    p.add_argument("--emd-axis", choices=("column", "row"), default="column")
    p.add_argument("--window", type=int, default=None,
                   help="start rank of the 12-feature window (skips the sweep)")
    p.add_argument("--rank-mode", choices=("absolute", "signed"), default="absolute")
    p.add_argument("--rules", default=None, help="rules file (default: bundled)")
    p.add_argument("--rounds", type=int, default=TrainConfig.rounds)
    p.add_argument("--max-depth", type=int, default=TrainConfig.max_depth)
    p.add_argument("--learning-rate", type=float, default=TrainConfig.learning_rate)
    p.add_argument("--out", default="out", help="output directory")


def _config(args) -> PipelineConfig:
    return PipelineConfig(
        seed=args.seed,
        train_fraction=args.train_fraction,
        stratified=not args.no_stratify,
        emd_axis=args.emd_axis,
        window=args.window,
        rank_mode=args.rank_mode,
        rules=args.rules,
        sift=SiftConfig(),
        train=TrainConfig(rounds=args.rounds, max_depth=args.max_depth,
                          learning_rate=args.learning_rate, seed=args.seed),
    )


def _rules(args):
    return baselines.load_rules(args.rules) if args.rules else baselines.default_rules()


def cmd_ingest(args) -> int:
    ds = ingest(args.dataset, require_labels=False)
    print(f"{len(ds)} samples from {args.dataset} ({ds.fingerprint})")
    print(format_class_table(ds))
    return 0


def cmd_features(args) -> int:
    ds = ingest(args.dataset, require_labels=False)
    X = feature_matrix(ds.samples)
    path = Path(args.out) / "features" / "features.csv"
    atomic_write_text(path, features_csv(ds, X, FEATURE_NAMES))
    print(f"wrote {path}")
    return 0


def cmd_rank(args) -> int:
    ds = ingest(args.dataset)
    X = feature_matrix(ds.samples)
    ranking = rank_features(X, args.rank_mode)
    out = Path(args.out) / "ranking"
    atomic_write_text(out / "ranking.csv", ranking_csv(ranking))
    atomic_write_text(out / "boxplot_raw.csv",
                      boxplot_csv(emit_boxplot_data(X, ds.labels, FEATURE_NAMES, "raw-feature")))
    print("rank order:", " ".join(map(str, ranking.order)))
    return 0


def cmd_sweep(args) -> int:
    cfg = _config(args)
    ds = ingest(args.dataset)
    ranking = rank_features(feature_matrix(ds.samples), cfg.rank_mode)
    sweep = sweep_windows(ds.samples, ranking, cfg.width, cfg.train, cfg.split, cfg.emd_axis, cfg.sift)
    path = Path(args.out) / "sweep" / "sweep.csv"
    atomic_write_text(path, sweep_csv(sweep))
    for w, a in zip(sweep.windows, sweep.accuracies):
        print(f"window {w.rank_start:2d}  accuracy {a:6.2f}%")
    print(f"best window: {sweep.best_window}")
    return 0


def _train_artifact(args) -> ModelArtifact:
    cfg = _config(args)
    ds = ingest(args.dataset)
    X37 = feature_matrix(ds.samples)
    ranking = rank_features(X37, cfg.rank_mode)
    window = window_at(ranking, cfg.window or 1, cfg.width)
    Z, _ = transform_matrix(select_columns(X37, window), cfg.emd_axis, cfg.sift)
    train_idx, _ = split_dataset(ds.labels, cfg.split)
    model = train_hierarchy(Z[train_idx], [ds.labels[i] for i in train_idx], cfg.train)
    return ModelArtifact(model, ranking, window, cfg.sift, cfg.emd_axis, cfg.train,
                         cfg.split, ds.fingerprint)


def cmd_train(args) -> int:
    artifact = _train_artifact(args)
    path = Path(args.out) / "model" / "model.json"
    save_model(artifact, path)
    print(f"trained on window {artifact.window.rank_start} "
          f"(features {' '.join(map(str, artifact.window.feature_indices))}); wrote {path}")
    return 0


def cmd_predict(args) -> int:
    artifact = load_model(args.model)
    ds = ingest(args.dataset, require_labels=False)
    Z = artifact.features_for(feature_matrix(ds.samples))
    preds = artifact.model.predict_many(Z)
    rows = [(s.id, p.fault.value, p.superclass.value, float(max(p.root_probs)),
             float(max(p.branch_probs)), p.confidence) for s, p in zip(ds.samples, preds)]
    text = to_csv(["id", "fault", "superclass", "root_prob", "branch_prob", "confidence"], rows)
    path = Path(args.out) / "report" / "predictions.csv"
    atomic_write_text(path, text)
    sys.stdout.write(text)
    return 0


def cmd_evaluate(args) -> int:
    artifact = load_model(args.model)
    ds = ingest(args.dataset)
    if ds.fingerprint != artifact.dataset_fingerprint:
        logger.warning("dataset differs from the one the model was trained on")
    Z = artifact.features_for(feature_matrix(ds.samples))
    train_idx, test_idx = split_dataset(ds.labels, artifact.split_config)
    report, _ = compare_methods(ds.samples, Z, train_idx, test_idx, artifact.train_config,
                                _rules(args), model=artifact.model)
    out = Path(args.out) / "report"
    atomic_write_text(out / "confusion.csv", confusion_csv(report))
    atomic_write_text(out / "metrics.csv", metrics_csv(report))
    atomic_write_text(out / "comparison.csv", comparison_csv(report))
    sys.stdout.write(comparison_csv(report))
    return 0


def cmd_baseline(args) -> int:
    ds = ingest(args.dataset, require_labels=False)
    rules = _rules(args)
    verdicts = [baselines.diagnose(s, args.method, rules) for s in ds.samples]
    text = to_csv(["id", "label", "verdict"],
                  ((s.id, s.label.value if s.label else "", verdict_name(v))
                   for s, v in zip(ds.samples, verdicts)))
    atomic_write_text(Path(args.out) / "report" / f"baseline_{args.method}.csv", text)
    sys.stdout.write(text)
    if ds.is_labeled:
        row = score_verdicts(args.method, ds.labels, verdicts)
        print(f"# {args.method}: accuracy {row.average:.2f}% ({row.no_result} no-result)")
    return 0


def cmd_pipeline(args) -> int:
    res = run_pipeline(args.dataset, _config(args), args.out)
    r = res.report
    if res.sweep is not None:
        print(f"sweep best window: {res.sweep.best_window}")
    print(f"window features: {' '.join(map(str, res.artifact.window.feature_indices))}")
    print(f"test accuracy {r.overall_accuracy:.2f}%  average sensitivity {r.average_sensitivity:.2f}%")
    print(f"outputs under {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dga-emd", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help, model=False):
        p = sub.add_parser(name, help=help)
        p.add_argument("dataset", help="CSV with header id,h2,ch4,c2h6,c2h4,c2h2,label")
        if model:
            p.add_argument("--model", required=True, help="model artifact (model.json)")
        _common(p)
        p.set_defaults(func=fn)
        return p

    add("ingest", cmd_ingest, "validate a dataset and print class counts")
    add("features", cmd_features, "compute the 37 DGA parameters")
    add("rank", cmd_rank, "rank features by skewness; emit raw box-plot data")
    add("sweep", cmd_sweep, "accuracy of every 12-feature window")
    add("train", cmd_train, "train the hierarchical model and save it")
    add("predict", cmd_predict, "predict faults with a saved model", model=True)
    add("evaluate", cmd_evaluate, "score a saved model and the baselines on its test split", model=True)
    b = add("baseline", cmd_baseline, "run a conventional rule-based diagnoser")
    b.add_argument("--method", choices=baselines.METHODS, required=True)
    add("pipeline", cmd_pipeline, "run every stage end to end")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (DiagnosisError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
