"""End-to-end orchestration: ingest -> features -> rank -> sweep -> EMD -> train -> evaluate."""

from __future__ import annotations

import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Optional

import numpy as np

from . import baselines
from .boosting import TrainConfig
from .emd import Axis, SiftConfig, transform_matrix
from .errors import DiagnosisError, StageError
from .evaluation import (
    MetricsReport,
    SplitConfig,
    SweepResult,
    compare_methods,
    evaluate_model,
    split_dataset,
    sweep_windows,
)
from .features import FAULT_CLASSES, FEATURE_NAMES, feature_matrix, feature_name
from .hierarchy import train_hierarchy
from .io import (
    Dataset,
    ModelArtifact,
    boxplot_csv,
    emit_boxplot_data,
    ingest,
    save_model,
    to_csv,
    atomic_write_text,
)
from .ranking import RankMode, SkewnessRanking, rank_features, select_columns, window_at

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineConfig:
    seed: int = 0
    train_fraction: float = 0.85
    stratified: bool = True
    emd_axis: Axis = "column"
    window: Optional[int] = None  # None runs the sweep and takes its best window
    width: int = 12
    rank_mode: RankMode = "absolute"
    rules: Optional[str] = None
    no_result: Literal["wrong", "exclude"] = "wrong"
    sift: SiftConfig = field(default_factory=SiftConfig)
    train: TrainConfig = field(default_factory=TrainConfig)

    @property
    def split(self) -> SplitConfig:
        return SplitConfig(self.train_fraction, self.seed, self.stratified)


@dataclass
class PipelineResult:
    report: MetricsReport
    artifact: ModelArtifact
    ranking: SkewnessRanking
    sweep: Optional[SweepResult]
    train_idx: np.ndarray
    test_idx: np.ndarray


@contextmanager
def stage(name: str):
    logger.info("stage %s", name)
    try:
        yield
    except StageError:
        raise
    except (DiagnosisError, ValueError, OSError) as e:
        raise StageError(name, e) from e


def features_csv(ds: Dataset, X: np.ndarray, names) -> str:
    header = ["id", "label", *names]
    rows = ([s.id, s.label.value if s.label else "", *x] for s, x in zip(ds.samples, X))
    return to_csv(header, rows)


def ranking_csv(ranking: SkewnessRanking) -> str:
    return to_csv(["rank", "feature", "name", "skewness"],
                  ((r, k, feature_name(k), s) for r, (k, s) in enumerate(ranking.entries, 1)))


def sweep_csv(sweep: SweepResult) -> str:
    return to_csv(["window", "features", "accuracy"],
                  ((w.rank_start, " ".join(map(str, w.feature_indices)), a)
                   for w, a in zip(sweep.windows, sweep.accuracies)))


def confusion_csv(report: MetricsReport) -> str:
    names = [fc.value for fc in FAULT_CLASSES]
    rows = []
    for fc, counts in zip(FAULT_CLASSES, report.confusion.counts):
        rows.append([fc.value, int(counts.sum()), *map(int, counts), report.per_class_sensitivity[fc]])
    return to_csv(["actual", "n", *names, "sensitivity"], rows)


def metrics_csv(report: MetricsReport) -> str:
    rows = [[f"sensitivity_{fc.value}", report.per_class_sensitivity[fc]] for fc in FAULT_CLASSES]
    rows += [["average_sensitivity", report.average_sensitivity],
             ["overall_accuracy", report.overall_accuracy],
             ["test_size", report.confusion.total]]
    return to_csv(["metric", "value"], rows)


def comparison_csv(report: MetricsReport) -> str:
    names = [fc.value for fc in FAULT_CLASSES]
    rows = [[m.method, *(m.per_class[fc] for fc in FAULT_CLASSES), m.average, m.no_result, "measured"]
            for m in report.methods]
    rows += [[name, *(vals[n] for n in names), vals["average"], None, "published"]
             for name, vals in report.published.items()]
    return to_csv(["method", *names, "average_accuracy", "no_result", "source"], rows)


def run_pipeline(dataset_path, config: PipelineConfig = PipelineConfig(),
                 out_dir=None) -> PipelineResult:
    """Run every stage; with ``out_dir`` set, each stage's outputs are written under it."""
    out = Path(out_dir) if out_dir is not None else None

    def emit(rel: str, text: str):
        if out is not None:
            atomic_write_text(out / rel, text)

    with stage("ingest"):
        ds = ingest(dataset_path, require_labels=True)
        rules = baselines.load_rules(config.rules) if config.rules else baselines.default_rules()
    labels = ds.labels

    with stage("features"):
        X37 = feature_matrix(ds.samples)
        emit("features/features.csv", features_csv(ds, X37, FEATURE_NAMES))

    with stage("rank"):
        ranking = rank_features(X37, config.rank_mode)
        emit("ranking/ranking.csv", ranking_csv(ranking))
        emit("ranking/boxplot_raw.csv",
             boxplot_csv(emit_boxplot_data(X37, labels, FEATURE_NAMES, "raw-feature")))

    sweep = None
    if config.window is None:
        with stage("sweep"):
            sweep = sweep_windows(ds.samples, ranking, config.width, config.train,
                                  config.split, config.emd_axis, config.sift)
            emit("sweep/sweep.csv", sweep_csv(sweep))
        window_start = sweep.best_window
    else:
        window_start = config.window

    with stage("emd"):
        window = window_at(ranking, window_start, config.width)
        Z, degenerate = transform_matrix(select_columns(X37, window), config.emd_axis, config.sift)
        names = [feature_name(k) for k in window.feature_indices]
        emit("features/imf.csv", features_csv(ds, Z, [f"IMF1({n})" for n in names]))
        emit("features/imf_degenerate.csv",
             to_csv(["signal", "degenerate"], ((i, bool(d)) for i, d in enumerate(degenerate))))
        emit("report/boxplot_imf.csv", boxplot_csv(emit_boxplot_data(Z, labels, names, "imf")))

    with stage("split"):
        train_idx, test_idx = split_dataset(labels, config.split)
        in_test = set(test_idx.tolist())
        emit("report/split.csv", to_csv(
            ["id", "set"],
            ((s.id, "test" if i in in_test else "train") for i, s in enumerate(ds.samples))))

    with stage("train+evaluate"):
        report, model = compare_methods(ds.samples, Z, train_idx, test_idx, config.train,
                                        rules, config.no_result)
        emit("report/confusion.csv", confusion_csv(report))
        emit("report/metrics.csv", metrics_csv(report))
        emit("report/comparison.csv", comparison_csv(report))

    artifact = ModelArtifact(model, ranking, window, config.sift, config.emd_axis,
                             config.train, config.split, ds.fingerprint)
    if out is not None:
        with stage("save"):
            save_model(artifact, out / "model" / "model.json")
    return PipelineResult(report, artifact, ranking, sweep, train_idx, test_idx)


@dataclass
class RepeatedSplitResult:
    accuracies: list[float]
    window: int
    sweep: Optional[SweepResult]
    ranking: SkewnessRanking

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.accuracies))

    @property
    def std_accuracy(self) -> float:
        return float(np.std(self.accuracies))


def repeated_splits(dataset_path, config: PipelineConfig = PipelineConfig(),
                    n_splits: int = 20) -> RepeatedSplitResult:
    """Overall test accuracy of the hierarchy over ``n_splits`` seeded splits.

    The window is picked once (sweep on the ``config.seed`` split unless
    ``config.window`` is set); split ``k`` uses seed ``config.seed + k``.
    """
    ds = ingest(dataset_path, require_labels=True)
    X37 = feature_matrix(ds.samples)
    ranking = rank_features(X37, config.rank_mode)
    sweep = None
    if config.window is None:
        sweep = sweep_windows(ds.samples, ranking, config.width, config.train,
                              config.split, config.emd_axis, config.sift)
        start = sweep.best_window
    else:
        start = config.window
    window = window_at(ranking, start, config.width)
    Z, _ = transform_matrix(select_columns(X37, window), config.emd_axis, config.sift)
    labels = ds.labels
    accs = []
    for k in range(n_splits):
        split = SplitConfig(config.train_fraction, config.seed + k, config.stratified)
        train_idx, test_idx = split_dataset(labels, split)
        model = train_hierarchy(Z[train_idx], [labels[i] for i in train_idx], config.train)
        report = evaluate_model(model, Z[test_idx], [labels[i] for i in test_idx])
        accs.append(report.overall_accuracy)
    return RepeatedSplitResult(accs, start, sweep, ranking)
