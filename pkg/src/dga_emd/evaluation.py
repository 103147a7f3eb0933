"""Splitting, confusion matrices, sensitivity/accuracy, window sweep, method comparison."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence

import numpy as np

from . import baselines, boosting
from .baselines import NO_RESULT, RuleSet, Verdict
from .boosting import TrainConfig
from .emd import Axis, SiftConfig, transform_matrix
from .errors import EmptyClass, LengthMismatch, UndefinedForEmptyClass
from .features import FAULT_CLASSES, FaultClass, GasSample, feature_matrix
from .hierarchy import HierarchicalModel, train_hierarchy
from .ranking import SkewnessRanking, enumerate_windows, select_columns

# Published per-class accuracies of other learned diagnosers; echoed in
# comparison reports for reference only, never recomputed.
PUBLISHED_ACCURACY = {
    "Ensemble Learning": {"PD": 85.71, "D1": 58.33, "D2": 94.74, "T1": 100.0, "T2": 0.0, "T3": 88.89, "average": 84.21},
    "BA-PNN": {"PD": 85.71, "D1": 41.67, "D2": 73.68, "T1": 77.78, "T2": 100.0, "T3": 33.33, "average": 63.16},
    "HGA-SVM": {"PD": 71.43, "D1": 66.67, "D2": 94.73, "T1": 44.45, "T2": 0.0, "T3": 100.0, "average": 77.19},
}


@dataclass(frozen=True)
class SplitConfig:
    train_fraction: float = 0.85
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise ValueError("train_fraction must be in (0, 1)")


def _n_train(n: int, fraction: float) -> int:
    # round first so 0.29 * 100 does not floor to 28
    return int(math.floor(round(n * fraction, 9)))


def largest_remainder(quotas: Sequence[float], total: int) -> list[int]:
    """Integer allocation summing to ``total``; leftover units go to the largest
    fractional parts, earlier entries first on ties."""
    floors = [int(math.floor(q)) for q in quotas]
    short = total - sum(floors)
    rema = sorted(range(len(quotas)), key=lambda i: (-(quotas[i] - floors[i]), i))
    for i in rema[:short]:
        floors[i] += 1
    return floors


def stratified_test_counts(class_sizes: Sequence[int], train_fraction: float) -> list[int]:
    n = sum(class_sizes)
    n_test = n - _n_train(n, train_fraction)
    quotas = [c * n_test / n for c in class_sizes]
    return largest_remainder(quotas, n_test)


def split_dataset(labels: Sequence[FaultClass], config: SplitConfig = SplitConfig()
                  ) -> tuple[np.ndarray, np.ndarray]:
    """Disjoint sorted train/test index arrays covering ``range(len(labels))``."""
    labels = list(labels)
    n = len(labels)
    rng = np.random.default_rng(config.seed)
    if not config.stratified:
        perm = rng.permutation(n)
        k = _n_train(n, config.train_fraction)
        return np.sort(perm[:k]), np.sort(perm[k:])
    groups = [[i for i, c in enumerate(labels) if c is fc] for fc in FAULT_CLASSES]
    missing = [fc.value for fc, g in zip(FAULT_CLASSES, groups) if not g]
    if missing:
        raise EmptyClass(f"stratified split needs every class; missing {missing}")
    test_counts = stratified_test_counts([len(g) for g in groups], config.train_fraction)
    train, test = [], []
    for g, k in zip(groups, test_counts):
        perm = rng.permutation(len(g))
        idx = np.asarray(g)[perm]
        test.extend(idx[:k])
        train.extend(idx[k:])
    return np.sort(np.asarray(train, dtype=int)), np.sort(np.asarray(test, dtype=int))


@dataclass(frozen=True)
class ConfusionMatrix:
    """6 x 6 counts; rows are actual classes, columns predicted."""

    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def row(self, fc: FaultClass) -> np.ndarray:
        return self.counts[fc.index]


def confusion_matrix(actual: Sequence[FaultClass], predicted: Sequence[FaultClass]) -> ConfusionMatrix:
    if len(actual) != len(predicted):
        raise LengthMismatch(f"{len(actual)} actual vs {len(predicted)} predicted labels")
    cm = np.zeros((6, 6), dtype=int)
    for a, p in zip(actual, predicted):
        cm[a.index, p.index] += 1
    return ConfusionMatrix(cm)


def sensitivity(cm: ConfusionMatrix, fc: FaultClass) -> float:
    row = cm.row(fc)
    if row.sum() == 0:
        raise UndefinedForEmptyClass(f"no actual {fc.value} rows")
    return 100.0 * row[fc.index] / row.sum()


def overall_accuracy(cm: ConfusionMatrix) -> float:
    if cm.total == 0:
        raise UndefinedForEmptyClass("empty confusion matrix")
    return 100.0 * np.trace(cm.counts) / cm.total


def sensitivities(cm: ConfusionMatrix) -> dict[FaultClass, Optional[float]]:
    return {fc: (sensitivity(cm, fc) if cm.row(fc).sum() else None) for fc in FAULT_CLASSES}


def average_sensitivity(cm: ConfusionMatrix) -> float:
    vals = [v for v in sensitivities(cm).values() if v is not None]
    return float(np.mean(vals))


@dataclass
class MethodRow:
    method: str
    per_class: dict[FaultClass, Optional[float]]
    average: Optional[float]
    no_result: int = 0
    scored: int = 0


@dataclass
class MetricsReport:
    confusion: ConfusionMatrix
    per_class_sensitivity: dict[FaultClass, Optional[float]]
    average_sensitivity: float
    overall_accuracy: float
    methods: list[MethodRow] = field(default_factory=list)
    published: dict = field(default_factory=lambda: dict(PUBLISHED_ACCURACY))


def score_verdicts(method: str, actual: Sequence[FaultClass], verdicts: Sequence[Verdict],
                   no_result: Literal["wrong", "exclude"] = "wrong") -> MethodRow:
    """Per-class and overall accuracy of verdicts; NoResult counts as wrong unless excluded."""
    per_class = {}
    hits_all, n_all = 0, 0
    for fc in FAULT_CLASSES:
        pairs = [(a, v) for a, v in zip(actual, verdicts) if a is fc]
        if no_result == "exclude":
            pairs = [(a, v) for a, v in pairs if v != NO_RESULT]
        hits = sum(a is v for a, v in pairs)
        per_class[fc] = 100.0 * hits / len(pairs) if pairs else None
        hits_all += hits
        n_all += len(pairs)
    return MethodRow(
        method,
        per_class,
        100.0 * hits_all / n_all if n_all else None,
        no_result=sum(v == NO_RESULT for v in verdicts),
        scored=n_all,
    )


def imf_features(samples: Sequence[GasSample], window, axis: Axis = "column",
                 sift: SiftConfig = SiftConfig(), X37: Optional[np.ndarray] = None) -> np.ndarray:
    """IMF1 of the window's ranked feature columns over the whole sample set."""
    X37 = feature_matrix(samples) if X37 is None else X37
    imf, _ = transform_matrix(select_columns(X37, window), axis, sift)
    return imf


@dataclass(frozen=True)
class SweepResult:
    accuracies: tuple[float, ...]
    windows: tuple

    @property
    def best_window(self) -> int:
        """1-based start rank of the most accurate window; earliest wins ties."""
        return int(np.argmax(self.accuracies)) + 1


def sweep_windows(samples: Sequence[GasSample], ranking: SkewnessRanking, width: int = 12,
                  train_config: TrainConfig = TrainConfig(), split: SplitConfig = SplitConfig(),
                  axis: Axis = "column", sift: SiftConfig = SiftConfig()) -> SweepResult:
    """Test accuracy of a flat 6-class ensemble on the IMF features of every window."""
    X37 = feature_matrix(samples)
    y = np.array([s.label.index for s in samples])
    train_idx, test_idx = split_dataset([s.label for s in samples], split)
    windows = enumerate_windows(ranking, width)
    accs = []
    for w in windows:
        Z = imf_features(samples, w, axis, sift, X37)
        model = boosting.train(Z[train_idx], y[train_idx], train_config, n_classes=6)
        pred = model.predict_classes(Z[test_idx])
        accs.append(100.0 * float(np.mean(pred == y[test_idx])))
    return SweepResult(tuple(accs), tuple(windows))


def evaluate_model(model: HierarchicalModel, X, actual: Sequence[FaultClass]) -> MetricsReport:
    cm = confusion_matrix(actual, model.predict_labels(X))
    return MetricsReport(cm, sensitivities(cm), average_sensitivity(cm), overall_accuracy(cm))


def baseline_rows(samples: Sequence[GasSample], rules: Optional[RuleSet] = None,
                  no_result: Literal["wrong", "exclude"] = "wrong") -> list[MethodRow]:
    rules = rules or baselines.default_rules()
    actual = [s.label for s in samples]
    return [
        score_verdicts(m, actual, [baselines.diagnose(s, m, rules) for s in samples], no_result)
        for m in baselines.METHODS
    ]


def compare_methods(samples: Sequence[GasSample], Z: np.ndarray, train_idx, test_idx,
                    train_config: TrainConfig = TrainConfig(), rules: Optional[RuleSet] = None,
                    no_result: Literal["wrong", "exclude"] = "wrong",
                    model: Optional[HierarchicalModel] = None) -> tuple[MetricsReport, HierarchicalModel]:
    """Train (unless given) the hierarchy on ``train_idx`` and score it with the baselines on ``test_idx``.

    ``Z`` holds the IMF feature matrix for all samples.
    """
    labels = [s.label for s in samples]
    if model is None:
        model = train_hierarchy(Z[train_idx], [labels[i] for i in train_idx], train_config)
    test_labels = [labels[i] for i in test_idx]
    report = evaluate_model(model, Z[test_idx], test_labels)
    proposed = MethodRow(
        "proposed",
        dict(report.per_class_sensitivity),
        report.overall_accuracy,
        scored=len(test_idx),
    )
    report.methods = [proposed] + baseline_rows([samples[i] for i in test_idx], rules, no_result)
    return report, model
