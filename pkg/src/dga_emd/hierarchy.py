"""Two-level classifier: discharge vs thermal, then the specific fault."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import boosting
from .boosting import BoostedEnsemble, TrainConfig
from .errors import DimensionMismatch, MissingBranchData
from .features import SUPERCLASS_MEMBERS, FaultClass, SuperClass

SUPERCLASSES = (SuperClass.DISCHARGE, SuperClass.THERMAL)


@dataclass(frozen=True)
class HierarchicalPrediction:
    fault: FaultClass
    superclass: SuperClass
    root_probs: np.ndarray
    branch_probs: np.ndarray

    @property
    def confidence(self) -> float:
        """Root probability of the chosen superclass times the branch probability of the fault."""
        root_p = self.root_probs[SUPERCLASSES.index(self.superclass)]
        branch_p = self.branch_probs[SUPERCLASS_MEMBERS[self.superclass].index(self.fault)]
        return float(root_p * branch_p)


@dataclass(frozen=True)
class HierarchicalModel:
    root: BoostedEnsemble
    discharge_branch: BoostedEnsemble
    thermal_branch: BoostedEnsemble
    feature_count: int = 12

    def __post_init__(self):
        for m in (self.root, self.discharge_branch, self.thermal_branch):
            if m.n_features != self.feature_count:
                raise DimensionMismatch("all sub-models must share the feature space")

    @classmethod
    def untrained(cls, feature_count: int = 12) -> "HierarchicalModel":
        return cls(
            BoostedEnsemble(2, feature_count),
            BoostedEnsemble(3, feature_count),
            BoostedEnsemble(3, feature_count),
            feature_count,
        )

    def branch(self, superclass: SuperClass) -> BoostedEnsemble:
        return self.discharge_branch if superclass is SuperClass.DISCHARGE else self.thermal_branch

    def predict_many(self, X) -> list[HierarchicalPrediction]:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.feature_count:
            raise DimensionMismatch(f"expected {self.feature_count} features, got {X.shape[1]}")
        root_p = self.root.predict_proba(X)
        route = np.argmax(root_p, axis=1)
        branch_p = np.empty((X.shape[0], 3))
        for s, sc in enumerate(SUPERCLASSES):
            rows = route == s
            if rows.any():
                branch_p[rows] = self.branch(sc).predict_proba(X[rows])
        out = []
        for i in range(X.shape[0]):
            sc = SUPERCLASSES[route[i]]
            fault = SUPERCLASS_MEMBERS[sc][int(np.argmax(branch_p[i]))]
            out.append(HierarchicalPrediction(fault, sc, root_p[i], branch_p[i]))
        return out

    def predict_labels(self, X) -> list[FaultClass]:
        return [p.fault for p in self.predict_many(X)]


def predict_hierarchy(model: HierarchicalModel, x) -> HierarchicalPrediction:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DimensionMismatch("predict_hierarchy takes a single feature vector")
    return model.predict_many(x[None, :])[0]


def train_hierarchy(X, y: Sequence[FaultClass], config: TrainConfig = TrainConfig(),
                    root_config: Optional[TrainConfig] = None,
                    branch_configs: Optional[dict[SuperClass, TrainConfig]] = None) -> HierarchicalModel:
    """Fit the root on superclass labels over all rows and each branch on its own rows."""
    X = np.asarray(X, dtype=float)
    y = list(y)
    if X.ndim != 2 or X.shape[0] != len(y):
        raise DimensionMismatch("X must be (N, F) with one label per row")
    super_idx = np.array([SUPERCLASSES.index(c.superclass) for c in y])
    branch_data = {}
    for s, sc in enumerate(SUPERCLASSES):
        members = SUPERCLASS_MEMBERS[sc]
        rows = np.flatnonzero(super_idx == s)
        labels = np.array([members.index(y[i]) for i in rows], dtype=int)
        if np.unique(labels).size < 2:
            raise MissingBranchData(
                f"{sc.value} branch needs at least 2 distinct classes, got {sorted({y[i].value for i in rows})}"
            )
        branch_data[sc] = (rows, labels)

    branch_configs = branch_configs or {}
    root = boosting.train(X, super_idx, root_config or config, n_classes=2)
    branches = {
        sc: boosting.train(X[rows], labels, branch_configs.get(sc, config), n_classes=3)
        for sc, (rows, labels) in branch_data.items()
    }
    return HierarchicalModel(root, branches[SuperClass.DISCHARGE], branches[SuperClass.THERMAL],
                             X.shape[1])
