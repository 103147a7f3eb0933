"""Transformer fault diagnosis from dissolved gas analysis.

Ratio features, skewness ranking, single-level EMD, a hierarchical
gradient-boosted classifier, and rule-based baselines.
"""

from .baselines import NO_RESULT, duval_classify, duval_coordinates, iec_classify, rogers_classify
from .boosting import BoostedEnsemble, TrainConfig
from .emd import SiftConfig, sift_imf1, transform_matrix
from .features import FaultClass, GasSample, SuperClass, compute_features, compute_totals
from .hierarchy import HierarchicalModel, predict_hierarchy, train_hierarchy
from .pipeline import PipelineConfig, run_pipeline
from .ranking import enumerate_windows, rank_features, skewness

__version__ = "0.1.0"

__all__ = [
    "NO_RESULT", "duval_classify", "duval_coordinates", "iec_classify", "rogers_classify",
    "BoostedEnsemble", "TrainConfig", "SiftConfig", "sift_imf1", "transform_matrix",
    "FaultClass", "GasSample", "SuperClass", "compute_features", "compute_totals",
    "HierarchicalModel", "predict_hierarchy", "train_hierarchy",
    "PipelineConfig", "run_pipeline", "enumerate_windows", "rank_features", "skewness",
]
