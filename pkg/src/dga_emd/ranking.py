"""Skewness ranking of the 37 features and the sliding windows over it."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .errors import BadWidth, TooFewSamples
from .features import N_FEATURES

RankMode = Literal["absolute", "signed"]
DEFAULT_WIDTH = 12


def skewness(xs: Sequence[float]) -> float:
    """Biased Fisher-Pearson coefficient ``m3 / m2**1.5``.

    Constant sequences (``m2 < 1e-12``) have skewness 0.
    """
    x = np.asarray(xs, dtype=float)
    if x.size < 3:
        raise TooFewSamples(f"skewness needs at least 3 values, got {x.size}")
    d = x - x.mean()
    m2 = np.mean(d * d)
    if m2 < 1e-12:
        return 0.0
    m3 = np.mean(d * d * d)
    return float(m3 / m2**1.5)


@dataclass(frozen=True)
class SkewnessRanking:
    """Features ordered by ascending skewness key.

    ``entries`` holds ``(feature_number, skewness)`` pairs in rank order;
    ``mode`` records whether the key was ``|skewness|`` or the signed value.
    """

    entries: tuple[tuple[int, float], ...]
    mode: RankMode = "absolute"

    @property
    def order(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.entries)

    def rank_of(self, feature: int) -> int:
        return self.order.index(feature) + 1


@dataclass(frozen=True)
class FeatureWindow:
    rank_start: int
    feature_indices: tuple[int, ...]

    @property
    def width(self) -> int:
        return len(self.feature_indices)


def rank_features(feature_matrix: np.ndarray, mode: RankMode = "absolute") -> SkewnessRanking:
    X = np.asarray(feature_matrix, dtype=float)
    if X.ndim != 2:
        raise ValueError("feature matrix must be 2-D")
    if X.shape[0] < 3:
        raise TooFewSamples(f"ranking needs at least 3 rows, got {X.shape[0]}")
    skews = [skewness(X[:, j]) for j in range(X.shape[1])]
    if mode == "absolute":
        keys = [abs(s) for s in skews]
    elif mode == "signed":
        keys = skews
    else:
        raise ValueError(f"unknown rank mode {mode!r}")
    # 1-based feature numbers; ties go to the lower number
    idx = sorted(range(len(skews)), key=lambda j: (keys[j], j))
    return SkewnessRanking(tuple((j + 1, skews[j]) for j in idx), mode)


def enumerate_windows(ranking: SkewnessRanking, width: int = DEFAULT_WIDTH) -> list[FeatureWindow]:
    n = len(ranking.entries)
    if not 1 <= width <= n:
        raise BadWidth(f"window width must be in 1..{n}, got {width}")
    order = ranking.order
    return [FeatureWindow(s + 1, order[s:s + width]) for s in range(n - width + 1)]


def window_at(ranking: SkewnessRanking, rank_start: int, width: int = DEFAULT_WIDTH) -> FeatureWindow:
    windows = enumerate_windows(ranking, width)
    if not 1 <= rank_start <= len(windows):
        raise BadWidth(f"window start must be in 1..{len(windows)}, got {rank_start}")
    return windows[rank_start - 1]


def select_columns(feature_matrix: np.ndarray, window: FeatureWindow) -> np.ndarray:
    """Columns of an N x 37 matrix for the window's features, in rank order."""
    X = np.asarray(feature_matrix)
    if X.shape[1] != N_FEATURES:
        raise ValueError(f"expected {N_FEATURES} feature columns, got {X.shape[1]}")
    return X[:, [k - 1 for k in window.feature_indices]]
