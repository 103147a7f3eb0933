"""Single-level empirical mode decomposition.

Only the first intrinsic mode function (IMF1) is extracted. Envelopes are
natural cubic splines through the local extrema, with the two extrema
nearest each end mirrored about the end sample to tame spline end-swing.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import InsufficientExtrema

logger = logging.getLogger(__name__)

Axis = Literal["column", "row"]


@dataclass(frozen=True)
class SiftConfig:
    sd_threshold: float = 0.3
    max_sift_iterations: int = 50
    boundary: Literal["mirror"] = "mirror"
    min_extrema: int = 2
    # also require |#extrema - #zero crossings| <= 1 before stopping
    imf_check: bool = True

    def __post_init__(self):
        if not self.sd_threshold > 0:
            raise ValueError("sd_threshold must be positive")
        if self.max_sift_iterations < 1:
            raise ValueError("max_sift_iterations must be >= 1")
        if self.boundary != "mirror":
            raise ValueError(f"unsupported boundary policy {self.boundary!r}")
        if self.min_extrema < 2:
            raise ValueError("min_extrema must be >= 2")


@dataclass(frozen=True)
class SiftResult:
    imf: np.ndarray
    residue: np.ndarray
    iterations: int
    degenerate: bool
    sd_converged: bool = False


def find_extrema(signal) -> tuple[list[int], list[int]]:
    """Strict interior local maxima and minima.

    A plateau of equal values counts once, at its midpoint (rounded down).
    Runs touching either end of the signal are never extrema.
    """
    x = np.asarray(signal, dtype=float)
    n = x.size
    if n < 3:
        return [], []
    # run-length encode equal neighbours
    change = np.flatnonzero(np.diff(x) != 0) + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change - 1, [n - 1]))
    vals = x[starts]
    prev, cur, nxt = vals[:-2], vals[1:-1], vals[2:]
    mid = (starts[1:-1] + ends[1:-1]) // 2
    maxima = mid[(prev < cur) & (cur > nxt)]
    minima = mid[(prev > cur) & (cur < nxt)]
    return maxima.tolist(), minima.tolist()


def zero_crossings(signal) -> int:
    """Sign changes, ignoring exact zeros."""
    s = np.sign(np.asarray(signal, dtype=float))
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def _mirrored_knots(x: np.ndarray, idx: list[int]) -> tuple[np.ndarray, np.ndarray]:
    n = x.size
    idx = np.asarray(idx)
    head = idx[:2][::-1]
    tail = idx[-2:][::-1]
    pos = np.concatenate((-head, idx, 2 * (n - 1) - tail)).astype(float)
    val = np.concatenate((x[head], x[idx], x[tail]))
    return pos, val


def cubic_envelopes(signal, maxima, minima, boundary: str = "mirror") -> tuple[np.ndarray, np.ndarray]:
    """Upper and lower spline envelopes evaluated at every sample index."""
    x = np.asarray(signal, dtype=float)
    if boundary != "mirror":
        raise ValueError(f"unsupported boundary policy {boundary!r}")
    if len(maxima) < 2 or len(minima) < 2:
        raise InsufficientExtrema(
            f"need >= 2 maxima and >= 2 minima, got {len(maxima)} and {len(minima)}"
        )
    t = np.arange(x.size, dtype=float)
    upper = CubicSpline(*_mirrored_knots(x, maxima), bc_type="natural")(t)
    lower = CubicSpline(*_mirrored_knots(x, minima), bc_type="natural")(t)
    # pin the knots exactly; spline evaluation at a knot can be off by an ulp
    upper[maxima] = x[maxima]
    lower[minima] = x[minima]
    return upper, lower


def sift_imf1(signal, config: SiftConfig = SiftConfig()) -> SiftResult:
    x = np.asarray(signal, dtype=float)
    maxima, minima = find_extrema(x)
    if len(maxima) < config.min_extrema or len(minima) < config.min_extrema:
        return SiftResult(x.copy(), np.zeros_like(x), 0, True)

    h = x.copy()
    converged = False
    iterations = 0
    for iterations in range(1, config.max_sift_iterations + 1):
        upper, lower = cubic_envelopes(h, maxima, minima, config.boundary)
        h_new = h - 0.5 * (upper + lower)
        denom = float(np.sum(h * h))
        sd = float(np.sum((h - h_new) ** 2)) / denom if denom > 0 else 0.0
        h = h_new
        maxima, minima = find_extrema(h)
        if len(maxima) < config.min_extrema or len(minima) < config.min_extrema:
            logger.debug("sifting stopped after %d iterations: extrema exhausted", iterations)
            break
        if sd < config.sd_threshold and (
            not config.imf_check
            or abs(len(maxima) + len(minima) - zero_crossings(h)) <= 1
        ):
            converged = True
            break
    return SiftResult(h, x - h, iterations, False, converged)


def transform_matrix(features, axis: Axis = "column",
                     config: SiftConfig = SiftConfig()) -> tuple[np.ndarray, np.ndarray]:
    """Replace each column (or row) of ``features`` by its IMF1.

    Returns ``(imf_matrix, degenerate)`` where ``degenerate`` flags, per
    column or per row, the signals passed through unchanged.
    """
    X = np.asarray(features, dtype=float)
    if X.ndim != 2:
        raise ValueError("features must be a 2-D array")
    if axis == "column":
        signals = X.T
    elif axis == "row":
        signals = X
    else:
        raise ValueError(f"unknown axis {axis!r}")
    out = np.empty_like(signals)
    flags = np.zeros(signals.shape[0], dtype=bool)
    for i, s in enumerate(signals):
        res = sift_imf1(s, config)
        out[i] = res.imf
        flags[i] = res.degenerate
    return (out.T.copy() if axis == "column" else out), flags
