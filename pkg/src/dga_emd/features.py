"""Gas totals and the 37 ratio-based DGA parameters.

Feature numbering is 1-based and fixed; every other module refers to
features by these numbers.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DegenerateSample

N_FEATURES = 37
RATIO_CAP = 1e6
GASES = ("h2", "ch4", "c2h6", "c2h4", "c2h2")


class SuperClass(enum.Enum):
    DISCHARGE = "Discharge"
    THERMAL = "Thermal"


class FaultClass(enum.Enum):
    PD = "PD"
    D1 = "D1"
    D2 = "D2"
    T1 = "T1"
    T2 = "T2"
    T3 = "T3"

    @property
    def superclass(self) -> SuperClass:
        return SuperClass.THERMAL if self.value.startswith("T") else SuperClass.DISCHARGE

    @property
    def index(self) -> int:
        return FAULT_CLASSES.index(self)

    @classmethod
    def parse(cls, text: str) -> "FaultClass":
        try:
            return cls(text.strip().upper())
        except ValueError:
            raise ValueError(f"unknown fault label {text!r}") from None


FAULT_CLASSES = tuple(FaultClass)
SUPERCLASS_MEMBERS = {
    SuperClass.DISCHARGE: (FaultClass.PD, FaultClass.D1, FaultClass.D2),
    SuperClass.THERMAL: (FaultClass.T1, FaultClass.T2, FaultClass.T3),
}


@dataclass(frozen=True)
class GasSample:
    """One transformer's dissolved gas concentrations in ppm."""

    id: str
    h2: float
    ch4: float
    c2h6: float
    c2h4: float
    c2h2: float
    label: Optional[FaultClass] = None

    def __post_init__(self):
        for gas in GASES:
            v = getattr(self, gas)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{gas} must be finite and non-negative, got {v!r}")

    @property
    def gases(self) -> tuple[float, float, float, float, float]:
        return (self.h2, self.ch4, self.c2h6, self.c2h4, self.c2h2)


@dataclass(frozen=True)
class GasTotals:
    th: float
    thd: float
    thh: float
    tch: float


def compute_totals(sample: GasSample) -> GasTotals:
    h2, ch4, c2h6, c2h4, c2h2 = sample.gases
    return GasTotals(
        th=h2 + ch4 + c2h6 + c2h4 + c2h2,
        thd=ch4 + c2h4 + c2h2,
        thh=h2 + c2h4 + c2h2,
        tch=ch4 + c2h6 + c2h4 + c2h2,
    )


def safe_ratio(num: float, den: float) -> float:
    """``num/den`` with 0/0 -> 0 and x/0 -> RATIO_CAP; results clamp at the cap."""
    if den > 0:
        return min(num / den, RATIO_CAP)
    return RATIO_CAP if num > 0 else 0.0


FEATURE_NAMES: tuple[str, ...] = (
    "H2/TH", "CH4/TH", "C2H6/TH", "C2H4/TH", "C2H2/TH",
    "C2H2/H2", "C2H2/CH4", "C2H2/C2H6", "C2H2/C2H4",
    "C2H4/H2", "C2H4/CH4", "C2H4/C2H6", "C2H4/H2+C2H4/CH4",
    "H2", "CH4", "C2H6", "C2H4", "C2H2",
    "TH", "THD", "THH", "TCH",
    "H2/THD", "CH4/THD", "C2H6/THD", "C2H4/THD", "C2H2/THD",
    "H2/THH", "CH4/THH", "C2H6/THH", "C2H4/THH", "C2H2/THH",
    "H2/TCH", "CH4/TCH", "C2H6/TCH", "C2H4/TCH", "C2H2/TCH",
)


def feature_name(number: int) -> str:
    return FEATURE_NAMES[number - 1]


@dataclass(frozen=True)
class FeatureVector:
    """The 37 parameters of one sample, addressed by 1-based feature number."""

    values: np.ndarray

    def __getitem__(self, number: int) -> float:
        if not 1 <= number <= N_FEATURES:
            raise IndexError(f"feature number must be in 1..{N_FEATURES}, got {number}")
        return float(self.values[number - 1])

    def select(self, numbers: Iterable[int]) -> np.ndarray:
        return np.array([self[k] for k in numbers])


def compute_features(sample: GasSample) -> FeatureVector:
    h2, ch4, c2h6, c2h4, c2h2 = sample.gases
    t = compute_totals(sample)
    if t.th == 0:
        raise DegenerateSample(f"sample {sample.id!r} has all gases at zero")
    r = safe_ratio
    gases = (h2, ch4, c2h6, c2h4, c2h2)
    values = [
        *(r(g, t.th) for g in gases),                      # 1-5
        r(c2h2, h2), r(c2h2, ch4), r(c2h2, c2h6), r(c2h2, c2h4),  # 6-9
        r(c2h4, h2), r(c2h4, ch4), r(c2h4, c2h6),           # 10-12
        r(c2h4, h2) + r(c2h4, ch4),                         # 13
        *gases,                                             # 14-18
        t.th, t.thd, t.thh, t.tch,                          # 19-22
        *(r(g, t.thd) for g in gases),                      # 23-27
        *(r(g, t.thh) for g in gases),                      # 28-32
        *(r(g, t.tch) for g in gases),                      # 33-37
    ]
    return FeatureVector(np.asarray(values, dtype=float))


def feature_matrix(samples: Sequence[GasSample]) -> np.ndarray:
    """Stack the feature vectors of ``samples`` into an N x 37 array."""
    if not samples:
        return np.empty((0, N_FEATURES))
    return np.vstack([compute_features(s).values for s in samples])
