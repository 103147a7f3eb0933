"""Conventional rule-based diagnosers: Duval triangle, Rogers ratios, IEC ratio codes.

All rule constants come from a rules file (see ``rules/default_rules.yaml``).
A verdict is either a ``FaultClass`` or ``NO_RESULT``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Union

import yaml

from .errors import VersionMismatch
from .features import FaultClass, GasSample, safe_ratio

RULES_SCHEMA_VERSION = 1
NO_RESULT = "NoResult"
_EDGE_TOL = 1e-9

Verdict = Union[FaultClass, str]


def _parse_verdict(text: str) -> Verdict:
    return NO_RESULT if text == NO_RESULT else FaultClass.parse(text)


def verdict_name(v: Verdict) -> str:
    return v.value if isinstance(v, FaultClass) else v


@dataclass(frozen=True)
class TriangleCoordinates:
    pct_ch4: float
    pct_c2h4: float
    pct_c2h2: float


@dataclass(frozen=True)
class Zone:
    name: str
    verdict: Verdict
    polygon: tuple[tuple[float, float, float], ...]

    def contains(self, c: TriangleCoordinates) -> bool:
        # CH4 is implied by the other two; work in the (c2h4, c2h2) plane
        return _point_in_polygon(c.pct_c2h4, c.pct_c2h2, [(v[1], v[2]) for v in self.polygon])


@dataclass(frozen=True)
class ZoneTable:
    zones: tuple[Zone, ...]

    def locate(self, c: TriangleCoordinates) -> Optional[Zone]:
        for z in self.zones:
            if z.contains(c):
                return z
        return None

    def matching(self, c: TriangleCoordinates) -> list[Zone]:
        return [z for z in self.zones if z.contains(c)]


@dataclass(frozen=True)
class RatioSpec:
    name: str
    numerator: str
    denominator: str
    bands: tuple[tuple[float, float, int], ...]

    def value(self, sample: GasSample) -> float:
        return safe_ratio(getattr(sample, self.numerator), getattr(sample, self.denominator))

    def code(self, r: float) -> Optional[int]:
        for lo, hi, code in self.bands:
            if lo <= r < hi:
                return code
        return None


@dataclass(frozen=True)
class RatioRuleTable:
    ratios: tuple[RatioSpec, ...]
    codes: dict

    def codes_for(self, sample: GasSample) -> tuple[Optional[int], ...]:
        return tuple(spec.code(spec.value(sample)) for spec in self.ratios)

    def classify(self, sample: GasSample) -> Verdict:
        key = self.codes_for(sample)
        if None in key:
            return NO_RESULT
        return self.codes.get(key, NO_RESULT)


@dataclass(frozen=True)
class RuleSet:
    duval: ZoneTable
    rogers: RatioRuleTable
    iec: RatioRuleTable


def _point_in_polygon(x: float, y: float, poly: list[tuple[float, float]]) -> bool:
    """Even-odd test; points on an edge (within tolerance) count as inside."""
    n = len(poly)
    inside = False
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        # on-segment check
        cross = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1)
        if (abs(cross) <= _EDGE_TOL * max(1.0, math.hypot(x2 - x1, y2 - y1))
                and min(x1, x2) - _EDGE_TOL <= x <= max(x1, x2) + _EDGE_TOL
                and min(y1, y2) - _EDGE_TOL <= y <= max(y1, y2) + _EDGE_TOL):
            return True
        if (y1 > y) != (y2 > y):
            x_cross = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < x_cross:
                inside = not inside
    return inside


def _ratio_table(doc: dict) -> RatioRuleTable:
    ratios = []
    for r in doc["ratios"]:
        bands = tuple((float(lo), float(hi), int(code)) for lo, hi, code in r["bands"])
        for (_, hi, _), (lo, _, _) in zip(bands, bands[1:]):
            if hi != lo:
                raise ValueError(f"bands of {r['name']} must be contiguous and ordered")
        ratios.append(RatioSpec(r["name"], r["numerator"], r["denominator"], bands))
    codes = {}
    for key, verdict in doc["codes"].items():
        parts = tuple(int(p) for p in str(key).split(","))
        if len(parts) != len(ratios):
            raise ValueError(f"code {key!r} does not match the {len(ratios)} ratios")
        codes[parts] = _parse_verdict(verdict)
    return RatioRuleTable(tuple(ratios), codes)


def parse_rules(doc: dict) -> RuleSet:
    version = doc.get("schema_version")
    if version != RULES_SCHEMA_VERSION:
        raise VersionMismatch(f"rules schema version {version!r}, expected {RULES_SCHEMA_VERSION}")
    zones = []
    for z in doc["duval"]["zones"]:
        poly = tuple(tuple(float(v) for v in vertex) for vertex in z["polygon"])
        for vertex in poly:
            if abs(sum(vertex) - 100) > 1e-9:
                raise ValueError(f"zone {z['name']}: vertex {vertex} does not sum to 100")
        zones.append(Zone(z["name"], _parse_verdict(z["verdict"]), poly))
    return RuleSet(ZoneTable(tuple(zones)), _ratio_table(doc["rogers"]), _ratio_table(doc["iec"]))


def load_rules(path: Union[str, Path, None] = None) -> RuleSet:
    """Load a rules file; ``None`` loads the bundled defaults."""
    if path is None:
        text = resources.files("dga_emd").joinpath("rules/default_rules.yaml").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    return parse_rules(yaml.safe_load(text))


_default: Optional[RuleSet] = None


def default_rules() -> RuleSet:
    global _default
    if _default is None:
        _default = load_rules()
    return _default


def duval_coordinates(sample: GasSample) -> Optional[TriangleCoordinates]:
    """Relative CH4/C2H4/C2H2 percentages, or None when all three are zero."""
    total = sample.ch4 + sample.c2h4 + sample.c2h2
    if total <= 0:
        return None
    return TriangleCoordinates(100 * sample.ch4 / total, 100 * sample.c2h4 / total,
                               100 * sample.c2h2 / total)


def duval_classify(coords: Optional[TriangleCoordinates], zones: Optional[ZoneTable] = None) -> Verdict:
    if coords is None:
        return NO_RESULT
    zones = zones or default_rules().duval
    zone = zones.locate(coords)
    return zone.verdict if zone is not None else NO_RESULT


def rogers_classify(sample: GasSample, table: Optional[RatioRuleTable] = None) -> Verdict:
    return (table or default_rules().rogers).classify(sample)


def iec_classify(sample: GasSample, table: Optional[RatioRuleTable] = None) -> Verdict:
    return (table or default_rules().iec).classify(sample)


METHODS = ("duval", "rogers", "iec")


def diagnose(sample: GasSample, method: str, rules: Optional[RuleSet] = None) -> Verdict:
    rules = rules or default_rules()
    if method == "duval":
        return duval_classify(duval_coordinates(sample), rules.duval)
    if method == "rogers":
        return rogers_classify(sample, rules.rogers)
    if method == "iec":
        return iec_classify(sample, rules.iec)
    raise ValueError(f"unknown baseline method {method!r}")
