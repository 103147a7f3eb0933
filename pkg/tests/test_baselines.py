import math

import numpy as np
import pytest
import yaml
from hypothesis import given, strategies as st

from dga_emd import baselines
from dga_emd.baselines import (
    NO_RESULT,
    TriangleCoordinates,
    default_rules,
    diagnose,
    duval_classify,
    duval_coordinates,
    iec_classify,
    load_rules,
    parse_rules,
    rogers_classify,
)
from dga_emd.errors import VersionMismatch
from dga_emd.features import FAULT_CLASSES, FaultClass, GasSample

F = FaultClass


def gas(h2=1.0, ch4=1.0, c2h6=1.0, c2h4=1.0, c2h2=1.0):
    return GasSample("s", h2, ch4, c2h6, c2h4, c2h2)


def tri(ch4, c2h4, c2h2):
    return TriangleCoordinates(ch4, c2h4, c2h2)


class TestDuval:
    def test_coordinates(self):
        c = duval_coordinates(gas(ch4=1, c2h4=0, c2h2=0))
        assert (c.pct_ch4, c.pct_c2h4, c.pct_c2h2) == (100, 0, 0)
        c = duval_coordinates(gas(ch4=1, c2h4=1, c2h2=1))
        assert c.pct_ch4 == pytest.approx(100 / 3)
        assert duval_coordinates(gas(ch4=0, c2h4=0, c2h2=0)) is None
        assert duval_classify(None) == NO_RESULT

    @given(st.tuples(*[st.floats(0, 1e6)] * 3).filter(lambda t: sum(t) > 1e-6))
    def test_coordinates_sum_to_100(self, t):
        c = duval_coordinates(gas(ch4=t[0], c2h4=t[1], c2h2=t[2]))
        assert abs(c.pct_ch4 + c.pct_c2h4 + c.pct_c2h2 - 100) <= 1e-9

    def test_published_examples(self):
        # PD needs CH4 >= 98 % with C2H4, C2H2 small
        assert duval_classify(tri(99, 0.5, 0.5)) is F.PD
        assert duval_classify(tri(10, 85, 5)) is F.T3
        assert duval_classify(tri(90, 8, 2)) is F.T1
        assert duval_classify(tri(60, 38, 2)) is F.T2
        assert duval_classify(tri(10, 10, 80)) is F.D1
        assert duval_classify(tri(20, 40, 40)) is F.D2
        assert duval_classify(tri(35, 45, 20)) == NO_RESULT  # DT zone

    def test_shared_edge_goes_to_earlier_zone(self):
        assert duval_classify(tri(98, 1, 1)) is F.PD          # PD | T1
        assert duval_classify(tri(78, 20, 2)) is F.T1         # T1 | T2
        assert duval_classify(tri(48, 50, 2)) is F.T2         # T2 | DT
        assert duval_classify(tri(21, 50, 29)) is F.D2        # D2 | DT
        assert duval_classify(tri(100, 0, 0)) is F.PD         # corner

    def test_zone_coverage(self):
        rng = np.random.default_rng(11)
        pts = rng.dirichlet([1, 1, 1], size=10_000) * 100
        zones = default_rules().duval
        allowed = set(FAULT_CLASSES) | {NO_RESULT}
        for p in pts:
            c = tri(*p)
            matches = zones.matching(c)
            assert matches, f"gap at {p}"
            v = duval_classify(c)
            assert v in allowed and v == duval_classify(c)
            assert v == matches[0].verdict


def ratio_probes(table):
    """(spec index, ratio value, expected code) at every finite band edge."""
    for k, spec in enumerate(table.ratios):
        for (lo, hi, code), (_, _, prev) in zip(spec.bands[1:], spec.bands):
            yield k, lo, code, prev


class TestRatioTables:
    @pytest.mark.parametrize("method", ["rogers", "iec"])
    def test_closed_lower_band_edges(self, method):
        table = getattr(default_rules(), method)
        probes = list(ratio_probes(table))
        assert probes
        for k, edge, code, prev in probes:
            spec = table.ratios[k]
            assert spec.code(edge) == code
            assert spec.code(math.nextafter(edge, 0)) == prev
            # the same edge reached through gas concentrations
            s = GasSample("p", **{**dict(h2=1, ch4=1, c2h6=1, c2h4=1, c2h2=1),
                                  spec.denominator: 10.0, spec.numerator: 10.0 * edge})
            assert spec.value(s) == edge
            assert table.codes_for(s)[k] == code

    def test_rogers_examples(self):
        # all four ratios in their "normal" bands
        assert rogers_classify(gas(h2=100, ch4=50, c2h6=10, c2h4=5, c2h2=1)) == NO_RESULT
        assert rogers_classify(gas(h2=100, ch4=200, c2h6=10, c2h4=5, c2h2=1)) is F.T1
        assert rogers_classify(gas(h2=100, ch4=50, c2h6=25, c2h4=12.5, c2h2=12.5)) is F.D1
        assert rogers_classify(gas(h2=100, ch4=5, c2h6=1, c2h4=0.5, c2h2=0)) is F.PD
        assert rogers_classify(gas(h2=100, ch4=200, c2h6=10, c2h4=50, c2h2=1)) is F.T3

    def test_rogers_absent_code(self):
        # codes (2,1,2,2) are not in the table
        assert rogers_classify(gas(h2=1, ch4=5, c2h6=10, c2h4=50, c2h2=200)) == NO_RESULT

    def test_iec_examples(self):
        assert iec_classify(gas(h2=100, ch4=50, c2h6=20, c2h4=40, c2h2=40)) is F.D1
        assert iec_classify(gas(h2=100, ch4=50, c2h6=10, c2h4=20, c2h2=0)) is F.T1
        assert iec_classify(gas(h2=100, ch4=5, c2h6=10, c2h4=5, c2h2=0)) is F.PD
        assert iec_classify(gas(h2=10, ch4=50, c2h6=10, c2h4=50, c2h2=1)) is F.T3
        assert iec_classify(gas(h2=100, ch4=50, c2h6=20, c2h4=10, c2h2=0)) == NO_RESULT

    def test_iec_out_of_table(self):
        assert iec_classify(gas(h2=10, ch4=50, c2h6=10, c2h4=50, c2h2=250)) == NO_RESULT

    def test_zero_denominator_policy(self):
        # C2H2/C2H4 = 0/0 -> 0 and C2H4/C2H6 = 0/0 -> 0
        v = iec_classify(gas(h2=100, ch4=50, c2h6=0, c2h4=0, c2h2=0))
        assert v == NO_RESULT


def test_diagnose_dispatch():
    s = gas(h2=100, ch4=50, c2h6=20, c2h4=40, c2h2=40)
    assert diagnose(s, "iec") is iec_classify(s)
    assert diagnose(s, "rogers") == rogers_classify(s)
    assert diagnose(s, "duval") == duval_classify(duval_coordinates(s))
    with pytest.raises(ValueError):
        diagnose(s, "key-gas")


def bundled_doc():
    text = (baselines.resources.files("dga_emd") / "rules/default_rules.yaml").read_text("utf-8")
    return yaml.safe_load(text)


def test_rules_file_round_trip(tmp_path):
    doc = bundled_doc()
    doc["duval"]["zones"][-1]["verdict"] = "D2"  # override DT mapping
    path = tmp_path / "rules.yaml"
    path.write_text(yaml.safe_dump(doc))
    rules = load_rules(path)
    assert duval_classify(tri(35, 45, 20), rules.duval) is F.D2
    assert duval_classify(tri(35, 45, 20)) == NO_RESULT


def test_rules_version_and_validation():
    doc = bundled_doc()
    doc["schema_version"] = 2
    with pytest.raises(VersionMismatch):
        parse_rules(doc)
    doc = bundled_doc()
    doc["duval"]["zones"][0]["polygon"][0] = [97, 2, 0]
    with pytest.raises(ValueError):
        parse_rules(doc)
    doc = bundled_doc()
    doc["iec"]["codes"]["0,1"] = "PD"
    with pytest.raises(ValueError):
        parse_rules(doc)
