"""Regenerate the bundled synthetic 60-row fixture.

The rows are SYNTHETIC: ten samples per fault class drawn around hand-picked
class prototypes (ppm) with log-normal scatter, in a repeating class cycle. They exist so
the test-suite and the CLI run without the real survey data.

    python scripts/make_synthetic_fixture.py [output.csv]
"""

import sys
from pathlib import Path

import numpy as np

# h2, ch4, c2h6, c2h4, c2h2
PROTOTYPES = {
    "PD": (500.0, 40.0, 10.0, 1.0, 0.5),
    "D1": (200.0, 30.0, 5.0, 20.0, 60.0),
    "D2": (300.0, 80.0, 15.0, 120.0, 150.0),
    "T1": (40.0, 120.0, 80.0, 20.0, 0.5),
    "T2": (60.0, 200.0, 60.0, 180.0, 1.0),
    "T3": (80.0, 250.0, 50.0, 600.0, 5.0),
}
PER_CLASS = 10
SCATTER = 0.1
SEED = 20201


def generate(seed: int = SEED) -> list[tuple]:
    rng = np.random.default_rng(seed)
    rows = []
    # classes interleaved in a fixed cycle: each feature column is then a
    # noisy periodic signal, so its IMF1 keeps the class structure
    for _ in range(PER_CLASS):
        for label, proto in PROTOTYPES.items():
            gases = np.asarray(proto) * rng.lognormal(0.0, SCATTER, size=5)
            rows.append((label, *np.round(gases, 2)))
    return [(f"S{i + 1:03d}", *r[1:], r[0]) for i, r in enumerate(rows)]


def main(argv):
    default = Path(__file__).resolve().parents[1] / "src" / "dga_emd" / "data" / "synthetic_60.csv"
    out = Path(argv[1]) if len(argv) > 1 else default
    lines = ["id,h2,ch4,c2h6,c2h4,c2h2,label"]
    lines += [",".join(str(v) for v in r) for r in generate()]
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(lines) - 1} synthetic rows to {out}")


if __name__ == "__main__":
    main(sys.argv)
