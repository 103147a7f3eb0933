"""Dataset files, model artifacts, delimited-text tables and box-plot data."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import tempfile
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Literal, Optional, Sequence, Union

import numpy as np

from .boosting import BoostedEnsemble, Leaf, Split, TrainConfig, TreeNode
from .emd import Axis, SiftConfig
from .errors import CorruptArtifact, EmptyFile, ParseError, VersionMismatch
from .evaluation import SplitConfig
from .features import FAULT_CLASSES, GASES, FaultClass, GasSample
from .hierarchy import HierarchicalModel
from .ranking import FeatureWindow, SkewnessRanking

HEADER = ["id", *GASES, "label"]
ARTIFACT_FORMAT = "dga-emd-model"
ARTIFACT_VERSION = 1

PathLike = Union[str, Path]


@dataclass(frozen=True)
class Dataset:
    samples: tuple[GasSample, ...]
    fingerprint: str
    source: str = ""

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def labels(self) -> list[Optional[FaultClass]]:
        return [s.label for s in self.samples]

    @property
    def is_labeled(self) -> bool:
        return all(s.label is not None for s in self.samples)

    def class_counts(self) -> dict[FaultClass, int]:
        c = Counter(s.label for s in self.samples if s.label is not None)
        return {fc: c.get(fc, 0) for fc in FAULT_CLASSES}


def fingerprint_bytes(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def parse_dataset(data: bytes, source: str = "", require_labels: bool = False) -> Dataset:
    """Parse dataset bytes. Raises ParseError or EmptyFile; never anything else."""
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as e:
        raise ParseError(0, f"not valid UTF-8 ({e.reason} at byte {e.start})") from None
    if not text.strip():
        raise EmptyFile(f"{source or 'dataset'} is empty")
    lines = text.splitlines()
    samples = []
    seen = set()
    header_seen = False
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            row = next(csv.reader([line]))
        except (csv.Error, StopIteration) as e:
            raise ParseError(lineno, f"malformed delimited text: {e}") from None
        row = [c.strip() for c in row]
        if not header_seen:
            if [c.lower() for c in row] != HEADER:
                raise ParseError(lineno, f"header must be {','.join(HEADER)}")
            header_seen = True
            continue
        if len(row) != len(HEADER):
            raise ParseError(lineno, f"expected {len(HEADER)} fields, got {len(row)}")
        sid = row[0]
        if not sid:
            raise ParseError(lineno, "empty id")
        if sid in seen:
            raise ParseError(lineno, f"duplicate id {sid!r}")
        gases = []
        for name, cell in zip(GASES, row[1:6]):
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(lineno, f"column {name}: not a number ({cell!r})") from None
            if not math.isfinite(v) or v < 0:
                raise ParseError(lineno, f"column {name}: must be finite and non-negative ({cell!r})")
            gases.append(v)
        if sum(gases) == 0:
            raise ParseError(lineno, "all gas concentrations are zero")
        label = None
        if row[6]:
            try:
                label = FaultClass.parse(row[6])
            except ValueError:
                raise ParseError(lineno, f"column label: unknown fault class {row[6]!r}") from None
        elif require_labels:
            raise ParseError(lineno, "column label: missing")
        seen.add(sid)
        samples.append(GasSample(sid, *gases, label=label))
    if not samples:
        raise EmptyFile(f"{source or 'dataset'} has no data rows")
    return Dataset(tuple(samples), fingerprint_bytes(data), source)


def ingest(path: PathLike, require_labels: bool = True) -> Dataset:
    p = Path(path)
    return parse_dataset(p.read_bytes(), str(p), require_labels)


def format_class_table(ds: Dataset) -> str:
    counts = ds.class_counts()
    names = [fc.value for fc in FAULT_CLASSES]
    head = "\t".join(["Fault Type", *names, "Overall"])
    vals = "\t".join(["Samples", *(str(counts[fc]) for fc in FAULT_CLASSES), str(sum(counts.values()))])
    unlabeled = sum(1 for s in ds.samples if s.label is None)
    tail = f"\nUnlabeled\t{unlabeled}" if unlabeled else ""
    return f"{head}\n{vals}{tail}"


# -- delimited text ------------------------------------------------------------

def atomic_write_text(path: PathLike, text: str) -> None:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=p.parent, prefix=f".{p.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, p)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def fmt(v) -> str:
    if v is None:
        return "NA"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def write_table(path: PathLike, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    atomic_write_text(path, to_csv(header, rows))


# -- box plots -------------------------------------------------------------------

@dataclass(frozen=True)
class BoxPlotRecord:
    feature: str
    fault_class: str
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float
    whisker_low: float
    whisker_high: float
    outliers: tuple[float, ...] = field(default=())

    FIELDS = ("feature", "fault_class", "min", "q1", "median", "q3", "max",
              "whisker_low", "whisker_high", "outliers")

    def row(self) -> list:
        return [self.feature, self.fault_class, self.minimum, self.q1, self.median, self.q3,
                self.maximum, self.whisker_low, self.whisker_high,
                ";".join(repr(float(v)) for v in self.outliers)]


def box_stats(values, feature: str = "", fault_class: str = "") -> BoxPlotRecord:
    """Quartiles by linear interpolation between order statistics (numpy's default
    'linear' method); whiskers reach the most extreme values within 1.5 IQR."""
    v = np.sort(np.asarray(values, dtype=float))
    q1, med, q3 = np.percentile(v, [25, 50, 75])
    iqr = q3 - q1
    lo_fence, hi_fence = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    inside = v[(v >= lo_fence) & (v <= hi_fence)]
    return BoxPlotRecord(
        feature, fault_class, float(v[0]), float(q1), float(med), float(q3), float(v[-1]),
        float(inside.min()), float(inside.max()),
        tuple(float(x) for x in v[(v < lo_fence) | (v > hi_fence)]),
    )


def emit_boxplot_data(matrix, labels: Sequence[FaultClass], feature_names: Sequence[str],
                      stage: Literal["raw-feature", "imf"] = "raw-feature") -> list[BoxPlotRecord]:
    """One record per (feature, class present), features in column order."""
    X = np.asarray(matrix, dtype=float)
    if X.size == 0:
        raise ValueError("box plots need a nonempty matrix")
    labels = list(labels)
    out = []
    for j, name in enumerate(feature_names):
        fname = f"{stage}:{name}"
        for fc in FAULT_CLASSES:
            rows = [i for i, c in enumerate(labels) if c is fc]
            if rows:
                out.append(box_stats(X[rows, j], fname, fc.value))
    return out


def boxplot_csv(records: Sequence[BoxPlotRecord]) -> str:
    return to_csv(BoxPlotRecord.FIELDS, (r.row() for r in records))


# -- model artifact -------------------------------------------------------------

@dataclass(frozen=True)
class ModelArtifact:
    model: HierarchicalModel
    ranking: SkewnessRanking
    window: FeatureWindow
    sift: SiftConfig
    axis: Axis
    train_config: TrainConfig
    split_config: SplitConfig
    dataset_fingerprint: str

    def features_for(self, X37: np.ndarray) -> np.ndarray:
        from .emd import transform_matrix
        from .ranking import select_columns
        imf, _ = transform_matrix(select_columns(X37, self.window), self.axis, self.sift)
        return imf


def _tree_to_doc(node: TreeNode) -> dict:
    if isinstance(node, Leaf):
        return {"leaf": node.weight}
    return {"feature": node.feature_index, "threshold": node.threshold,
            "left": _tree_to_doc(node.left), "right": _tree_to_doc(node.right)}


def _tree_from_doc(doc: dict) -> TreeNode:
    if "leaf" in doc:
        return Leaf(float(doc["leaf"]))
    return Split(int(doc["feature"]), float(doc["threshold"]),
                 _tree_from_doc(doc["left"]), _tree_from_doc(doc["right"]))


def ensemble_to_doc(m: BoostedEnsemble) -> dict:
    return {
        "n_classes": m.n_classes,
        "n_features": m.n_features,
        "learning_rate": m.learning_rate,
        "base_score": m.base_score,
        "train_class_counts": list(m.train_class_counts),
        "rounds": [[_tree_to_doc(t) for t in r] for r in m.trees],
    }


def ensemble_from_doc(doc: dict) -> BoostedEnsemble:
    return BoostedEnsemble(
        int(doc["n_classes"]),
        int(doc["n_features"]),
        tuple(tuple(_tree_from_doc(t) for t in r) for r in doc["rounds"]),
        float(doc["learning_rate"]),
        float(doc["base_score"]),
        tuple(doc.get("train_class_counts", ())),
    )


def artifact_payload(a: ModelArtifact) -> dict:
    return {
        "ranking": {"mode": a.ranking.mode, "entries": [[k, s] for k, s in a.ranking.entries]},
        "window": {"rank_start": a.window.rank_start, "features": list(a.window.feature_indices)},
        "emd": {"axis": a.axis, **asdict(a.sift)},
        "train_config": asdict(a.train_config),
        "split_config": asdict(a.split_config),
        "dataset_fingerprint": a.dataset_fingerprint,
        "model": {
            "feature_count": a.model.feature_count,
            "root": ensemble_to_doc(a.model.root),
            "discharge_branch": ensemble_to_doc(a.model.discharge_branch),
            "thermal_branch": ensemble_to_doc(a.model.thermal_branch),
        },
    }


def _canonical(payload: dict) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=False).encode()


def dumps_artifact(a: ModelArtifact) -> str:
    payload = artifact_payload(a)
    doc = {
        "format": ARTIFACT_FORMAT,
        "schema_version": ARTIFACT_VERSION,
        "checksum": fingerprint_bytes(_canonical(payload)),
        "payload": payload,
    }
    return json.dumps(doc, indent=1, sort_keys=True, allow_nan=False) + "\n"


def loads_artifact(text: str) -> ModelArtifact:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise CorruptArtifact(f"artifact is not valid JSON: {e}") from None
    if not isinstance(doc, dict) or doc.get("format") != ARTIFACT_FORMAT:
        raise CorruptArtifact("not a model artifact")
    version = doc.get("schema_version")
    if version != ARTIFACT_VERSION:
        raise VersionMismatch(f"artifact schema version {version!r}, this build reads {ARTIFACT_VERSION}")
    payload = doc.get("payload")
    if not isinstance(payload, dict):
        raise CorruptArtifact("artifact has no payload")
    try:
        digest = fingerprint_bytes(_canonical(payload))
    except ValueError:  # NaN or infinity smuggled into the payload
        raise CorruptArtifact("artifact payload holds non-finite numbers") from None
    if doc.get("checksum") != digest:
        raise CorruptArtifact("artifact checksum mismatch")
    try:
        m = payload["model"]
        model = HierarchicalModel(
            ensemble_from_doc(m["root"]),
            ensemble_from_doc(m["discharge_branch"]),
            ensemble_from_doc(m["thermal_branch"]),
            int(m["feature_count"]),
        )
        emd = dict(payload["emd"])
        axis = emd.pop("axis")
        return ModelArtifact(
            model,
            SkewnessRanking(tuple((int(k), float(s)) for k, s in payload["ranking"]["entries"]),
                            payload["ranking"]["mode"]),
            FeatureWindow(int(payload["window"]["rank_start"]), tuple(payload["window"]["features"])),
            SiftConfig(**emd),
            axis,
            TrainConfig(**payload["train_config"]),
            SplitConfig(**payload["split_config"]),
            payload["dataset_fingerprint"],
        )
    except (KeyError, TypeError, ValueError) as e:
        raise CorruptArtifact(f"artifact payload malformed: {e}") from None


def save_model(artifact: ModelArtifact, path: PathLike) -> None:
    atomic_write_text(path, dumps_artifact(artifact))


def load_model(path: PathLike) -> ModelArtifact:
    try:
        text = Path(path).read_bytes().decode("utf-8")
    except UnicodeDecodeError:
        raise CorruptArtifact(f"{path} is not UTF-8 text") from None
    return loads_artifact(text)
