"""Dataset ingestion, training/evaluation of one variant, and the six-way comparison."""

import csv
import logging
import os
from dataclasses import dataclass, field

import numpy as np

from . import mlp
from .features import AveragingMode, Orientation, feature_dim, feature_matrix
from .modelfile import MinMaxScaler, Model
from .pgm import ImageFormatError, read_pgm
from .raster import preprocess
from .segment import DEFAULT_MIN_PIXELS, segment_page

log = logging.getLogger(__name__)

IMAGE_EXTENSIONS = (".pgm",)
MAX_FAILURE_FRACTION = 0.10

VARIANTS = [
    (Orientation.VERTICAL, False), (Orientation.HORIZONTAL, False), (Orientation.DIAGONAL, False),
    (Orientation.VERTICAL, True), (Orientation.HORIZONTAL, True), (Orientation.DIAGONAL, True),
]

TABLE_ROWS = [
    "Networks",
    "Feature Extraction type",
    "Number of nodes in input layer",
    "Number of nodes in 1st hidden layer",
    "Number of nodes in 2nd hidden layer",
    "Number of nodes in output layer",
    "Training epochs",
    "Final MSE",
    "Stop reason",
    "Recognition rate percentage",
]


class DatasetError(RuntimeError):
    pass


def variant_name(orientation, with_aggregates):
    return f"{Orientation(orientation).value}-{feature_dim(with_aggregates)}"


@dataclass
class DatasetManifest:
    root: str
    entries: list
    class_map: dict = None

    def __post_init__(self):
        if self.class_map is None:
            self.class_map = {lab: i for i, lab in enumerate(sorted({lab for _, lab in self.entries}))}


def scan_dataset(root):
    """Manifest from a ``root/<label>/<image>.pgm`` tree, sorted by label then file name."""
    if not os.path.isdir(root):
        raise DatasetError(f"dataset root not found: {root}")
    entries = []
    for label in sorted(os.listdir(root)):
        sub = os.path.join(root, label)
        if not os.path.isdir(sub):
            continue
        for name in sorted(os.listdir(sub)):
            if name.lower().endswith(IMAGE_EXTENSIONS):
                entries.append((os.path.join(sub, name), label))
    return DatasetManifest(root, entries)


def read_manifest(path):
    """Manifest from a file of ``path<TAB>label`` lines; relative paths resolve against its folder."""
    base = os.path.dirname(os.path.abspath(path))
    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DatasetError(f"{path}:{lineno}: expected 'path<TAB>label'")
            img, label = parts
            entries.append((img if os.path.isabs(img) else os.path.join(base, img), label))
    return DatasetManifest(base, entries)


def open_manifest(path):
    return scan_dataset(path) if os.path.isdir(path) else read_manifest(path)


@dataclass
class GlyphSet:
    """Normalized glyphs with their label strings, in manifest order."""

    glyphs: list
    labels: list
    sources: list = None
    errors: list = field(default_factory=list)

    def __len__(self):
        return len(self.glyphs)

    def class_names(self):
        return sorted(set(self.labels))


def glyph_from_image(img, min_pixels=DEFAULT_MIN_PIXELS, threshold=None, source="image"):
    """The single glyph of a one-character image (largest component if several)."""
    boxes = segment_page(preprocess(img, threshold), min_pixels)
    if not boxes:
        raise DatasetError("no components")
    if len(boxes) > 1:
        log.warning("%s: %d components, keeping the largest", source, len(boxes))
    # max() keeps the first of equal-sized components
    return max(boxes, key=lambda b: b.pixel_count).glyph


def load_dataset(manifest, min_pixels=DEFAULT_MIN_PIXELS, threshold=None):
    """Preprocess and segment every manifest entry.

    Per-entry failures are collected in ``errors``; more than 10% failing
    entries aborts with DatasetError.
    """
    glyphs, labels, sources, errors = [], [], [], []
    for path, label in manifest.entries:
        try:
            glyphs.append(glyph_from_image(read_pgm(path), min_pixels, threshold, source=path))
        except (OSError, ImageFormatError, DatasetError) as exc:
            msg = exc.strerror if isinstance(exc, OSError) and exc.strerror else str(exc)
            errors.append((path, msg))
            log.error("%s: %s", path, msg)
            continue
        labels.append(label)
        sources.append(path)
    total = len(manifest.entries)
    if total == 0:
        raise DatasetError(f"no images found under {manifest.root}")
    if len(errors) > MAX_FAILURE_FRACTION * total:
        detail = "; ".join(f"{p}: {m}" for p, m in errors[:5])
        raise DatasetError(f"{len(errors)} of {total} entries failed ({detail})")
    return GlyphSet(glyphs, labels, sources, errors)


@dataclass
class EvalReport:
    class_names: list
    confusion: np.ndarray
    precision: np.ndarray
    recall: np.ndarray

    @property
    def total(self):
        return int(self.confusion.sum())

    @property
    def correct(self):
        return int(np.trace(self.confusion))

    @property
    def rate(self):
        return 100.0 * self.correct / self.total


def evaluate(params, inputs, targets, class_names):
    """Confusion matrix (rows = true class, columns = predicted) and rates."""
    x = np.asarray(inputs, dtype=np.float64)
    y = np.asarray(targets, dtype=int)
    if len(x) == 0:
        raise ValueError("empty evaluation set")
    return report_from_predictions(y, np.atleast_1d(mlp.classify(params, x)), class_names)


def report_from_predictions(y_true, y_pred, class_names):
    n = len(class_names)
    conf = np.zeros((n, n), dtype=np.int64)
    np.add.at(conf, (np.asarray(y_true), np.asarray(y_pred)), 1)
    diag = np.diag(conf).astype(np.float64)
    col, row = conf.sum(axis=0), conf.sum(axis=1)
    precision = np.divide(diag, col, out=np.zeros(n), where=col > 0)
    recall = np.divide(diag, row, out=np.zeros(n), where=row > 0)
    return EvalReport(list(class_names), conf, precision, recall)


@dataclass(frozen=True)
class RunConfig:
    train: mlp.TrainConfig = mlp.TrainConfig()
    hidden: tuple = (100, 100)
    seed: int = 0
    mode: AveragingMode = AveragingMode.ALL_LINES


@dataclass
class VariantResult:
    orientation: Orientation
    with_aggregates: bool
    report: EvalReport = None
    state: mlp.TrainState = None
    model: Model = None
    error: str = None

    @property
    def name(self):
        return variant_name(self.orientation, self.with_aggregates)


def _indices(labels, class_map, what):
    unknown = sorted({lab for lab in labels if lab not in class_map})
    if unknown:
        raise ValueError(f"{what} labels not among training classes: {unknown}")
    return np.array([class_map[lab] for lab in labels], dtype=int)


def fit_model(train_set, orientation, with_aggregates, cfg=RunConfig(), progress=None):
    """Extract features and train one network; returns ``(model, state)``."""
    if not len(train_set):
        raise ValueError("empty training set")
    names = train_set.class_names()
    if len(names) < 2:
        raise ValueError("need at least two classes")
    class_map = {lab: i for i, lab in enumerate(names)}
    x = feature_matrix(train_set.glyphs, orientation, with_aggregates, cfg.mode)
    scaler = MinMaxScaler.fit(x) if cfg.train.normalize_inputs else None
    if scaler is not None:
        x = scaler.transform(x)
    t = mlp.one_hot(_indices(train_set.labels, class_map, "training"), len(names), cfg.train.soft_targets)
    ncfg = mlp.NetworkConfig(x.shape[1], tuple(cfg.hidden), len(names), cfg.seed)
    params, state = mlp.train(ncfg, cfg.train, x, t, progress=progress)
    model = Model(params, names, Orientation(orientation), AveragingMode(cfg.mode), bool(with_aggregates), scaler)
    return model, state


def evaluate_model(model, glyph_set):
    x = model.prepare(feature_matrix(glyph_set.glyphs, model.orientation, model.with_aggregates, model.mode))
    class_map = {lab: i for i, lab in enumerate(model.labels)}
    return evaluate(model.params, x, _indices(glyph_set.labels, class_map, "test"), model.labels)


def recognize_glyphs(model, glyphs):
    if not glyphs:
        return []
    x = model.prepare(feature_matrix(glyphs, model.orientation, model.with_aggregates, model.mode))
    return [model.labels[k] for k in np.atleast_1d(mlp.classify(model.params, x))]


def run_variant(train_set, test_set, orientation, with_aggregates, cfg=RunConfig()):
    if not len(test_set):
        raise ValueError("empty test set")
    model, state = fit_model(train_set, orientation, with_aggregates, cfg)
    report = evaluate_model(model, test_set)
    return VariantResult(Orientation(orientation), bool(with_aggregates), report, state, model)


def run_comparison(train_set, test_set, cfg=RunConfig()):
    """Train and test all six orientation/length variants with identical settings.

    A failing variant is recorded in its result's ``error`` and the rest still run.
    """
    results = []
    for orientation, aggregates in VARIANTS:
        try:
            results.append(run_variant(train_set, test_set, orientation, aggregates, cfg))
        except (ValueError, mlp.TrainingDiverged) as exc:
            log.error("variant %s failed: %s", variant_name(orientation, aggregates), exc)
            results.append(VariantResult(orientation, aggregates, error=str(exc)))
    return results


def write_trace(path, state, lr0):
    """Per-epoch CSV ``epoch,mse,lr,accepted``; row 0 is the initial network."""
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["epoch", "mse", "lr", "accepted"])
        w.writerow([0, repr(state.initial_mse), repr(float(lr0)), 1])
        for k, (mse, lr, ok) in enumerate(zip(state.mse_history, state.lr_history, state.accepted), 1):
            w.writerow([k, repr(mse), repr(lr), int(ok)])


def read_trace(path):
    with open(path, newline="", encoding="ascii") as fh:
        rows = list(csv.DictReader(fh))
    return [(int(r["epoch"]), float(r["mse"]), float(r["lr"]), r["accepted"] == "1") for r in rows]


def write_report_csv(path, report):
    """Confusion matrix with per-class totals, precision and recall columns."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["true\\predicted", *report.class_names, "total", "precision", "recall"])
        for i, name in enumerate(report.class_names):
            row = report.confusion[i]
            w.writerow([name, *row.tolist(), int(row.sum()),
                        f"{report.precision[i]:.4f}", f"{report.recall[i]:.4f}"])
        w.writerow(["recognition rate percentage", f"{report.rate:.2f}"])


def _table(results, title):
    cols = []
    for k, r in enumerate(results, 1):
        dims = (feature_dim(r.with_aggregates), *(r.model.params.dims[1:] if r.model else ("-",) * 3))
        ok = r.error is None
        cols.append([
            str(k),
            r.orientation.value.capitalize(),
            str(dims[0]),
            str(dims[1]),
            str(dims[2]),
            str(dims[3]),
            str(r.state.epoch) if ok else "-",
            f"{r.state.final_mse:.4e}" if ok else "-",
            r.state.stop_reason if ok else "FAILED",
            f"{r.report.rate:.2f}" if ok else "-",
        ])
    label_w = max(len(s) for s in TABLE_ROWS) + 2
    col_w = max(12, *(len(c) + 2 for col in cols for c in col))
    lines = [title]
    for i, label in enumerate(TABLE_ROWS):
        lines.append(label.ljust(label_w) + "".join(col[i].ljust(col_w) for col in cols).rstrip())
    return "\n".join(lines)


def format_summary(results, cfg, n_train, n_test):
    t = cfg.train
    head = (f"Recognition rate comparison: mode={AveragingMode(cfg.mode).value} seed={cfg.seed} "
            f"train={n_train} test={n_test}\n"
            f"goal_mse={t.goal_mse:g} max_epochs={t.max_epochs} lr0={t.lr0:g} momentum={t.momentum:g} "
            f"lr_inc={t.lr_inc:g} lr_dec={t.lr_dec:g} max_perf_inc={t.max_perf_inc:g} "
            f"normalize={int(t.normalize_inputs)}")
    short = [r for r in results if not r.with_aggregates]
    full = [r for r in results if r.with_aggregates]
    parts = [head, _table(short, "54 features"), _table(full, "69 features")]
    failed = [r for r in results if r.error is not None]
    if failed:
        parts.append("Failures:\n" + "\n".join(f"  {r.name}: {r.error}" for r in failed))
    return "\n\n".join(parts) + "\n"
