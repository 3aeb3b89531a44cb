"""Versioned text format for a trained recognizer.

::

    ZOCR-MLP v1
    orientation=diagonal mode=all-lines aggregates=1 labels=A,B,... norm=none
    69 100 100 26
    <w1, one row per line>
    <b1>
    <w2 rows> <b2> <w3 rows> <b3>

Labels are percent-encoded. With input normalization, ``norm=minmax`` is
followed by ``norm_min=`` and ``norm_max=`` comma lists. Numbers are written
with 17 significant digits, so values survive a round trip bit-for-bit.
"""

from dataclasses import dataclass
from urllib.parse import quote, unquote

import numpy as np

from .features import AveragingMode, Orientation
from .mlp import NetworkParams

MAGIC = "ZOCR-MLP v1"


class ModelFormatError(ValueError):
    pass


@dataclass
class MinMaxScaler:
    lo: np.ndarray
    hi: np.ndarray

    @classmethod
    def fit(cls, x):
        x = np.asarray(x, dtype=np.float64)
        return cls(x.min(axis=0), x.max(axis=0))

    def transform(self, x):
        span = self.hi - self.lo
        safe = np.where(span > 0, span, 1.0)
        return np.where(span > 0, (np.asarray(x, dtype=np.float64) - self.lo) / safe, 0.0)


@dataclass
class Model:
    params: NetworkParams
    labels: list
    orientation: Orientation
    mode: AveragingMode
    with_aggregates: bool
    scaler: MinMaxScaler = None

    @property
    def input_dim(self):
        return self.params.weights[0].shape[1]

    def prepare(self, features):
        x = np.asarray(features, dtype=np.float64)
        if x.shape[-1] != self.input_dim:
            raise ValueError(f"feature dimension mismatch: model expects {self.input_dim}, "
                             f"features have {x.shape[-1]}")
        return self.scaler.transform(x) if self.scaler is not None else x


def _fmt(values):
    return " ".join("%.16e" % v for v in np.ravel(values))


def _csv(values):
    return ",".join("%.16e" % v for v in np.ravel(values))


def dumps(model):
    p = model.params
    head = [
        f"orientation={Orientation(model.orientation).value}",
        f"mode={AveragingMode(model.mode).value}",
        f"aggregates={int(bool(model.with_aggregates))}",
        "labels=" + ",".join(quote(str(lab), safe="") for lab in model.labels),
    ]
    if model.scaler is None:
        head.append("norm=none")
    else:
        head += ["norm=minmax", "norm_min=" + _csv(model.scaler.lo), "norm_max=" + _csv(model.scaler.hi)]
    lines = [MAGIC, " ".join(head), " ".join(str(d) for d in p.dims)]
    for w, b in zip(p.weights, p.biases):
        lines.extend(_fmt(row) for row in w)
        lines.append(_fmt(b))
    return "\n".join(lines) + "\n"


def save(path, model):
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(dumps(model))


def _floats(line, n, what):
    try:
        vals = np.array([float(tok) for tok in line.split()], dtype=np.float64)
    except ValueError:
        raise ModelFormatError(f"non-numeric value in {what}") from None
    if vals.size != n:
        raise ModelFormatError(f"{what}: expected {n} values, got {vals.size}")
    return vals


def loads(text):
    lines = text.splitlines()
    if not lines or lines[0].strip() != MAGIC:
        raise ModelFormatError(f"not a model file (expected first line {MAGIC!r})")
    if len(lines) < 3:
        raise ModelFormatError("truncated model header")
    try:
        meta = dict(tok.split("=", 1) for tok in lines[1].split())
        dims = [int(tok) for tok in lines[2].split()]
        orientation = Orientation(meta["orientation"])
        mode = AveragingMode(meta["mode"])
        aggregates = meta["aggregates"] == "1"
        labels = [unquote(tok) for tok in meta["labels"].split(",")] if meta["labels"] else []
    except (KeyError, ValueError) as exc:
        raise ModelFormatError(f"malformed model header: {exc}") from None
    if len(dims) != 4:
        raise ModelFormatError("dimension line must hold 4 integers")
    if len(labels) != dims[3]:
        raise ModelFormatError(f"{len(labels)} labels for {dims[3]} outputs")
    scaler = None
    if meta.get("norm", "none") == "minmax":
        lo = np.array([float(v) for v in meta["norm_min"].split(",")])
        hi = np.array([float(v) for v in meta["norm_max"].split(",")])
        if lo.size != dims[0] or hi.size != dims[0]:
            raise ModelFormatError("normalization constants do not match input dimension")
        scaler = MinMaxScaler(lo, hi)

    pos = 3
    weights, biases = [], []
    for layer, (fan_in, fan_out) in enumerate(zip(dims[:-1], dims[1:]), start=1):
        if len(lines) < pos + fan_out + 1:
            raise ModelFormatError(f"truncated model body in layer {layer}")
        w = np.vstack([_floats(lines[pos + r], fan_in, f"w{layer} row {r}") for r in range(fan_out)])
        pos += fan_out
        weights.append(w)
        biases.append(_floats(lines[pos], fan_out, f"b{layer}"))
        pos += 1
    if any(line.strip() for line in lines[pos:]):
        raise ModelFormatError("trailing data after b3")
    return Model(NetworkParams(weights, biases), labels, orientation, mode, aggregates, scaler)


def load(path):
    with open(path, encoding="ascii") as fh:
        return loads(fh.read())
