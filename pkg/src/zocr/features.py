"""Zonal feature extraction in diagonal, horizontal and vertical orientation.

A 90x60 glyph is cut into a 9x6 grid of 10x10 zones. Within a zone, ink is
counted along each line of the chosen orientation (19 diagonals, or 10 rows,
or 10 columns), and the line counts are averaged into one zone feature.
Optionally, 9 zone-row means and 6 zone-column means are appended, giving
69 values instead of 54.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._backend import kernels
from .segment import GLYPH_COLS, GLYPH_ROWS, GlyphBox

ZONE = 10
ZONE_ROWS = GLYPH_ROWS // ZONE
ZONE_COLS = GLYPH_COLS // ZONE
N_ZONES = ZONE_ROWS * ZONE_COLS


class Orientation(str, Enum):
    DIAGONAL = "diagonal"
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"

    @property
    def n_lines(self):
        return 19 if self is Orientation.DIAGONAL else 10


class AveragingMode(str, Enum):
    ALL_LINES = "all-lines"
    NON_EMPTY = "non-empty"


_KERNEL_CODE = {Orientation.DIAGONAL: 0, Orientation.HORIZONTAL: 1, Orientation.VERTICAL: 2}


def feature_dim(with_aggregates):
    return N_ZONES + ZONE_ROWS + ZONE_COLS if with_aggregates else N_ZONES


@dataclass(frozen=True)
class FeatureVector:
    orientation: Orientation
    with_aggregates: bool
    values: np.ndarray

    def __post_init__(self):
        if len(self.values) != feature_dim(self.with_aggregates):
            raise ValueError(f"feature vector length {len(self.values)} does not match "
                             f"with_aggregates={self.with_aggregates}")


def _check_glyph(glyph):
    if isinstance(glyph, GlyphBox):
        glyph = glyph.glyph
    glyph = np.ascontiguousarray(glyph, dtype=np.uint8)
    if glyph.shape != (GLYPH_ROWS, GLYPH_COLS):
        raise ValueError(f"glyph not 90×60 (got {glyph.shape[0]}×{glyph.shape[1]})")
    return glyph


def zone_partition(glyph):
    """Return a (9, 6, 10, 10) view; zone (zr, zc) covers rows 10zr.. and cols 10zc.."""
    glyph = _check_glyph(glyph)
    return glyph.reshape(ZONE_ROWS, ZONE, ZONE_COLS, ZONE).transpose(0, 2, 1, 3)


def sub_features(zone, orientation):
    """Ink counts along each line of a single 10x10 zone."""
    zone = np.asarray(zone)
    if zone.shape != (ZONE, ZONE):
        raise ValueError(f"zone must be 10×10, got {zone.shape}")
    orientation = Orientation(orientation)
    if orientation is Orientation.DIAGONAL:
        # line k holds pixels with col - row + 9 == k; offset = k - 9
        return np.array([np.trace(zone, offset=k - 9) for k in range(19)], dtype=np.int64)
    axis = 1 if orientation is Orientation.HORIZONTAL else 0
    return zone.astype(np.int64).sum(axis=axis)


def _average(sums, mode):
    sums = np.asarray(sums, dtype=np.float64)
    total = sums.sum(axis=-1)
    if AveragingMode(mode) is AveragingMode.ALL_LINES:
        return total / sums.shape[-1]
    nonempty = (sums > 0).sum(axis=-1)
    return np.divide(total, nonempty, out=np.zeros_like(total), where=nonempty > 0)


def zone_feature(zone, orientation, mode=AveragingMode.ALL_LINES):
    return float(_average(sub_features(zone, orientation), mode))


def zone_features(glyph, orientation, mode=AveragingMode.ALL_LINES):
    """The 9x6 grid of zone features for a glyph."""
    glyph = _check_glyph(glyph)
    sums = kernels.line_sums(glyph, _KERNEL_CODE[Orientation(orientation)])
    return _average(sums, mode)


def extract_features(glyph, orientation, with_aggregates=True, mode=AveragingMode.ALL_LINES):
    orientation = Orientation(orientation)
    grid = zone_features(glyph, orientation, mode)
    parts = [grid.ravel()]
    if with_aggregates:
        parts += [grid.mean(axis=1), grid.mean(axis=0)]
    return FeatureVector(orientation, bool(with_aggregates), np.concatenate(parts))


def feature_matrix(glyphs, orientation, with_aggregates=True, mode=AveragingMode.ALL_LINES):
    dim = feature_dim(with_aggregates)
    out = np.empty((len(glyphs), dim), dtype=np.float64)
    for i, g in enumerate(glyphs):
        out[i] = extract_features(g, orientation, with_aggregates, mode).values
    return out


def write_feature_table(path, rows, names, orientation, with_aggregates, mode):
    """Write one vector per line: ``name,v0,v1,...`` after a header comment."""
    orientation = Orientation(orientation)
    dim = feature_dim(with_aggregates)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# orientation={orientation.value} aggregates={int(bool(with_aggregates))} "
                 f"mode={AveragingMode(mode).value} dim={dim}\n")
        layout = "# layout: zone features 0..53 zone-row-major (index 6*zr+zc)"
        if with_aggregates:
            layout += "; row means 54..62 top-down; column means 63..68 left-right"
        fh.write(layout + "\n")
        for name, row in zip(names, rows):
            fh.write(name + "," + ",".join(repr(float(v)) for v in row) + "\n")
