"""Connected-component segmentation and 90x60 glyph normalization."""

import logging
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .raster import as_binary

GLYPH_ROWS = 90
GLYPH_COLS = 60
DEFAULT_MIN_PIXELS = 8

log = logging.getLogger(__name__)


class SegmentationError(ValueError):
    pass


@dataclass(frozen=True)
class Component:
    """One 8-connected ink region.

    ``mask`` is the component cropped to its inclusive bounding box; pixels
    of other components that fall inside the box are 0.
    """

    label: int
    x0: int
    y0: int
    x1: int
    y1: int
    mask: np.ndarray
    count: int

    @property
    def box(self):
        return (self.x0, self.y0, self.x1, self.y1)

    @property
    def height(self):
        return self.y1 - self.y0 + 1


@dataclass(frozen=True)
class GlyphBox:
    label: int
    x0: int
    y0: int
    x1: int
    y1: int
    glyph: np.ndarray
    pixel_count: int = 0


def label_components(page):
    """Label 8-connected ink components, numbered 1..k in raster-scan order."""
    page = as_binary(page)
    labels, stats = kernels.label8(page)
    comps = []
    for k, (x0, y0, x1, y1, count) in enumerate(stats.tolist(), start=1):
        mask = (labels[y0:y1 + 1, x0:x1 + 1] == k).astype(np.uint8)
        comps.append(Component(k, x0, y0, x1, y1, mask, count))
    return comps


def _same_line(a, b):
    overlap = min(a.y1, b.y1) - max(a.y0, b.y0) + 1
    return overlap > 0 and 2 * overlap >= min(a.height, b.height)


def order_glyphs(components):
    """Reading order: group into lines by vertical overlap, then top-down, left-right.

    Two boxes share a line when their vertical extents overlap by at least
    half the smaller height; lines are the transitive closure of that.
    """
    comps = list(components)
    parent = list(range(len(comps)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(comps)):
        for j in range(i + 1, len(comps)):
            if _same_line(comps[i], comps[j]):
                parent[find(i)] = find(j)

    lines = {}
    for i, comp in enumerate(comps):
        lines.setdefault(find(i), []).append(comp)
    ordered = sorted(lines.values(), key=lambda line: (min(c.y0 for c in line), min(c.x0 for c in line)))
    out = []
    for line in ordered:
        out.extend(sorted(line, key=lambda c: (c.x0, c.y0, c.label)))
    return out


def resize_nearest(crop, rows=GLYPH_ROWS, cols=GLYPH_COLS):
    """Nearest-neighbour resample: out[r, c] = crop[r*H // rows, c*W // cols]."""
    h, w = crop.shape
    ri = (np.arange(rows) * h) // rows
    ci = (np.arange(cols) * w) // cols
    return np.ascontiguousarray(crop[ri[:, None], ci[None, :]], dtype=np.uint8)


def normalize_glyph(component):
    mask = np.asarray(component.mask)
    if mask.size == 0 or not mask.any():
        raise SegmentationError("empty glyph")
    glyph = resize_nearest(mask)
    if not glyph.any():
        raise SegmentationError("empty glyph after resize")
    return GlyphBox(component.label, component.x0, component.y0, component.x1, component.y1,
                    glyph, int(component.count))


def segment_page(page, min_pixels=DEFAULT_MIN_PIXELS):
    if min_pixels < 1:
        raise ValueError("min_pixels must be >= 1")
    comps = [c for c in label_components(page) if c.count >= min_pixels]
    glyphs = []
    for comp in order_glyphs(comps):
        try:
            glyphs.append(normalize_glyph(comp))
        except SegmentationError:
            # strokes thinner than the sampling stride can vanish on downscale
            log.warning("component %d at %s vanished when resized; skipped", comp.label, comp.box)
    return glyphs
