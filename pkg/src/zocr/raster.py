"""Raster validation and the four preprocessing stages.

Rasters are 2-D numpy arrays indexed ``[row, col]``. Gray rasters are uint8
intensities in [0, 255]; binary rasters are uint8 with values in {0, 1},
where 1 marks ink (foreground).
"""

import numpy as np

from ._backend import kernels


class RasterError(ValueError):
    pass


def as_gray(img):
    """Validate and return ``img`` as a contiguous uint8 gray raster."""
    arr = np.asarray(img)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise RasterError(f"expected a non-empty 2-D raster, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        if np.any(arr < 0) or np.any(arr > 255):
            raise RasterError("gray intensities must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    return np.ascontiguousarray(arr)


def as_binary(img):
    """Validate and return ``img`` as a contiguous {0, 1} uint8 raster."""
    arr = np.asarray(img)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise RasterError(f"expected a non-empty 2-D raster, got shape {arr.shape}")
    if arr.dtype == bool:
        return np.ascontiguousarray(arr, dtype=np.uint8)
    if not np.all((arr == 0) | (arr == 1)):
        raise RasterError("binary raster pixels must be 0 or 1")
    return np.ascontiguousarray(arr, dtype=np.uint8)


def otsu_threshold(img):
    """Otsu threshold ``t`` for the rule ``ink = intensity < t``.

    Returns None for a single-valued image (no between-class split exists).
    The returned value is the smallest ``t`` in 1..255 maximizing the
    between-class variance of the split {< t} / {>= t}.
    """
    img = as_gray(img)
    hist = np.bincount(img.ravel(), minlength=256).astype(np.float64)
    levels = np.arange(256, dtype=np.float64)
    # w0[t-1], m0[t-1] describe the class {< t}
    w0 = np.cumsum(hist)[:-1]
    s0 = np.cumsum(hist * levels)[:-1]
    total, stotal = hist.sum(), (hist * levels).sum()
    w1 = total - w0
    valid = (w0 > 0) & (w1 > 0)
    if not valid.any():
        return None
    between = np.zeros(255)
    m0 = np.divide(s0, w0, out=np.zeros(255), where=valid)
    m1 = np.divide(stotal - s0, w1, out=np.zeros(255), where=valid)
    between[valid] = w0[valid] * w1[valid] * (m0[valid] - m1[valid]) ** 2
    return int(np.argmax(between)) + 1


def binarize(img, threshold=None):
    """Dark-on-light binarization: ink where intensity < threshold."""
    img = as_gray(img)
    if threshold is None:
        threshold = otsu_threshold(img)
        if threshold is None:
            return np.zeros(img.shape, dtype=np.uint8)
    return (img < threshold).astype(np.uint8)


def sobel_edges(img):
    """Pixels with nonzero Sobel response |Gx| + |Gy| (replicated border)."""
    return kernels.sobel_edges(as_binary(img))


def dilate(img):
    """Binary dilation by a 3x3 square, clipped at the raster border."""
    return kernels.dilate3x3(as_binary(img))


def fill_holes(img):
    """Set every background pixel not 4-connected to the border to ink."""
    return kernels.fill_holes(as_binary(img))


def preprocess(img, threshold=None):
    return fill_holes(dilate(sobel_edges(binarize(img, threshold))))
