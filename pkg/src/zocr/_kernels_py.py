"""Pure-Python/numpy twins of the compiled kernels in ``_kernels.pyx``."""

from collections import deque

import numpy as np


def sobel_edges(img):
    p = np.pad(img.astype(np.int32), 1, mode="edge")
    gx = (p[:-2, 2:] + 2 * p[1:-1, 2:] + p[2:, 2:]) - (p[:-2, :-2] + 2 * p[1:-1, :-2] + p[2:, :-2])
    gy = (p[2:, :-2] + 2 * p[2:, 1:-1] + p[2:, 2:]) - (p[:-2, :-2] + 2 * p[:-2, 1:-1] + p[:-2, 2:])
    return ((np.abs(gx) + np.abs(gy)) > 0).astype(np.uint8)


def dilate3x3(img):
    p = np.pad(img, 1, mode="constant")
    h, w = img.shape
    out = np.zeros((h, w), dtype=np.uint8)
    for dr in range(3):
        for dc in range(3):
            out |= p[dr:dr + h, dc:dc + w]
    return out


def fill_holes(img):
    h, w = img.shape
    exterior = np.zeros((h, w), dtype=bool)
    queue = deque()
    for r in range(h):
        for c in (0, w - 1):
            if not img[r, c] and not exterior[r, c]:
                exterior[r, c] = True
                queue.append((r, c))
    for c in range(w):
        for r in (0, h - 1):
            if not img[r, c] and not exterior[r, c]:
                exterior[r, c] = True
                queue.append((r, c))
    while queue:
        r, c = queue.popleft()
        for rr, cc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
            if 0 <= rr < h and 0 <= cc < w and not img[rr, cc] and not exterior[rr, cc]:
                exterior[rr, cc] = True
                queue.append((rr, cc))
    return (~exterior).astype(np.uint8)


def label8(img):
    h, w = img.shape
    labels = np.zeros((h, w), dtype=np.int32)
    rows = []
    n = 0
    fg = img.astype(bool).tolist()
    lab = labels.tolist()
    for r0 in range(h):
        for c0 in range(w):
            if not fg[r0][c0] or lab[r0][c0]:
                continue
            n += 1
            lab[r0][c0] = n
            stack = [(r0, c0)]
            x0 = x1 = c0
            y0 = y1 = r0
            count = 0
            while stack:
                r, c = stack.pop()
                count += 1
                x0 = min(x0, c)
                x1 = max(x1, c)
                y1 = max(y1, r)
                for rr in range(max(r - 1, 0), min(r + 2, h)):
                    for cc in range(max(c - 1, 0), min(c + 2, w)):
                        if fg[rr][cc] and not lab[rr][cc]:
                            lab[rr][cc] = n
                            stack.append((rr, cc))
            rows.append((x0, y0, x1, y1, count))
    labels[:] = lab
    return labels, np.array(rows, dtype=np.int64).reshape(len(rows), 5)


_ROW = np.arange(10)[:, None]
_COL = np.arange(10)[None, :]
_LINE_INDEX = {
    0: (_COL - _ROW + 9, 19),
    1: (np.broadcast_to(_ROW, (10, 10)), 10),
    2: (np.broadcast_to(_COL, (10, 10)), 10),
}


def line_sums(glyph, orientation):
    index, nlines = _LINE_INDEX[orientation]
    zones = glyph.reshape(9, 10, 6, 10).transpose(0, 2, 1, 3).astype(np.int32)
    out = np.zeros((9, 6, nlines), dtype=np.int32)
    flat = index.ravel()
    for k in range(nlines):
        out[:, :, k] = zones.reshape(9, 6, 100)[:, :, flat == k].sum(axis=2)
    return out
