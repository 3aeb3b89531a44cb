# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled pixel kernels.

Every function here has a drop-in twin in :mod:`zocr._kernels_py`; the two
must produce identical arrays for identical input.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def sobel_edges(const cnp.uint8_t[:, ::1] img):
    cdef Py_ssize_t h = img.shape[0], w = img.shape[1]
    cdef Py_ssize_t r, c, ru, rd, cl, cr
    cdef int gx, gy
    out = np.zeros((h, w), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] o = out
    for r in range(h):
        ru = r - 1 if r > 0 else 0
        rd = r + 1 if r < h - 1 else h - 1
        for c in range(w):
            cl = c - 1 if c > 0 else 0
            cr = c + 1 if c < w - 1 else w - 1
            gx = (img[ru, cr] + 2 * img[r, cr] + img[rd, cr]) \
                - (img[ru, cl] + 2 * img[r, cl] + img[rd, cl])
            gy = (img[rd, cl] + 2 * img[rd, c] + img[rd, cr]) \
                - (img[ru, cl] + 2 * img[ru, c] + img[ru, cr])
            if gx != 0 or gy != 0:
                o[r, c] = 1
    return out


def dilate3x3(const cnp.uint8_t[:, ::1] img):
    # the 3x3 square is separable: a 1x3 pass then a 3x1 pass
    cdef Py_ssize_t h = img.shape[0], w = img.shape[1]
    cdef Py_ssize_t r, c
    tmp = np.empty((h, w), dtype=np.uint8)
    out = np.empty((h, w), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] t = tmp
    cdef cnp.uint8_t[:, ::1] o = out
    for r in range(h):
        for c in range(w):
            t[r, c] = img[r, c] | (img[r, c - 1] if c > 0 else 0) | (img[r, c + 1] if c < w - 1 else 0)
    for r in range(h):
        for c in range(w):
            o[r, c] = t[r, c] | (t[r - 1, c] if r > 0 else 0) | (t[r + 1, c] if r < h - 1 else 0)
    return out


def fill_holes(const cnp.uint8_t[:, ::1] img):
    cdef Py_ssize_t h = img.shape[0], w = img.shape[1]
    cdef Py_ssize_t r, c, top = 0, idx
    # 0 = unvisited background, 1 = foreground, 2 = exterior background
    state = np.array(img, dtype=np.uint8, copy=True)
    cdef cnp.uint8_t[:, ::1] s = state
    stack = np.empty(h * w + 4, dtype=np.intp)
    cdef Py_ssize_t[::1] st = stack

    for r in range(h):
        for c in range(w):
            if (r == 0 or c == 0 or r == h - 1 or c == w - 1) and s[r, c] == 0:
                s[r, c] = 2
                st[top] = r * w + c
                top += 1
    while top > 0:
        top -= 1
        idx = st[top]
        r = idx // w
        c = idx - r * w
        if r > 0 and s[r - 1, c] == 0:
            s[r - 1, c] = 2
            st[top] = idx - w
            top += 1
        if r < h - 1 and s[r + 1, c] == 0:
            s[r + 1, c] = 2
            st[top] = idx + w
            top += 1
        if c > 0 and s[r, c - 1] == 0:
            s[r, c - 1] = 2
            st[top] = idx - 1
            top += 1
        if c < w - 1 and s[r, c + 1] == 0:
            s[r, c + 1] = 2
            st[top] = idx + 1
            top += 1

    out = np.empty((h, w), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] o = out
    for r in range(h):
        for c in range(w):
            o[r, c] = 0 if s[r, c] == 2 else 1
    return out


def label8(const cnp.uint8_t[:, ::1] img):
    """8-connected labels in first-encounter raster order.

    Returns ``(labels, stats)`` where ``stats[k - 1] = (x0, y0, x1, y1, count)``.
    """
    cdef Py_ssize_t h = img.shape[0], w = img.shape[1]
    cdef Py_ssize_t r, c, rr, cc, r0, c0, top, idx
    cdef cnp.int32_t n = 0
    cdef cnp.int64_t x0, y0, x1, y1, count
    labels = np.zeros((h, w), dtype=np.int32)
    cdef cnp.int32_t[:, ::1] lab = labels
    stack = np.empty(h * w + 1, dtype=np.intp)
    cdef Py_ssize_t[::1] st = stack
    rows = []

    for r0 in range(h):
        for c0 in range(w):
            if img[r0, c0] == 0 or lab[r0, c0] != 0:
                continue
            n += 1
            lab[r0, c0] = n
            st[0] = r0 * w + c0
            top = 1
            x0 = c0
            x1 = c0
            y0 = r0
            y1 = r0
            count = 0
            while top > 0:
                top -= 1
                idx = st[top]
                r = idx // w
                c = idx - r * w
                count += 1
                if c < x0:
                    x0 = c
                if c > x1:
                    x1 = c
                if r > y1:
                    y1 = r
                for rr in range(r - 1 if r > 0 else 0, (r + 2) if r < h - 1 else h):
                    for cc in range(c - 1 if c > 0 else 0, (c + 2) if c < w - 1 else w):
                        if img[rr, cc] != 0 and lab[rr, cc] == 0:
                            lab[rr, cc] = n
                            st[top] = rr * w + cc
                            top += 1
            rows.append((x0, y0, x1, y1, count))
    stats = np.array(rows, dtype=np.int64).reshape(len(rows), 5)
    return labels, stats


def line_sums(const cnp.uint8_t[:, ::1] glyph, int orientation):
    """Per-zone line counts of a 90x60 glyph.

    ``orientation`` 0 = diagonal (19 lines, index col - row + 9),
    1 = horizontal (10 rows), 2 = vertical (10 columns).
    """
    cdef Py_ssize_t r, c, k
    cdef Py_ssize_t nlines = 19 if orientation == 0 else 10
    out = np.zeros((9, 6, nlines), dtype=np.int32)
    cdef cnp.int32_t[:, :, ::1] o = out
    for r in range(90):
        for c in range(60):
            if glyph[r, c]:
                if orientation == 0:
                    k = (c % 10) - (r % 10) + 9
                elif orientation == 1:
                    k = r % 10
                else:
                    k = c % 10
                o[r // 10, c // 10, k] += 1
    return out
