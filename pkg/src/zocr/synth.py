"""Synthetic letter corpora rendered from a 5x7 bitmap font.

Used for desk-scale training checks where no scanned handwriting corpus is
at hand. Two granularities are offered: jittered 90x60 glyphs that skip the
image stages, and gray PGM images that exercise the full pipeline.
"""

import os
import string

import numpy as np

from .pgm import write_pgm
from .segment import resize_nearest

FONT_5X7 = {
    "A": [".###.", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"],
    "B": ["####.", "#...#", "#...#", "####.", "#...#", "#...#", "####."],
    "C": [".###.", "#...#", "#....", "#....", "#....", "#...#", ".###."],
    "D": ["###..", "#..#.", "#...#", "#...#", "#...#", "#..#.", "###.."],
    "E": ["#####", "#....", "#....", "####.", "#....", "#....", "#####"],
    "F": ["#####", "#....", "#....", "####.", "#....", "#....", "#...."],
    "G": [".###.", "#...#", "#....", "#.###", "#...#", "#...#", ".####"],
    "H": ["#...#", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"],
    "I": [".###.", "..#..", "..#..", "..#..", "..#..", "..#..", ".###."],
    "J": ["..###", "...#.", "...#.", "...#.", "...#.", "#..#.", ".##.."],
    "K": ["#...#", "#..#.", "#.#..", "##...", "#.#..", "#..#.", "#...#"],
    "L": ["#....", "#....", "#....", "#....", "#....", "#....", "#####"],
    "M": ["#...#", "##.##", "#.#.#", "#.#.#", "#...#", "#...#", "#...#"],
    "N": ["#...#", "#...#", "##..#", "#.#.#", "#..##", "#...#", "#...#"],
    "O": [".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."],
    "P": ["####.", "#...#", "#...#", "####.", "#....", "#....", "#...."],
    "Q": [".###.", "#...#", "#...#", "#...#", "#.#.#", "#..#.", ".##.#"],
    "R": ["####.", "#...#", "#...#", "####.", "#.#..", "#..#.", "#...#"],
    "S": [".####", "#....", "#....", ".###.", "....#", "....#", "####."],
    "T": ["#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."],
    "U": ["#...#", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."],
    "V": ["#...#", "#...#", "#...#", "#...#", "#...#", ".#.#.", "..#.."],
    "W": ["#...#", "#...#", "#...#", "#.#.#", "#.#.#", "#.#.#", ".#.#."],
    "X": ["#...#", "#...#", ".#.#.", "..#..", ".#.#.", "#...#", "#...#"],
    "Y": ["#...#", "#...#", ".#.#.", "..#..", "..#..", "..#..", "..#.."],
    "Z": ["#####", "....#", "...#.", "..#..", ".#...", "#....", "#####"],
}

LETTERS = string.ascii_uppercase


def font_bitmap(letter):
    rows = FONT_5X7[letter]
    return np.array([[ch == "#" for ch in row] for row in rows], dtype=np.uint8)


def template_glyph(letter):
    """The letter's bitmap scaled to a 90x60 glyph by nearest-neighbour."""
    return resize_nearest(font_bitmap(letter))


def jitter_glyph(glyph, rng, shift=1, flip_rate=0.02):
    """Translate by up to ``shift`` pixels per axis, then flip a fraction of pixels."""
    dy, dx = rng.integers(-shift, shift + 1, size=2)
    out = np.zeros_like(glyph)
    h, w = glyph.shape
    src = glyph[max(0, -dy):h - max(0, dy), max(0, -dx):w - max(0, dx)]
    out[max(0, dy):max(0, dy) + src.shape[0], max(0, dx):max(0, dx) + src.shape[1]] = src
    flips = rng.random(out.shape) < flip_rate
    return out ^ flips.astype(np.uint8)


def glyph_corpus(copies=10, seed=0, letters=LETTERS, shift=1, flip_rate=0.02):
    """``copies`` jittered glyphs per letter, as ``(glyphs, labels)`` in letter-major order."""
    rng = np.random.default_rng(seed)
    glyphs, labels = [], []
    for letter in letters:
        base = template_glyph(letter)
        for _ in range(copies):
            glyphs.append(jitter_glyph(base, rng, shift, flip_rate))
            labels.append(letter)
    return glyphs, labels


def split_copies(glyphs, labels, copies, test_per_class):
    """Hold out the last ``test_per_class`` copies of every class."""
    train, test = ([], []), ([], [])
    for i, (g, lab) in enumerate(zip(glyphs, labels)):
        dest = test if i % copies >= copies - test_per_class else train
        dest[0].append(g)
        dest[1].append(lab)
    return train, test


def render_letter(letter, scale=8, stroke_noise=0.0, rng=None):
    """Gray raster of one letter: ink 0 on white 255, ``scale`` pixels per font cell.

    ``stroke_noise`` erases that fraction of ink pixels (never background), which
    perturbs shape without creating free-floating specks.
    """
    bits = np.kron(font_bitmap(letter), np.ones((scale, scale), dtype=np.uint8))
    if stroke_noise and rng is not None:
        bits = bits & (rng.random(bits.shape) >= stroke_noise).astype(np.uint8)
    return np.where(bits > 0, 0, 255).astype(np.uint8)


def render_page(text, scale=8, gap=None, margin=None, rng=None, shift=0, stroke_noise=0.0):
    """Render lines of letters onto a white background; spaces leave a blank cell.

    ``text`` may contain newlines. Each letter may be shifted by up to
    ``shift`` pixels when ``rng`` is given.
    """
    gap = 3 * scale if gap is None else gap
    margin = 3 * scale if margin is None else margin
    lines = text.split("\n")
    cell_w, cell_h = 5 * scale + gap, 7 * scale + gap
    width = 2 * margin + max(len(line) for line in lines) * cell_w
    height = 2 * margin + len(lines) * cell_h
    page = np.full((height, width), 255, dtype=np.uint8)
    for li, line in enumerate(lines):
        for ci, ch in enumerate(line):
            if ch == " ":
                continue
            y = margin + li * cell_h
            x = margin + ci * cell_w
            if shift and rng is not None:
                dy, dx = rng.integers(-shift, shift + 1, size=2)
                y, x = y + dy, x + dx
            tile = render_letter(ch, scale, stroke_noise, rng)
            page[y:y + tile.shape[0], x:x + tile.shape[1]] = np.minimum(
                page[y:y + tile.shape[0], x:x + tile.shape[1]], tile)
    return page


def write_image_corpus(root, copies=10, seed=0, letters=LETTERS, scale=8, shift=1, stroke_noise=0.02,
                       start=0):
    """Write ``root/<letter>/<n>.pgm`` single-letter images; returns the paths written."""
    rng = np.random.default_rng(seed)
    paths = []
    for letter in letters:
        os.makedirs(os.path.join(root, letter), exist_ok=True)
        for k in range(start, start + copies):
            img = render_page(letter, scale=scale, rng=rng, shift=shift, stroke_noise=stroke_noise)
            path = os.path.join(root, letter, f"{k:03d}.pgm")
            write_pgm(path, img)
            paths.append(path)
    return paths
