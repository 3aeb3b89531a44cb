"""Time the compiled kernels against the numpy/pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from zocr._backend import available_backends, get_kernels
from zocr.synth import glyph_corpus, render_page

TEXT = "\n".join(["THE QUICK BROWN FOX", "JUMPS OVER THE LAZY", "DOG WHILE ZONES ARE", "COUNTED DIAGONALLY"])


def cases():
    page = (render_page(TEXT, rng=np.random.default_rng(0), shift=1, stroke_noise=0.02) < 128).astype(np.uint8)
    glyphs, _ = glyph_corpus(copies=4, seed=0)
    return page, glyphs


def pipeline_on(k, page, glyphs):
    binary = k.fill_holes(k.dilate3x3(k.sobel_edges(page)))
    k.label8(binary)
    for g in glyphs:
        k.line_sums(g, 0)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    page, glyphs = cases()
    print(f"page {page.shape[1]}x{page.shape[0]}, {len(glyphs)} glyphs; best of {args.repeat}")
    names = available_backends()
    jobs = {
        "sobel_edges": lambda k: k.sobel_edges(page),
        "dilate3x3": lambda k: k.dilate3x3(page),
        "fill_holes": lambda k: k.fill_holes(page),
        "label8": lambda k: k.label8(page),
        "line_sums x104": lambda k: [k.line_sums(g, 0) for g in glyphs],
        "page + features": lambda k: pipeline_on(k, page, glyphs),
    }
    print(f"{'kernel':<18}" + "".join(f"{n + ' ms':>14}" for n in names) + ("    speedup" if len(names) > 1 else ""))
    for label, job in jobs.items():
        times = []
        for name in names:
            k = get_kernels(name)
            times.append(min(timeit.repeat(lambda: job(k), number=1, repeat=args.repeat)) * 1e3)
        row = f"{label:<18}" + "".join(f"{t:>14.2f}" for t in times)
        if len(times) > 1:
            row += f"{times[0] / times[1]:>10.1f}x"
        print(row)


if __name__ == "__main__":
    main()
