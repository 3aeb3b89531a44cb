"""Command-line interface: preprocess, extract, train, recognize, compare.

Exit codes: 0 success, 1 runtime or data error, 2 usage error.
"""

import argparse
import logging
import os
import sys

import numpy as np

from . import modelfile, synth
from ._backend import BACKEND
from .features import AveragingMode, Orientation, feature_dim, feature_matrix, write_feature_table
from .mlp import TrainConfig, TrainingDiverged
from .modelfile import ModelFormatError
from .pgm import ImageFormatError, binary_to_gray, read_pgm, write_pgm
from .pipeline import (DatasetError, RunConfig, fit_model, format_summary, load_dataset, open_manifest,
                       recognize_glyphs, run_comparison, write_report_csv, write_trace)
from .raster import preprocess
from .segment import DEFAULT_MIN_PIXELS, segment_page



class CliError(Exception):
    """A runtime failure reported with exit code 1."""


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text}")
    return value


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--orientation", choices=[o.value for o in Orientation], default=None,
                        help="feature orientation (default: diagonal, or the model's)")
    common.add_argument("--aggregates", "--with-aggregates", dest="aggregates", action="store_true",
                        default=None, help="append 9 row and 6 column means (69 features)")
    common.add_argument("--mode", choices=[m.value for m in AveragingMode], default=None,
                        help="line averaging: all-lines (default) or non-empty")
    common.add_argument("--min-pixels", type=_positive_int, default=DEFAULT_MIN_PIXELS,
                        help="drop components smaller than this (default %(default)s)")
    common.add_argument("--threshold", type=int, default=None,
                        help="fixed binarization threshold instead of Otsu")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-v", "--verbose", action="count", default=0)

    training = argparse.ArgumentParser(add_help=False)
    defaults = TrainConfig()
    training.add_argument("--goal-mse", type=float, default=defaults.goal_mse)
    training.add_argument("--max-epochs", type=int, default=defaults.max_epochs)
    training.add_argument("--lr0", type=float, default=defaults.lr0)
    training.add_argument("--momentum", type=float, default=defaults.momentum)
    training.add_argument("--lr-inc", type=float, default=defaults.lr_inc)
    training.add_argument("--lr-dec", type=float, default=defaults.lr_dec)
    training.add_argument("--max-perf-inc", type=float, default=defaults.max_perf_inc)
    training.add_argument("--hidden", type=_positive_int, nargs=2, default=[100, 100], metavar=("H1", "H2"))
    training.add_argument("--normalize", action="store_true", help="min-max scale each feature to [0, 1]")
    training.add_argument("--soft-targets", action="store_true", help="train against 0.05/0.95 targets")

    parser = argparse.ArgumentParser(prog="zocr", description="Zonal-feature handwritten character recognition")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", parents=[common], help="binarize, edge-detect, dilate and fill an image")
    p.add_argument("input")
    p.add_argument("output")

    p = sub.add_parser("extract", parents=[common], help="write feature vectors as delimited text")
    p.add_argument("input", help="a page image, a dataset root or a manifest file")
    p.add_argument("output")

    p = sub.add_parser("train", parents=[common, training], help="train a network on a labeled corpus")
    p.add_argument("train_root")
    p.add_argument("model_out")
    p.add_argument("--trace", help="MSE trace CSV (default: MODEL_OUT.trace.csv)")

    p = sub.add_parser("recognize", parents=[common], help="segment a page and classify every glyph")
    p.add_argument("model")
    p.add_argument("image")
    p.add_argument("--out", help="text sidecar (default: IMAGE with .txt suffix)")

    p = sub.add_parser("compare", parents=[common, training], help="train and test all six variants")
    p.add_argument("train_root")
    p.add_argument("test_root")
    p.add_argument("out_dir")
    p.add_argument("--models-dir", help="also save the six trained models here")

    p = sub.add_parser("synth", parents=[common], help="write a synthetic 5x7-font letter corpus")
    p.add_argument("root")
    p.add_argument("--copies", type=_positive_int, default=10)
    p.add_argument("--letters", default=synth.LETTERS)
    p.add_argument("--scale", type=_positive_int, default=8)
    p.add_argument("--page", metavar="TEXT", help="render TEXT as one page image at ROOT instead")
    return parser


def _train_config(args, parser):
    try:
        return TrainConfig(goal_mse=args.goal_mse, max_epochs=args.max_epochs, lr0=args.lr0,
                           momentum=args.momentum, lr_inc=args.lr_inc, lr_dec=args.lr_dec,
                           max_perf_inc=args.max_perf_inc, normalize_inputs=args.normalize,
                           soft_targets=args.soft_targets)
    except ValueError as exc:
        parser.error(str(exc))


def _run_config(args, parser):
    return RunConfig(train=_train_config(args, parser), hidden=tuple(args.hidden), seed=args.seed,
                     mode=AveragingMode(args.mode or AveragingMode.ALL_LINES))


def _orientation(args):
    return Orientation(args.orientation or Orientation.DIAGONAL)


def _read_image(path):
    if not os.path.exists(path):
        raise CliError(f"{path}: no such file")
    try:
        return read_pgm(path)
    except ImageFormatError as exc:
        raise CliError(f"{path}: {exc}") from None
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror or exc}") from None


def _load(path, args):
    if not os.path.exists(path):
        raise CliError(f"{path}: no such file or directory")
    try:
        return load_dataset(open_manifest(path), args.min_pixels, args.threshold)
    except DatasetError as exc:
        raise CliError(str(exc)) from None


def cmd_preprocess(args, parser):
    img = _read_image(args.input)
    write_pgm(args.output, binary_to_gray(preprocess(img, args.threshold)))
    return 0


def cmd_extract(args, parser):
    orientation, mode = _orientation(args), AveragingMode(args.mode or AveragingMode.ALL_LINES)
    if os.path.isfile(args.input) and args.input.lower().endswith(".pgm"):
        glyphs = [b.glyph for b in segment_page(preprocess(_read_image(args.input), args.threshold),
                                                args.min_pixels)]
        names = [f"glyph{i}" for i in range(len(glyphs))]
    else:
        data = _load(args.input, args)
        glyphs, names = data.glyphs, data.labels
    rows = feature_matrix(glyphs, orientation, bool(args.aggregates), mode)
    write_feature_table(args.output, rows, names, orientation, bool(args.aggregates), mode)
    print(f"{len(rows)} vectors of length {feature_dim(bool(args.aggregates))} written to {args.output}")
    return 0


def _echo_header(cfg, extra):
    t = cfg.train
    print(f"# {extra} mode={AveragingMode(cfg.mode).value} hidden={cfg.hidden[0]},{cfg.hidden[1]} seed={cfg.seed}")
    print(f"# goal_mse={t.goal_mse:g} max_epochs={t.max_epochs} lr0={t.lr0:g} momentum={t.momentum:g} "
          f"lr_inc={t.lr_inc:g} lr_dec={t.lr_dec:g} max_perf_inc={t.max_perf_inc:g} "
          f"normalize={int(t.normalize_inputs)} soft_targets={int(t.soft_targets)} kernels={BACKEND}")


def cmd_train(args, parser):
    cfg = _run_config(args, parser)
    orientation, aggregates = _orientation(args), bool(args.aggregates)
    _echo_header(cfg, f"orientation={orientation.value} features={feature_dim(aggregates)}")
    data = _load(args.train_root, args)
    print(f"# {len(data)} training glyphs, {len(data.class_names())} classes, {len(data.errors)} skipped")
    try:
        model, state = fit_model(data, orientation, aggregates, cfg)
    except (ValueError, TrainingDiverged) as exc:
        raise CliError(str(exc)) from None
    modelfile.save(args.model_out, model)
    write_trace(args.trace or args.model_out + ".trace.csv", state, cfg.train.lr0)
    print(f"stop reason: {state.stop_reason} after {state.epoch} epochs; final MSE {state.final_mse:.6e}")
    return 0


def cmd_recognize(args, parser):
    try:
        model = modelfile.load(args.model)
    except FileNotFoundError:
        raise CliError(f"{args.model}: no such file") from None
    except (ModelFormatError, UnicodeDecodeError) as exc:
        raise CliError(f"{args.model}: {exc}") from None
    if args.orientation is not None:
        model.orientation = Orientation(args.orientation)
    if args.mode is not None:
        model.mode = AveragingMode(args.mode)
    if args.aggregates is not None:
        wanted = feature_dim(True)
        if wanted != model.input_dim:
            raise CliError(f"dimension mismatch: model takes {model.input_dim} features, "
                           f"--aggregates produces {wanted}")
        model.with_aggregates = True
    if feature_dim(model.with_aggregates) != model.input_dim:
        raise CliError(f"dimension mismatch: model takes {model.input_dim} features, "
                       f"extractor produces {feature_dim(model.with_aggregates)}")
    img = _read_image(args.image)
    glyphs = [b.glyph for b in segment_page(preprocess(img, args.threshold), args.min_pixels)]
    if not glyphs:
        print("zocr recognize: warning: no glyphs", file=sys.stderr)
    text = "".join(recognize_glyphs(model, glyphs))
    out = args.out or os.path.splitext(args.image)[0] + ".txt"
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")
    print(text)
    return 0


def cmd_compare(args, parser):
    cfg = _run_config(args, parser)
    _echo_header(cfg, "variants=6")
    train, test = _load(args.train_root, args), _load(args.test_root, args)
    os.makedirs(args.out_dir, exist_ok=True)
    if args.models_dir:
        os.makedirs(args.models_dir, exist_ok=True)
    results = run_comparison(train, test, cfg)
    for r in results:
        if r.error is not None:
            continue
        write_report_csv(os.path.join(args.out_dir, f"{r.name}.report.csv"), r.report)
        write_trace(os.path.join(args.out_dir, f"{r.name}.trace.csv"), r.state, cfg.train.lr0)
        if args.models_dir:
            modelfile.save(os.path.join(args.models_dir, f"{r.name}.model"), r.model)
    summary = format_summary(results, cfg, len(train), len(test))
    with open(os.path.join(args.out_dir, "summary.txt"), "w", encoding="utf-8") as fh:
        fh.write(summary)
    print(summary, end="")
    return 1 if any(r.error is not None for r in results) else 0


def cmd_synth(args, parser):
    unknown = sorted(set(args.letters.replace(" ", "").replace("\\n", "")) - set(synth.FONT_5X7))
    if unknown:
        parser.error(f"letters without a font bitmap: {''.join(unknown)}")
    if args.page is not None:
        rng = np.random.default_rng(args.seed)
        write_pgm(args.root, synth.render_page(args.page.replace("\\n", "\n"), scale=args.scale, rng=rng, shift=1))
        print(f"page written to {args.root}")
        return 0
    paths = synth.write_image_corpus(args.root, copies=args.copies, seed=args.seed,
                                     letters=args.letters, scale=args.scale)
    print(f"{len(paths)} images written under {args.root}")
    return 0


COMMANDS = {
    "preprocess": cmd_preprocess,
    "extract": cmd_extract,
    "train": cmd_train,
    "recognize": cmd_recognize,
    "compare": cmd_compare,
    "synth": cmd_synth,
}


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args, parser)
    except CliError as exc:
        print(f"zocr {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
