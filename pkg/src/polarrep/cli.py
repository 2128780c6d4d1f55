"""Command line entry point: ``polarrep <subcommand> ...``.

Exit status is 0 on success, 1 on a usage error and 2 on a data error.
"""

import argparse
import sys

import numpy as np

from . import formats
from .codec import DEFAULT_EPS, AngleGrid, CodecConfig, decode, encode
from .errors import PolarError
from .experiments import (
    DEFAULT_RAY_COUNTS,
    SHAPE_KINDS,
    FitConfig,
    atomic_write,
    fit_pixel_iou,
    fit_rays,
    ground_truth_rays,
    report,
    synth_corpus,
    upper_bound_sweep,
)
from .geometry import pixel_iou, rasterize
from .losses import RayPair, SmoothL1Config, polar_iou_power, polar_iou_simplified
from .postprocess import NmsConfig, nms, select_candidates

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _raster(text):
    try:
        h, w = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected HxW, got {text!r}") from None
    if h < 1 or w < 1:
        raise argparse.ArgumentTypeError("raster dimensions must be positive")
    return (h, w)


def _int_list(text):
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals or any(v < 3 for v in vals):
        raise argparse.ArgumentTypeError("ray counts must be integers >= 3")
    return vals


def _synthetic(text):
    parts = text.split(",")
    if len(parts) != 3 or parts[0] not in SHAPE_KINDS:
        raise argparse.ArgumentTypeError(f"expected kind,count,seed with kind in {SHAPE_KINDS}")
    try:
        count, seed = int(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError("count and seed must be integers") from None
    if count < 1:
        raise argparse.ArgumentTypeError("count must be >= 1")
    return parts[0], count, seed


def _unit(text):
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError("threshold must lie in [0, 1]")
    return v


def _positive(kind):
    def parse(text):
        v = kind(text)
        if not v > 0:
            raise argparse.ArgumentTypeError("value must be positive")
        return v

    return parse


def build_parser():
    p = _Parser(prog="polarrep", description="Polar instance-mask toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("encode", help="polygons -> center + rays")
    s.add_argument("--input", required=True)
    s.add_argument("--rays", type=_positive(int), default=36)
    s.add_argument("--center", choices=("mass", "box"), default="mass")
    s.add_argument("--eps", type=_positive(float), default=DEFAULT_EPS)
    s.add_argument("--exact", action="store_true", help="use the ray-casting encoder")
    s.add_argument("--out", required=True)

    s = sub.add_parser("decode", help="center + rays -> polygons")
    s.add_argument("--input", required=True)
    s.add_argument("--raster", type=_raster)
    s.add_argument("--eps", type=_positive(float), default=DEFAULT_EPS)
    s.add_argument("--masks", help="also write rasterized masks to this .npz file")
    s.add_argument("--out", required=True)

    s = sub.add_parser("upperbound", help="reconstruction IoU sweep over ray counts")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--input")
    src.add_argument("--synthetic", type=_synthetic, metavar="KIND,COUNT,SEED")
    s.add_argument("--rays", type=_int_list, default=list(DEFAULT_RAY_COUNTS))
    s.add_argument("--center", choices=("mass", "box", "both"), default="both")
    s.add_argument("--raster", type=_raster)
    s.add_argument("--out", required=True)

    s = sub.add_parser("fit", help="fit rays to shapes by gradient descent")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--input")
    src.add_argument("--synthetic", type=_synthetic, metavar="KIND,COUNT,SEED")
    s.add_argument("--loss", choices=("polar-iou", "smooth-l1"), default="polar-iou")
    s.add_argument("--alpha", type=_positive(float), default=1.0)
    s.add_argument("--steps", type=_positive(int), default=500)
    s.add_argument("--lr", type=_positive(float), default=0.05)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--rays", type=_positive(int), default=36)
    s.add_argument("--out", required=True)

    s = sub.add_parser("nms", help="score threshold, top-k and box NMS over candidates")
    s.add_argument("--candidates", required=True)
    s.add_argument("--score-thr", type=_unit, default=0.05)
    s.add_argument("--topk", type=_positive(int), default=1000)
    s.add_argument("--iou-thr", type=_unit, default=0.5)
    s.add_argument("--raster", type=_raster)
    s.add_argument("--masks", help="also write rasterized masks to this .npz file (needs --raster)")
    s.add_argument("--out", required=True)

    s = sub.add_parser("iou", help="pairwise IoU between two files")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--mode", choices=("polar-simplified", "polar-power", "pixel"), required=True)
    s.add_argument("--raster", type=_raster)
    return p


def _corpus(args):
    if args.input:
        return formats.load_instances(args.input)
    kind, count, seed = args.synthetic
    return synth_corpus(seed, count, kind)


def _write_masks(path, named_masks):
    arrays = {name: m.bits for name, m in named_masks}
    with open(path, "wb") as f:
        np.savez_compressed(f, **arrays)


def cmd_encode(args):
    if args.rays < 3:
        raise UsageError("--rays must be >= 3")
    corpus = formats.load_instances(args.input)
    grid = AngleGrid(args.rays)
    cfg = CodecConfig(epsilon=args.eps, center_mode=args.center)
    items = []
    for inst in corpus:
        try:
            p = encode(inst.contour, grid, cfg, exact=args.exact)
        except PolarError as e:
            raise PolarError(f"{inst.id}: {e}") from None
        items.append((inst.id, p, inst.image_size, inst.category))
    formats.save_polar(items, args.out)


def cmd_decode(args):
    items = formats.load_polar(args.input, args.eps)
    records, masks = [], []
    for rid, p, size, cat in items:
        size = args.raster or size
        if size is None:
            raise PolarError(f"{rid}: no image_size in record and no --raster given")
        try:
            contour = decode(p)
        except PolarError as e:
            raise PolarError(f"{rid}: {e}") from None
        records.append(formats.Instance(rid, contour, size, cat))
        if args.masks:
            masks.append((rid, rasterize(contour, size[1], size[0])))
    formats.save_instances(records, args.out)
    if args.masks:
        _write_masks(args.masks, masks)


def cmd_upperbound(args):
    corpus = _corpus(args)
    modes = ("mass", "box") if args.center == "both" else (args.center,)
    report(upper_bound_sweep(corpus, args.rays, modes, args.raster), args.out)


FIT_COLUMNS = ("id", "loss", "alpha", "steps", "lr", "seed", "final_loss", "polar_iou", "pixel_iou")


def cmd_fit(args):
    if args.rays < 3:
        raise UsageError("--rays must be >= 3")
    corpus = _corpus(args)
    grid = AngleGrid(args.rays)
    kind = args.loss.replace("-", "_")
    lines = [",".join(FIT_COLUMNS)]
    for k, inst in enumerate(sorted(corpus.instances, key=lambda i: i.id)):
        cfg = FitConfig(kind, args.steps, args.lr, args.seed + k, SmoothL1Config(alpha=args.alpha))
        fitted, trace = fit_rays(inst.contour, grid, cfg)
        gt = ground_truth_rays(inst.contour, grid)
        piou = polar_iou_simplified(RayPair(gt.rays, fitted.rays))
        pix = fit_pixel_iou(inst.contour, fitted, inst.image_size)
        alpha = repr(args.alpha) if kind == "smooth_l1" else ""
        row = [inst.id, args.loss, alpha, str(args.steps), repr(args.lr), str(cfg.seed), repr(trace[-1]), repr(piou), repr(pix)]
        lines.append(",".join(row))
    atomic_write(args.out, "\n".join(lines) + "\n")


def cmd_nms(args):
    if args.masks and not args.raster:
        raise UsageError("--masks requires --raster")
    cands = formats.load_candidates(args.candidates)
    cfg = NmsConfig(args.score_thr, args.topk, args.iou_thr)
    kept = nms(select_candidates(cands, cfg), cfg)
    formats.save_candidates(kept, args.out)
    if args.masks:
        h, w = args.raster
        _write_masks(args.masks, [(f"m{i:05d}", rasterize(decode(c.instance), w, h)) for i, c in enumerate(kept)])


def _load_shapes(path):
    """(id, contour, image_size) from an instance file or a polar file."""
    with open(path) as f:
        head = f.read(4096)
    if '"polygon"' in head:
        return [(inst.id, inst.contour, inst.image_size) for inst in formats.load_instances(path)]
    return [(rid, decode(p), size) for rid, p, size, _ in formats.load_polar(path)]


def cmd_iou(args):
    if args.mode == "pixel":
        a, b = _load_shapes(args.a), _load_shapes(args.b)
    else:
        a = [(rid, p) for rid, p, _, _ in formats.load_polar(args.a)]
        b = [(rid, p) for rid, p, _, _ in formats.load_polar(args.b)]
    if len(a) != len(b):
        raise PolarError(f"files hold {len(a)} and {len(b)} records; pairs need equal counts")
    out = []
    for ea, eb in zip(a, b):
        if args.mode == "pixel":
            size = args.raster or ea[2] or eb[2]
            if size is None:
                raise PolarError(f"{ea[0]}: no image_size in record and no --raster given")
            h, w = size
            v = pixel_iou(rasterize(ea[1], w, h), rasterize(eb[1], w, h))
        else:
            try:
                pair = RayPair(ea[1].rays, eb[1].rays)
            except PolarError as e:
                raise PolarError(f"{ea[0]}/{eb[0]}: {e}") from None
            v = (polar_iou_simplified if args.mode == "polar-simplified" else polar_iou_power)(pair)
        out.append(f"{ea[0]}\t{eb[0]}\t{v!r}")
    print("\n".join(out))


COMMANDS = {
    "encode": cmd_encode,
    "decode": cmd_decode,
    "upperbound": cmd_upperbound,
    "fit": cmd_fit,
    "nms": cmd_nms,
    "iou": cmd_iou,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    try:
        COMMANDS[args.command](args)
    except UsageError as e:
        print(f"polarrep {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (PolarError, OSError, ValueError) as e:
        print(f"polarrep {args.command}: error: {e}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
