"""Desk-scale experiment harness.

* :func:`synth_corpus` builds seeded ellipse / convex / star-convex shapes.
* :func:`upper_bound_sweep` measures encode/decode reconstruction IoU over
  ray counts and center choices.
* :func:`fit_rays` fits ray lengths to a target by plain gradient descent on
  log-lengths, under either Polar IoU loss or Smooth-l1.
* :func:`compare_losses` runs the paired Polar IoU vs Smooth-l1 study.
* :func:`report` writes sweep records to CSV.
"""

from dataclasses import dataclass, field, replace
import csv
import io
import math
import os
import statistics
import tempfile
import time
from typing import NamedTuple

import numpy as np
from scipy.spatial import ConvexHull

from .codec import AngleGrid, CodecConfig, PolarInstance, decode, encode_raycast, reconstruction_iou
from .errors import NonFiniteLoss
from .geometry import Contour, mass_center, pixel_iou, polygon_area, rasterize
from .losses import (
    RayPair,
    SmoothL1Config,
    polar_iou_loss,
    polar_iou_loss_grad,
    smooth_l1_grad,
    smooth_l1_loss,
)

DEFAULT_RAY_COUNTS = (18, 24, 36, 72, 90, 120)
DEFAULT_ALPHAS = (0.05, 0.30, 1.00)
SHAPE_KINDS = ("ellipse", "convex_poly", "star")
CSV_COLUMNS = ("ray_count", "center_mode", "mean_iou", "median_iou", "instance_count", "wall_time_ms")
SYNTH_IMAGE_SIZE = (128, 128)
MIN_SHAPE_AREA = 100.0


class Instance(NamedTuple):
    id: str
    contour: Contour
    image_size: tuple  # (height, width)
    category: int = 0


@dataclass(frozen=True)
class Corpus:
    instances: tuple
    source: str = "synthetic"

    def __post_init__(self):
        ids = [inst.id for inst in self.instances]
        if len(set(ids)) != len(ids):
            raise ValueError("instance ids must be unique")
        if self.source not in ("synthetic", "file"):
            raise ValueError(f"unknown corpus source {self.source!r}")

    def __len__(self):
        return len(self.instances)

    def __iter__(self):
        return iter(self.instances)


@dataclass(frozen=True)
class ExperimentRecord:
    ray_count: int
    center_mode: str
    mean_iou: float
    median_iou: float
    instance_count: int
    wall_time_ms: float = 0.0


@dataclass(frozen=True)
class FitConfig:
    loss_kind: str = "polar_iou"
    steps: int = 500
    step_size: float = 0.05
    seed: int = 0
    smooth_l1: SmoothL1Config = field(default_factory=SmoothL1Config)
    init_noise: float = 0.5

    def __post_init__(self):
        if self.loss_kind not in ("polar_iou", "smooth_l1"):
            raise ValueError(f"unknown loss kind {self.loss_kind!r}")
        if self.steps < 1 or not self.step_size > 0:
            raise ValueError("steps must be >= 1 and step_size > 0")


# ---------------------------------------------------------------------------
# Synthetic shapes
# ---------------------------------------------------------------------------


def _star_about(pts, c):
    v = pts - np.array([c.x, c.y])
    w = np.roll(v, -1, axis=0)
    return bool(np.all(v[:, 0] * w[:, 1] - v[:, 1] * w[:, 0] > 0))


def _ellipse(rng, size):
    h, w = size
    a, b = rng.uniform(12.0, 45.0, size=2)
    rot = rng.uniform(0.0, math.pi)
    cx, cy = w / 2 + rng.uniform(-8, 8), h / 2 + rng.uniform(-8, 8)
    t = np.linspace(0.0, 2.0 * math.pi, 128, endpoint=False)
    x, y = a * np.cos(t), b * np.sin(t)
    cr, sr = math.cos(rot), math.sin(rot)
    return np.stack([cx + cr * x - sr * y, cy + sr * x + cr * y], axis=1)


def _convex(rng, size):
    h, w = size
    k = int(rng.integers(6, 17))
    r = rng.uniform(20.0, 50.0)
    ang = rng.uniform(0.0, 2.0 * math.pi, size=k)
    rad = r * np.sqrt(rng.uniform(0.05, 1.0, size=k))
    pts = np.stack([w / 2 + rad * np.cos(ang), h / 2 + rad * np.sin(ang)], axis=1)
    hull = ConvexHull(pts)
    return pts[hull.vertices]


def _star(rng, size):
    h, w = size
    base = rng.uniform(22.0, 40.0)
    ks = np.arange(2, 8)
    amp = rng.uniform(0.0, 1.0, size=ks.size) / ks
    amp *= rng.uniform(0.25, 0.5) / amp.sum()
    phase = rng.uniform(0.0, 2.0 * math.pi, size=ks.size)
    t = np.linspace(0.0, 2.0 * math.pi, 256, endpoint=False)
    rad = base * (1.0 + (amp[:, None] * np.cos(ks[:, None] * t[None, :] + phase[:, None])).sum(axis=0))
    cx, cy = w / 2 + rng.uniform(-4, 4), h / 2 + rng.uniform(-4, 4)
    return np.stack([cx + rad * np.cos(t), cy + rad * np.sin(t)], axis=1)


_MAKERS = {"ellipse": _ellipse, "convex_poly": _convex, "star": _star}


def synth_corpus(seed, count, kind, image_size=SYNTH_IMAGE_SIZE):
    """Deterministic corpus of ``count`` shapes of one ``kind``.

    Star shapes are rejected and redrawn until they are star-convex about
    their own area centroid; every shape has area >= 100 px^2.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if kind not in _MAKERS:
        raise ValueError(f"kind must be one of {SHAPE_KINDS}")
    rng = np.random.default_rng([int(seed), SHAPE_KINDS.index(kind)])
    make = _MAKERS[kind]
    out = []
    while len(out) < count:
        c = Contour(make(rng, image_size))
        if polygon_area(c) < MIN_SHAPE_AREA:
            continue
        if kind == "star" and not _star_about(c.points, mass_center(c)):
            continue
        out.append(Instance(f"{kind}-{seed}-{len(out):04d}", c, tuple(image_size)))
    return Corpus(tuple(out), "synthetic")


# ---------------------------------------------------------------------------
# Upper bound
# ---------------------------------------------------------------------------


def upper_bound_sweep(corpus, ray_counts=DEFAULT_RAY_COUNTS, center_modes=("mass", "box"), raster=None):
    """One record per (ray count, center mode), in argument order.

    ``raster`` of None rasterizes each instance at its own image size.
    """
    if not ray_counts:
        raise ValueError("ray_counts must be non-empty")
    if any(n < 3 for n in ray_counts):
        raise ValueError("every ray count must be >= 3")
    instances = sorted(corpus.instances, key=lambda inst: inst.id)
    records = []
    for n in ray_counts:
        grid = AngleGrid(n)
        for mode in center_modes:
            cfg = CodecConfig(center_mode=mode)
            t0 = time.perf_counter()
            ious = [
                reconstruction_iou(inst.contour, grid, cfg, raster or inst.image_size)
                for inst in instances
            ]
            ms = (time.perf_counter() - t0) * 1e3
            records.append(
                ExperimentRecord(
                    ray_count=n,
                    center_mode=mode,
                    mean_iou=math.fsum(ious) / len(ious),
                    median_iou=float(statistics.median(ious)),
                    instance_count=len(ious),
                    wall_time_ms=ms,
                )
            )
    return records


# ---------------------------------------------------------------------------
# Ray fitting
# ---------------------------------------------------------------------------


def ground_truth_rays(target, grid, epsilon=1e-6):
    c = mass_center(target)
    return encode_raycast(target, c, grid, CodecConfig(epsilon=epsilon))


def fit_rays(target, grid, cfg=FitConfig(), init=None):
    """Gradient descent on ``u`` with predicted rays ``exp(u)``.

    Returns ``(fitted_instance, trace)`` where ``trace[k]`` is the loss before
    step ``k`` and ``trace[-1]`` the loss after the last step.
    """
    gt = ground_truth_rays(target, grid)
    d = gt.rays
    if init is None:
        rng = np.random.default_rng(cfg.seed)
        u = math.log(d.mean()) + rng.uniform(-cfg.init_noise, cfg.init_noise, size=grid.n)
    else:
        u = np.log(np.asarray(init, dtype=np.float64))

    if cfg.loss_kind == "polar_iou":
        def value_and_grad(pair):
            return polar_iou_loss(pair), polar_iou_loss_grad(pair)
    else:
        sl1 = cfg.smooth_l1

        def value_and_grad(pair):
            return smooth_l1_loss(pair, sl1), smooth_l1_grad(pair, sl1)

    eps = gt.epsilon
    trace = []
    for _ in range(cfg.steps):
        pred = np.maximum(np.exp(u), eps)
        if not np.all(np.isfinite(pred)):
            raise NonFiniteLoss(f"rays overflowed after {len(trace)} steps")
        loss, g = value_and_grad(RayPair(d, pred, eps))
        if not math.isfinite(loss):
            raise NonFiniteLoss(f"loss became {loss} after {len(trace)} steps")
        trace.append(loss)
        u = u - cfg.step_size * g * pred
    pred = np.maximum(np.exp(u), eps)
    if not np.all(np.isfinite(pred)):
        raise NonFiniteLoss("rays overflowed on the last step")
    final = value_and_grad(RayPair(d, pred, eps))[0]
    if not math.isfinite(final):
        raise NonFiniteLoss(f"final loss is {final}")
    trace.append(final)
    return PolarInstance(gt.center, grid, pred, eps), trace


def fit_pixel_iou(target, fitted, image_size):
    h, w = image_size
    return pixel_iou(rasterize(target, w, h), rasterize(decode(fitted), w, h))


@dataclass(frozen=True)
class PairedResult:
    id: str
    polar_iou_fit: float
    smooth_l1_fit: float
    best_alpha: float


def compare_losses(corpus, grid, steps=500, step_size=0.05, alphas=DEFAULT_ALPHAS, seed=0):
    """Pixel IoU of Polar-IoU fits against the best-of-``alphas`` Smooth-l1 fit.

    Each shape gets its own seed (``seed + index``) shared by both losses, so
    every pair starts from the same initialization.
    """
    results = []
    for k, inst in enumerate(sorted(corpus.instances, key=lambda i: i.id)):
        base = FitConfig("polar_iou", steps, step_size, seed + k)
        fit, _ = fit_rays(inst.contour, grid, base)
        polar = fit_pixel_iou(inst.contour, fit, inst.image_size)
        best, best_alpha = -1.0, None
        for a in alphas:
            cfg = replace(base, loss_kind="smooth_l1", smooth_l1=SmoothL1Config(alpha=a))
            sfit, _ = fit_rays(inst.contour, grid, cfg)
            v = fit_pixel_iou(inst.contour, sfit, inst.image_size)
            if v > best:
                best, best_alpha = v, a
        results.append(PairedResult(inst.id, polar, best, best_alpha))
    return results


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _fmt(v):
    return repr(float(v)) if isinstance(v, float) else str(v)


def records_to_csv(records):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([_fmt(getattr(r, col)) for col in CSV_COLUMNS])
    return buf.getvalue()


def atomic_write(path, data):
    """Write ``data`` (str or bytes) next to ``path`` then rename over it."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data.encode() if isinstance(data, str) else data)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def report(records, path):
    if not records:
        raise ValueError("no records to report")
    atomic_write(path, records_to_csv(records))
