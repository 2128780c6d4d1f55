"""Polar IoU, its log loss and gradient, the Smooth-l1 baseline, centerness,
and positive-sample placement around an instance center."""

from dataclasses import dataclass
import math

import numpy as np

from .codec import DEFAULT_EPS
from .errors import InvalidRays, OutOfExtent, OutOfRange
from .geometry import Point


def _check_rays(rays, epsilon, name="rays"):
    rays = np.asarray(rays, dtype=np.float64).reshape(-1)
    if rays.size == 0:
        raise InvalidRays(f"{name} is empty")
    if not np.all(np.isfinite(rays)):
        raise InvalidRays(f"{name} contains non-finite values")
    if np.any(rays < epsilon):
        raise InvalidRays(f"{name} has entries below epsilon ({epsilon})")
    return rays


@dataclass(frozen=True, eq=False)
class RayPair:
    """Ground-truth rays ``target`` and predicted rays ``predicted``."""

    target: np.ndarray
    predicted: np.ndarray
    epsilon: float = DEFAULT_EPS

    def __post_init__(self):
        t = _check_rays(self.target, self.epsilon, "target")
        p = _check_rays(self.predicted, self.epsilon, "predicted")
        if t.shape != p.shape:
            raise InvalidRays(f"length mismatch: {t.size} target vs {p.size} predicted")
        object.__setattr__(self, "target", t)
        object.__setattr__(self, "predicted", p)

    @property
    def d_min(self):
        return np.minimum(self.target, self.predicted)

    @property
    def d_max(self):
        return np.maximum(self.target, self.predicted)


@dataclass(frozen=True)
class SmoothL1Config:
    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError("alpha and beta must be positive")


@dataclass(frozen=True)
class SamplingConfig:
    stride: int
    radius_factor: float = 1.5

    def __post_init__(self):
        if self.stride < 1 or not self.radius_factor > 0:
            raise ValueError("stride must be >= 1 and radius_factor > 0")


def polar_centerness(rays, epsilon=DEFAULT_EPS):
    """sqrt(min ray / max ray)."""
    rays = _check_rays(rays, epsilon)
    return math.sqrt(rays.min() / rays.max())


def polar_iou_simplified(p):
    return float(p.d_min.sum() / p.d_max.sum())


def polar_iou_power(p):
    """Squared-length form; approximates mask IoU of star-convex shapes sharing a center."""
    lo, hi = p.d_min, p.d_max
    return float(np.dot(lo, lo) / np.dot(hi, hi))


def polar_iou_loss(p):
    return float(math.log(p.d_max.sum()) - math.log(p.d_min.sum()))


def polar_iou_loss_grad(p):
    """d(loss)/d(predicted).

    Rays above target pull with ``1/sum(d_max)``, rays below with
    ``-1/sum(d_min)``; an exact tie takes the mean of the two one-sided values.
    """
    inv_max = 1.0 / p.d_max.sum()
    inv_min = 1.0 / p.d_min.sum()
    over = p.predicted > p.target
    under = p.predicted < p.target
    return np.where(over, inv_max, np.where(under, -inv_min, 0.5 * (inv_max - inv_min)))


def _huber(x, beta):
    ax = np.abs(x)
    return np.where(ax < beta, 0.5 * x * x / beta, ax - 0.5 * beta)


def smooth_l1_loss(p, cfg=SmoothL1Config()):
    """``alpha`` times the per-ray mean of the Smooth-l1 penalty."""
    return float(cfg.alpha * _huber(p.predicted - p.target, cfg.beta).mean())


def smooth_l1_grad(p, cfg=SmoothL1Config()):
    x = p.predicted - p.target
    return cfg.alpha * np.clip(x / cfg.beta, -1.0, 1.0) / x.size


def fused_score(class_score, centerness):
    if not 0.0 <= class_score <= 1.0:
        raise OutOfRange(f"class score {class_score} outside [0, 1]")
    if not 0.0 < centerness <= 1.0:
        raise OutOfRange(f"centerness {centerness} outside (0, 1]")
    return class_score * centerness


def center_samples(center, cfg, feature_extent):
    """Feature-cell centers within ``radius_factor * stride`` of ``center`` on both axes.

    Cell ``(j, i)`` has its center at ``((j + 0.5) * stride, (i + 0.5) * stride)``;
    only cells whose centers lie inside ``feature_extent`` are returned, in
    row-major order.
    """
    ext = feature_extent
    if not (ext.x_min <= center.x <= ext.x_max and ext.y_min <= center.y <= ext.y_max):
        raise OutOfExtent(f"center ({center.x}, {center.y}) outside {ext.as_tuple()}")
    s = float(cfg.stride)
    r = cfg.radius_factor * s

    def axis(c, lo, hi):
        # widened by one cell; the exact test below decides membership
        first = math.ceil(max(c - r, lo) / s - 0.5) - 1
        last = math.floor(min(c + r, hi) / s - 0.5) + 1
        vals = (np.arange(first, last + 1) + 0.5) * s
        keep = (np.abs(vals - c) <= r) & (vals >= lo) & (vals <= hi)
        return vals[keep]

    xs = axis(center.x, ext.x_min, ext.x_max)
    ys = axis(center.y, ext.y_min, ext.y_max)
    return [Point(float(x), float(y)) for y in ys for x in xs]
