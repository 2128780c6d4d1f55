"""Polar encoding and decoding of instance contours.

An instance is a center plus ``n`` ray lengths on a uniform angle grid
starting at 0 and rotating from +x toward +y (clockwise on screen).
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import _kernels
from .errors import DegenerateContour, InvalidRays
from .geometry import Contour, Point, box_center, mass_center, pixel_iou, rasterize

DEFAULT_EPS = 1e-6
# Angular resolution of a traversal "hit": contour-point angles are matched
# to grid angles at whole-degree precision, as in integer-degree label tables.
DEFAULT_HIT_WINDOW = math.radians(0.5)
CENTER_MODES = ("mass", "box", "explicit")


class AngleGrid:
    """``n`` uniformly spaced angles ``i * 2pi / n``."""

    __slots__ = ("n", "delta_theta", "angles", "cos", "sin")

    def __init__(self, n):
        n = int(n)
        if n < 3:
            raise ValueError(f"angle grid needs n >= 3, got {n}")
        self.n = n
        self.delta_theta = 2.0 * math.pi / n
        self.angles = np.arange(n) * self.delta_theta
        self.cos = np.cos(self.angles)
        self.sin = np.sin(self.angles)
        for a in (self.angles, self.cos, self.sin):
            a.flags.writeable = False

    def __eq__(self, other):
        return isinstance(other, AngleGrid) and other.n == self.n

    def __hash__(self):
        return hash(("AngleGrid", self.n))

    def __repr__(self):
        return f"AngleGrid(n={self.n})"


@dataclass(frozen=True)
class CodecConfig:
    """Encoder settings.

    ``angle_match_tolerance`` defaults to half the grid spacing when None.
    ``center`` is only read when ``center_mode == "explicit"``.
    """

    epsilon: float = DEFAULT_EPS
    angle_match_tolerance: float | None = None
    center_mode: str = "mass"
    center: Point | None = None
    hit_window: float = DEFAULT_HIT_WINDOW

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.center_mode not in CENTER_MODES:
            raise ValueError(f"center_mode must be one of {CENTER_MODES}")
        if self.center_mode == "explicit" and self.center is None:
            raise ValueError("explicit center_mode requires a center")
        if self.angle_match_tolerance is not None and not self.angle_match_tolerance > 0:
            raise ValueError("angle_match_tolerance must be positive")
        if not self.hit_window > 0:
            raise ValueError("hit_window must be positive")

    def tolerance(self, grid):
        half = grid.delta_theta / 2.0
        if self.angle_match_tolerance is None:
            return half
        if self.angle_match_tolerance > half + 1e-15:
            raise ValueError(f"angle_match_tolerance must be <= {half}")
        return self.angle_match_tolerance

    def center_for(self, c):
        if self.center_mode == "mass":
            return mass_center(c)
        if self.center_mode == "box":
            return box_center(c)
        return self.center


@dataclass(frozen=True, eq=False)
class PolarInstance:
    center: Point
    grid: AngleGrid
    rays: np.ndarray = field(repr=False)
    epsilon: float = DEFAULT_EPS

    def __post_init__(self):
        rays = np.array(self.rays, dtype=np.float64).reshape(-1)
        if rays.shape[0] != self.grid.n:
            raise InvalidRays(f"expected {self.grid.n} rays, got {rays.shape[0]}")
        if not np.all(np.isfinite(rays)):
            raise InvalidRays("rays must be finite")
        if np.any(rays < self.epsilon):
            raise InvalidRays(f"rays must be >= epsilon ({self.epsilon})")
        rays.flags.writeable = False
        object.__setattr__(self, "rays", rays)

    @classmethod
    def from_rays(cls, center, rays, epsilon=DEFAULT_EPS):
        rays = np.asarray(rays, dtype=np.float64).reshape(-1)
        if rays.shape[0] < 3:
            raise InvalidRays(f"need at least 3 rays, got {rays.shape[0]}")
        return cls(Point(*map(float, center)), AngleGrid(rays.shape[0]), rays, epsilon)

    def __eq__(self, other):
        return (
            isinstance(other, PolarInstance)
            and self.center == other.center
            and self.grid == other.grid
            and np.array_equal(self.rays, other.rays)
        )


def _wrap(a):
    """Map angles to [-pi, pi)."""
    return (a + np.pi) % (2.0 * np.pi) - np.pi


def encode_traversal(c, center, grid, cfg=CodecConfig()):
    """Distance labels from the contour's own points.

    Every contour point is turned into (distance, angle) about ``center``.
    A grid angle takes the largest distance among points within the hit
    window; failing that, the distance of the angularly nearest point within
    the match tolerance (larger angle wins an exact tie); failing that, the
    ray is set to ``cfg.epsilon``.
    """
    if not isinstance(c, Contour):
        raise DegenerateContour("encode_traversal expects a Contour")
    tol = cfg.tolerance(grid)
    hit = min(cfg.hit_window, tol)
    dx = c.xs - center.x
    dy = c.ys - center.y
    dist = np.hypot(dx, dy)
    ang = np.arctan2(dy, dx)
    # (n_grid, n_points) signed offsets from each grid angle
    off = _wrap(ang[None, :] - grid.angles[:, None])
    aoff = np.abs(off)

    rays = np.full(grid.n, cfg.epsilon)
    in_hit = aoff <= hit
    hit_any = in_hit.any(axis=1)
    if hit_any.any():
        rays[hit_any] = np.where(in_hit[hit_any], dist[None, :], -np.inf).max(axis=1)

    for i in np.nonzero(~hit_any)[0]:
        row = aoff[i]
        best = row.min()
        if best > tol:
            continue
        near = row == best
        if near.sum() > 1 and np.any(off[i][near] > 0) and np.any(off[i][near] < 0):
            near &= off[i] > 0
        rays[i] = dist[near].max()
    return PolarInstance(center, grid, np.maximum(rays, cfg.epsilon), cfg.epsilon)


def encode_raycast(c, center, grid, cfg=CodecConfig()):
    """Exact ray lengths: the farthest crossing of each ray with the contour."""
    if not isinstance(c, Contour):
        raise DegenerateContour("encode_raycast expects a Contour")
    t = _kernels.raycast(c.xs, c.ys, center.x, center.y, grid.cos, grid.sin)
    rays = np.where(t < 0.0, cfg.epsilon, np.maximum(t, cfg.epsilon))
    return PolarInstance(center, grid, rays, cfg.epsilon)


def decode_points(p):
    """Contour vertices ``(cos t_i * d_i + x_c, sin t_i * d_i + y_c)`` as an array."""
    return np.stack(
        [p.grid.cos * p.rays + p.center.x, p.grid.sin * p.rays + p.center.y], axis=1
    )


def decode(p):
    return Contour(decode_points(p))


def encode(c, grid, cfg=CodecConfig(), exact=True):
    center = cfg.center_for(c)
    return (encode_raycast if exact else encode_traversal)(c, center, grid, cfg)


def reconstruction_iou(c, grid, cfg=CodecConfig(), raster=(256, 256)):
    """Pixel IoU between ``c`` and its exact encode/decode round trip.

    ``raster`` is ``(height, width)``.
    """
    h, w = raster
    p = encode(c, grid, cfg, exact=True)
    return pixel_iou(rasterize(c, w, h), rasterize(decode(p), w, h))
