"""Planar geometry on image coordinates.

Coordinates are pixels with the origin at the top-left corner and ``y``
growing downward. Pixel ``(row i, col j)`` covers ``[j, j+1) x [i, i+1)``
and its center is ``(j + 0.5, i + 0.5)``.

Contours are stored with a positive shoelace sum, i.e. vertices advance in
the direction of increasing angle ``atan2(dy, dx)``. On screen that is
clockwise, but it is the orientation in which decoded polar contours are
emitted, so both sides of the codec share one convention.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np
from scipy import ndimage

from . import _kernels
from .errors import (
    BothEmpty,
    DegenerateContour,
    DimensionMismatch,
    EmptyMask,
    EmptyRasterWarning,
)

MIN_AREA = 1e-9


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y


@dataclass(frozen=True)
class Box:
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError(f"inverted box {self}")

    @property
    def area(self):
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)

    def as_tuple(self):
        return (self.x_min, self.y_min, self.x_max, self.y_max)


def _signed_area(pts):
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


class Contour:
    """Closed polygon, validated and orientation-normalized on construction.

    ``points`` is a read-only ``(N, 2)`` float array. A negatively oriented
    input is reversed in place of its first vertex, so ``points[0]`` is kept.
    """

    __slots__ = ("points", "closed")

    def __init__(self, points, closed=True):
        pts = np.array(points, dtype=np.float64).reshape(-1, 2)
        if pts.shape[0] < 3:
            raise DegenerateContour(f"contour needs at least 3 points, got {pts.shape[0]}")
        if not np.all(np.isfinite(pts)):
            raise DegenerateContour("contour has non-finite coordinates")
        area = _signed_area(pts)
        if abs(area) < MIN_AREA:
            raise DegenerateContour(f"contour area {abs(area):.3g} below {MIN_AREA}")
        if area < 0:
            pts = np.concatenate([pts[:1], pts[:0:-1]])
        pts.flags.writeable = False
        self.points = pts
        self.closed = closed

    def __len__(self):
        return self.points.shape[0]

    def __repr__(self):
        return f"Contour(N={len(self)}, area={polygon_area(self):.4g})"

    @property
    def xs(self):
        return self.points[:, 0]

    @property
    def ys(self):
        return self.points[:, 1]

    def translated(self, dx, dy):
        return Contour(self.points + np.array([dx, dy]))

    def bbox(self):
        lo = self.points.min(axis=0)
        hi = self.points.max(axis=0)
        return Box(float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1]))


@dataclass(frozen=True, eq=False)
class BitMask:
    """Binary occupancy grid; ``bits`` has shape ``(height, width)``."""

    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=bool)
        if bits.ndim != 2:
            raise ValueError("mask bits must be 2-D")
        bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)

    @property
    def height(self):
        return self.bits.shape[0]

    @property
    def width(self):
        return self.bits.shape[1]

    @property
    def count(self):
        return int(self.bits.sum())

    @property
    def empty(self):
        return not self.bits.any()

    def __eq__(self, other):
        return isinstance(other, BitMask) and np.array_equal(self.bits, other.bits)


def polygon_area(c):
    """Absolute enclosed area by the shoelace formula."""
    return abs(_signed_area(c.points))


def mass_center(c):
    """Area centroid of the polygon (may fall outside non-convex shapes)."""
    pts = c.points
    x, y = pts[:, 0], pts[:, 1]
    # shift for conditioning; centroid is translation equivariant
    ox, oy = float(x.mean()), float(y.mean())
    x, y = x - ox, y - oy
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    a = cross.sum() / 2.0
    if abs(a) < MIN_AREA:
        raise DegenerateContour("zero-area contour has no centroid")
    cx = float(((x + xn) * cross).sum() / (6.0 * a))
    cy = float(((y + yn) * cross).sum() / (6.0 * a))
    return Point(cx + ox, cy + oy)


def mask_mass_center(m):
    """Mean of set-pixel centers."""
    rows, cols = np.nonzero(m.bits)
    if rows.size == 0:
        raise EmptyMask("mask has no set pixels")
    return Point(float(cols.mean()) + 0.5, float(rows.mean()) + 0.5)


def box_center(c):
    b = c.bbox()
    return Point(0.5 * (b.x_min + b.x_max), 0.5 * (b.y_min + b.y_max))


def contains(c, p):
    """Even-odd point-in-polygon test."""
    return bool(
        _kernels.points_in_polygon(np.array([p.x]), np.array([p.y]), c.xs, c.ys)[0]
    )


def is_convex(c, tol=1e-9):
    pts = c.points
    d1 = np.roll(pts, -1, axis=0) - pts
    d2 = np.roll(d1, -1, axis=0)
    cross = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    return bool(np.all(cross >= -tol))


def rasterize(c, width, height):
    """Set each pixel whose center lies inside ``c`` under the even-odd rule.

    Emits :class:`EmptyRasterWarning` when nothing lands on the raster.
    """
    if width < 1 or height < 1:
        raise ValueError("raster dimensions must be positive")
    bits = _kernels.rasterize(c.xs, c.ys, int(width), int(height))
    m = BitMask(bits)
    if m.empty:
        warnings.warn("contour covers no pixel centers of the raster", EmptyRasterWarning, stacklevel=2)
    return m


_EIGHT = np.ones((3, 3), dtype=bool)


def extract_contour(m):
    """Pixel-edge outline of the largest 8-connected component.

    The outline runs along pixel borders, so rasterizing it recovers the
    component exactly (holes are not represented). Ties in component size
    go to the component found first in row-major order.
    """
    if m.empty:
        raise EmptyMask("cannot extract a contour from an empty mask")
    labels, n = ndimage.label(m.bits, structure=_EIGHT)
    if n > 1:
        sizes = np.bincount(labels.ravel())[1:]
        comp = labels == (int(np.argmax(sizes)) + 1)
    else:
        comp = labels == 1
    pts = _kernels.trace_boundary(comp)
    return Contour(pts.astype(np.float64))


def pixel_iou(a, b):
    if a.bits.shape != b.bits.shape:
        raise DimensionMismatch(f"mask shapes differ: {a.bits.shape} vs {b.bits.shape}")
    union = np.count_nonzero(a.bits | b.bits)
    if union == 0:
        raise BothEmpty("IoU of two empty masks is undefined")
    return np.count_nonzero(a.bits & b.bits) / union


def box_iou(a, b):
    iw = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    ih = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    inter = max(iw, 0.0) * max(ih, 0.0)
    union = a.area + b.area - inter
    if union <= 0.0:
        if a == b:
            raise BothEmpty("IoU of two identical zero-area boxes is undefined")
        return 0.0
    return inter / union


def box_iou_matrix(boxes, others):
    """Pairwise IoU between ``(N, 4)`` and ``(M, 4)`` arrays of xyxy boxes.

    Zero-area unions yield 0 here; use :func:`box_iou` for the strict scalar form.
    """
    a = np.asarray(boxes, dtype=np.float64).reshape(-1, 4)
    b = np.asarray(others, dtype=np.float64).reshape(-1, 4)
    iw = np.minimum(a[:, None, 2], b[None, :, 2]) - np.maximum(a[:, None, 0], b[None, :, 0])
    ih = np.minimum(a[:, None, 3], b[None, :, 3]) - np.maximum(a[:, None, 1], b[None, :, 1])
    inter = np.clip(iw, 0, None) * np.clip(ih, 0, None)
    area_a = (a[:, 2] - a[:, 0]) * (a[:, 3] - a[:, 1])
    area_b = (b[:, 2] - b[:, 0]) * (b[:, 3] - b[:, 1])
    union = area_a[:, None] + area_b[None, :] - inter
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(union > 0, inter / union, 0.0)


def regular_polygon(n, radius, center=(0.0, 0.0), phase=0.0):
    k = np.arange(n)
    theta = phase + 2.0 * np.pi * k / n
    return Contour(np.stack([center[0] + radius * np.cos(theta), center[1] + radius * np.sin(theta)], axis=1))
