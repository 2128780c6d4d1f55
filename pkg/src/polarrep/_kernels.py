"""Hot geometric kernels with two interchangeable backends.

Each kernel exists as ``<name>_numpy`` (vectorized numpy, or a plain loop
where the algorithm is inherently sequential) and ``<name>_numba`` (the
same arithmetic under ``numba.njit``). The public name is bound to one of
them at import time:

* numba is used when it imports cleanly and ``POLARREP_NO_NUMBA`` is unset
  or ``0``;
* otherwise the numpy path is used.

Both paths evaluate the same floating point expressions in the same order,
so rasterization is bit-identical between backends.
"""

import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional extra
    numba = None
    HAVE_NUMBA = False

_disabled = os.environ.get("POLARREP_NO_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")
USE_NUMBA = HAVE_NUMBA and not _disabled
BACKEND = "numba" if USE_NUMBA else "numpy"

# Ray/segment parameter slack. Vertices shared by two segments must not be
# missed through rounding; double hits are harmless because callers take the max.
SEGMENT_TOL = 1e-9


def _njit(func):
    if not HAVE_NUMBA:
        return func
    return numba.njit(cache=True, nogil=True)(func)


# ---------------------------------------------------------------------------
# Even-odd scanline rasterization at pixel centers
# ---------------------------------------------------------------------------


def rasterize_numpy(xs, ys, width, height):
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    x0, y0 = xs, ys
    x1, y1 = np.roll(xs, -1), np.roll(ys, -1)
    yc = np.arange(height, dtype=np.float64) + 0.5
    # half-open in y: each vertex is counted once per scanline
    crosses = ((y0[None, :] <= yc[:, None]) & (yc[:, None] < y1[None, :])) | (
        (y1[None, :] <= yc[:, None]) & (yc[:, None] < y0[None, :])
    )
    rows, edges = np.nonzero(crosses)
    if rows.size == 0:
        return np.zeros((height, width), dtype=bool)
    e0x, e0y, e1x, e1y = x0[edges], y0[edges], x1[edges], y1[edges]
    xcross = e0x + (yc[rows] - e0y) * (e1x - e0x) / (e1y - e0y)
    # pixel j sees this crossing on its left iff xcross < j + 0.5
    start = np.floor(xcross - 0.5) + 1.0
    start = np.clip(start, 0.0, float(width)).astype(np.int64)
    toggles = np.zeros((height, width + 1), dtype=np.int64)
    np.add.at(toggles, (rows, start), 1)
    return (np.cumsum(toggles[:, :width], axis=1) & 1).astype(bool)


def _rasterize_loop(xs, ys, width, height):
    out = np.zeros((height, width), dtype=np.bool_)
    m = xs.shape[0]
    toggles = np.zeros(width + 1, dtype=np.int64)
    for i in range(height):
        yc = i + 0.5
        toggles[:] = 0
        hit = False
        for k in range(m):
            x0 = xs[k]
            y0 = ys[k]
            k1 = k + 1 if k + 1 < m else 0
            x1 = xs[k1]
            y1 = ys[k1]
            if (y0 <= yc and yc < y1) or (y1 <= yc and yc < y0):
                xcross = x0 + (yc - y0) * (x1 - x0) / (y1 - y0)
                s = np.floor(xcross - 0.5) + 1.0
                if s < 0.0:
                    s = 0.0
                elif s > width:
                    s = float(width)
                toggles[int(s)] += 1
                hit = True
        if not hit:
            continue
        acc = 0
        for j in range(width):
            acc += toggles[j]
            out[i, j] = (acc & 1) == 1
    return out


rasterize_numba = _njit(_rasterize_loop)


def points_in_polygon_numpy(px, py, xs, ys):
    px = np.asarray(px, dtype=np.float64)
    py = np.asarray(py, dtype=np.float64)
    x0, y0 = np.asarray(xs, dtype=np.float64), np.asarray(ys, dtype=np.float64)
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    P, Q = py[:, None], px[:, None]
    crosses = ((y0 <= P) & (P < y1)) | ((y1 <= P) & (P < y0))
    with np.errstate(divide="ignore", invalid="ignore"):
        xcross = x0 + (P - y0) * (x1 - x0) / (y1 - y0)
    left = crosses & (xcross < Q)
    return (left.sum(axis=1) & 1).astype(bool)


def _points_in_polygon_loop(px, py, xs, ys):
    n = px.shape[0]
    m = xs.shape[0]
    out = np.zeros(n, dtype=np.bool_)
    for p in range(n):
        qx = px[p]
        qy = py[p]
        count = 0
        for k in range(m):
            x0 = xs[k]
            y0 = ys[k]
            k1 = k + 1 if k + 1 < m else 0
            x1 = xs[k1]
            y1 = ys[k1]
            if (y0 <= qy and qy < y1) or (y1 <= qy and qy < y0):
                xcross = x0 + (qy - y0) * (x1 - x0) / (y1 - y0)
                if xcross < qx:
                    count += 1
        out[p] = (count & 1) == 1
    return out


points_in_polygon_numba = _njit(_points_in_polygon_loop)


# ---------------------------------------------------------------------------
# Ray casting: farthest crossing of each ray with a closed polyline
# ---------------------------------------------------------------------------


def raycast_numpy(xs, ys, cx, cy, cos_t, sin_t):
    """Largest hit distance per ray, or -1.0 where a ray misses every segment."""
    px, py = np.asarray(xs, dtype=np.float64), np.asarray(ys, dtype=np.float64)
    ex, ey = np.roll(px, -1) - px, np.roll(py, -1) - py
    wx, wy = px - cx, py - cy
    c = np.asarray(cos_t, dtype=np.float64)[:, None]
    s = np.asarray(sin_t, dtype=np.float64)[:, None]
    denom = c * ey - s * ex
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (wx * ey - wy * ex) / denom
        u = (wx * s - wy * c) / denom
    valid = (denom != 0.0) & (t >= 0.0) & (u >= -SEGMENT_TOL) & (u <= 1.0 + SEGMENT_TOL)
    t = np.where(valid, t, -1.0)
    return t.max(axis=1)


def _raycast_loop(xs, ys, cx, cy, cos_t, sin_t):
    n = cos_t.shape[0]
    m = xs.shape[0]
    out = np.full(n, -1.0)
    for k in range(m):
        k1 = k + 1 if k + 1 < m else 0
        ex = xs[k1] - xs[k]
        ey = ys[k1] - ys[k]
        wx = xs[k] - cx
        wy = ys[k] - cy
        for i in range(n):
            c = cos_t[i]
            s = sin_t[i]
            denom = c * ey - s * ex
            if denom == 0.0:
                continue
            t = (wx * ey - wy * ex) / denom
            u = (wx * s - wy * c) / denom
            if t >= 0.0 and u >= -SEGMENT_TOL and u <= 1.0 + SEGMENT_TOL and t > out[i]:
                out[i] = t
    return out


raycast_numba = _njit(_raycast_loop)


# ---------------------------------------------------------------------------
# Crack (pixel-edge) boundary tracing of one 8-connected component
# ---------------------------------------------------------------------------

# E, S, W, N in image coordinates (y down); +1 is a right turn on screen
_DX = np.array([1, 0, -1, 0], dtype=np.int64)
_DY = np.array([0, 1, 0, -1], dtype=np.int64)


def _trace_loop(padded, sx, sy, dxs, dys):
    # padded has a one-pixel empty border; vertex (x, y) lives in unpadded coords
    limit = 4 * padded.shape[0] * padded.shape[1] + 8
    out = np.empty((limit, 2), dtype=np.int64)
    n = 0
    x = sx
    y = sy
    d = 0
    while True:
        out[n, 0] = x
        out[n, 1] = y
        n += 1
        x += dxs[d]
        y += dys[d]
        # squares ahead of the next step, to the left and right of heading d
        r = (d + 1) % 4
        lft = (d + 3) % 4
        ax = x + dxs[d]
        ay = y + dys[d]
        rx = min(x, min(ax, x + dxs[r]))
        ry = min(y, min(ay, y + dys[r]))
        lx = min(x, min(ax, x + dxs[lft]))
        ly = min(y, min(ay, y + dys[lft]))
        if padded[ly + 1, lx + 1]:
            d = lft
        elif not padded[ry + 1, rx + 1]:
            d = r
        if x == sx and y == sy and d == 0:
            break
        if n >= limit:
            break
    return out[:n]


def trace_boundary_numpy(mask):
    """Outer pixel-edge boundary of the component holding the first set pixel.

    Vertices are integer lattice points; the region lies to the right of the
    direction of travel on screen, which gives a positive shoelace sum.
    """
    mask = np.asarray(mask, dtype=bool)
    rows, cols = np.nonzero(mask)
    padded = np.pad(mask, 1).tolist()
    sy, sx = int(rows[0]), int(cols[0])
    dxs, dys = _DX.tolist(), _DY.tolist()
    pts = _trace_loop(_ListGrid(padded), sx, sy, dxs, dys)
    return pts


class _ListGrid:
    # nested-list indexing is much faster than numpy scalar indexing in pure Python
    __slots__ = ("rows", "shape")

    def __init__(self, rows):
        self.rows = rows
        self.shape = (len(rows), len(rows[0]))

    def __getitem__(self, idx):
        return self.rows[idx[0]][idx[1]]


if HAVE_NUMBA:
    _trace_jit = _njit(_trace_loop)

    def trace_boundary_numba(mask):
        mask = np.asarray(mask, dtype=bool)
        rows, cols = np.nonzero(mask)
        padded = np.pad(mask, 1)
        return _trace_jit(padded, int(cols[0]), int(rows[0]), _DX, _DY)

else:  # pragma: no cover
    trace_boundary_numba = trace_boundary_numpy


if USE_NUMBA:

    def rasterize(xs, ys, width, height):
        return rasterize_numba(
            np.ascontiguousarray(xs, dtype=np.float64),
            np.ascontiguousarray(ys, dtype=np.float64),
            int(width),
            int(height),
        )

    def points_in_polygon(px, py, xs, ys):
        return points_in_polygon_numba(
            np.ascontiguousarray(px, dtype=np.float64),
            np.ascontiguousarray(py, dtype=np.float64),
            np.ascontiguousarray(xs, dtype=np.float64),
            np.ascontiguousarray(ys, dtype=np.float64),
        )

    def raycast(xs, ys, cx, cy, cos_t, sin_t):
        return raycast_numba(
            np.ascontiguousarray(xs, dtype=np.float64),
            np.ascontiguousarray(ys, dtype=np.float64),
            float(cx),
            float(cy),
            np.ascontiguousarray(cos_t, dtype=np.float64),
            np.ascontiguousarray(sin_t, dtype=np.float64),
        )

    trace_boundary = trace_boundary_numba
else:
    rasterize = rasterize_numpy
    points_in_polygon = points_in_polygon_numpy
    raycast = raycast_numpy
    trace_boundary = trace_boundary_numpy
