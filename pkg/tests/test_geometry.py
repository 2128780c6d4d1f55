import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polarrep.errors import BothEmpty, DegenerateContour, DimensionMismatch, EmptyMask, EmptyRasterWarning
from polarrep.geometry import (
    BitMask,
    Box,
    Contour,
    Point,
    box_center,
    box_iou,
    contains,
    extract_contour,
    is_convex,
    mask_mass_center,
    mass_center,
    pixel_iou,
    polygon_area,
    rasterize,
    regular_polygon,
)

UNIT_SQUARE = Contour([(0, 0), (1, 0), (1, 1), (0, 1)])
# C-shape opening to the right; its centroid sits in the notch
C_SHAPE = Contour([(0, 0), (10, 0), (10, 2), (2, 2), (2, 8), (10, 8), (10, 10), (0, 10)])
def _crescent():
    # outer disc r=20 at origin minus disc r=16 at (8, 0); the circles meet at (13, +-15.2)
    a = math.atan2(math.sqrt(400 - 169), 13)
    b = math.atan2(math.sqrt(400 - 169), 5)
    outer = np.linspace(a, 2 * math.pi - a, 150)
    inner = np.linspace(2 * math.pi - b, b, 150)[1:-1]
    return Contour(
        np.concatenate(
            [
                np.stack([20 * np.cos(outer), 20 * np.sin(outer)], axis=1),
                np.stack([8 + 16 * np.cos(inner), 16 * np.sin(inner)], axis=1),
            ]
        )
    )


CRESCENT = _crescent()


def shoelace_loop(pts):
    s = 0.0
    for i in range(len(pts)):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % len(pts)]
        s += x0 * y1 - x1 * y0
    return abs(s) / 2


class TestArea:
    def test_unit_square(self):
        assert polygon_area(UNIT_SQUARE) == 1.0

    def test_right_triangle(self):
        assert polygon_area(Contour([(0, 0), (2, 0), (0, 2)])) == 2.0

    def test_regular_36gon(self):
        c = regular_polygon(36, 1.0)
        closed_form = 18 * math.sin(2 * math.pi / 36)
        assert closed_form == pytest.approx(3.1256672, abs=1e-7)
        assert polygon_area(c) == pytest.approx(closed_form, rel=1e-12)
        assert shoelace_loop(c.points.tolist()) == pytest.approx(closed_form, rel=1e-12)

    @pytest.mark.parametrize(
        "pts", [[(0, 0), (1, 1)], [(0, 0), (1, 1), (2, 2)], [(0, 0), (1e-6, 0), (0, 1e-6)]]
    )
    def test_degenerate(self, pts):
        with pytest.raises(DegenerateContour):
            Contour(pts)

    @settings(max_examples=60, deadline=None)
    @given(
        seed=st.integers(0, 2**31),
        dx=st.floats(-1e3, 1e3),
        dy=st.floats(-1e3, 1e3),
        angle=st.floats(0, 2 * math.pi),
    )
    def test_rigid_motion_invariance(self, seed, dx, dy, angle):
        rng = np.random.default_rng(seed)
        pts = rng.uniform(-20, 20, size=(int(rng.integers(3, 12)), 2))
        try:
            c = Contour(pts)
        except DegenerateContour:
            return
        a = polygon_area(c)
        ca, sa = math.cos(angle), math.sin(angle)
        moved = pts @ np.array([[ca, sa], [-sa, ca]]) + [dx, dy]
        assert polygon_area(Contour(moved)) == pytest.approx(a, rel=1e-9, abs=1e-9)


def test_orientation_normalized_keeps_first_vertex():
    c = Contour([(0, 0), (0, 1), (1, 1), (1, 0)])
    assert tuple(c.points[0]) == (0.0, 0.0)
    x, y = c.xs, c.ys
    assert np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y) > 0


class TestCenters:
    def test_square(self):
        assert mass_center(UNIT_SQUARE) == Point(0.5, 0.5)
        assert box_center(UNIT_SQUARE) == Point(0.5, 0.5)

    def test_triangle(self):
        m = mass_center(Contour([(0, 0), (3, 0), (0, 3)]))
        assert (m.x, m.y) == pytest.approx((1.0, 1.0), abs=1e-12)
        assert box_center(Contour([(0, 0), (4, 0), (0, 2)])) == Point(2.0, 1.0)

    def test_c_shape_centroid_outside(self):
        m = mass_center(C_SHAPE)
        assert not contains(C_SHAPE, m)

    def test_crescent_box_center_differs(self):
        m, b = mass_center(CRESCENT), box_center(CRESCENT)
        assert math.hypot(m.x - b.x, m.y - b.y) > 0

    def test_mask_mass_center(self):
        bits = np.zeros((4, 4), bool)
        bits[1:3, 0:2] = True
        assert mask_mass_center(BitMask(bits)) == Point(1.0, 2.0)

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2**31), dx=st.floats(-500, 500), dy=st.floats(-500, 500))
    def test_translation_equivariance(self, seed, dx, dy):
        rng = np.random.default_rng(seed)
        c = regular_polygon(7, rng.uniform(1, 30), rng.uniform(-50, 50, 2), phase=rng.uniform(0, 1))
        m0, m1 = mass_center(c), mass_center(c.translated(dx, dy))
        assert m1.x == pytest.approx(m0.x + dx, abs=1e-9)
        assert m1.y == pytest.approx(m0.y + dy, abs=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2**31))
    def test_convex_centroid_inside(self, seed):
        from scipy.spatial import ConvexHull

        rng = np.random.default_rng(seed)
        pts = rng.uniform(0, 40, size=(int(rng.integers(3, 20)), 2))
        try:
            c = Contour(pts[ConvexHull(pts).vertices])
        except Exception:
            return
        assert is_convex(c)
        assert contains(c, mass_center(c))


class TestRasterize:
    def test_square_on_8x8(self):
        sq = Contour([(0, 0), (4, 0), (4, 4), (0, 4)])
        m = rasterize(sq, 8, 8)
        oracle = sum(
            1 for i in range(8) for j in range(8) if 0 < j + 0.5 < 4 and 0 < i + 0.5 < 4
        )
        assert oracle == 16
        assert m.count == 16
        assert m.bits[:4, :4].all()

    def test_outside_raster_flags_empty(self):
        c = Contour([(100, 100), (110, 100), (110, 110)])
        with pytest.warns(EmptyRasterWarning):
            m = rasterize(c, 8, 8)
        assert m.empty

    def test_full_frame(self):
        m = rasterize(Contour([(0, 0), (9, 0), (9, 7), (0, 7)]), 9, 7)
        assert m.bits.all() and m.bits.shape == (7, 9)

    def test_deterministic(self, rng):
        from conftest import star_polygon

        c = star_polygon(rng, (32, 32), 20)
        assert rasterize(c, 64, 64) == rasterize(c, 64, 64)


class TestExtract:
    def test_square_roundtrip(self):
        sq = Contour([(2, 3), (9, 3), (9, 8), (2, 8)])
        c = extract_contour(rasterize(sq, 12, 12))
        assert c.bbox() == Box(2.0, 3.0, 9.0, 8.0)

    def test_single_pixel_is_unit_square(self):
        bits = np.zeros((5, 5), bool)
        bits[2, 3] = True
        c = extract_contour(BitMask(bits))
        assert polygon_area(c) == 1.0
        assert c.bbox() == Box(3.0, 2.0, 4.0, 3.0)

    def test_disk_area(self):
        disk = regular_polygon(360, 20.0, (32, 32))
        c = extract_contour(rasterize(disk, 64, 64))
        assert polygon_area(c) == pytest.approx(math.pi * 400, rel=0.05)

    def test_empty(self):
        with pytest.raises(EmptyMask):
            extract_contour(BitMask(np.zeros((3, 3), bool)))

    def test_largest_component_wins(self):
        bits = np.zeros((20, 20), bool)
        bits[1:3, 1:3] = True
        bits[8:15, 5:12] = True
        c = extract_contour(BitMask(bits))
        assert polygon_area(c) == 49.0

    def test_diagonal_pixels_form_one_component(self):
        c = extract_contour(BitMask(np.eye(4, dtype=bool)))
        assert polygon_area(c) == 4.0

    def test_holes_ignored(self):
        bits = np.zeros((10, 10), bool)
        bits[1:9, 1:9] = True
        bits[4:6, 4:6] = False
        assert rasterize(extract_contour(BitMask(bits)), 10, 10).count == 64

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**31))
    def test_roundtrip_convex(self, seed):
        from scipy.spatial import ConvexHull

        rng = np.random.default_rng(seed)
        pts = rng.uniform(2, 60, size=(int(rng.integers(3, 12)), 2))
        c = Contour(pts[ConvexHull(pts).vertices])
        if polygon_area(c) < 100:
            return
        m = rasterize(c, 64, 64)
        assert pixel_iou(rasterize(extract_contour(m), 64, 64), m) >= 0.95


class TestIoU:
    def test_identity_and_disjoint(self):
        a = np.zeros((6, 6), bool)
        a[:2, :2] = True
        b = np.zeros((6, 6), bool)
        b[4:, 4:] = True
        assert pixel_iou(BitMask(a), BitMask(a)) == 1.0
        assert pixel_iou(BitMask(a), BitMask(b)) == 0.0

    def test_half_overlap(self):
        a = np.zeros((8, 12), bool)
        b = np.zeros((8, 12), bool)
        a[0:4, 0:4] = True
        b[0:4, 2:6] = True
        inter = sum(1 for i in range(8) for j in range(12) if a[i, j] and b[i, j])
        union = sum(1 for i in range(8) for j in range(12) if a[i, j] or b[i, j])
        assert inter / union == pytest.approx(1 / 3)
        assert pixel_iou(BitMask(a), BitMask(b)) == pytest.approx(1 / 3)

    def test_errors(self):
        with pytest.raises(DimensionMismatch):
            pixel_iou(BitMask(np.ones((2, 2))), BitMask(np.ones((2, 3))))
        with pytest.raises(BothEmpty):
            pixel_iou(BitMask(np.zeros((2, 2))), BitMask(np.zeros((2, 2))))

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**31))
    def test_symmetric(self, seed):
        rng = np.random.default_rng(seed)
        a = BitMask(rng.random((9, 7)) < 0.4)
        b = BitMask(rng.random((9, 7)) < 0.4)
        if a.empty and b.empty:
            return
        assert pixel_iou(a, b) == pixel_iou(b, a)
        if not a.empty:
            assert pixel_iou(a, a) == 1.0

    def test_box_iou(self):
        a = Box(0, 0, 2, 2)
        assert box_iou(a, a) == 1.0
        assert box_iou(a, Box(1, 0, 3, 2)) == pytest.approx(2 / (4 + 4 - 2))
        assert box_iou(a, Box(5, 5, 6, 6)) == 0.0
        assert box_iou(Box(1, 1, 1, 1), a) == 0.0
        with pytest.raises(BothEmpty):
            box_iou(Box(1, 1, 1, 1), Box(1, 1, 1, 1))
