"""Tests for rotated-rectangle geometry."""
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.geometry import (
    aabb_iou, angle_delta, convex_clip, polygon_area, rasterized_iou, rect_to_polygon,
    rotated_iou, signed_area,
)
from core.grasp import EMPTY_POLYGON, Box, GraspRect, Polygon


def _vertex_set(poly: Polygon):
    return sorted((round(x, 9) + 0.0, round(y, 9) + 0.0) for x, y in poly.vertices)


def _square(x0, y0, x1, y1) -> Polygon:
    return Polygon(((x0, y0), (x1, y0), (x1, y1), (x0, y1)))


rects = st.builds(
    GraspRect,
    x=st.floats(0, 100),
    y=st.floats(0, 100),
    theta=st.floats(-math.pi / 2, math.pi / 2, exclude_max=True),
    width=st.floats(1, 50),
    height=st.floats(1, 50),
)


def test_axis_aligned_corners():
    poly = rect_to_polygon(GraspRect(0, 0, 0, 4, 2))
    assert _vertex_set(poly) == sorted([(-2.0, -1.0), (2.0, -1.0), (2.0, 1.0), (-2.0, 1.0)])


def test_quarter_turn_is_normalized_and_upright():
    rect = GraspRect(0, 0, math.pi / 2, 4, 2)
    assert rect.theta == pytest.approx(-math.pi / 2)
    assert _vertex_set(rect_to_polygon(rect)) == sorted([(-1.0, -2.0), (1.0, -2.0), (1.0, 2.0), (-1.0, 2.0)])


def test_rotated_square_vertices():
    poly = rect_to_polygon(GraspRect(10, 5, math.pi / 4, 2, 2))
    for x, y in poly.vertices:
        assert math.hypot(x - 10, y - 5) == pytest.approx(math.sqrt(2))
    assert sum(x for x, _ in poly.vertices) / 4 == pytest.approx(10)
    assert sum(y for _, y in poly.vertices) / 4 == pytest.approx(5)
    assert polygon_area(poly) == pytest.approx(4)


@given(rects)
def test_corner_order_has_positive_area(rect):
    assert signed_area(rect_to_polygon(rect)) == pytest.approx(rect.area, rel=1e-9)


def test_polygon_area_examples():
    assert polygon_area(EMPTY_POLYGON) == 0
    assert polygon_area(_square(0, 0, 1, 1)) == 1
    assert polygon_area(Polygon(((0, 0), (4, 0), (0, 3)))) == 6


def test_clip_with_itself_keeps_area():
    p = rect_to_polygon(GraspRect(20, 30, 0.7, 12, 5))
    assert polygon_area(convex_clip(p, p)) == pytest.approx(polygon_area(p), abs=1e-9)


def test_clip_overlapping_squares():
    clipped = convex_clip(_square(0, 0, 1, 1), _square(0.5, 0, 1.5, 1))
    assert polygon_area(clipped) == pytest.approx(0.5)


def test_clip_disjoint_is_empty():
    assert convex_clip(_square(0, 0, 1, 1), _square(5, 5, 6, 6)).is_empty


def test_clip_orientation_does_not_matter():
    a = _square(0, 0, 2, 2)
    b = Polygon(tuple(reversed(_square(1, 1, 3, 3).vertices)))
    assert polygon_area(convex_clip(a, b)) == pytest.approx(1.0)


def test_rotated_iou_identical():
    r = GraspRect(40, 40, 0.3, 20, 10)
    assert rotated_iou(r, r) == 1.0


def test_rotated_iou_far_apart():
    assert rotated_iou(GraspRect(0, 0, 0, 10, 10), GraspRect(1000, 0, 0, 10, 10)) == 0.0


def test_rotated_iou_shifted_boxes():
    a = GraspRect(0, 0, 0, 4, 2)
    b = GraspRect(2, 0, 0, 4, 2)
    assert rotated_iou(a, b) == pytest.approx(1 / 3, abs=1e-9)
    assert rasterized_iou(a, b) == pytest.approx(1 / 3, abs=0.02)


@pytest.mark.parametrize("a, b", [
    (GraspRect(50, 50, 0.4, 30, 12), GraspRect(55, 48, -0.2, 25, 15)),
    (GraspRect(50, 50, 1.2, 40, 20), GraspRect(50, 50, -1.2, 40, 20)),
    (GraspRect(10, 10, 0.0, 20, 20), GraspRect(10, 10, math.pi / 4, 20, 20)),
])
def test_rotated_iou_matches_raster_oracle(a, b):
    assert rotated_iou(a, b) == pytest.approx(rasterized_iou(a, b), abs=0.02)


@given(rects, rects)
def test_rotated_iou_symmetric_and_bounded(a, b):
    iou = rotated_iou(a, b)
    assert 0.0 <= iou <= 1.0
    assert iou == pytest.approx(rotated_iou(b, a), abs=1e-12)


@settings(max_examples=50)
@given(rects, st.floats(-20, 20), st.floats(-20, 20))
def test_rotated_iou_translation_invariant(rect, dx, dy):
    other = GraspRect(rect.x + 3, rect.y - 2, rect.theta + 0.2, rect.width, rect.height)
    moved = rotated_iou(rect.shifted(dx, dy), other.shifted(dx, dy))
    assert moved == pytest.approx(rotated_iou(rect, other), abs=1e-7)


def _rotated_about(rect: GraspRect, cx: float, cy: float, phi: float) -> GraspRect:
    """Rotate rect about (cx, cy) by phi in the grasp-angle sense."""
    c, s = math.cos(phi), math.sin(phi)
    dx, dy = rect.x - cx, rect.y - cy
    return GraspRect(cx + c * dx + s * dy, cy - s * dx + c * dy, rect.theta + phi, rect.width, rect.height)


@settings(max_examples=50)
@given(rects, rects, st.floats(-math.pi, math.pi), st.floats(0, 100), st.floats(0, 100))
def test_rotated_iou_rotation_invariant(a, b, phi, cx, cy):
    turned = rotated_iou(_rotated_about(a, cx, cy, phi), _rotated_about(b, cx, cy, phi))
    assert turned == pytest.approx(rotated_iou(a, b), abs=1e-8)


def test_rotation_helper_turns_the_grasp_axis():
    moved = _rotated_about(GraspRect(10, 0, 0.0, 4, 2), 0, 0, math.pi / 4)
    r = math.sqrt(0.5)
    assert (moved.x, moved.y) == pytest.approx((10 * r, -10 * r), abs=1e-12)
    assert moved.axis == pytest.approx((r, -r), abs=1e-12)


@given(rects, rects)
def test_clipped_area_never_exceeds_smaller_rect(a, b):
    inter = polygon_area(convex_clip(rect_to_polygon(a), rect_to_polygon(b)))
    assert inter <= min(a.area, b.area) + 1e-9


def test_angle_delta_examples():
    assert angle_delta(0.3, 0.3) == 0
    assert angle_delta(math.radians(170), math.radians(-10)) == pytest.approx(0, abs=1e-12)
    assert angle_delta(math.radians(10), math.radians(40)) == pytest.approx(math.radians(30))


@given(st.floats(-10, 10), st.floats(-10, 10), st.integers(-3, 3))
def test_angle_delta_is_pi_periodic(t1, t2, k):
    d = angle_delta(t1, t2)
    assert 0 <= d <= math.pi / 2
    assert angle_delta(t1 + k * math.pi, t2) == pytest.approx(d, abs=1e-9)


def test_aabb_iou_examples():
    box = Box(0, 0, 4, 4)
    assert aabb_iou(box, box) == 1.0
    assert aabb_iou(box, Box(10, 10, 12, 12)) == 0.0
    assert aabb_iou(box, Box(2, 0, 6, 4)) == pytest.approx(1 / 3)


def test_degenerate_rect_rejected():
    with pytest.raises(ValueError):
        GraspRect(0, 0, 0, 0, 2)
    with pytest.raises(ValueError):
        GraspRect(float("nan"), 0, 0, 4, 2)
