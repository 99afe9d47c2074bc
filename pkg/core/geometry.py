"""
Rotated-rectangle geometry.
Corner expansion, convex clipping, areas, IoU and pi-periodic angle distance.
"""
import math
from typing import Tuple

import numpy as np

from core.constants import BOUNDARY_EPS, DEGENERATE_AREA
from core.grasp import EMPTY_POLYGON, Box, GraspRect, Polygon

Point = Tuple[float, float]


def rect_to_polygon(rect: GraspRect) -> Polygon:
    """
    Expand a grasp rectangle into its four corners.

    The corners are ordered so the shoelace area is positive.
    """
    ux, uy = rect.axis
    vx, vy = rect.normal
    hw, hh = rect.width / 2.0, rect.height / 2.0
    # (axis, normal) is left-handed in raw image coordinates, so walk the
    # normal first to get a positive orientation.
    signs = ((-1, -1), (-1, 1), (1, 1), (1, -1))
    return Polygon(tuple(
        (rect.x + a * hw * ux + b * hh * vx, rect.y + a * hw * uy + b * hh * vy)
        for a, b in signs
    ))


def signed_area(p: Polygon) -> float:
    """Shoelace area, positive for counter-clockwise vertices."""
    n = len(p.vertices)
    if n < 3:
        return 0.0
    s = 0.0
    for i in range(n):
        x0, y0 = p.vertices[i]
        x1, y1 = p.vertices[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return s / 2.0


def polygon_area(p: Polygon) -> float:
    return abs(signed_area(p))


def _oriented(p: Polygon) -> Polygon:
    if signed_area(p) < 0:
        return Polygon(tuple(reversed(p.vertices)))
    return p


def _cross(o: Point, a: Point, b: Point) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _intersect(s: Point, e: Point, c1: Point, c2: Point) -> Point:
    """Intersection of segment s-e with the infinite line c1-c2."""
    ds = _cross(c1, c2, s)
    de = _cross(c1, c2, e)
    denom = ds - de
    t = 0.0 if denom == 0 else min(max(ds / denom, 0.0), 1.0)
    return (s[0] + t * (e[0] - s[0]), s[1] + t * (e[1] - s[1]))


def convex_clip(subject: Polygon, clip: Polygon) -> Polygon:
    """
    Sutherland-Hodgman intersection of two convex polygons.

    Points on a clip edge count as inside. Slivers with area below
    DEGENERATE_AREA come back as the empty polygon.
    """
    if subject.is_empty or clip.is_empty:
        return EMPTY_POLYGON

    output = list(_oriented(subject).vertices)
    clip_vertices = _oriented(clip).vertices
    c1 = clip_vertices[-1]
    for c2 in clip_vertices:
        if not output:
            return EMPTY_POLYGON
        inputs = output
        output = []
        s = inputs[-1]
        s_in = _cross(c1, c2, s) >= -BOUNDARY_EPS
        for e in inputs:
            e_in = _cross(c1, c2, e) >= -BOUNDARY_EPS
            if e_in:
                if not s_in:
                    output.append(_intersect(s, e, c1, c2))
                output.append(e)
            elif s_in:
                output.append(_intersect(s, e, c1, c2))
            s, s_in = e, e_in
        c1 = c2

    result = Polygon(tuple(output))
    if len(output) < 3 or polygon_area(result) < DEGENERATE_AREA:
        return EMPTY_POLYGON
    return result


def rotated_iou(a: GraspRect, b: GraspRect) -> float:
    """Exact IoU of two rotated rectangles; symmetric bit for bit."""
    ka = (a.x, a.y, a.theta, a.width, a.height)
    kb = (b.x, b.y, b.theta, b.width, b.height)
    if ka == kb:
        return 1.0
    if kb < ka:
        # clipping is order dependent in the last bits
        a, b = b, a
    reach = (math.hypot(a.width, a.height) + math.hypot(b.width, b.height)) / 2.0
    if math.hypot(a.x - b.x, a.y - b.y) > reach:
        return 0.0
    inter = polygon_area(convex_clip(rect_to_polygon(a), rect_to_polygon(b)))
    union = a.area + b.area - inter
    if union <= 0:
        return 0.0
    return min(max(inter / union, 0.0), 1.0)


def angle_delta(t1: float, t2: float) -> float:
    """Distance on the half circle: min over k of |t1 - t2 + k*pi|, in [0, pi/2]."""
    d = (t1 - t2) % math.pi
    return min(d, math.pi - d)


def aabb_iou(a: Box, b: Box) -> float:
    iw = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    ih = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    union = a.area + b.area - inter
    return inter / union if union > 0 else 0.0


def rect_local_coords(rect: GraspRect, xs: np.ndarray, ys: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Project points onto the rectangle's (axis, normal) frame."""
    ux, uy = rect.axis
    vx, vy = rect.normal
    dx = xs - rect.x
    dy = ys - rect.y
    return dx * ux + dy * uy, dx * vx + dy * vy


def points_in_rect(rect: GraspRect, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Vectorized point-in-rotated-rectangle test, boundary inclusive."""
    a, b = rect_local_coords(rect, xs, ys)
    return (np.abs(a) <= rect.width / 2.0 + BOUNDARY_EPS) & (np.abs(b) <= rect.height / 2.0 + BOUNDARY_EPS)


def polygon_bounds(rects) -> Box:
    """Bounding box of the union of grasp polygons."""
    xs, ys = [], []
    for rect in rects:
        for x, y in rect_to_polygon(rect).vertices:
            xs.append(x)
            ys.append(y)
    if not xs:
        raise ValueError("no rectangles to bound")
    return Box(min(xs), min(ys), max(xs), max(ys))


def rasterized_iou(a: GraspRect, b: GraspRect, resolution: int = 512) -> float:
    """
    Brute-force IoU by counting covered sample points on a grid spanning both
    rectangles. Used as an oracle for `rotated_iou`.
    """
    bounds = polygon_bounds((a, b))
    step_x = (bounds.x_max - bounds.x_min) / resolution
    step_y = (bounds.y_max - bounds.y_min) / resolution
    xs = bounds.x_min + (np.arange(resolution) + 0.5) * step_x
    ys = bounds.y_min + (np.arange(resolution) + 0.5) * step_y
    gx, gy = np.meshgrid(xs, ys)
    in_a = points_in_rect(a, gx, gy)
    in_b = points_in_rect(b, gx, gy)
    union = np.count_nonzero(in_a | in_b)
    if union == 0:
        return 0.0
    return np.count_nonzero(in_a & in_b) / union
