"""
Grasp value types - GraspRect, Box, Polygon.
All geometry and codec code works on these immutable values.

Image coordinates: x = column, y = row, origin top-left, y grows downward.
Angles are counter-clockwise in math convention on (x, -y).
`width` is the rectangle extent along the grasp axis (gripper opening),
`height` the perpendicular jaw extent.
"""
import math
from dataclasses import dataclass, field, replace
from typing import Tuple

from core.constants import OBJECT_CLASS_ID


def normalize_angle(theta: float) -> float:
    """Map any angle onto [-pi/2, pi/2) modulo pi; in-range angles come back unchanged."""
    if -math.pi / 2 <= theta < math.pi / 2:
        return theta
    t = (theta + math.pi / 2) % math.pi - math.pi / 2
    # float rounding can land exactly on the open end
    if t >= math.pi / 2:
        t -= math.pi
    return t


@dataclass(frozen=True)
class GraspRect:
    """
    Planar parallel-jaw grasp.

    Attributes:
        x: Center column (pixels)
        y: Center row (pixels)
        theta: Grasp axis angle, normalized to [-pi/2, pi/2)
        width: Gripper opening, extent along the axis (pixels > 0)
        height: Jaw size, extent across the axis (pixels > 0)
        quality: Grasp quality in [0, 1]
        class_id: Object class the grasp belongs to
    """
    x: float
    y: float
    theta: float
    width: float
    height: float
    quality: float = 1.0
    class_id: int = OBJECT_CLASS_ID

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.theta, self.width, self.height)):
            raise ValueError("grasp values must be finite")
        if not (self.width > 0 and self.height > 0):
            raise ValueError(f"grasp extents must be positive, got {self.width}x{self.height}")
        if not 0.0 <= self.quality <= 1.0:
            raise ValueError(f"grasp quality must be in [0, 1], got {self.quality}")
        if self.class_id < 0:
            raise ValueError(f"class_id must be >= 0, got {self.class_id}")
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    @property
    def center(self) -> Tuple[float, float]:
        return (self.x, self.y)

    @property
    def axis(self) -> Tuple[float, float]:
        """Unit vector along the grasp axis in image coordinates."""
        return (math.cos(self.theta), -math.sin(self.theta))

    @property
    def normal(self) -> Tuple[float, float]:
        """Unit vector across the grasp axis in image coordinates."""
        return (-math.sin(self.theta), -math.cos(self.theta))

    @property
    def area(self) -> float:
        return self.width * self.height

    def shifted(self, dx: float, dy: float) -> 'GraspRect':
        return replace(self, x=self.x + dx, y=self.y + dy)

    def scaled(self, s: float) -> 'GraspRect':
        return replace(self, x=self.x * s, y=self.y * s, width=self.width * s, height=self.height * s)

    def with_class(self, class_id: int) -> 'GraspRect':
        return replace(self, class_id=class_id)

    def __repr__(self) -> str:
        return (
            f"GraspRect(x={self.x:.2f}, y={self.y:.2f}, theta={math.degrees(self.theta):.1f}deg, "
            f"w={self.width:.2f}, h={self.height:.2f}, q={self.quality:.3f}, cls={self.class_id})"
        )


@dataclass(frozen=True)
class Box:
    """
    Axis-aligned pixel box, half-open: covers x_min <= x < x_max.
    """
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError(f"invalid box {self.as_list()}")

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)

    def contains(self, x: float, y: float) -> bool:
        return self.x_min <= x < self.x_max and self.y_min <= y < self.y_max

    def clamp(self, h: int, w: int) -> 'Box':
        """Clamp to an h x w canvas."""
        x0 = min(max(self.x_min, 0.0), float(w))
        y0 = min(max(self.y_min, 0.0), float(h))
        x1 = min(max(self.x_max, x0), float(w))
        y1 = min(max(self.y_max, y0), float(h))
        return Box(x0, y0, x1, y1)

    def pixel_slices(self) -> Tuple[slice, slice]:
        """Row and column slices of the pixels whose centers fall inside the box."""
        rows = slice(max(math.ceil(self.y_min), 0), max(math.ceil(self.y_max), 0))
        cols = slice(max(math.ceil(self.x_min), 0), max(math.ceil(self.x_max), 0))
        return rows, cols

    def scaled(self, s: float) -> 'Box':
        return Box(self.x_min * s, self.y_min * s, self.x_max * s, self.y_max * s)

    def as_list(self) -> list:
        return [self.x_min, self.y_min, self.x_max, self.y_max]

    @classmethod
    def from_list(cls, values) -> 'Box':
        x0, y0, x1, y1 = (float(v) for v in values)
        return cls(x0, y0, x1, y1)


@dataclass(frozen=True)
class Polygon:
    """Convex polygon, counter-clockwise (positive shoelace area). No vertices = empty."""
    vertices: Tuple[Tuple[float, float], ...] = field(default_factory=tuple)

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) == 0

    def __len__(self) -> int:
        return len(self.vertices)

    def bounds(self) -> Box:
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        return Box(min(xs), min(ys), max(xs), max(ys))


EMPTY_POLYGON = Polygon()
