"""
Helpers shared by the importers.
"""
import math
from typing import List, Optional, Tuple

from core.errors import GraspKitError, OutOfBoundsError, ParseError
from core.geometry import polygon_bounds
from core.grasp import Box, GraspRect


def parse_numbers(tokens: List[str], lineno: int, source: Optional[str]) -> List[float]:
    values = []
    for tok in tokens:
        try:
            value = float(tok)
        except ValueError:
            raise ParseError(f"non-numeric token {tok!r}", lineno, source) from None
        if not math.isfinite(value):
            raise ParseError(f"non-finite value {tok!r}", lineno, source)
        values.append(value)
    return values


def check_bounds(grasps: List[GraspRect], image_size: Tuple[int, int], scene_id: str) -> None:
    """Fail loudly on grasp centers outside the image; nothing is clamped."""
    h, w = image_size
    offending = [g for g in grasps if not (0 <= g.x < w and 0 <= g.y < h)]
    if offending:
        raise OutOfBoundsError(f"scene {scene_id}: {len(offending)} grasp(s) outside {h}x{w}", offending)


def object_box(grasps: List[GraspRect], image_size: Tuple[int, int]) -> Box:
    """Union of grasp polygons' bounding box, clamped to the image."""
    h, w = image_size
    return polygon_bounds(grasps).clamp(h, w)


def make_grasp(lineno: int, source: Optional[str], **kwargs) -> GraspRect:
    try:
        return GraspRect(**kwargs)
    except ValueError as e:
        raise ParseError(str(e), lineno, source) from e


def require_grasps(grasps: List[GraspRect], scene_id: str) -> None:
    if not grasps:
        raise GraspKitError(f"scene {scene_id}: no grasps")
