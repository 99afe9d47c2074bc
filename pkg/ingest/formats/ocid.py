"""
OCID-Grasp-style corner annotations.

Layout accepted here:
    banana          <- class token line, starts a block
    8 11            <- one corner "x y" per line
    8 9
    12 9
    12 11           <- every 4 corner lines form one grasp
A block may hold several grasps (4*m corner lines). Within a grasp the first
edge (corner 0 -> corner 1) is a jaw side and the second an opening side;
`opening_first=True` flips this for datasets that list the opening side first.
"""
import json
import math
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from core.config import CodecConfig
from core.constants import MIN_CORNER_AREA, OCID_IMAGE_SIZE
from core.errors import GraspKitError, ParseError
from core.geometry import polygon_area
from core.grasp import GraspRect, Polygon
from core.scene import Scene, SceneObject

from .common import check_bounds, make_grasp, object_box, parse_numbers, require_grasps

Point = Tuple[float, float]


def parse_class_map(text: str) -> Dict[str, int]:
    """JSON object mapping class name to integer id."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise GraspKitError(f"class map is not valid JSON: {e.msg}") from e
    if not isinstance(data, dict) or not all(
        isinstance(v, int) and not isinstance(v, bool) and v >= 0 for v in data.values()
    ):
        raise GraspKitError("class map must be a JSON object of name -> non-negative integer id")
    return dict(data)


def _is_convex(corners: Sequence[Point]) -> bool:
    signs = set()
    n = len(corners)
    for i in range(n):
        ax, ay = corners[i]
        bx, by = corners[(i + 1) % n]
        cx, cy = corners[(i + 2) % n]
        cross = (bx - ax) * (cy - by) - (by - ay) * (cx - bx)
        if cross != 0:
            signs.add(cross > 0)
    return len(signs) <= 1


def corners_to_grasp(
    corners: Sequence[Point],
    class_id: int = 0,
    opening_first: bool = False,
    lineno: Optional[int] = None,
    source: Optional[str] = None,
) -> GraspRect:
    """
    Convert four ordered corners into center / angle / width / height.

    Raises:
        ParseError: degenerate (area < 1 px^2) or non-convex corner group
    """
    pts = list(corners)
    if len(pts) != 4:
        raise ParseError(f"expected 4 corners, got {len(pts)}", lineno, source)
    area = polygon_area(Polygon(tuple(pts)))
    if area < MIN_CORNER_AREA:
        raise ParseError(f"degenerate corner group (area {area:.3g} px^2)", lineno, source)
    if not _is_convex(pts):
        raise ParseError("non-convex corner group", lineno, source)
    if opening_first:
        pts = pts[1:] + pts[:1]

    p0, p1, p2, p3 = pts
    m01 = ((p0[0] + p1[0]) / 2, (p0[1] + p1[1]) / 2)
    m23 = ((p2[0] + p3[0]) / 2, (p2[1] + p3[1]) / 2)
    ax, ay = m23[0] - m01[0], m23[1] - m01[1]
    height = (math.dist(p0, p1) + math.dist(p2, p3)) / 2
    return make_grasp(
        lineno, source,
        x=sum(p[0] for p in pts) / 4,
        y=sum(p[1] for p in pts) / 4,
        theta=math.atan2(-ay, ax),
        width=math.hypot(ax, ay),
        height=height,
        class_id=class_id,
    )


def _is_token(line: str) -> bool:
    parts = line.split()
    if len(parts) != 1:
        return False
    try:
        float(parts[0])
    except ValueError:
        return True
    return False


def import_ocid(
    annotation_text: str,
    class_map: Mapping[str, int],
    scene_id: str,
    image_size: Tuple[int, int] = OCID_IMAGE_SIZE,
    cfg: CodecConfig = CodecConfig(),
    source: Optional[str] = None,
    opening_first: bool = False,
) -> Scene:
    """
    Parse one corner-annotation file; grasps are grouped into objects by class token.

    Raises:
        ParseError: corner count not divisible by 4, malformed lines, degenerate groups
        GraspKitError: unknown class or no grasps
    """
    blocks: List[Tuple[str, int, List[Tuple[int, Point]]]] = []
    for lineno, raw in enumerate(annotation_text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if _is_token(line):
            if line not in class_map:
                raise ParseError(f"unknown class {line!r}", lineno, source)
            blocks.append((line, lineno, []))
            continue
        tokens = line.replace(',', ' ').split()
        if len(tokens) != 2:
            raise ParseError(f"expected 'x y' corner, got {len(tokens)} fields", lineno, source)
        if not blocks:
            raise ParseError("corner before any class token", lineno, source)
        x, y = parse_numbers(tokens, lineno, source)
        blocks[-1][2].append((lineno, (x, y)))

    objects: Dict[str, List[GraspRect]] = {}
    for name, token_line, corners in blocks:
        if len(corners) % 4:
            raise ParseError(
                f"class {name!r} block has {len(corners)} corner lines, not a multiple of 4",
                token_line, source,
            )
        grasps = objects.setdefault(name, [])
        for i in range(0, len(corners), 4):
            group = corners[i:i + 4]
            grasps.append(corners_to_grasp(
                [p for _, p in group], class_map[name], opening_first, group[0][0], source,
            ))

    all_grasps = [g for gs in objects.values() for g in gs]
    require_grasps(all_grasps, scene_id)
    check_bounds(all_grasps, image_size, scene_id)
    return Scene(
        scene_id=scene_id,
        image_size=image_size,
        objects=[
            SceneObject(
                class_id=class_map[name],
                class_name=name,
                box=object_box(grasps, image_size),
                grasps=grasps,
            )
            for name, grasps in objects.items() if grasps
        ],
    )
