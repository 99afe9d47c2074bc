"""
Jacquard-style grasp annotations.

One grasp per line, five semicolon-separated numbers:
    x;y;theta_degrees;opening_px;jaw_px
Scenes are single-object and class-agnostic (class 0, "object").
"""
import math
from typing import Optional, Tuple

from core.config import CodecConfig
from core.constants import JACQUARD_IMAGE_SIZE, OBJECT_CLASS_ID, OBJECT_CLASS_NAME
from core.errors import ParseError
from core.scene import Scene, SceneObject

from .common import check_bounds, make_grasp, object_box, parse_numbers, require_grasps

FIELDS = 5


def import_jacquard(
    annotation_text: str,
    scene_id: str,
    image_size: Tuple[int, int] = JACQUARD_IMAGE_SIZE,
    cfg: CodecConfig = CodecConfig(),
    source: Optional[str] = None,
) -> Scene:
    """
    Parse one Jacquard annotation file into a Scene.

    Raises:
        ParseError: wrong field count or non-numeric token (with line number)
        GraspKitError: no grasps at all
        OutOfBoundsError: grasp centers outside the image
    """
    grasps = []
    for lineno, raw in enumerate(annotation_text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        tokens = [t.strip() for t in line.split(';')]
        if len(tokens) != FIELDS:
            raise ParseError(f"expected {FIELDS} fields, got {len(tokens)}", lineno, source)
        x, y, theta_deg, opening, jaw = parse_numbers(tokens, lineno, source)
        if jaw <= 0:
            jaw = opening * cfg.default_height_ratio
        grasps.append(make_grasp(
            lineno, source,
            x=x, y=y, theta=math.radians(theta_deg), width=opening, height=jaw,
            class_id=OBJECT_CLASS_ID,
        ))

    require_grasps(grasps, scene_id)
    check_bounds(grasps, image_size, scene_id)
    return Scene(
        scene_id=scene_id,
        image_size=image_size,
        objects=[SceneObject(
            class_id=OBJECT_CLASS_ID,
            class_name=OBJECT_CLASS_NAME,
            box=object_box(grasps, image_size),
            grasps=grasps,
        )],
    )
