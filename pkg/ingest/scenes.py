"""
Canonical JSON-lines scene format.
One Scene per line; angles in radians; width/height per core.grasp.
"""
import json
import logging
from pathlib import Path
from typing import Any, Iterable, List, Optional, Union

import numpy as np

from core.constants import MASK_THRESHOLD
from core.errors import SchemaError
from core.grasp import Box, GraspRect
from core.scene import Scene, SceneObject
from ingest.tensors import load_tensor

logger = logging.getLogger(__name__)


def grasp_to_dict(g: GraspRect) -> dict:
    return {
        "x": g.x, "y": g.y, "theta": g.theta, "width": g.width,
        "height": g.height, "quality": g.quality, "class_id": g.class_id,
    }


def object_to_dict(o: SceneObject) -> dict:
    d = {
        "class_id": o.class_id,
        "class_name": o.class_name,
        "box": o.box.as_list(),
        "grasps": [grasp_to_dict(g) for g in o.grasps],
    }
    if o.score is not None:
        d["score"] = o.score
    if o.instance_mask_ref is not None:
        d["instance_mask_ref"] = o.instance_mask_ref
    return d


def scene_to_dict(s: Scene) -> dict:
    return {
        "scene_id": s.scene_id,
        "image_size": [int(s.image_size[0]), int(s.image_size[1])],
        "objects": [object_to_dict(o) for o in s.objects],
    }


def _field(d: Any, key: str, kind, path: str, line: int):
    if not isinstance(d, dict):
        raise SchemaError("expected an object", line, path)
    if key not in d:
        raise SchemaError(f"missing field {key!r}", line, f"{path}.{key}" if path else key)
    value = d[key]
    where = f"{path}.{key}" if path else key
    if kind is float:
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    elif kind is int:
        ok = isinstance(value, int) and not isinstance(value, bool)
    else:
        ok = isinstance(value, kind)
    if not ok:
        raise SchemaError(f"expected {getattr(kind, '__name__', kind)}, got {type(value).__name__}", line, where)
    return value


def _grasp_from_dict(d: Any, path: str, line: int) -> GraspRect:
    values = {k: _field(d, k, float, path, line) for k in ("x", "y", "theta", "width", "height")}
    quality = _field(d, "quality", float, path, line) if isinstance(d, dict) and "quality" in d else 1.0
    class_id = _field(d, "class_id", int, path, line)
    try:
        return GraspRect(quality=quality, class_id=class_id, **values)
    except ValueError as e:
        raise SchemaError(str(e), line, path) from e


def _object_from_dict(d: Any, path: str, line: int) -> SceneObject:
    class_id = _field(d, "class_id", int, path, line)
    class_name = _field(d, "class_name", str, path, line)
    box_values = _field(d, "box", list, path, line)
    if len(box_values) != 4 or not all(isinstance(v, (int, float)) for v in box_values):
        raise SchemaError("expected [x_min, y_min, x_max, y_max]", line, f"{path}.box")
    try:
        box = Box.from_list(box_values)
    except ValueError as e:
        raise SchemaError(str(e), line, f"{path}.box") from e
    grasps = [
        _grasp_from_dict(g, f"{path}.grasps[{i}]", line)
        for i, g in enumerate(_field(d, "grasps", list, path, line))
    ]
    score = _field(d, "score", float, path, line) if "score" in d else None
    ref = _field(d, "instance_mask_ref", str, path, line) if "instance_mask_ref" in d else None
    return SceneObject(
        class_id=class_id, class_name=class_name, box=box,
        grasps=grasps, instance_mask_ref=ref, score=score,
    )


def scene_from_dict(d: Any, line: Optional[int] = None) -> Scene:
    scene_id = _field(d, "scene_id", str, "", line)
    size = _field(d, "image_size", list, "", line)
    if len(size) != 2 or not all(isinstance(v, int) and not isinstance(v, bool) for v in size):
        raise SchemaError("expected [h, w] integers", line, "image_size")
    objects = [
        _object_from_dict(o, f"objects[{i}]", line)
        for i, o in enumerate(_field(d, "objects", list, "", line))
    ]
    scene = Scene(scene_id=scene_id, image_size=(size[0], size[1]), objects=objects)
    try:
        return scene.validate()
    except SchemaError as e:
        raise SchemaError(str(e), line) from e


def parse_scenes(text: str) -> List[Scene]:
    """Parse JSON-lines text; blank lines are skipped."""
    scenes = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            record = json.loads(raw)
        except json.JSONDecodeError as e:
            raise SchemaError(f"invalid JSON: {e.msg}", lineno) from e
        scenes.append(scene_from_dict(record, lineno))
    return scenes


def dump_scenes(scenes: Iterable[Scene]) -> str:
    return "".join(json.dumps(scene_to_dict(s), sort_keys=True) + "\n" for s in scenes)


def read_scenes(path: Union[str, Path]) -> List[Scene]:
    scenes = parse_scenes(Path(path).read_text(encoding="utf-8"))
    logger.debug(f"Read {len(scenes)} scenes from {path}")
    return scenes


def write_scenes(path: Union[str, Path], scenes: Iterable[Scene]) -> int:
    scenes = list(scenes)
    Path(path).write_text(dump_scenes(scenes), encoding="utf-8")
    return len(scenes)


def load_instance_masks(scenes: Iterable[Scene], root: Union[str, Path]) -> int:
    """Load every referenced instance mask (refs relative to root) into memory; returns the count."""
    root = Path(root)
    loaded = 0
    for scene in scenes:
        for obj in scene.objects:
            if obj.instance_mask_ref is None:
                continue
            obj.instance_mask = (load_tensor(root / obj.instance_mask_ref) > MASK_THRESHOLD).astype(np.uint8)
            loaded += 1
    logger.debug(f"Loaded {loaded} instance masks from {root}")
    return loaded
