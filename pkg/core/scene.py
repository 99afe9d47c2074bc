"""
Scene model - one image's ground truth or predictions.
Importers, inference and the evaluator all exchange these values.
"""
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np

from core.constants import OBJECT_CLASS_ID, OBJECT_CLASS_NAME
from core.errors import OutOfBoundsError, SchemaError
from core.grasp import Box, GraspRect


@dataclass
class SceneObject:
    """
    One object instance with its affiliated grasps.

    Attributes:
        class_id: Object class
        class_name: Human-readable class
        box: Object bounding box
        grasps: Grasps, best first for predictions
        instance_mask_ref: Optional path to a stored instance mask
        score: Detection score (predictions only)
        instance_mask: Binary mask kept in memory (never serialized)
    """
    class_id: int
    class_name: str
    box: Box
    grasps: List[GraspRect] = field(default_factory=list)
    instance_mask_ref: Optional[str] = None
    score: Optional[float] = None
    instance_mask: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    @property
    def top_grasp(self) -> Optional[GraspRect]:
        return self.grasps[0] if self.grasps else None


@dataclass
class Scene:
    scene_id: str
    image_size: Tuple[int, int]
    objects: List[SceneObject] = field(default_factory=list)

    @property
    def height(self) -> int:
        return self.image_size[0]

    @property
    def width(self) -> int:
        return self.image_size[1]

    @property
    def grasp_count(self) -> int:
        return sum(len(o.grasps) for o in self.objects)

    def out_of_bounds(self) -> List[GraspRect]:
        h, w = self.image_size
        return [
            g for o in self.objects for g in o.grasps
            if not (0 <= g.x < w and 0 <= g.y < h)
        ]

    def validate(self) -> 'Scene':
        """Check scene invariants; raise on the first violation."""
        h, w = self.image_size
        if h <= 0 or w <= 0:
            raise SchemaError(f"image_size must be positive, got {self.image_size}", path="image_size")
        offending = self.out_of_bounds()
        if offending:
            raise OutOfBoundsError(f"scene {self.scene_id}: grasp centers outside {h}x{w}", offending)
        for i, obj in enumerate(self.objects):
            for j, g in enumerate(obj.grasps):
                if g.class_id != obj.class_id:
                    raise SchemaError(
                        f"grasp class {g.class_id} differs from object class {obj.class_id}",
                        path=f"objects[{i}].grasps[{j}].class_id",
                    )
        return self

    def best_object(self) -> Optional[SceneObject]:
        """Highest-scoring object; unscored objects count as 1.0, ties keep list order."""
        if not self.objects:
            return None
        return max(self.objects, key=lambda o: 1.0 if o.score is None else o.score)

    def class_agnostic(self) -> 'Scene':
        """Copy with every object and grasp relabelled as the generic 'object' class."""
        objects = [
            replace(
                o,
                class_id=OBJECT_CLASS_ID,
                class_name=OBJECT_CLASS_NAME,
                grasps=[g.with_class(OBJECT_CLASS_ID) for g in o.grasps],
            )
            for o in self.objects
        ]
        return replace(self, objects=objects)
