"""
Dataset-level evaluation.
Object-level accuracy (instance-wise, via box matching) and image-level
accuracy (best-scoring detection per image, Jacquard style).
"""
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from core.config import MetricConfig
from core.errors import SceneMismatchError
from core.scene import Scene
from evaluation.metric import any_grasp_valid, mask_iou, match_detections

logger = logging.getLogger(__name__)

VALID = "valid"
INVALID = "invalid"
MISSED = "missed"


@dataclass
class EvalReport:
    """Evaluation outcome; accuracies are ratios of the counts."""
    per_scene: Dict[str, bool] = field(default_factory=dict)
    per_object: List[Tuple[str, int, str]] = field(default_factory=list)
    counts: Counter = field(default_factory=Counter)

    @property
    def n_scenes(self) -> int:
        return self.counts["scenes"]

    @property
    def n_objects(self) -> int:
        return self.counts["objects"]

    @property
    def image_accuracy(self) -> float:
        return self.counts["valid_scenes"] / self.n_scenes if self.n_scenes else 0.0

    @property
    def object_accuracy(self) -> float:
        return self.counts["valid_objects"] / self.n_objects if self.n_objects else 0.0

    def to_dict(self) -> dict:
        keys = ("scenes", "objects", "matched", "false_positives", "missed", "valid_objects",
                "invalid_objects", "valid_scenes", "mask_pairs", "mask_matches")
        return {
            "image_accuracy": self.image_accuracy,
            "object_accuracy": self.object_accuracy,
            "counts": {k: self.counts[k] for k in keys},
            "per_scene": dict(sorted(self.per_scene.items())),
            "per_object": [
                {"scene_id": s, "object": i, "status": status}
                for s, i, status in sorted(self.per_object)
            ],
        }


def align_scenes(pred: Sequence[Scene], gt: Sequence[Scene]) -> List[Tuple[Scene, Scene]]:
    """Pair scenes by id; both sides must hold exactly the same unique ids."""
    pred_by_id = {s.scene_id: s for s in pred}
    gt_by_id = {s.scene_id: s for s in gt}
    if len(pred_by_id) != len(pred) or len(gt_by_id) != len(gt):
        raise SceneMismatchError("duplicate scene ids")
    if pred_by_id.keys() != gt_by_id.keys():
        only_pred = sorted(pred_by_id.keys() - gt_by_id.keys())
        only_gt = sorted(gt_by_id.keys() - pred_by_id.keys())
        raise SceneMismatchError(f"scene ids differ: only in predictions {only_pred[:5]}, "
                                 f"only in ground truth {only_gt[:5]}")
    return [(pred_by_id[k], gt_by_id[k]) for k in sorted(gt_by_id)]


def evaluate_scene(pred: Scene, gt: Scene, cfg: MetricConfig, report: EvalReport) -> None:
    matching = match_detections(pred, gt, cfg.match_iou)
    by_gt = {j: i for i, j in matching.items()}

    report.counts["scenes"] += 1
    report.counts["objects"] += len(gt.objects)
    report.counts["matched"] += len(matching)
    report.counts["false_positives"] += len(pred.objects) - len(matching)

    for j, g in enumerate(gt.objects):
        if j not in by_gt:
            status = MISSED
        else:
            p = pred.objects[by_gt[j]]
            ok = any_grasp_valid(p.grasps, g.grasps, cfg, p.class_id == g.class_id)
            status = VALID if ok else INVALID
            if p.instance_mask is not None and g.instance_mask is not None:
                # diagnostic only, never part of the accuracies
                report.counts["mask_pairs"] += 1
                report.counts["mask_matches"] += int(mask_iou(p.instance_mask, g.instance_mask) >= cfg.match_iou)
        report.counts[{VALID: "valid_objects", INVALID: "invalid_objects", MISSED: "missed"}[status]] += 1
        report.per_object.append((gt.scene_id, j, status))

    best = pred.best_object()
    scene_ok = best is not None and any(
        any_grasp_valid(best.grasps, g.grasps, cfg, best.class_id == g.class_id) for g in gt.objects
    )
    report.per_scene[gt.scene_id] = scene_ok
    report.counts["valid_scenes"] += int(scene_ok)


def evaluate(pred: Sequence[Scene], gt: Sequence[Scene], cfg: MetricConfig = MetricConfig()) -> EvalReport:
    """
    Score predictions against ground truth.

    Raises:
        SceneMismatchError: scene ids do not align 1:1
    """
    report = EvalReport()
    for p, g in align_scenes(pred, gt):
        evaluate_scene(p, g, cfg, report)
    logger.debug(f"Evaluated {report.n_scenes} scenes: image_acc={report.image_accuracy:.4f} "
                 f"object_acc={report.object_accuracy:.4f}")
    return report
