"""
Grasp validity metric.
A grasp is valid when its class is right, its angle is within angle_thr of a
ground-truth grasp and their rotated IoU is strictly greater than iou_thr.
"""
from typing import Dict, Sequence

import numpy as np

from core.config import MetricConfig
from core.errors import DimensionMismatchError
from core.geometry import aabb_iou, angle_delta, rotated_iou
from core.grasp import GraspRect
from core.scene import Scene


def match_detections(pred: Scene, gt: Scene, match_iou: float) -> Dict[int, int]:
    """
    Greedy one-to-one matching of predicted to ground-truth objects by box IoU.

    Pairs are taken by descending IoU (ties: pred index, then gt index);
    pairs below match_iou stay unmatched.

    Returns:
        pred object index -> gt object index
    """
    pairs = []
    for i, p in enumerate(pred.objects):
        for j, g in enumerate(gt.objects):
            iou = aabb_iou(p.box, g.box)
            if iou >= match_iou and iou > 0:
                pairs.append((-iou, i, j))
    pairs.sort()

    matched: Dict[int, int] = {}
    taken = set()
    for _, i, j in pairs:
        if i in matched or j in taken:
            continue
        matched[i] = j
        taken.add(j)
    return matched


def grasp_valid(pred: GraspRect, gt_grasps: Sequence[GraspRect], cfg: MetricConfig, class_ok: bool) -> bool:
    if cfg.require_class and not class_ok:
        return False
    return any(
        angle_delta(pred.theta, g.theta) <= cfg.angle_thr and rotated_iou(pred, g) > cfg.iou_thr
        for g in gt_grasps
    )


def any_grasp_valid(grasps: Sequence[GraspRect], gt_grasps: Sequence[GraspRect], cfg: MetricConfig,
                    class_ok: bool) -> bool:
    """Whether one of the leading cfg.top_n predicted grasps is valid."""
    if not gt_grasps:
        return False
    return any(grasp_valid(g, gt_grasps, cfg, class_ok) for g in grasps[:cfg.top_n])


def mask_iou(a: np.ndarray, b: np.ndarray) -> float:
    """IoU of two binary masks of the same shape; 0 when both are empty."""
    if a.shape != b.shape:
        raise DimensionMismatchError(f"instance masks differ in shape: {a.shape} vs {b.shape}")
    a, b = a > 0, b > 0
    union = np.count_nonzero(a | b)
    return np.count_nonzero(a & b) / union if union else 0.0
