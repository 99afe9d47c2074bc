"""
Class-aware greedy non-maximum suppression.
"""
import logging
from typing import List, Sequence

import numpy as np

from core.constants import NMS_IOU, NMS_SCORE
from synthesis.assembly import Detection

logger = logging.getLogger(__name__)


def nms(dets: Sequence[Detection], iou_thr: float = NMS_IOU, score_thr: float = NMS_SCORE) -> List[Detection]:
    """
    Greedy NMS per class.

    Detections below score_thr are dropped, the rest visited by descending
    score (ties by input index). A detection is suppressed when its box IoU
    with an already kept detection of the same class exceeds iou_thr.

    Returns:
        Kept detections in score order
    """
    if not dets:
        return []

    scores = np.array([d.score for d in dets])
    boxes = np.array([d.box.as_list() for d in dets], dtype=np.float64)
    classes = np.array([d.class_id for d in dets])
    x1, y1, x2, y2 = boxes.T
    areas = (x2 - x1) * (y2 - y1)

    # lexsort: last key is primary
    order = np.lexsort((np.arange(len(dets)), -scores))
    order = order[scores[order] >= score_thr]

    keep: List[int] = []
    suppressed = np.zeros(len(dets), dtype=bool)
    for pos, i in enumerate(order):
        if suppressed[i]:
            continue
        keep.append(int(i))
        rest = order[pos + 1:]
        rest = rest[(classes[rest] == classes[i]) & ~suppressed[rest]]
        if rest.size == 0:
            continue
        iw = np.maximum(0.0, np.minimum(x2[i], x2[rest]) - np.maximum(x1[i], x1[rest]))
        ih = np.maximum(0.0, np.minimum(y2[i], y2[rest]) - np.maximum(y1[i], y1[rest]))
        inter = iw * ih
        union = areas[i] + areas[rest] - inter
        ovr = np.divide(inter, union, out=np.zeros_like(inter), where=union > 0)
        suppressed[rest[ovr > iou_thr]] = True

    logger.debug(f"NMS kept {len(keep)}/{len(dets)} detections")
    return [dets[i] for i in keep]
