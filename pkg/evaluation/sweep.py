"""
Threshold sweep - accuracy over an IoU x angle grid, written as CSV.
"""
import csv
import io
import math
from dataclasses import dataclass, replace
from typing import List, Sequence

from core.config import MetricConfig
from core.constants import SWEEP_ANGLES_DEG, SWEEP_HEADER, SWEEP_IOUS
from core.scene import Scene
from evaluation.report import evaluate


@dataclass(frozen=True)
class SweepRow:
    iou_thr: float
    angle_thr_deg: float
    image_acc: float
    object_acc: float
    n_scenes: int
    n_objects: int


def threshold_sweep(
    pred: Sequence[Scene],
    gt: Sequence[Scene],
    ious: Sequence[float] = SWEEP_IOUS,
    angles_deg: Sequence[float] = SWEEP_ANGLES_DEG,
    cfg: MetricConfig = MetricConfig(),
) -> List[SweepRow]:
    """Evaluate every (iou, angle) cell; rows are iou-major."""
    if not ious or not angles_deg:
        raise ValueError("threshold lists must not be empty")
    rows = []
    for iou in ious:
        for angle in angles_deg:
            report = evaluate(pred, gt, replace(cfg, iou_thr=iou, angle_thr=math.radians(angle)))
            rows.append(SweepRow(iou, angle, report.image_accuracy, report.object_accuracy,
                                 report.n_scenes, report.n_objects))
    return rows


def sweep_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for r in rows:
        writer.writerow([f"{r.iou_thr:.2f}", f"{r.angle_thr_deg:g}", f"{r.image_acc:.6f}",
                         f"{r.object_acc:.6f}", r.n_scenes, r.n_objects])
    return buf.getvalue()
