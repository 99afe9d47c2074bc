"""
Composite training loss.
Grasp sub-losses (smooth-L1 / BCE on assembled maps) plus the weighted total;
detection-side terms enter as externally computed scalars.
"""
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

import numpy as np

from core.config import LossWeights
from core.constants import BCE_EPS
from core.errors import DimensionMismatchError
from core.grasp import Box
from synthesis.assembly import MaskSet
from synthesis.codec import GraspMaps


def _check_shapes(*arrays: np.ndarray) -> None:
    shapes = {a.shape for a in arrays}
    if len(shapes) != 1:
        raise DimensionMismatchError(f"loss inputs differ in shape: {sorted(shapes)}")


def smooth_l1(pred: np.ndarray, target: np.ndarray, valid: np.ndarray) -> float:
    """Mean smooth-L1 over valid pixels; 0 when nothing is valid."""
    _check_shapes(pred, target, valid)
    mask = valid.astype(bool)
    n = np.count_nonzero(mask)
    if n == 0:
        return 0.0
    d = np.abs(pred[mask] - target[mask])
    return float(np.where(d < 1.0, 0.5 * d * d, d - 0.5).sum() / n)


def bce(pred: np.ndarray, target: np.ndarray, valid: np.ndarray) -> float:
    """Mean binary cross entropy over valid pixels, pred clamped to [eps, 1 - eps]."""
    _check_shapes(pred, target, valid)
    mask = valid.astype(bool)
    n = np.count_nonzero(mask)
    if n == 0:
        return 0.0
    p = np.clip(pred[mask], BCE_EPS, 1.0 - BCE_EPS)
    t = target[mask]
    return float(-(t * np.log(p) + (1.0 - t) * np.log(1.0 - p)).sum() / n)


@dataclass
class LossReport:
    """Per-term loss values and the weighted total."""
    l_cls: float = 0.0
    l_box: float = 0.0
    l_imask: float = 0.0
    l_smask: float = 0.0
    l_gr_p: float = 0.0
    l_gr_q: float = 0.0
    l_gr_sin: float = 0.0
    l_gr_cos: float = 0.0
    l_gr_w: float = 0.0
    l_gr: float = 0.0
    total: float = 0.0
    weights: Dict[str, float] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "l_cls": self.l_cls, "l_box": self.l_box, "l_imask": self.l_imask,
            "l_smask": self.l_smask, "l_gr_p": self.l_gr_p, "l_gr_q": self.l_gr_q,
            "l_gr_sin": self.l_gr_sin, "l_gr_cos": self.l_gr_cos, "l_gr_w": self.l_gr_w,
            "l_gr": self.l_gr, "total": self.total, "weights": dict(self.weights),
        }


def _grasp_total(w: LossWeights, p: float, q: float, s: float, c: float, wd: float) -> float:
    return w.a_p * p + w.a_q * q + w.a_sin * s + w.a_cos * c + w.a_w * wd


def grasp_loss(
    pred: MaskSet,
    gt: GraspMaps,
    w: LossWeights = LossWeights(),
    box: Optional[Box] = None,
    full_image: bool = False,
) -> LossReport:
    """
    Grasp sub-losses for one object.

    Position is scored as BCE of the predicted quality channel against the
    binary position target. Angle and width are regressed only on the
    position support unless full_image is set. With box, the predicted maps
    are cropped by that (ground-truth) box first.
    """
    _check_shapes(pred.quality, pred.sin2t, pred.cos2t, pred.width, gt.quality)
    if box is not None:
        pred = pred.cropped(box)
    everywhere = np.ones(gt.shape, dtype=bool)
    support = everywhere if full_image else gt.position > 0

    l_p = bce(pred.quality, gt.position, everywhere)
    l_q = smooth_l1(pred.quality, gt.quality, everywhere)
    l_sin = smooth_l1(pred.sin2t, gt.sin2t, support)
    l_cos = smooth_l1(pred.cos2t, gt.cos2t, support)
    l_w = smooth_l1(pred.width, gt.width, support)
    total = _grasp_total(w, l_p, l_q, l_sin, l_cos, l_w)
    return LossReport(
        l_gr_p=l_p, l_gr_q=l_q, l_gr_sin=l_sin, l_gr_cos=l_cos, l_gr_w=l_w,
        l_gr=total, total=total, weights=w.as_dict(),
    )


def total_loss(
    grasp_reports: Sequence[LossReport],
    l_cls: float,
    l_box: float,
    l_imask: float,
    l_smask: float,
    w: LossWeights = LossWeights(),
) -> LossReport:
    """
    Weighted sum of all terms. The grasp term is the mean of the per-object
    grasp losses (0 with no objects).
    """
    n = len(grasp_reports)

    def mean(attr: str) -> float:
        return sum(getattr(r, attr) for r in grasp_reports) / n if n else 0.0

    report = LossReport(
        l_cls=l_cls, l_box=l_box, l_imask=l_imask, l_smask=l_smask,
        l_gr_p=mean("l_gr_p"), l_gr_q=mean("l_gr_q"), l_gr_sin=mean("l_gr_sin"),
        l_gr_cos=mean("l_gr_cos"), l_gr_w=mean("l_gr_w"), l_gr=mean("l_gr"),
        weights=w.as_dict(),
    )
    report.total = (
        w.a_cls * l_cls
        + w.a_box * l_box
        + w.a_imask * l_imask
        + w.a_gr * report.l_gr
        + w.a_smask * l_smask
    )
    return report
