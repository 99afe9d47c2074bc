"""
Post-network inference pipeline.
NMS -> assemble -> crop by box -> decode grasps inside the box -> Scene.
"""
import logging
from typing import Sequence

import numpy as np

from core.config import CodecConfig, NmsConfig
from core.constants import MASK_THRESHOLD
from core.scene import Scene, SceneObject
from synthesis.assembly import Detection, PrototypeStack, assemble_cropped
from synthesis.codec import GraspMaps, decode_grasps
from synthesis.nms import nms
from utils.metrics import get_metrics

logger = logging.getLogger(__name__)


def detection_to_object(
    protos: PrototypeStack,
    det: Detection,
    cfg: CodecConfig,
    top_n: int = 1,
    scale: float = 1.0,
) -> SceneObject:
    """Assemble, crop and decode one surviving detection; det is left untouched."""
    box = det.box.clamp(protos.h, protos.w)
    masks = assemble_cropped(protos, det.coeffs, box)

    # Position is read from the quality channel; no separate map is predicted
    maps = GraspMaps(
        quality=masks.quality,
        position=np.zeros_like(masks.quality),
        sin2t=masks.sin2t,
        cos2t=masks.cos2t,
        width=masks.width,
    )
    grasps = decode_grasps(maps, box, top_n=top_n, cfg=cfg, class_id=det.class_id)
    if scale != 1.0:
        grasps = [g.scaled(scale) for g in grasps]
        box = box.scaled(scale)

    return SceneObject(
        class_id=det.class_id,
        class_name=det.class_name,
        box=box,
        grasps=grasps,
        score=det.score,
        instance_mask=(masks.instance > MASK_THRESHOLD).astype(np.uint8),
    )


def infer_scene(
    protos: PrototypeStack,
    dets: Sequence[Detection],
    cfg: CodecConfig = CodecConfig(),
    nms_cfg: NmsConfig = NmsConfig(),
    scene_id: str = "",
    scale: float = 1.0,
) -> Scene:
    """
    Turn one image's prototypes and raw detections into a prediction Scene.

    Every grasp inherits its detection's class, which is what ties grasps to
    objects without a separate assignment step.
    """
    survivors = nms(dets, iou_thr=nms_cfg.iou_thr, score_thr=nms_cfg.score_thr)
    metrics = get_metrics()
    metrics.detections_in += len(dets)
    metrics.detections_kept += len(survivors)

    objects = [detection_to_object(protos, d, cfg, nms_cfg.top_n, scale) for d in survivors]
    metrics.grasps_decoded += sum(len(o.grasps) for o in objects)
    size = (int(round(protos.h * scale)), int(round(protos.w * scale)))
    logger.debug(f"Scene {scene_id}: {len(survivors)}/{len(dets)} detections, "
                 f"{sum(1 for o in objects if o.grasps)} with grasps")
    return Scene(scene_id=scene_id, image_size=size, objects=objects)

