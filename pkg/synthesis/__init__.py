"""Synthesis module - grasp map codec, mask assembly, NMS, inference and losses."""
from .assembly import CoefficientSet, Detection, MaskSet, PrototypeStack, assemble, assemble_cropped
from .codec import GraspMaps, decode_grasps, encode_grasps
from .inference import infer_scene
from .nms import nms

__all__ = [
    'CoefficientSet', 'Detection', 'MaskSet', 'PrototypeStack', 'assemble', 'assemble_cropped',
    'GraspMaps', 'decode_grasps', 'encode_grasps', 'infer_scene', 'nms',
]
