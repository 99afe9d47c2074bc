"""Ingest module - scene files, tensor files, detections and dataset importers."""
from .detections import SceneDetections, read_detections, write_detections
from .scenes import read_scenes, write_scenes
from .tensors import load_tensor, save_tensor

__all__ = [
    'SceneDetections', 'read_detections', 'write_detections', 'read_scenes', 'write_scenes',
    'load_tensor', 'save_tensor',
]
