"""Core module - grasp geometry, scenes, configuration and errors."""
from .config import CodecConfig, LossWeights, MetricConfig, NmsConfig
from .errors import GraspKitError
from .grasp import Box, GraspRect, Polygon
from .scene import Scene, SceneObject

__all__ = [
    'Box', 'CodecConfig', 'GraspKitError', 'GraspRect', 'LossWeights', 'MetricConfig',
    'NmsConfig', 'Polygon', 'Scene', 'SceneObject',
]
