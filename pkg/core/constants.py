"""
Constants - channel names, activations and shared defaults.
Single source of truth for shared tunables.
"""
import math
from enum import Enum


class Activation(Enum):
    """Per-channel activation applied after linear assembly."""
    SIGMOID = "sigmoid"
    TANH = "tanh"
    IDENTITY = "identity"

    @classmethod
    def from_string(cls, s: str) -> 'Activation':
        try:
            return cls(s.lower())
        except ValueError:
            raise ValueError(f"unknown activation {s!r}") from None


# Coefficient channels in file row order
INSTANCE = "instance"
QUALITY = "quality"
SIN2T = "sin2t"
COS2T = "cos2t"
WIDTH = "width"
POSITION = "position"

STANDARD_CHANNELS = (INSTANCE, QUALITY, SIN2T, COS2T, WIDTH)

CHANNEL_ACTIVATIONS = {
    INSTANCE: Activation.SIGMOID,
    QUALITY: Activation.SIGMOID,
    SIN2T: Activation.TANH,
    COS2T: Activation.TANH,
    WIDTH: Activation.SIGMOID,
}

# Channel order of an encoded (5, h, w) grasp-map tensor
GRASP_MAP_CHANNELS = (QUALITY, POSITION, SIN2T, COS2T, WIDTH)

# Class-agnostic label
OBJECT_CLASS_ID = 0
OBJECT_CLASS_NAME = "object"

DEFAULT_PROTOTYPES = 32

# Codec
WIDTH_MAX = 150.0
CENTER_FRACTION = 1.0 / 3.0
Q_MIN = 0.1
DEFAULT_HEIGHT_RATIO = 0.5
PLATEAU_TOL = 1e-6

# Geometry
DEGENERATE_AREA = 1e-12
BOUNDARY_EPS = 1e-9

# NMS
NMS_IOU = 0.5
NMS_SCORE = 0.05
MASK_THRESHOLD = 0.5

# Metric
GRASP_IOU = 0.25
GRASP_ANGLE = math.radians(30.0)
MATCH_IOU = 0.5

SWEEP_IOUS = (0.25, 0.30, 0.35)
SWEEP_ANGLES_DEG = (5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
SWEEP_HEADER = ("iou_thr", "angle_thr", "image_acc", "object_acc", "n_scenes", "n_objects")

# Loss
BCE_EPS = 1e-7
GRADCHECK_STEP = 1e-3

# Selftest
SELFTEST_IOU_TOL = 0.02
SELFTEST_GRADCHECK_TOL = 1e-4
SELFTEST_CANVAS = 256.0
SELFTEST_EXTENTS = (4.0, 64.0)

# Benchmark: 138x138x32 prototypes, 16 detections
BENCH_SIZE = 138
BENCH_DETECTIONS = 16
THROUGHPUT_BUDGET_MS = 25.0

# Importers
JACQUARD_IMAGE_SIZE = (1024, 1024)
OCID_IMAGE_SIZE = (480, 640)
MIN_CORNER_AREA = 1.0

# GKT1 tensor file
TENSOR_MAGIC = b"GKT1"
