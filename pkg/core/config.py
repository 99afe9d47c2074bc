"""
Configuration dataclasses.
Defaults come from core.constants; CLI flags override through dataclasses.replace.
"""
import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from core import constants as C
from core.errors import ConfigError


def _check(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


@dataclass(frozen=True)
class CodecConfig:
    """
    Grasp map encoding/decoding parameters.

    Attributes:
        width_max: Width normalization constant (pixels)
        center_fraction: Fraction of the rectangle length carrying position/angle/width
        q_min: Decode threshold on quality
        default_height_ratio: Jaw size as a fraction of width when a dataset omits it
        raw_sigmoid: Use sigmoid(c) instead of 2*sigmoid(c) - 1 for quality
        plateau_tol: Values within this tolerance count as one flat maximum
    """
    width_max: float = C.WIDTH_MAX
    center_fraction: float = C.CENTER_FRACTION
    q_min: float = C.Q_MIN
    default_height_ratio: float = C.DEFAULT_HEIGHT_RATIO
    raw_sigmoid: bool = False
    plateau_tol: float = C.PLATEAU_TOL

    def __post_init__(self):
        _check(self.width_max > 0, f"width_max must be > 0, got {self.width_max}")
        _check(0 < self.center_fraction <= 1, f"center_fraction must be in (0, 1], got {self.center_fraction}")
        _check(0 <= self.q_min < 1, f"q_min must be in [0, 1), got {self.q_min}")
        _check(self.default_height_ratio > 0, "default_height_ratio must be > 0")
        _check(self.plateau_tol >= 0, "plateau_tol must be >= 0")


@dataclass(frozen=True)
class NmsConfig:
    iou_thr: float = C.NMS_IOU
    score_thr: float = C.NMS_SCORE
    top_n: int = 1

    def __post_init__(self):
        _check(0 <= self.iou_thr <= 1, f"nms iou_thr must be in [0, 1], got {self.iou_thr}")
        _check(0 <= self.score_thr <= 1, f"score_thr must be in [0, 1], got {self.score_thr}")
        _check(self.top_n >= 1, f"top_n must be >= 1, got {self.top_n}")


@dataclass(frozen=True)
class MetricConfig:
    """
    Grasp validity thresholds.

    Attributes:
        iou_thr: Rotated IoU must be strictly greater than this
        angle_thr: Maximum angle difference (radians)
        require_class: Predicted class must equal the ground-truth class
        match_iou: Box IoU needed to pair a detection with a ground-truth object
        top_n: Number of leading grasps per object that may satisfy the metric
    """
    iou_thr: float = C.GRASP_IOU
    angle_thr: float = C.GRASP_ANGLE
    require_class: bool = True
    match_iou: float = C.MATCH_IOU
    top_n: int = 1

    def __post_init__(self):
        _check(0 <= self.iou_thr < 1, f"iou_thr must be in [0, 1), got {self.iou_thr}")
        _check(0 <= self.angle_thr <= math.pi / 2, f"angle_thr must be in [0, pi/2], got {self.angle_thr}")
        _check(0 < self.match_iou <= 1, f"match_iou must be in (0, 1], got {self.match_iou}")
        _check(self.top_n >= 1, f"top_n must be >= 1, got {self.top_n}")


@dataclass(frozen=True)
class LossWeights:
    """Outer (a_cls..a_smask) and inner grasp (a_p..a_w) loss weights."""
    a_cls: float = 1.0
    a_box: float = 1.0
    a_imask: float = 1.0
    a_gr: float = 1.0
    a_smask: float = 1.0
    a_p: float = 1.0
    a_q: float = 1.0
    a_sin: float = 1.0
    a_cos: float = 1.0
    a_w: float = 1.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            _check(math.isfinite(value) and value >= 0, f"{f.name} must be finite and >= 0, got {value}")

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_file(cls, path: Path) -> 'LossWeights':
        """Load weights from a JSON object; missing keys keep their defaults."""
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a JSON object of weights")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"{path}: unknown weight(s) {sorted(unknown)}")
        try:
            return cls(**{k: float(v) for k, v in data.items()})
        except (TypeError, ValueError) as e:
            raise ConfigError(f"{path}: {e}") from e
