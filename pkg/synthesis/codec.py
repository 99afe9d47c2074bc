"""
Grasp map codec.
Encodes grasp rectangles into the per-object quality / position / sin2t /
cos2t / width stack and decodes grasps back out of it.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy import ndimage
from scipy.special import expit

from core.config import CodecConfig
from core.constants import BOUNDARY_EPS, GRASP_MAP_CHANNELS, OBJECT_CLASS_ID
from core.errors import DimensionMismatchError, OutOfBoundsError
from core.geometry import points_in_rect, rect_local_coords
from core.grasp import Box, GraspRect

logger = logging.getLogger(__name__)

_EIGHT_NEIGHBOURS = np.ones((3, 3), dtype=bool)
_OFFSETS = [(dr, dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1) if (dr, dc) != (0, 0)]


@dataclass(frozen=True)
class GraspMaps:
    """Per-object target maps, all h x w."""
    quality: np.ndarray
    position: np.ndarray
    sin2t: np.ndarray
    cos2t: np.ndarray
    width: np.ndarray

    def __post_init__(self):
        shapes = {m.shape for m in self.channels()}
        if len(shapes) != 1 or len(next(iter(shapes))) != 2:
            raise DimensionMismatchError(f"grasp maps must share one 2D shape, got {sorted(shapes)}")

    @property
    def shape(self) -> Tuple[int, int]:
        return self.quality.shape

    def channels(self) -> Tuple[np.ndarray, ...]:
        return tuple(getattr(self, name) for name in GRASP_MAP_CHANNELS)

    def to_tensor(self) -> np.ndarray:
        """Stack into a (5, h, w) array in GRASP_MAP_CHANNELS order."""
        return np.stack(self.channels())

    @classmethod
    def from_tensor(cls, tensor: np.ndarray) -> 'GraspMaps':
        if tensor.ndim != 3 or tensor.shape[0] != len(GRASP_MAP_CHANNELS):
            raise DimensionMismatchError(f"expected a (5, h, w) tensor, got {tensor.shape}")
        data = np.asarray(tensor, dtype=np.float64)
        return cls(**{name: data[i] for i, name in enumerate(GRASP_MAP_CHANNELS)})

    @classmethod
    def zeros(cls, h: int, w: int) -> 'GraspMaps':
        return cls(*(np.zeros((h, w)) for _ in GRASP_MAP_CHANNELS))


def quality_transfer(count, cfg: CodecConfig):
    """Overlap count to quality: 2*sigmoid(c) - 1, or sigmoid(c) in raw mode."""
    s = expit(np.asarray(count, dtype=np.float64))
    return s if cfg.raw_sigmoid else 2.0 * s - 1.0


def overlap_count(px: Tuple[float, float], grasps: Sequence[GraspRect]) -> int:
    """Number of grasp rectangles containing the pixel center (boundary inclusive)."""
    x = np.array([px[0]], dtype=np.float64)
    y = np.array([px[1]], dtype=np.float64)
    return sum(int(points_in_rect(g, x, y)[0]) for g in grasps)


def encode_grasps(grasps: Sequence[GraspRect], h: int, w: int, cfg: CodecConfig = CodecConfig()) -> GraspMaps:
    """
    Embed one object's grasps into its target maps.

    Later grasps overwrite earlier ones where center regions overlap.

    Raises:
        OutOfBoundsError: if any grasp center is outside the h x w canvas
    """
    offending = [g for g in grasps if not (0 <= g.x < w and 0 <= g.y < h)]
    if offending:
        raise OutOfBoundsError(f"grasp centers outside {h}x{w} canvas", offending)

    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    count = np.zeros((h, w), dtype=np.int64)
    position = np.zeros((h, w))
    sin2t = np.zeros((h, w))
    cos2t = np.zeros((h, w))
    width = np.zeros((h, w))

    for g in grasps:
        a, b = rect_local_coords(g, xs, ys)
        across = np.abs(b) <= g.height / 2.0 + BOUNDARY_EPS
        count += (np.abs(a) <= g.width / 2.0 + BOUNDARY_EPS) & across
        center = (np.abs(a) <= cfg.center_fraction * g.width / 2.0 + BOUNDARY_EPS) & across
        position[center] = 1.0
        sin2t[center] = math.sin(2.0 * g.theta)
        cos2t[center] = math.cos(2.0 * g.theta)
        width[center] = min(g.width / cfg.width_max, 1.0)

    return GraspMaps(
        quality=quality_transfer(count, cfg),
        position=position,
        sin2t=sin2t,
        cos2t=cos2t,
        width=width,
    )


def _regional_maxima(q: np.ndarray, tol: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Label flat regional maxima of q.

    Returns the label image and the ids of components that are maxima:
    every pixel outside the component but touching it is lower by more than tol.
    """
    neighbourhood_max = ndimage.maximum_filter(q, size=3, mode='constant', cval=-np.inf)
    candidate = q >= neighbourhood_max - tol
    labels, n = ndimage.label(candidate, structure=_EIGHT_NEIGHBOURS)
    if n == 0:
        return labels, np.empty(0, dtype=np.int64)

    h, w = q.shape
    padded_q = np.pad(q, 1, constant_values=-np.inf)
    padded_l = np.pad(labels, 1, constant_values=0)
    outside = np.full((h, w), -np.inf)
    for dr, dc in _OFFSETS:
        nq = padded_q[1 + dr:1 + dr + h, 1 + dc:1 + dc + w]
        nl = padded_l[1 + dr:1 + dr + h, 1 + dc:1 + dc + w]
        np.maximum(outside, np.where(nl != labels, nq, -np.inf), out=outside)

    index = np.arange(1, n + 1)
    values = np.asarray(ndimage.minimum(q, labels, index))
    border = np.asarray(ndimage.maximum(outside, labels, index))
    return labels, index[border < values - tol]


def _representative(labels: np.ndarray, label: int, region: Tuple[slice, slice]) -> Tuple[int, int]:
    """Pixel of a component nearest its centroid; ties go to row-major order."""
    rows, cols = np.nonzero(labels[region] == label)
    rows = rows + region[0].start
    cols = cols + region[1].start
    if rows.size == 1:
        return int(rows[0]), int(cols[0])
    d = (rows - rows.mean()) ** 2 + (cols - cols.mean()) ** 2
    i = int(np.argmin(d))
    return int(rows[i]), int(cols[i])


def decode_grasps(
    maps: GraspMaps,
    region: Box,
    top_n: int = 1,
    cfg: CodecConfig = CodecConfig(),
    class_id: int = OBJECT_CLASS_ID,
) -> List[GraspRect]:
    """
    Infer grasps from local maxima of the quality map inside region.

    Flat maxima (within cfg.plateau_tol) collapse to the pixel nearest their
    centroid. Angle and width are read at the selected pixel.

    Returns:
        Up to top_n grasps, quality descending, ties in row-major order
    """
    h, w = maps.shape
    rows, cols = region.clamp(h, w).pixel_slices()
    q = maps.quality[rows, cols]
    if q.size == 0:
        return []

    labels, maxima = _regional_maxima(q, cfg.plateau_tol)
    if maxima.size == 0:
        return []
    peaks = np.asarray(ndimage.maximum(q, labels, maxima))
    keep = peaks >= cfg.q_min
    maxima, peaks = maxima[keep], peaks[keep]
    if maxima.size == 0:
        return []

    # Walk components by peak until top_n usable ones are in hand and no
    # remaining peak can outrank them.
    slices = ndimage.find_objects(labels)
    candidates = []
    for i in np.argsort(-peaks, kind='stable'):
        if len(candidates) >= top_n:
            floor = sorted((t[0] for t in candidates), reverse=True)[top_n - 1]
            if peaks[i] < floor - cfg.plateau_tol:
                break
        label = int(maxima[i])
        r, c = _representative(labels, label, slices[label - 1])
        quality = float(q[r, c])
        y, x = r + rows.start, c + cols.start
        if quality < cfg.q_min:
            continue
        if maps.width[y, x] <= 0:
            logger.debug(f"Peak at ({x}, {y}) has no width support, skipped")
            continue
        candidates.append((quality, r, c))
    candidates.sort(key=lambda t: (-t[0], t[1], t[2]))

    grasps: List[GraspRect] = []
    for quality, r, c in candidates[:top_n]:
        y, x = r + rows.start, c + cols.start
        width = float(maps.width[y, x]) * cfg.width_max
        theta = 0.5 * math.atan2(float(maps.sin2t[y, x]), float(maps.cos2t[y, x]))
        grasps.append(GraspRect(
            x=float(x),
            y=float(y),
            theta=theta,
            width=width,
            height=width * cfg.default_height_ratio,
            quality=min(max(quality, 0.0), 1.0),
            class_id=class_id,
        ))
    return grasps
