"""
Synthetic scenes and fitted coefficients.

Stands in for a trained backbone: ground-truth grasps are encoded into target
maps, the maps are mapped back through the inverse activations, and detection
coefficients are fit by least squares against a prototype bank that spans
those targets, so the infer -> eval pipeline can run offline.
"""
import math
from typing import List, Sequence, Tuple

import numpy as np
from scipy.special import logit

from core.config import CodecConfig
from core.constants import COS2T, DEFAULT_PROTOTYPES, INSTANCE, QUALITY, SIN2T, STANDARD_CHANNELS, WIDTH
from core.errors import ConfigError
from core.geometry import polygon_bounds
from core.grasp import Box, GraspRect
from core.scene import Scene, SceneObject
from ingest.detections import SceneDetections
from synthesis.assembly import CoefficientSet, Detection, PrototypeStack, crop_mask
from synthesis.codec import GraspMaps, encode_grasps

_SIGMOID_CLIP = 1e-4
_TANH_CLIP = 1e-6
CELL = 48


def synthetic_scenes(n: int, seed: int, size: int = 96, max_objects: int = 3) -> List[Scene]:
    """
    Scenes of up to max_objects objects in disjoint grid cells, one grasp
    each, integer centers and height = width / 2.
    """
    rng = np.random.default_rng(seed)
    cells_per_side = size // CELL
    cells = [(r, c) for r in range(cells_per_side) for c in range(cells_per_side)]
    if not cells:
        raise ConfigError(f"image size {size} is smaller than one {CELL}px cell")
    scenes = []
    for s in range(n):
        count = int(rng.integers(1, min(max_objects, len(cells)) + 1))
        chosen = rng.choice(len(cells), size=count, replace=False)
        objects = []
        for idx in sorted(chosen):
            r, c = cells[idx]
            class_id = int(rng.integers(1, 6))
            width = float(rng.integers(14, 31))
            grasp = GraspRect(
                x=float(c * CELL + CELL // 2 + rng.integers(-3, 4)),
                y=float(r * CELL + CELL // 2 + rng.integers(-3, 4)),
                theta=float(rng.uniform(-math.pi / 2, math.pi / 2)),
                width=width,
                height=width / 2,
                class_id=class_id,
            )
            bounds = polygon_bounds([grasp])
            box = Box(math.floor(bounds.x_min) - 2, math.floor(bounds.y_min) - 2,
                      math.ceil(bounds.x_max) + 3, math.ceil(bounds.y_max) + 3).clamp(size, size)
            objects.append(SceneObject(class_id=class_id, class_name=f"class{class_id}", box=box, grasps=[grasp]))
        scenes.append(Scene(scene_id=f"synth{s:04d}", image_size=(size, size), objects=objects))
    return scenes


def target_preactivations(maps: GraspMaps, box: Box) -> np.ndarray:
    """Invert the channel activations on an object's targets; h x w x 5 in STANDARD_CHANNELS order."""
    h, w = maps.shape
    instance = crop_mask(np.ones((h, w)), box)
    sig = {
        INSTANCE: instance,
        QUALITY: maps.quality,
        WIDTH: maps.width,
    }
    tanh = {SIN2T: maps.sin2t, COS2T: maps.cos2t}
    out = np.empty((h, w, len(STANDARD_CHANNELS)))
    for i, name in enumerate(STANDARD_CHANNELS):
        if name in sig:
            out[:, :, i] = logit(np.clip(sig[name], _SIGMOID_CLIP, 1 - _SIGMOID_CLIP))
        else:
            out[:, :, i] = np.arctanh(np.clip(tanh[name], -1 + _TANH_CLIP, 1 - _TANH_CLIP))
    return out


def fit_coefficients(protos: PrototypeStack, targets: np.ndarray) -> np.ndarray:
    """Least-squares coefficients C (N x k) with P C^T ~= targets (h x w x N)."""
    a = protos.data.reshape(-1, protos.k)
    b = targets.reshape(-1, targets.shape[2])
    solution, *_ = np.linalg.lstsq(a, b, rcond=None)
    return solution.T


def fit_scene(scene: Scene, rng: np.random.Generator, k: int = DEFAULT_PROTOTYPES,
              cfg: CodecConfig = CodecConfig()) -> SceneDetections:
    """
    Build prototypes whose span contains every object's targets, then fit
    one coefficient set per object.
    """
    h, w = scene.image_size
    targets = [
        target_preactivations(encode_grasps(o.grasps, h, w, cfg), o.box) for o in scene.objects
    ]
    needed = len(STANDARD_CHANNELS) * len(targets)
    if needed > k:
        raise ConfigError(f"scene {scene.scene_id} needs {needed} prototypes, k={k}")
    bank = [t[:, :, i] for t in targets for i in range(t.shape[2])]
    bank += [rng.normal(0.0, 1.0, (h, w)) for _ in range(k - needed)]
    # round through float32 so the fit matches what a GKT1 file stores
    protos = PrototypeStack(np.stack(bank, axis=2).astype(np.float32).astype(np.float64))

    n_ch = len(STANDARD_CHANNELS)
    detections = []
    for i, obj in enumerate(scene.objects):
        t = protos.data[:, :, i * n_ch:(i + 1) * n_ch]
        detections.append(Detection(
            class_id=obj.class_id,
            score=float(rng.uniform(0.6, 1.0)),
            box=obj.box,
            coeffs=CoefficientSet.from_matrix(fit_coefficients(protos, t)),
            class_name=obj.class_name,
        ))
    return SceneDetections(scene.scene_id, scene.image_size, protos, detections)


def build_fixture(scenes: Sequence[Scene], seed: int, k: int = DEFAULT_PROTOTYPES,
                  cfg: CodecConfig = CodecConfig()) -> List[SceneDetections]:
    rng = np.random.default_rng(seed)
    return [fit_scene(s, rng, k, cfg) for s in scenes]


def random_protos(rng: np.random.Generator, shape: Tuple[int, int, int], scale: float = 1.0) -> PrototypeStack:
    return PrototypeStack(rng.normal(0.0, scale, shape))


def random_coeffs(rng: np.random.Generator, k: int, scale: float = 1.0) -> CoefficientSet:
    return CoefficientSet.from_matrix(rng.normal(0.0, scale, (len(STANDARD_CHANNELS), k)))


def random_detections(rng: np.random.Generator, n: int, size: int, k: int,
                      box_range: Tuple[float, float] = (16.0, 32.0)) -> List[Detection]:
    """Detections with random boxes inside a size x size canvas and random coefficients."""
    lo, hi = box_range
    dets = []
    for _ in range(n):
        extent = rng.uniform(lo, hi, 2)
        x0 = float(rng.uniform(0, max(size - extent[0], 0.0)))
        y0 = float(rng.uniform(0, max(size - extent[1], 0.0)))
        dets.append(Detection(
            class_id=int(rng.integers(1, 6)),
            score=float(rng.uniform(0.5, 1.0)),
            box=Box(x0, y0, x0 + float(extent[0]), y0 + float(extent[1])).clamp(size, size),
            coeffs=random_coeffs(rng, k),
        ))
    return dets
