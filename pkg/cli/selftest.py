"""
Built-in property suites run by `graspkit selftest`.
Each suite draws random cases from a seeded generator and reports how many held.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from cli.fixtures import random_coeffs, random_protos
from core.config import CodecConfig, LossWeights
from core.constants import SELFTEST_CANVAS, SELFTEST_EXTENTS, SELFTEST_GRADCHECK_TOL, SELFTEST_IOU_TOL
from core.geometry import angle_delta, rasterized_iou, rotated_iou
from core.grasp import Box, GraspRect
from core.scene import Scene, SceneObject
from ingest.scenes import dump_scenes, parse_scenes
from ingest.tensors import read_tensor, write_tensor
from synthesis.assembly import CoefficientSet, Detection, assemble, crop_mask
from synthesis.codec import decode_grasps, encode_grasps
from synthesis.gradcheck import grad_check
from synthesis.nms import nms

logger = logging.getLogger(__name__)


@dataclass
class SuiteResult:
    name: str
    passed: int
    total: int

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    def __str__(self) -> str:
        return f"{self.name}: {self.passed}/{self.total} passed"


def _random_rect(rng: np.random.Generator, cx: float, cy: float, spread: float) -> GraspRect:
    return GraspRect(
        x=cx + float(rng.uniform(-spread, spread)),
        y=cy + float(rng.uniform(-spread, spread)),
        theta=float(rng.uniform(-math.pi / 2, math.pi / 2)),
        width=float(rng.uniform(8, 64)),
        height=float(rng.uniform(8, 64)),
    )


def _uniform_rect(rng: np.random.Generator) -> GraspRect:
    lo, hi = SELFTEST_EXTENTS
    return GraspRect(
        x=float(rng.uniform(0, SELFTEST_CANVAS)),
        y=float(rng.uniform(0, SELFTEST_CANVAS)),
        theta=float(rng.uniform(-math.pi / 2, math.pi / 2)),
        width=float(rng.uniform(lo, hi)),
        height=float(rng.uniform(lo, hi)),
    )


def suite_iou_oracle(rng: np.random.Generator, n: int = 1000, bias: float = 0.0) -> SuiteResult:
    """Exact rotated IoU against the rasterized estimate."""
    passed = 0
    for _ in range(n):
        a, b = _uniform_rect(rng), _uniform_rect(rng)
        got = rotated_iou(a, b) + bias
        if abs(got - rasterized_iou(a, b)) <= SELFTEST_IOU_TOL:
            passed += 1
        else:
            logger.debug(f"IoU mismatch for {a} vs {b}")
    return SuiteResult("iou-oracle", passed, n)


def suite_codec_roundtrip(rng: np.random.Generator, n: int = 200, cfg: CodecConfig = CodecConfig()) -> SuiteResult:
    """A single integer-centered grasp decodes back to itself."""
    size = 2 * int(cfg.width_max) + 20
    full = Box(0, 0, size, size)
    passed = 0
    for _ in range(n):
        width = float(rng.integers(10, int(cfg.width_max) + 1))
        g = GraspRect(
            x=float(size // 2 + rng.integers(-5, 6)),
            y=float(size // 2 + rng.integers(-5, 6)),
            theta=float(rng.uniform(-math.pi / 2, math.pi / 2)),
            width=width,
            height=width * cfg.default_height_ratio,
        )
        out = decode_grasps(encode_grasps([g], size, size, cfg), full, top_n=1, cfg=cfg)
        if (len(out) == 1 and math.hypot(out[0].x - g.x, out[0].y - g.y) <= 1.0
                and angle_delta(out[0].theta, g.theta) <= math.radians(1.0)
                and abs(out[0].width - g.width) <= 0.02 * g.width):
            passed += 1
        else:
            logger.debug(f"Codec round trip failed for {g}: {out}")
    return SuiteResult("codec-roundtrip", passed, n)


def suite_assembly(rng: np.random.Generator, n: int = 100) -> SuiteResult:
    """Activation ranges, linearity of the pre-activation and crop support."""
    passed = 0
    for _ in range(n):
        k = int(rng.integers(1, 17))
        protos = random_protos(rng, (16, 20, k))
        c1, c2 = random_coeffs(rng, k), random_coeffs(rng, k)
        m = assemble(protos, c1)
        ranges_ok = (
            all(np.all((x >= 0) & (x <= 1)) for x in (m.instance, m.quality, m.width))
            and all(np.all(np.abs(x) <= 1) for x in (m.sin2t, m.cos2t))
        )
        z_sum = protos.data @ (c1.matrix() + c2.matrix()).T
        z_split = protos.data @ c1.matrix().T + protos.data @ c2.matrix().T
        linear_ok = np.allclose(z_sum, z_split)
        box = Box(3, 2, 11, 9)
        cropped = crop_mask(m.quality, box)
        outside = cropped.copy()
        outside[box.pixel_slices()] = 0
        crop_ok = not outside.any()
        passed += int(ranges_ok and linear_ok and crop_ok)
    return SuiteResult("assembly", passed, n)


def gradcheck_case(rng: np.random.Generator, k: int):
    # Angles near odd multiples of pi/8 keep |sin2t|, |cos2t| <= 0.75 so the
    # small tanh outputs stay inside the quadratic part of smooth-L1
    theta = math.pi / 8 + int(rng.integers(0, 4)) * math.pi / 4 + float(rng.uniform(-0.05, 0.05))
    g = GraspRect(x=12.0, y=12.0, theta=theta, width=float(rng.integers(8, 16)), height=5.0)
    gt = encode_grasps([g], 24, 24)
    protos = random_protos(rng, (24, 24, k), scale=0.05)
    coeffs = random_coeffs(rng, k, scale=0.5)
    return protos, coeffs, gt


def suite_gradcheck(rng: np.random.Generator, n: int = 20, k: int = 16) -> SuiteResult:
    passed = 0
    for _ in range(n):
        protos, coeffs, gt = gradcheck_case(rng, k)
        err = grad_check(protos, coeffs, gt, LossWeights())
        if err < SELFTEST_GRADCHECK_TOL:
            passed += 1
        else:
            logger.debug(f"Gradient check error {err:.3e}")
    return SuiteResult("gradcheck", passed, n)


def suite_nms(rng: np.random.Generator, n: int = 500) -> SuiteResult:
    """Idempotence and survival of each class's best detection."""
    dummy = CoefficientSet.from_matrix(np.zeros((5, 1)))
    passed = 0
    for _ in range(n):
        dets = []
        for _ in range(int(rng.integers(1, 21))):
            x0, y0 = rng.uniform(0, 80, 2)
            dets.append(Detection(
                class_id=int(rng.integers(0, 3)),
                score=float(rng.uniform(0, 1)),
                box=Box(float(x0), float(y0), float(x0 + rng.uniform(5, 40)), float(y0 + rng.uniform(5, 40))),
                coeffs=dummy,
            ))
        kept = nms(dets)
        again = nms(kept)
        idempotent = [id(d) for d in again] == [id(d) for d in kept]
        best_ok = True
        for cls in {d.class_id for d in dets}:
            eligible = [d for d in dets if d.class_id == cls and d.score >= 0.05]
            if eligible:
                top = max(eligible, key=lambda d: d.score)
                best_ok &= any(d is top for d in kept)
        passed += int(idempotent and best_ok)
    return SuiteResult("nms", passed, n)


def suite_files(rng: np.random.Generator, n: int = 50) -> SuiteResult:
    """Tensor files are bit-exact and scene records survive a write/read cycle."""
    passed = 0
    for i in range(n):
        shape = tuple(int(s) for s in rng.integers(1, 9, size=int(rng.integers(2, 4))))
        t = rng.normal(size=shape).astype(np.float32)
        tensor_ok = np.array_equal(read_tensor(write_tensor(t)), t)

        g = _random_rect(rng, 64, 64, 10)
        scene = Scene(
            scene_id=f"s{i}", image_size=(128, 128),
            objects=[SceneObject(class_id=1, class_name="cup", box=Box(0, 0, 128, 128), grasps=[g.with_class(1)])],
        )
        back = parse_scenes(dump_scenes([scene]))
        passed += int(tensor_ok and back == [scene])
    return SuiteResult("files", passed, n)


def run_selftest(seed: int = 0, inject_iou_bias: float = 0.0) -> List[SuiteResult]:
    rng = np.random.default_rng(seed)
    suites: List[Callable[[], SuiteResult]] = [
        lambda: suite_iou_oracle(rng, bias=inject_iou_bias),
        lambda: suite_codec_roundtrip(rng),
        lambda: suite_assembly(rng),
        lambda: suite_gradcheck(rng),
        lambda: suite_nms(rng),
        lambda: suite_files(rng),
    ]
    results = []
    for suite in suites:
        result = suite()
        logger.info(str(result))
        results.append(result)
    return results
