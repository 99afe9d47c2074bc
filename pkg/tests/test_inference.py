"""Tests for the post-network inference pipeline."""
import math

import numpy as np

from cli.fixtures import fit_scene, random_detections, random_protos
from core.config import CodecConfig
from core.constants import BENCH_DETECTIONS, BENCH_SIZE, DEFAULT_PROTOTYPES, THROUGHPUT_BUDGET_MS
from core.geometry import angle_delta
from core.grasp import Box, GraspRect
from core.scene import Scene, SceneObject
from synthesis.assembly import PrototypeStack
from synthesis.inference import detection_to_object, infer_scene
from utils.metrics import get_metrics
from utils.timing import timed


def _scene(objects) -> Scene:
    return Scene(scene_id="s0", image_size=(96, 96), objects=objects)


def _object(class_id, x, y, theta, width, box) -> SceneObject:
    grasp = GraspRect(x, y, theta, width, width / 2, class_id=class_id)
    return SceneObject(class_id=class_id, class_name=f"class{class_id}", box=Box(*box), grasps=[grasp])


def test_empty_detections_give_empty_scene():
    protos = PrototypeStack(np.zeros((10, 12, 4)))
    scene = infer_scene(protos, [], scene_id="empty")
    assert scene.objects == []
    assert scene.image_size == (10, 12)


def test_fitted_detection_decodes_its_grasp():
    gt = _scene([_object(3, 30, 40, 0.6, 24, (10, 20, 52, 62))])
    fixture = fit_scene(gt, np.random.default_rng(0), k=16)
    pred = infer_scene(fixture.protos, fixture.detections, scene_id="s0")

    assert len(pred.objects) == 1
    obj = pred.objects[0]
    g = obj.top_grasp
    assert obj.class_id == 3 and g.class_id == 3
    assert (g.x, g.y) == (30, 40)
    assert angle_delta(g.theta, gt.objects[0].grasps[0].theta) < 1e-6
    assert math.isclose(g.width, 24, rel_tol=1e-5)
    assert obj.instance_mask.dtype == np.uint8
    assert obj.instance_mask[40, 30] == 1 and obj.instance_mask[0, 0] == 0


def test_two_detections_stay_in_their_boxes():
    gt = _scene([
        _object(1, 20, 20, 0.3, 16, (5, 5, 36, 36)),
        _object(2, 70, 70, -1.0, 20, (50, 50, 92, 92)),
    ])
    fixture = fit_scene(gt, np.random.default_rng(1), k=16)
    pred = infer_scene(fixture.protos, fixture.detections)

    assert sorted(o.class_id for o in pred.objects) == [1, 2]
    for obj in pred.objects:
        g = obj.top_grasp
        assert g.class_id == obj.class_id
        assert obj.box.contains(g.x, g.y)


def test_scale_maps_back_to_image_resolution():
    gt = _scene([_object(1, 40, 30, 0.0, 20, (20, 15, 61, 46))])
    fixture = fit_scene(gt, np.random.default_rng(2), k=8)
    pred = infer_scene(fixture.protos, fixture.detections, scale=2.0)
    g = pred.objects[0].top_grasp
    assert (g.x, g.y) == (80, 60)
    assert math.isclose(g.width, 40, rel_tol=1e-5)
    assert pred.image_size == (192, 192)


def test_metrics_count_detections():
    metrics = get_metrics()
    metrics.reset()
    gt = _scene([_object(1, 40, 30, 0.0, 20, (20, 15, 61, 46))])
    fixture = fit_scene(gt, np.random.default_rng(3), k=8)
    infer_scene(fixture.protos, fixture.detections)
    assert metrics.detections_in == 1
    assert metrics.detections_kept == 1
    assert metrics.grasps_decoded == 1


def test_inference_leaves_detections_untouched():
    gt = _scene([
        _object(1, 20, 20, 0.3, 16, (5, 5, 36, 36)),
        _object(2, 70, 70, -1.0, 20, (50, 50, 92, 92)),
    ])
    fixture = fit_scene(gt, np.random.default_rng(4), k=16)
    before = [(d.class_id, d.score, d.box, d.coeffs.matrix().copy()) for d in fixture.detections]
    infer_scene(fixture.protos, fixture.detections)
    for det, (class_id, score, box, matrix) in zip(fixture.detections, before):
        assert det.masks is None
        assert (det.class_id, det.score, det.box) == (class_id, score, box)
        assert np.array_equal(det.coeffs.matrix(), matrix)


def test_assemble_and_decode_fit_the_frame_budget():
    """16 detections on 138x138x32 prototypes, best of five runs."""
    rng = np.random.default_rng(0)
    protos = random_protos(rng, (BENCH_SIZE, BENCH_SIZE, DEFAULT_PROTOTYPES))
    dets = random_detections(rng, BENCH_DETECTIONS, BENCH_SIZE, DEFAULT_PROTOTYPES)
    cfg = CodecConfig()
    best = math.inf
    for _ in range(5):
        with timed("assemble+decode") as elapsed:
            for d in dets:
                detection_to_object(protos, d, cfg)
        best = min(best, elapsed.ms)
    assert best < THROUGHPUT_BUDGET_MS
