"""Tests for dataset-level evaluation and threshold sweeps."""
import csv
import io
import math

import numpy as np
import pytest

from core.config import MetricConfig
from core.errors import DimensionMismatchError, SceneMismatchError
from core.grasp import Box, GraspRect
from core.scene import Scene, SceneObject
from evaluation.metric import mask_iou
from evaluation.report import evaluate
from evaluation.sweep import sweep_to_csv, threshold_sweep


def obj(class_id, box, grasp, score=None) -> SceneObject:
    x, y, theta, w, h = grasp
    return SceneObject(class_id=class_id, class_name=f"c{class_id}", box=Box(*box),
                       grasps=[GraspRect(x, y, theta, w, h, class_id=class_id)], score=score)


def micro_fixture():
    """
    Four scenes, hand-checked at default thresholds:
      s1 perfect; s2 small offset (valid); s3 best detection rotated 8 degrees
      (valid) next to a bad low-score one; s4 best detection rotated 45 degrees
      (invalid) next to a perfect low-score one.
    Image-level 3/4, object-level 4/6.
    """
    gt = [
        Scene("s1", (200, 200), [obj(1, (10, 10, 60, 60), (35, 35, 0.0, 30, 15))]),
        Scene("s2", (200, 200), [obj(2, (20, 20, 80, 80), (50, 50, 0.5, 40, 20))]),
        Scene("s3", (200, 200), [
            obj(1, (0, 0, 50, 50), (25, 25, 0.0, 20, 10)),
            obj(2, (100, 100, 150, 150), (125, 125, 1.0, 20, 10)),
        ]),
        Scene("s4", (200, 200), [
            obj(1, (10, 10, 60, 60), (35, 35, 0.0, 30, 15)),
            obj(3, (100, 10, 150, 60), (125, 35, 0.3, 30, 15)),
        ]),
    ]
    pred = [
        Scene("s1", (200, 200), [obj(1, (10, 10, 60, 60), (35, 35, 0.0, 30, 15), 0.9)]),
        Scene("s2", (200, 200), [obj(2, (20, 20, 80, 80), (52, 49, 0.55, 40, 20), 0.8)]),
        Scene("s3", (200, 200), [
            obj(2, (100, 100, 150, 150), (125, 125, 1.0 + math.radians(8), 20, 10), 0.95),
            obj(1, (0, 0, 50, 50), (5, 45, 0.0, 20, 10), 0.4),
        ]),
        Scene("s4", (200, 200), [
            obj(1, (10, 10, 60, 60), (35, 35, math.pi / 4, 30, 15), 0.9),
            obj(3, (100, 10, 150, 60), (125, 35, 0.3, 30, 15), 0.5),
        ]),
    ]
    return pred, gt


def test_perfect_predictions():
    _, gt = micro_fixture()
    report = evaluate(gt, gt)
    assert report.image_accuracy == 1.0
    assert report.object_accuracy == 1.0


def test_micro_fixture_accuracy():
    pred, gt = micro_fixture()
    report = evaluate(pred, gt)
    assert report.image_accuracy == 0.75
    assert report.object_accuracy == pytest.approx(4 / 6)
    assert report.per_scene == {"s1": True, "s2": True, "s3": True, "s4": False}
    assert report.counts["matched"] == 6
    assert report.counts["false_positives"] == 0


def test_empty_predictions():
    _, gt = micro_fixture()
    empty = [Scene(s.scene_id, s.image_size, []) for s in gt]
    report = evaluate(empty, gt)
    assert report.image_accuracy == 0.0
    assert report.object_accuracy == 0.0
    assert report.counts["missed"] == 6


def test_scene_order_does_not_matter():
    pred, gt = micro_fixture()
    assert evaluate(list(reversed(pred)), gt).to_dict() == evaluate(pred, gt).to_dict()


def test_mismatched_scene_ids():
    pred, gt = micro_fixture()
    with pytest.raises(SceneMismatchError):
        evaluate(pred[:3], gt)
    with pytest.raises(SceneMismatchError):
        evaluate(pred + pred[:1], gt + gt[:1])


def test_class_agnostic_mode():
    pred, gt = micro_fixture()
    relabelled = [Scene(s.scene_id, s.image_size, [
        obj(9, o.box.as_list(), (g.x, g.y, g.theta, g.width, g.height), o.score)
        for o in s.objects for g in o.grasps[:1]
    ]) for s in pred]
    assert evaluate(relabelled, gt).object_accuracy == 0.0
    assert evaluate(relabelled, gt, MetricConfig(require_class=False)).object_accuracy == pytest.approx(4 / 6)


def test_report_dict_is_sorted():
    pred, gt = micro_fixture()
    d = evaluate(pred, gt).to_dict()
    assert list(d["per_scene"]) == ["s1", "s2", "s3", "s4"]
    assert d["per_object"][0] == {"scene_id": "s1", "object": 0, "status": "valid"}


def test_sweep_grid_and_monotonicity():
    pred, gt = micro_fixture()
    rows = threshold_sweep(pred, gt)
    assert len(rows) == 18
    grid = {(r.iou_thr, r.angle_thr_deg): r for r in rows}
    ious = sorted({r.iou_thr for r in rows})
    angles = sorted({r.angle_thr_deg for r in rows})
    assert ious == [0.25, 0.30, 0.35]
    assert angles == [5, 10, 15, 20, 25, 30]
    for a in angles:
        for lo, hi in zip(ious, ious[1:]):
            assert grid[(hi, a)].image_acc <= grid[(lo, a)].image_acc
            assert grid[(hi, a)].object_acc <= grid[(lo, a)].object_acc
    for i in ious:
        for lo, hi in zip(angles, angles[1:]):
            assert grid[(i, hi)].image_acc >= grid[(i, lo)].image_acc
            assert grid[(i, hi)].object_acc >= grid[(i, lo)].object_acc
    # the 8 degree prediction only counts from 10 degrees on
    assert grid[(0.25, 5)].image_acc == 0.5
    assert grid[(0.25, 10)].image_acc == 0.75


def test_sweep_perfect_predictions_all_ones():
    _, gt = micro_fixture()
    assert all(r.image_acc == 1.0 and r.object_acc == 1.0 for r in threshold_sweep(gt, gt))


def test_sweep_csv_layout():
    pred, gt = micro_fixture()
    text = sweep_to_csv(threshold_sweep(pred, gt))
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["iou_thr", "angle_thr", "image_acc", "object_acc", "n_scenes", "n_objects"]
    assert len(rows) == 19
    assert rows[1][:2] == ["0.25", "5"]
    assert rows[-1][:2] == ["0.35", "30"]
    assert rows[1][4:] == ["4", "6"]


@pytest.mark.parametrize("drop", [set(), {"s1"}, {"s3", "s4"}, {"s1", "s2", "s3", "s4"}])
def test_every_ground_truth_object_is_counted_once(drop):
    pred, gt = micro_fixture()
    pred = [Scene(s.scene_id, s.image_size, [] if s.scene_id in drop else s.objects) for s in pred]
    report = evaluate(pred, gt)
    c = report.counts
    assert c["valid_objects"] + c["invalid_objects"] + c["missed"] == c["objects"] == 6
    assert c["matched"] == c["valid_objects"] + c["invalid_objects"]
    keys = [(s, i) for s, i, _ in report.per_object]
    assert sorted(keys) == sorted((s.scene_id, i) for s in gt for i in range(len(s.objects)))
    assert len(set(keys)) == len(keys)


def _square_mask(x0, y0, size=20):
    m = np.zeros((200, 200), dtype=np.uint8)
    m[y0:y0 + size, x0:x0 + size] = 1
    return m


def test_mask_iou_examples():
    a = _square_mask(0, 0)
    assert mask_iou(a, a) == 1.0
    assert mask_iou(a, _square_mask(100, 100)) == 0.0
    assert mask_iou(a, _square_mask(10, 0)) == pytest.approx(1 / 3)
    empty = np.zeros((200, 200), dtype=np.uint8)
    assert mask_iou(empty, empty) == 0.0
    with pytest.raises(DimensionMismatchError):
        mask_iou(a, np.zeros((10, 10)))


def test_instance_mask_counts_are_diagnostic_only():
    pred, gt = micro_fixture()
    baseline = evaluate(pred, gt)
    assert baseline.counts["mask_pairs"] == 0

    gt[0].objects[0].instance_mask = _square_mask(10, 10)
    pred[0].objects[0].instance_mask = _square_mask(10, 10)
    gt[1].objects[0].instance_mask = _square_mask(20, 20)
    pred[1].objects[0].instance_mask = _square_mask(120, 120)
    report = evaluate(pred, gt)
    assert report.counts["mask_pairs"] == 2
    assert report.counts["mask_matches"] == 1
    assert report.image_accuracy == baseline.image_accuracy
    assert report.object_accuracy == baseline.object_accuracy
    assert report.to_dict()["counts"]["mask_matches"] == 1
