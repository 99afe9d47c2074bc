"""
graspkit command-line surface.

Subcommands: import, encode, decode, infer, eval, sweep, gradcheck, selftest,
fixture, bench. Exit codes: 0 success, 1 internal error or failed check,
2 user-input error.
"""
import argparse
import json
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

import numpy as np

from cli.fixtures import build_fixture, random_detections, random_protos, synthetic_scenes
from cli.runner import default_parallelism, map_parallel
from cli.selftest import gradcheck_case, run_selftest
from core.config import CodecConfig, LossWeights, MetricConfig, NmsConfig
from core.constants import (
    BENCH_DETECTIONS, BENCH_SIZE, DEFAULT_PROTOTYPES, GRADCHECK_STEP, JACQUARD_IMAGE_SIZE, OCID_IMAGE_SIZE,
    SELFTEST_GRADCHECK_TOL, SWEEP_ANGLES_DEG, SWEEP_IOUS, THROUGHPUT_BUDGET_MS,
)
from core.errors import ConfigError, GraspKitError, OutOfBoundsError
from core.grasp import Box
from core.scene import Scene, SceneObject
from evaluation.report import evaluate
from evaluation.sweep import sweep_to_csv, threshold_sweep
from ingest.detections import SceneDetections, read_detections, write_detections
from ingest.formats import import_jacquard, import_ocid, parse_class_map
from ingest.scenes import load_instance_masks, read_scenes, write_scenes
from ingest.tensors import load_tensor, save_tensor
from synthesis.codec import GraspMaps, decode_grasps, encode_grasps
from synthesis.gradcheck import grad_check
from synthesis.inference import detection_to_object, infer_scene
from utils.metrics import get_metrics
from utils.timing import timed

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2


def _positive_int(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {value}")
    return n


def _seed(value: str) -> int:
    n = int(value)
    if not 0 <= n < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {value}")
    return n


def _existing(path: Path) -> Path:
    if not path.exists():
        raise GraspKitError(f"{path}: not found")
    return path


def _require_out(args: argparse.Namespace) -> Path:
    if args.out is None:
        raise ConfigError(f"{args.command} needs --out")
    return args.out


def _codec_cfg(args: argparse.Namespace) -> CodecConfig:
    overrides = {
        "width_max": args.width_max,
        "center_fraction": args.center_fraction,
        "q_min": args.q_min,
    }
    cfg = replace(CodecConfig(), **{k: v for k, v in overrides.items() if v is not None})
    return replace(cfg, raw_sigmoid=True) if getattr(args, "raw_sigmoid", False) else cfg


def _metric_cfg(args: argparse.Namespace) -> MetricConfig:
    overrides = {
        "iou_thr": args.iou_thr,
        "angle_thr": math.radians(args.angle_thr) if args.angle_thr is not None else None,
        "top_n": args.top_n,
    }
    cfg = replace(MetricConfig(), **{k: v for k, v in overrides.items() if v is not None})
    return replace(cfg, require_class=False) if args.class_agnostic else cfg


def _nms_cfg(args: argparse.Namespace) -> NmsConfig:
    overrides = {"iou_thr": args.nms_iou, "score_thr": args.score_thr, "top_n": args.top_n}
    return replace(NmsConfig(), **{k: v for k, v in overrides.items() if v is not None})


def _parallelism(args: argparse.Namespace) -> int:
    return args.parallelism if args.parallelism is not None else default_parallelism()


def _write_text(out: Optional[Path], text: str) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")


# --- import ---------------------------------------------------------------

def cmd_import(args: argparse.Namespace) -> int:
    in_dir = _existing(args.in_dir)
    out = _require_out(args)
    files = sorted(p for p in in_dir.iterdir() if p.is_file() and p.suffix == ".txt" and p.name != "classes.txt")
    if not files:
        raise GraspKitError(f"{in_dir}: no annotation files found")

    if args.format == "ocid":
        class_map_path = args.class_map or in_dir / "classes.txt"
        class_map = parse_class_map(_existing(class_map_path).read_text(encoding="utf-8"))
        size = tuple(args.image_size) if args.image_size else OCID_IMAGE_SIZE

        def parse(path: Path) -> Scene:
            return import_ocid(path.read_text(encoding="utf-8"), class_map, path.stem, size,
                               source=path.name, opening_first=args.opening_first)
    else:
        size = tuple(args.image_size) if args.image_size else JACQUARD_IMAGE_SIZE

        def parse(path: Path) -> Scene:
            return import_jacquard(path.read_text(encoding="utf-8"), path.stem, size, source=path.name)

    scenes = map_parallel(parse, files, _parallelism(args))
    if args.class_agnostic:
        scenes = [s.class_agnostic() for s in scenes]
    get_metrics().scenes_read += len(scenes)
    get_metrics().scenes_written += write_scenes(out, scenes)

    n_objects = sum(len(s.objects) for s in scenes)
    n_grasps = sum(s.grasp_count for s in scenes)
    print(f"imported {len(scenes)} scenes, {n_objects} objects, {n_grasps} grasps")
    return EXIT_OK


# --- encode / decode ------------------------------------------------------

def cmd_encode(args: argparse.Namespace) -> int:
    scenes = read_scenes(_existing(args.scenes))
    out = _require_out(args)
    out.mkdir(parents=True, exist_ok=True)
    cfg = _codec_cfg(args)
    get_metrics().scenes_read += len(scenes)

    def encode(scene: Scene) -> int:
        for i, obj in enumerate(scene.objects):
            try:
                maps = encode_grasps(obj.grasps, scene.height, scene.width, cfg)
            except OutOfBoundsError as e:
                raise OutOfBoundsError(f"scene {scene.scene_id} object {i}: grasp centers outside image",
                                       e.offending) from e
            save_tensor(out / scene.scene_id / f"{i}.gkt", maps.to_tensor())
        return sum(len(o.grasps) for o in scene.objects)

    encoded = map_parallel(encode, scenes, _parallelism(args))
    get_metrics().grasps_encoded += sum(encoded)
    logger.info(f"Encoded {sum(len(s.objects) for s in scenes)} objects into {out}",
                extra={"command": "encode"})
    return EXIT_OK


def _tensor_index(path: Path) -> int:
    try:
        return int(path.stem)
    except ValueError:
        raise GraspKitError(f"{path}: tensor files must be named <object_index>.gkt") from None


def cmd_decode(args: argparse.Namespace) -> int:
    tensor_dir = _existing(args.tensor_dir)
    out = _require_out(args)
    cfg = _codec_cfg(args)
    reference = {s.scene_id: s for s in read_scenes(_existing(args.scenes))} if args.scenes else {}
    scene_dirs = sorted(p for p in tensor_dir.iterdir() if p.is_dir())

    def decode(scene_dir: Path) -> Scene:
        ref = reference.get(scene_dir.name)
        objects = []
        size = None
        for path in sorted(scene_dir.glob("*.gkt"), key=_tensor_index):
            i = _tensor_index(path)
            maps = GraspMaps.from_tensor(load_tensor(path))
            size = maps.shape
            h, w = size
            if ref is not None and i < len(ref.objects):
                class_id, class_name, box = ref.objects[i].class_id, ref.objects[i].class_name, ref.objects[i].box
            else:
                class_id, class_name, box = 0, "object", Box(0, 0, w, h)
            grasps = decode_grasps(maps, box, top_n=args.top_n or 1, cfg=cfg, class_id=class_id)
            objects.append(SceneObject(class_id=class_id, class_name=class_name, box=box, grasps=grasps))
        if ref is not None:
            size = ref.image_size
        return Scene(scene_id=scene_dir.name, image_size=size or (0, 0), objects=objects)

    scenes = map_parallel(decode, scene_dirs, _parallelism(args))
    get_metrics().grasps_decoded += sum(s.grasp_count for s in scenes)
    get_metrics().scenes_written += write_scenes(out, scenes)
    return EXIT_OK


# --- infer ----------------------------------------------------------------

def cmd_infer(args: argparse.Namespace) -> int:
    records = read_detections(_existing(args.detections), _existing(args.protos) if args.protos else None)
    out = _require_out(args)
    cfg = _codec_cfg(args)
    nms_cfg = _nms_cfg(args)
    get_metrics().scenes_read += len(records)

    def infer(sd: SceneDetections) -> Scene:
        if not sd.detections:
            return Scene(scene_id=sd.scene_id, image_size=sd.image_size, objects=[])
        scene = infer_scene(sd.protos, sd.detections, cfg, nms_cfg, scene_id=sd.scene_id, scale=args.scale)
        scene = replace(scene, image_size=sd.image_size)
        if args.masks_dir is not None:
            for i, obj in enumerate(scene.objects):
                ref = f"{sd.scene_id}/{i}.gkt"
                save_tensor(args.masks_dir / ref, obj.instance_mask.astype(np.float32))
                obj.instance_mask_ref = ref
        return scene

    scenes = map_parallel(infer, records, _parallelism(args))
    get_metrics().scenes_written += write_scenes(out, scenes)
    return EXIT_OK


# --- eval / sweep ---------------------------------------------------------

def _load_pair(args: argparse.Namespace):
    pred = read_scenes(_existing(args.pred))
    gt = read_scenes(_existing(args.gt))
    if getattr(args, "pred_masks", None):
        load_instance_masks(pred, _existing(args.pred_masks))
    if getattr(args, "gt_masks", None):
        load_instance_masks(gt, _existing(args.gt_masks))
    get_metrics().scenes_read += len(pred) + len(gt)
    if args.class_agnostic:
        pred = [s.class_agnostic() for s in pred]
        gt = [s.class_agnostic() for s in gt]
    return pred, gt


def cmd_eval(args: argparse.Namespace) -> int:
    pred, gt = _load_pair(args)
    report = evaluate(pred, gt, _metric_cfg(args))
    _write_text(args.out, json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    logger.info(f"image accuracy {report.image_accuracy:.4f}, object accuracy {report.object_accuracy:.4f}",
                extra={"command": "eval"})
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    pred, gt = _load_pair(args)
    rows = threshold_sweep(pred, gt, args.ious, args.angles, _metric_cfg(args))
    _write_text(args.out, sweep_to_csv(rows))
    return EXIT_OK


# --- checks ---------------------------------------------------------------

def cmd_gradcheck(args: argparse.Namespace) -> int:
    rng = np.random.default_rng(args.seed)
    weights = LossWeights.from_file(_existing(args.weights)) if args.weights else LossWeights()
    worst = 0.0
    for _ in range(args.trials):
        protos, coeffs, gt = gradcheck_case(rng, args.k)
        worst = max(worst, grad_check(protos, coeffs, gt, weights, step=args.step, full_image=args.full_image))
    print(f"gradcheck: max relative error {worst:.3e} over {args.trials} trials (k={args.k})")
    return EXIT_OK if worst < args.tol else EXIT_INTERNAL


def cmd_selftest(args: argparse.Namespace) -> int:
    results = run_selftest(seed=args.seed, inject_iou_bias=args.inject_iou_bias)
    for r in results:
        print(r)
    failed = [r.name for r in results if not r.ok]
    print("selftest: FAILED " + ", ".join(failed) if failed else "selftest: all suites passed")
    return EXIT_INTERNAL if failed else EXIT_OK


# --- fixture / bench ------------------------------------------------------

def cmd_fixture(args: argparse.Namespace) -> int:
    out = _require_out(args)
    out.mkdir(parents=True, exist_ok=True)
    cfg = _codec_cfg(args)
    scenes = synthetic_scenes(args.scenes, args.seed, size=args.size)
    records = build_fixture(scenes, args.seed, k=args.k, cfg=cfg)
    write_scenes(out / "gt.jsonl", scenes)
    write_detections(out / "detections.jsonl", records)
    get_metrics().scenes_written += len(scenes)
    print(f"wrote {len(scenes)} scenes to {out}")
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    rng = np.random.default_rng(args.seed)
    cfg = _codec_cfg(args)
    protos = random_protos(rng, (args.size, args.size, args.k))
    dets = random_detections(rng, args.detections, args.size, args.k)

    best = math.inf
    for _ in range(args.repeats):
        with timed("assemble+decode") as elapsed:
            for d in dets:
                detection_to_object(protos, d, cfg)
        best = min(best, elapsed.ms)
    fps = 1000.0 / best if best > 0 else math.inf
    print(f"assemble+decode: {best:.2f} ms per image ({args.detections} detections, "
          f"{args.size}x{args.size}x{args.k}), {fps:.1f} FPS")
    if args.max_ms is not None and best > args.max_ms:
        logger.error(f"bench: {best:.2f} ms exceeds the {args.max_ms:g} ms budget", extra={"command": "bench"})
        return EXIT_INTERNAL
    return EXIT_OK


# --- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, help="output file or directory")
    common.add_argument("--parallelism", type=_positive_int,
                        help="worker pool size (default: $GRASPKIT_PARALLELISM or 1)")
    common.add_argument("--seed", type=_seed, default=0)

    codec = argparse.ArgumentParser(add_help=False)
    codec.add_argument("--width-max", type=float)
    codec.add_argument("--center-fraction", type=float)
    codec.add_argument("--q-min", type=float)
    codec.add_argument("--raw-sigmoid", action="store_true", help="quality = sigmoid(count)")

    metric = argparse.ArgumentParser(add_help=False)
    metric.add_argument("--iou-thr", type=float)
    metric.add_argument("--angle-thr", type=float, help="degrees")
    metric.add_argument("--class-agnostic", action="store_true")

    nms_opts = argparse.ArgumentParser(add_help=False)
    nms_opts.add_argument("--nms-iou", type=float)
    nms_opts.add_argument("--score-thr", type=float)

    top_n = argparse.ArgumentParser(add_help=False)
    top_n.add_argument("--top-n", type=_positive_int)

    parser = argparse.ArgumentParser(prog="graspkit", description="Instance-wise grasp synthesis toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("import", parents=[common], help="convert dataset annotations to scenes")
    p.add_argument("in_dir", type=Path)
    p.add_argument("--format", choices=("jacquard", "ocid"), required=True)
    p.add_argument("--class-map", type=Path, help="ocid class map (default: <in_dir>/classes.txt)")
    p.add_argument("--image-size", type=_positive_int, nargs=2, metavar=("H", "W"))
    p.add_argument("--class-agnostic", action="store_true")
    p.add_argument("--opening-first", action="store_true", help="ocid: first corner edge is the jaw opening")
    p.set_defaults(func=cmd_import)

    p = sub.add_parser("encode", parents=[common, codec], help="write per-object grasp map tensors")
    p.add_argument("scenes", type=Path)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", parents=[common, codec, top_n], help="decode grasp map tensors")
    p.add_argument("tensor_dir", type=Path)
    p.add_argument("--scenes", type=Path, help="scenes supplying image size, boxes and classes")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("infer", parents=[common, codec, nms_opts, top_n], help="detections to predicted scenes")
    p.add_argument("detections", type=Path)
    p.add_argument("--protos", type=Path, help="prototype tensor shared by every scene")
    p.add_argument("--masks-dir", type=Path, help="write binarized instance masks here")
    p.add_argument("--scale", type=float, default=1.0, help="prototype to image resolution factor")
    p.set_defaults(func=cmd_infer)

    for name, func, help_text in (("eval", cmd_eval, "accuracy report"), ("sweep", cmd_sweep, "threshold grid")):
        p = sub.add_parser(name, parents=[common, metric, top_n], help=help_text)
        p.add_argument("pred", type=Path)
        p.add_argument("gt", type=Path)
        p.set_defaults(func=func)
        if name == "eval":
            p.add_argument("--pred-masks", type=Path, help="root of prediction instance_mask_ref paths")
            p.add_argument("--gt-masks", type=Path, help="root of ground-truth instance_mask_ref paths")
        if name == "sweep":
            p.add_argument("--ious", type=float, nargs="+", default=list(SWEEP_IOUS))
            p.add_argument("--angles", type=float, nargs="+", default=list(SWEEP_ANGLES_DEG), help="degrees")

    p = sub.add_parser("gradcheck", parents=[common], help="finite-difference check of the grasp loss")
    p.add_argument("--trials", type=_positive_int, default=20)
    p.add_argument("-k", type=_positive_int, default=16)
    p.add_argument("--step", type=float, default=GRADCHECK_STEP)
    p.add_argument("--tol", type=float, default=SELFTEST_GRADCHECK_TOL)
    p.add_argument("--weights", type=Path, help="JSON loss weights")
    p.add_argument("--full-image", action="store_true")
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("selftest", parents=[common], help="run the built-in property suites")
    p.add_argument("--inject-iou-bias", type=float, default=0.0, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("fixture", parents=[common, codec], help="write a synthetic scenes + detections set")
    p.add_argument("--scenes", type=_positive_int, default=10)
    p.add_argument("--size", type=_positive_int, default=96)
    p.add_argument("-k", type=_positive_int, default=DEFAULT_PROTOTYPES)
    p.set_defaults(func=cmd_fixture)

    p = sub.add_parser("bench", parents=[common, codec], help="time assemble+decode for one image")
    p.add_argument("--size", type=_positive_int, default=BENCH_SIZE)
    p.add_argument("-k", type=_positive_int, default=DEFAULT_PROTOTYPES)
    p.add_argument("--detections", type=_positive_int, default=BENCH_DETECTIONS)
    p.add_argument("--repeats", type=_positive_int, default=10)
    p.add_argument("--max-ms", type=float, help=f"exit 1 when slower (budget: {THROUGHPUT_BUDGET_MS:g} ms)")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one subcommand and map failures to exit codes."""
    args = build_parser().parse_args(argv)
    try:
        with timed(args.command):
            return args.func(args)
    except (ValueError, OSError) as e:
        # GraspKitError is a ValueError; both mean bad input or paths
        logger.error(f"{args.command}: {e}", extra={"command": args.command})
        return EXIT_USAGE
    except Exception as e:
        logger.error(f"{args.command}: internal error: {e}", extra={"command": args.command})
        logger.debug("Traceback", exc_info=True)
        return EXIT_INTERNAL
    finally:
        get_metrics().log()
