"""
Detections files - exported detector output consumed by inference.

JSON-lines, one scene per line:
    {"scene_id": ..., "image_size": [h, w], "protos": "p.gkt",
     "detections": [{"class_id": 1, "class_name": "cup", "score": 0.9,
                     "box": [x0, y0, x1, y1], "coeffs": "c.gkt"}]}
Tensor paths are relative to the detections file. Prototypes are h x w x k,
coefficients N x k with rows in STANDARD_CHANNELS order.
"""
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Tuple, Union

from core.errors import DimensionMismatchError, SchemaError
from core.grasp import Box
from ingest.tensors import load_tensor, save_tensor
from synthesis.assembly import CoefficientSet, Detection, PrototypeStack

logger = logging.getLogger(__name__)


@dataclass
class SceneDetections:
    scene_id: str
    image_size: Tuple[int, int]
    protos: Optional[PrototypeStack]
    detections: List[Detection]


def _require(d: dict, key: str, line: int, path: str = ""):
    if not isinstance(d, dict) or key not in d:
        raise SchemaError(f"missing field {key!r}", line, f"{path}.{key}" if path else key)
    return d[key]


def _parse_detection(d: dict, base: Path, k: Optional[int], line: int, path: str) -> Detection:
    coeffs = CoefficientSet.from_matrix(load_tensor(base / _require(d, "coeffs", line, path)))
    if k is not None and coeffs.k != k:
        raise DimensionMismatchError(f"line {line}: {path} has k={coeffs.k}, prototypes have k={k}")
    try:
        return Detection(
            class_id=int(_require(d, "class_id", line, path)),
            score=float(_require(d, "score", line, path)),
            box=Box.from_list(_require(d, "box", line, path)),
            coeffs=coeffs,
            class_name=str(d.get("class_name", "")),
        )
    except (TypeError, ValueError) as e:
        raise SchemaError(str(e), line, path) from e


def read_detections(path: Union[str, Path], protos_override: Optional[Path] = None) -> List[SceneDetections]:
    """Load every scene of a detections file, resolving tensor paths."""
    path = Path(path)
    base = path.parent
    shared = PrototypeStack(load_tensor(protos_override).astype(float)) if protos_override else None
    out = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            record = json.loads(raw)
        except json.JSONDecodeError as e:
            raise SchemaError(f"invalid JSON: {e.msg}", lineno) from e
        scene_id = str(_require(record, "scene_id", lineno))
        size = _require(record, "image_size", lineno)
        protos = shared
        if record.get("protos"):
            protos = PrototypeStack(load_tensor(base / record["protos"]).astype(float))
        dets = _require(record, "detections", lineno)
        if dets and protos is None:
            raise SchemaError("detections given without prototypes", lineno, "protos")
        k = protos.k if protos is not None else None
        out.append(SceneDetections(
            scene_id=scene_id,
            image_size=(int(size[0]), int(size[1])),
            protos=protos,
            detections=[
                _parse_detection(d, base, k, lineno, f"detections[{i}]") for i, d in enumerate(dets)
            ],
        ))
    logger.debug(f"Read detections for {len(out)} scenes from {path}")
    return out


def write_detections(path: Union[str, Path], scenes: Iterable[SceneDetections]) -> None:
    """Write a detections file plus its tensors next to it."""
    path = Path(path)
    base = path.parent
    lines = []
    for sd in scenes:
        protos_rel = None
        if sd.protos is not None:
            protos_rel = f"{sd.scene_id}/protos.gkt"
            save_tensor(base / protos_rel, sd.protos.data)
        dets = []
        for i, d in enumerate(sd.detections):
            coeffs_rel = f"{sd.scene_id}/det{i}.gkt"
            save_tensor(base / coeffs_rel, d.coeffs.matrix())
            dets.append({
                "class_id": d.class_id, "class_name": d.class_name, "score": d.score,
                "box": d.box.as_list(), "coeffs": coeffs_rel,
            })
        lines.append(json.dumps({
            "scene_id": sd.scene_id,
            "image_size": list(sd.image_size),
            "protos": protos_rel,
            "detections": dets,
        }, sort_keys=True))
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
