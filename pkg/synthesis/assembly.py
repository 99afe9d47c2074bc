"""
Prototype mask assembly.
Per-detection coefficient sets weight a shared prototype bank into instance
and grasp masks: M = Activation(P C^T), then masks are cropped by the box.
"""
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit

from core.constants import (
    CHANNEL_ACTIVATIONS, COS2T, INSTANCE, QUALITY, SIN2T, STANDARD_CHANNELS, WIDTH, Activation,
)
from core.errors import DimensionMismatchError
from core.grasp import Box

_ACTIVATE = {
    Activation.SIGMOID: expit,
    Activation.TANH: np.tanh,
    Activation.IDENTITY: lambda z: z,
}


@dataclass(frozen=True)
class PrototypeStack:
    """Prototype bank, h x w x k."""
    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 3:
            raise DimensionMismatchError(f"prototypes must be h x w x k, got shape {self.data.shape}")
        if self.data.shape[2] < 1:
            raise DimensionMismatchError("prototype stack needs at least one prototype")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("prototype values must be finite")

    @property
    def h(self) -> int:
        return self.data.shape[0]

    @property
    def w(self) -> int:
        return self.data.shape[1]

    @property
    def k(self) -> int:
        return self.data.shape[2]


@dataclass(frozen=True)
class CoefficientSet:
    """
    Named coefficient vectors for one detection.

    The five standard channels always exist; extra channels (e.g. affordances)
    carry their own activation and are assembled but never decoded.
    """
    channels: Dict[str, np.ndarray]
    extra_activations: Dict[str, Activation] = field(default_factory=dict)

    def __post_init__(self):
        missing = [c for c in STANDARD_CHANNELS if c not in self.channels]
        if missing:
            raise DimensionMismatchError(f"coefficient set lacks channels {missing}")
        lengths = {np.asarray(v).shape for v in self.channels.values()}
        if len(lengths) != 1 or len(next(iter(lengths))) != 1:
            raise DimensionMismatchError(f"coefficient vectors must share one length, got {sorted(lengths)}")
        for name in self.channels:
            if name not in CHANNEL_ACTIVATIONS and name not in self.extra_activations:
                raise ValueError(f"extra channel {name!r} needs a declared activation")
        if not all(np.all(np.isfinite(v)) for v in self.channels.values()):
            raise ValueError("coefficients must be finite")

    @property
    def k(self) -> int:
        return len(next(iter(self.channels.values())))

    @property
    def names(self) -> Tuple[str, ...]:
        extras = tuple(n for n in self.channels if n not in STANDARD_CHANNELS)
        return STANDARD_CHANNELS + extras

    def activation(self, name: str) -> Activation:
        return CHANNEL_ACTIVATIONS.get(name) or self.extra_activations[name]

    def matrix(self) -> np.ndarray:
        """N x k matrix in `names` order."""
        return np.stack([np.asarray(self.channels[n], dtype=np.float64) for n in self.names])

    @classmethod
    def from_matrix(
        cls,
        matrix: np.ndarray,
        extra_names: Sequence[str] = (),
        extra_activations: Optional[Mapping[str, Activation]] = None,
    ) -> 'CoefficientSet':
        """Build from an N x k matrix whose rows follow STANDARD_CHANNELS then extra_names."""
        matrix = np.asarray(matrix, dtype=np.float64)
        names = STANDARD_CHANNELS + tuple(extra_names)
        if matrix.ndim != 2 or matrix.shape[0] != len(names):
            raise DimensionMismatchError(f"expected a {len(names)} x k coefficient matrix, got {matrix.shape}")
        return cls(
            channels={n: matrix[i] for i, n in enumerate(names)},
            extra_activations=dict(extra_activations or {}),
        )

    def with_extra(self, name: str, vector: np.ndarray, activation: Activation) -> 'CoefficientSet':
        channels = dict(self.channels)
        channels[name] = np.asarray(vector, dtype=np.float64)
        activations = dict(self.extra_activations)
        activations[name] = activation
        return CoefficientSet(channels, activations)


@dataclass
class MaskSet:
    """Assembled masks for one detection."""
    instance: np.ndarray
    quality: np.ndarray
    sin2t: np.ndarray
    cos2t: np.ndarray
    width: np.ndarray
    extras: Dict[str, np.ndarray] = field(default_factory=dict)

    def cropped(self, box: Box) -> 'MaskSet':
        return MaskSet(
            instance=crop_mask(self.instance, box),
            quality=crop_mask(self.quality, box),
            sin2t=crop_mask(self.sin2t, box),
            cos2t=crop_mask(self.cos2t, box),
            width=crop_mask(self.width, box),
            extras={n: crop_mask(m, box) for n, m in self.extras.items()},
        )


@dataclass
class Detection:
    """
    One detected object as exported by an external detector.

    Attributes:
        class_id: Predicted class
        score: Confidence in [0, 1]
        box: Bounding box in prototype resolution
        coeffs: Coefficient set for assembly
        class_name: Optional readable class
        masks: Assembled masks, for callers that keep them alongside the detection
    """
    class_id: int
    score: float
    box: Box
    coeffs: CoefficientSet
    class_name: str = ""
    masks: Optional[MaskSet] = field(default=None, repr=False)

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"detection score must be in [0, 1], got {self.score}")


def pre_activation(protos: PrototypeStack, coeffs: CoefficientSet) -> np.ndarray:
    """Linear part P C^T, shaped h x w x N in `coeffs.names` order."""
    _check_k(protos, coeffs)
    return protos.data @ coeffs.matrix().T


def _check_k(protos: PrototypeStack, coeffs: CoefficientSet) -> None:
    if coeffs.k != protos.k:
        raise DimensionMismatchError(f"coefficient length {coeffs.k} != prototype count {protos.k}")


def _mask_set(out: Dict[str, np.ndarray]) -> MaskSet:
    return MaskSet(
        instance=out.pop(INSTANCE),
        quality=out.pop(QUALITY),
        sin2t=out.pop(SIN2T),
        cos2t=out.pop(COS2T),
        width=out.pop(WIDTH),
        extras=out,
    )


def assemble(protos: PrototypeStack, coeffs: CoefficientSet) -> MaskSet:
    """Assemble every channel and apply its activation."""
    z = pre_activation(protos, coeffs)
    return _mask_set({
        name: _ACTIVATE[coeffs.activation(name)](z[:, :, i])
        for i, name in enumerate(coeffs.names)
    })


def assemble_cropped(protos: PrototypeStack, coeffs: CoefficientSet, box: Box) -> MaskSet:
    """
    Same masks as assemble(protos, coeffs).cropped(box), but P C^T and the
    activations are evaluated only on the pixels inside the box.
    """
    _check_k(protos, coeffs)
    rows, cols = box.clamp(protos.h, protos.w).pixel_slices()
    z = protos.data[rows, cols] @ coeffs.matrix().T
    out = {}
    for i, name in enumerate(coeffs.names):
        full = np.zeros((protos.h, protos.w))
        full[rows, cols] = _ACTIVATE[coeffs.activation(name)](z[:, :, i])
        out[name] = full
    return _mask_set(out)


def crop_mask(mask: np.ndarray, box: Box) -> np.ndarray:
    """Zero everything outside the half-open box; shape is unchanged."""
    h, w = mask.shape
    rows, cols = box.clamp(h, w).pixel_slices()
    out = np.zeros_like(mask)
    out[rows, cols] = mask[rows, cols]
    return out
