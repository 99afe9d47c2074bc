"""
GKT1 tensor files.

Layout (little-endian): magic b"GKT1", uint32 ndim, ndim x uint32 dims,
then prod(dims) float32 values, row-major with the last dimension fastest.
"""
import math
from pathlib import Path
from typing import Union

import numpy as np

from core.constants import TENSOR_MAGIC
from core.errors import TensorFormatError

_U32 = np.dtype('<u4')
_F32 = np.dtype('<f4')
_U32_MAX = 0xFFFFFFFF
_MAX_ELEMENTS = (1 << 62) // _F32.itemsize


def write_tensor(tensor: np.ndarray) -> bytes:
    """Serialize a 2D or 3D array."""
    arr = np.asarray(tensor)
    if arr.ndim not in (2, 3):
        raise TensorFormatError(f"GKT1 tensors must be 2D or 3D, got ndim={arr.ndim}")
    if any(d > _U32_MAX for d in arr.shape):
        raise TensorFormatError(f"dim overflow: {arr.shape} exceeds uint32")
    header = np.array((arr.ndim, *arr.shape), dtype=_U32).tobytes()
    return TENSOR_MAGIC + header + np.ascontiguousarray(arr, dtype=_F32).tobytes()


def read_tensor(data: bytes) -> np.ndarray:
    """Parse GKT1 bytes into a float32 array."""
    if len(data) < 8:
        raise TensorFormatError(f"truncated header: {len(data)} bytes")
    if data[:4] != TENSOR_MAGIC:
        raise TensorFormatError(f"bad magic {data[:4]!r}, expected {TENSOR_MAGIC!r}")
    ndim = int(np.frombuffer(data, dtype=_U32, count=1, offset=4)[0])
    if ndim not in (2, 3):
        raise TensorFormatError(f"unsupported ndim {ndim}")
    header = 8 + 4 * ndim
    if len(data) < header:
        raise TensorFormatError("truncated header: missing dims")
    dims = tuple(int(d) for d in np.frombuffer(data, dtype=_U32, count=ndim, offset=8))
    count = math.prod(dims)
    if count > _MAX_ELEMENTS:
        raise TensorFormatError(f"dim overflow: {dims}")
    expected = header + count * _F32.itemsize
    if len(data) < expected:
        raise TensorFormatError(f"truncated payload: {len(data) - header} of {count * _F32.itemsize} bytes")
    if len(data) > expected:
        raise TensorFormatError(f"{len(data) - expected} trailing bytes after payload")
    return np.frombuffer(data, dtype=_F32, count=count, offset=header).reshape(dims).astype(np.float32)


def load_tensor(path: Union[str, Path]) -> np.ndarray:
    return read_tensor(Path(path).read_bytes())


def save_tensor(path: Union[str, Path], tensor: np.ndarray) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(write_tensor(tensor))
