"""Tests for GKT1 tensor files."""
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from core.errors import TensorFormatError
from ingest.tensors import load_tensor, read_tensor, save_tensor, write_tensor


def test_two_by_two_round_trip_is_bit_exact():
    t = np.array([[1.5, -0.0], [np.float32(1e-30), 3.25]], dtype=np.float32)
    back = read_tensor(write_tensor(t))
    assert back.dtype == np.float32
    assert back.tobytes() == t.tobytes()


@given(arrays(np.float32, st.lists(st.integers(1, 5), min_size=2, max_size=3).map(tuple),
              elements=st.floats(-1e6, 1e6, width=32)))
def test_round_trip_property(t):
    assert np.array_equal(read_tensor(write_tensor(t)), t)


def test_header_layout():
    data = write_tensor(np.zeros((2, 3), dtype=np.float32))
    assert data[:4] == b"GKT1"
    assert np.frombuffer(data[4:16], dtype="<u4").tolist() == [2, 2, 3]
    assert len(data) == 16 + 6 * 4


def test_bad_magic():
    data = b"GKT2" + write_tensor(np.zeros((2, 2)))[4:]
    with pytest.raises(TensorFormatError, match="bad magic"):
        read_tensor(data)


def test_truncated_payload():
    data = write_tensor(np.ones((3, 3)))
    with pytest.raises(TensorFormatError, match="truncated"):
        read_tensor(data[:-4])
    with pytest.raises(TensorFormatError, match="truncated"):
        read_tensor(data[:6])


def test_trailing_bytes():
    with pytest.raises(TensorFormatError, match="trailing"):
        read_tensor(write_tensor(np.ones((2, 2))) + b"\x00")


def test_bad_ndim():
    with pytest.raises(TensorFormatError):
        write_tensor(np.zeros(4))
    bogus = b"GKT1" + np.array([4, 1, 1, 1, 1], dtype="<u4").tobytes()
    with pytest.raises(TensorFormatError, match="ndim"):
        read_tensor(bogus)


def test_dim_overflow():
    bogus = b"GKT1" + np.array([3, 0xFFFFFFFF, 0xFFFFFFFF, 0xFFFFFFFF], dtype="<u4").tobytes()
    with pytest.raises(TensorFormatError, match="overflow"):
        read_tensor(bogus)


def test_save_and_load(tmp_path):
    t = np.arange(24, dtype=np.float32).reshape(2, 3, 4)
    path = tmp_path / "nested" / "t.gkt"
    save_tensor(path, t)
    assert np.array_equal(load_tensor(path), t)
