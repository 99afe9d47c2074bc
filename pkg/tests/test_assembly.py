"""Tests for prototype mask assembly."""
import numpy as np
import pytest
from scipy.special import expit

from core.constants import QUALITY, STANDARD_CHANNELS, Activation
from core.errors import DimensionMismatchError
from core.grasp import Box
from synthesis.assembly import (
    CoefficientSet, PrototypeStack, assemble, assemble_cropped, crop_mask, pre_activation,
)


def _coeffs(k: int, **rows) -> CoefficientSet:
    channels = {name: np.zeros(k) for name in STANDARD_CHANNELS}
    channels.update({name: np.asarray(v, dtype=float) for name, v in rows.items()})
    return CoefficientSet(channels)


def test_zero_coefficients():
    protos = PrototypeStack(np.random.default_rng(0).normal(size=(6, 7, 4)))
    m = assemble(protos, _coeffs(4))
    for x in (m.instance, m.quality, m.width):
        assert np.allclose(x, 0.5)
    for x in (m.sin2t, m.cos2t):
        assert np.allclose(x, 0.0)


def test_single_prototype_logistic():
    protos = PrototypeStack(np.ones((3, 3, 1)))
    m = assemble(protos, _coeffs(1, **{QUALITY: [2.0]}))
    assert np.allclose(m.quality, 0.8807970779778823)


def test_activation_ranges():
    rng = np.random.default_rng(1)
    protos = PrototypeStack(rng.normal(size=(10, 10, 8)))
    m = assemble(protos, CoefficientSet.from_matrix(rng.normal(size=(5, 8))))
    for x in (m.instance, m.quality, m.width):
        assert np.all((x >= 0) & (x <= 1))
    for x in (m.sin2t, m.cos2t):
        assert np.all(np.abs(x) <= 1)


def test_pre_activation_is_linear():
    rng = np.random.default_rng(2)
    protos = PrototypeStack(rng.normal(size=(8, 9, 5)))
    c1 = CoefficientSet.from_matrix(rng.normal(size=(5, 5)))
    c2 = CoefficientSet.from_matrix(rng.normal(size=(5, 5)))
    both = CoefficientSet.from_matrix(c1.matrix() + c2.matrix())
    assert np.allclose(pre_activation(protos, both), pre_activation(protos, c1) + pre_activation(protos, c2),
                       atol=1e-9)


def test_k_mismatch_rejected():
    protos = PrototypeStack(np.zeros((4, 4, 3)))
    with pytest.raises(DimensionMismatchError):
        assemble(protos, _coeffs(5))


def test_coefficient_lengths_must_agree():
    channels = {name: np.zeros(3) for name in STANDARD_CHANNELS}
    channels[QUALITY] = np.zeros(4)
    with pytest.raises(DimensionMismatchError):
        CoefficientSet(channels)


def test_extra_channel_is_assembled():
    rng = np.random.default_rng(4)
    protos = PrototypeStack(rng.normal(size=(5, 5, 3)))
    vec = np.array([1.0, -2.0, 0.5])
    coeffs = _coeffs(3).with_extra("affordance", vec, Activation.IDENTITY)
    m = assemble(protos, coeffs)
    assert np.allclose(m.extras["affordance"], protos.data @ vec)
    assert coeffs.names[-1] == "affordance"


def test_extra_channel_needs_activation():
    channels = {name: np.zeros(2) for name in STANDARD_CHANNELS}
    channels["grip"] = np.zeros(2)
    with pytest.raises(ValueError):
        CoefficientSet(channels)


def test_crop_examples():
    ones = np.ones((6, 6))
    assert np.array_equal(crop_mask(ones, Box(0, 0, 6, 6)), ones)
    assert not crop_mask(ones, Box(3, 3, 3, 3)).any()
    cropped = crop_mask(ones, Box(2, 2, 4, 4))
    assert cropped.sum() == 4
    assert cropped[2:4, 2:4].all()


def test_crop_clamps_box_outside_canvas():
    assert crop_mask(np.ones((4, 4)), Box(-5, -5, 2, 10)).sum() == 8


def test_sigmoid_channel_values():
    rng = np.random.default_rng(5)
    protos = PrototypeStack(rng.normal(size=(4, 4, 2)))
    coeffs = CoefficientSet.from_matrix(rng.normal(size=(5, 2)))
    m = assemble(protos, coeffs)
    assert np.allclose(m.width, expit(protos.data @ coeffs.channels["width"]))


@pytest.mark.parametrize("s", [0.25, 3.0, -2.0])
def test_assembly_is_bilinear_in_protos_and_coeffs(s):
    """Scaling P by s and C by 1/s leaves every assembled mask unchanged."""
    rng = np.random.default_rng(6)
    protos = PrototypeStack(rng.normal(size=(9, 11, 6)))
    coeffs = CoefficientSet.from_matrix(rng.normal(size=(5, 6)))
    base = assemble(protos, coeffs)
    scaled = assemble(PrototypeStack(protos.data * s), CoefficientSet.from_matrix(coeffs.matrix() / s))
    for name in STANDARD_CHANNELS:
        assert np.allclose(getattr(scaled, name), getattr(base, name), rtol=0, atol=1e-9)


@pytest.mark.parametrize("box", [
    Box(3, 4, 17, 12),
    Box(0, 0, 20, 16),
    Box(-6, 10, 5, 40),
    Box(7.5, 2.2, 7.5, 9.0),
])
def test_cropped_assembly_matches_full_assembly(box):
    rng = np.random.default_rng(7)
    protos = PrototypeStack(rng.normal(size=(16, 20, 5)))
    coeffs = CoefficientSet.from_matrix(rng.normal(size=(5, 5)))
    full = assemble(protos, coeffs).cropped(box)
    local = assemble_cropped(protos, coeffs, box)
    for name in STANDARD_CHANNELS:
        assert np.allclose(getattr(local, name), getattr(full, name), rtol=0, atol=1e-12)


def test_cropped_assembly_rejects_k_mismatch():
    with pytest.raises(DimensionMismatchError):
        assemble_cropped(PrototypeStack(np.zeros((4, 4, 3))), _coeffs(5), Box(0, 0, 4, 4))
