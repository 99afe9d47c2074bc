"""Tests for the analytic loss gradient."""
import numpy as np
import pytest

from cli.selftest import gradcheck_case
from core.config import LossWeights
from core.grasp import Box, GraspRect
from synthesis.assembly import CoefficientSet, PrototypeStack
from synthesis.codec import encode_grasps
from synthesis.gradcheck import grad_check, grasp_loss_grad, grasp_loss_value

SMOOTH_L1_ONLY = LossWeights(a_p=0, a_q=0)


def _small_case(seed: int, k: int = 4):
    rng = np.random.default_rng(seed)
    gt = encode_grasps([GraspRect(8, 8, 0.39, 10, 5)], 16, 16)
    protos = PrototypeStack(rng.normal(0, 0.05, (16, 16, k)))
    coeffs = CoefficientSet.from_matrix(rng.normal(0, 0.5, (5, k)))
    return protos, coeffs, gt


def test_quadratic_region_is_exact():
    protos, coeffs, gt = _small_case(0)
    assert grad_check(protos, coeffs, gt, SMOOTH_L1_ONLY) < 1e-6


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_full_loss_random_k16(seed):
    protos, coeffs, gt = gradcheck_case(np.random.default_rng(seed), 16)
    assert grad_check(protos, coeffs, gt) < 1e-4


def test_zero_prototypes_zero_gradient():
    _, coeffs, gt = _small_case(1)
    protos = PrototypeStack(np.zeros((16, 16, 4)))
    _, grad = grasp_loss_grad(protos, coeffs, gt)
    assert not grad.any()
    assert grad_check(protos, coeffs, gt) == 0


def test_gradient_with_box_crop_and_full_image():
    protos, coeffs, gt = _small_case(2)
    box = Box(2, 3, 14, 13)
    assert grad_check(protos, coeffs, gt, SMOOTH_L1_ONLY, box=box) < 1e-6
    assert grad_check(protos, coeffs, gt, SMOOTH_L1_ONLY, full_image=True) < 1e-5


def test_reported_loss_matches_value():
    protos, coeffs, gt = _small_case(3)
    loss, grad = grasp_loss_grad(protos, coeffs, gt)
    assert loss == pytest.approx(grasp_loss_value(protos, coeffs, gt, LossWeights()))
    assert grad.shape == (5, 4)
    # instance coefficients never touch the grasp loss
    assert not grad[0].any()


def test_step_must_be_positive():
    protos, coeffs, gt = _small_case(4)
    with pytest.raises(ValueError):
        grad_check(protos, coeffs, gt, step=0)
