"""
Analytic gradient of the grasp loss through assembly, and a central
finite-difference checker for it.
"""
import logging
from typing import Optional, Tuple

import numpy as np
from scipy.special import expit

from core.config import LossWeights
from core.constants import BCE_EPS, COS2T, GRADCHECK_STEP, QUALITY, SIN2T, WIDTH
from core.grasp import Box
from synthesis.assembly import CoefficientSet, PrototypeStack, assemble, crop_mask, pre_activation
from synthesis.codec import GraspMaps
from synthesis.loss import grasp_loss

logger = logging.getLogger(__name__)


def _huber_grad(d: np.ndarray) -> np.ndarray:
    return np.where(np.abs(d) < 1.0, d, np.sign(d))


def grasp_loss_value(
    protos: PrototypeStack,
    coeffs: CoefficientSet,
    gt: GraspMaps,
    w: LossWeights,
    box: Optional[Box] = None,
    full_image: bool = False,
) -> float:
    return grasp_loss(assemble(protos, coeffs), gt, w, box=box, full_image=full_image).total


def grasp_loss_grad(
    protos: PrototypeStack,
    coeffs: CoefficientSet,
    gt: GraspMaps,
    w: LossWeights = LossWeights(),
    box: Optional[Box] = None,
    full_image: bool = False,
) -> Tuple[float, np.ndarray]:
    """
    Loss and its gradient w.r.t. every coefficient.

    Returns:
        (loss, N x k gradient in coeffs.names order)
    """
    z = pre_activation(protos, coeffs)
    h, wd = gt.shape
    n = h * wd
    names = coeffs.names
    crop = np.ones((h, wd)) if box is None else crop_mask(np.ones((h, wd)), box)
    support = np.ones((h, wd), dtype=bool) if full_image else gt.position > 0
    n_support = np.count_nonzero(support)

    dz = np.zeros_like(z)

    # quality: BCE against position plus smooth-L1 against quality
    q = expit(z[:, :, names.index(QUALITY)])
    qc = q * crop
    t = gt.position
    p = np.clip(qc, BCE_EPS, 1.0 - BCE_EPS)
    unclipped = (qc > BCE_EPS) & (qc < 1.0 - BCE_EPS)
    d_bce = np.where(unclipped, -t / p + (1.0 - t) / (1.0 - p), 0.0) / n
    d_q = _huber_grad(qc - gt.quality) / n
    dz[:, :, names.index(QUALITY)] = (w.a_p * d_bce + w.a_q * d_q) * q * (1.0 - q) * crop

    if n_support:
        for name, weight, target, squash in (
            (SIN2T, w.a_sin, gt.sin2t, "tanh"),
            (COS2T, w.a_cos, gt.cos2t, "tanh"),
            (WIDTH, w.a_w, gt.width, "sigmoid"),
        ):
            zi = z[:, :, names.index(name)]
            if squash == "tanh":
                a = np.tanh(zi)
                da = 1.0 - a * a
            else:
                a = expit(zi)
                da = a * (1.0 - a)
            d = _huber_grad(a * crop - target) * support / n_support
            dz[:, :, names.index(name)] = weight * d * da * crop

    grad = np.tensordot(dz, protos.data, axes=([0, 1], [0, 1]))
    loss = grasp_loss_value(protos, coeffs, gt, w, box, full_image)
    return loss, grad


def grad_check(
    protos: PrototypeStack,
    coeffs: CoefficientSet,
    gt: GraspMaps,
    w: LossWeights = LossWeights(),
    step: float = GRADCHECK_STEP,
    box: Optional[Box] = None,
    full_image: bool = False,
) -> float:
    """
    Compare the analytic gradient with central differences.

    Returns:
        max over coefficients of |g_analytic - g_fd| / max(1e-8, |g_fd|)
    """
    if step <= 0:
        raise ValueError(f"step must be > 0, got {step}")
    _, analytic = grasp_loss_grad(protos, coeffs, gt, w, box, full_image)
    base = coeffs.matrix()
    worst = 0.0
    for i in range(base.shape[0]):
        for j in range(base.shape[1]):
            plus = base.copy()
            minus = base.copy()
            plus[i, j] += step
            minus[i, j] -= step
            f_plus = grasp_loss_value(protos, _rebuild(coeffs, plus), gt, w, box, full_image)
            f_minus = grasp_loss_value(protos, _rebuild(coeffs, minus), gt, w, box, full_image)
            fd = (f_plus - f_minus) / (2.0 * step)
            err = abs(analytic[i, j] - fd) / max(1e-8, abs(fd))
            worst = max(worst, err)
    logger.debug(f"grad_check k={coeffs.k} max_rel_err={worst:.3e}")
    return worst


def _rebuild(coeffs: CoefficientSet, matrix: np.ndarray) -> CoefficientSet:
    extra = [n for n in coeffs.names if n in coeffs.extra_activations]
    return CoefficientSet.from_matrix(matrix, extra, coeffs.extra_activations)
