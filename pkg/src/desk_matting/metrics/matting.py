"""Whole-image matting errors on float mattes in [0, 1].

SAD, Grad and Conn are reported divided by 1000; MSE is the plain
per-pixel mean.
"""

import math

import numpy as np
import scipy.ndimage
from skimage.measure import label as label_components

from desk_matting.models import RasterError, check_same_size

SCALE = 1000.0


def _pair(pred: np.ndarray, gt: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    pred = np.asarray(pred, dtype=np.float64)
    gt = np.asarray(gt, dtype=np.float64)
    if pred.ndim != 2 or gt.ndim != 2:
        raise RasterError(f"mattes must be 2-D, got {pred.shape} and {gt.shape}")
    check_same_size(pred, gt)
    return pred, gt


def sad(pred: np.ndarray, gt: np.ndarray) -> float:
    pred, gt = _pair(pred, gt)
    return float(np.abs(pred - gt).sum() / SCALE)


def mse(pred: np.ndarray, gt: np.ndarray) -> float:
    pred, gt = _pair(pred, gt)
    return float(((pred - gt) ** 2).mean())


def gaussian_derivative_kernels(sigma: float) -> tuple[np.ndarray, np.ndarray]:
    """L2-normalised first-derivative-of-Gaussian kernels (d/dx, d/dy), half-width ceil(3 sigma)."""
    half = int(math.ceil(3.0 * sigma))
    u = np.arange(-half, half + 1, dtype=np.float64)
    gauss = np.exp(-(u**2) / (2.0 * sigma**2)) / (sigma * math.sqrt(2.0 * math.pi))
    dgauss = -u * gauss / sigma**2
    hx = np.outer(gauss, dgauss)
    hx /= np.sqrt((hx**2).sum())
    return hx, hx.T.copy()


def gradient_magnitude(alpha: np.ndarray, sigma: float = 1.4) -> np.ndarray:
    hx, hy = gaussian_derivative_kernels(sigma)
    gx = scipy.ndimage.convolve(alpha, hx, mode="nearest")
    gy = scipy.ndimage.convolve(alpha, hy, mode="nearest")
    return np.sqrt(gx**2 + gy**2)


def grad_metric(pred: np.ndarray, gt: np.ndarray, sigma: float = 1.4) -> float:
    pred, gt = _pair(pred, gt)
    diff = gradient_magnitude(pred, sigma) - gradient_magnitude(gt, sigma)
    return float((diff**2).sum() / SCALE)


def largest_component(mask: np.ndarray) -> np.ndarray:
    """Largest 4-connected True region; all False when the mask is empty."""
    labels = label_components(mask, connectivity=1)
    if labels.max() == 0:
        return np.zeros_like(mask, dtype=bool)
    counts = np.bincount(labels.ravel())
    counts[0] = 0
    return labels == int(np.argmax(counts))


def connectivity_levels(pred: np.ndarray, gt: np.ndarray, step: float = 0.1) -> np.ndarray:
    """Per pixel, the last threshold at which it still belonged to the shared largest region."""
    levels = np.full(pred.shape, -1.0)
    n_steps = int(round(1.0 / step))
    for k in range(1, n_steps + 1):
        theta = k * step
        omega = largest_component((pred >= theta) & (gt >= theta))
        dropped = (levels == -1.0) & ~omega
        levels[dropped] = (k - 1) * step
    levels[levels == -1.0] = 1.0
    return levels


def conn_metric(
    pred: np.ndarray,
    gt: np.ndarray,
    step: float = 0.1,
    tolerance: float = 0.15,
) -> float:
    pred, gt = _pair(pred, gt)
    levels = connectivity_levels(pred, gt, step)
    d_pred = pred - levels
    d_gt = gt - levels
    phi_pred = 1.0 - d_pred * (d_pred >= tolerance)
    phi_gt = 1.0 - d_gt * (d_gt >= tolerance)
    return float(np.abs(phi_pred - phi_gt).sum() / SCALE)
