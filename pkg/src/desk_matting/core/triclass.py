import cv2
import numpy as np

from desk_matting.models import FLOAT_TOLERANCE, LABEL_PNG_CODES, TriClass, validate_alpha

REFERENCE_SIZE = 512
REFERENCE_RADIUS = 15


def default_dilation_radius(size: int) -> int:
    """Transition dilation radius scaled from 15 px at 512 px."""
    return max(0, round(REFERENCE_RADIUS * size / REFERENCE_SIZE))


def derive_triclass(alpha: np.ndarray, dilation_radius: int) -> np.ndarray:
    """Derive FG/BG/TR labels from an alpha matte.

    TR is every pixel with 0 < alpha < 1, grown by a square structuring
    element of side 2 * radius + 1; the grown band overwrites FG and BG.
    """
    validate_alpha(alpha)
    if dilation_radius < 0:
        raise ValueError("dilation_radius must be non-negative")

    label = np.full(alpha.shape, TriClass.TR, dtype=np.uint8)
    label[alpha >= 1.0 - FLOAT_TOLERANCE] = TriClass.FG
    label[alpha <= FLOAT_TOLERANCE] = TriClass.BG

    if dilation_radius > 0:
        transition = (label == TriClass.TR).astype(np.uint8)
        side = 2 * dilation_radius + 1
        kernel = np.ones((side, side), np.uint8)
        grown = cv2.dilate(transition, kernel, iterations=1)
        label[grown.astype(bool)] = TriClass.TR
    return label


def label_to_png(label: np.ndarray) -> np.ndarray:
    """FG=255, TR=128, BG=0."""
    out = np.zeros(label.shape, dtype=np.uint8)
    for cls, code in LABEL_PNG_CODES.items():
        out[label == cls] = code
    return out


def label_from_png(raster: np.ndarray) -> np.ndarray:
    # Nearest code wins so lossy round trips still decode.
    label = np.full(raster.shape, TriClass.TR, dtype=np.uint8)
    label[raster >= 192] = TriClass.FG
    label[raster < 64] = TriClass.BG
    return label
